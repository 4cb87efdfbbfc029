"""Curvature and conformal-projective flatness of statistical manifolds.

Structures are loaded from ``gallery:<name>`` references or spec files::

    >>> import statcurv
    >>> s = statcurv.Structure("gallery:poincare_ball4")
    >>> s.flatness()[0]
    'flat'
"""

from ._statcurv import (
    DomainError,
    Error,
    NonSpdMetric,
    ParseError,
    Structure,
    UnsupportedDimension,
    canonical,
    gallery_names,
    gallery_spec,
    jet,
    run_cli,
)

__all__ = [
    "DomainError",
    "Error",
    "NonSpdMetric",
    "ParseError",
    "Structure",
    "UnsupportedDimension",
    "canonical",
    "gallery_names",
    "gallery_spec",
    "jet",
    "run_cli",
]
