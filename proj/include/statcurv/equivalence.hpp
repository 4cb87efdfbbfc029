#pragma once

// Changes of statistical structure.
//
// Conformal-projective change by (phi, psi):
//   g'(X,Y)   = e^{phi+psi} g(X,Y)
//   nabla'_X Y = nabla_X Y + dphi(X) Y + dphi(Y) X - g(X,Y) grad_g psi
//
// alpha-conformal change by (alpha, phi):
//   g' = e^phi g
//   g(nabla'_X Y, Z) = g(nabla_X Y, Z) - (1+alpha)/2 dphi(Z) g(X,Y)
//                      + (1-alpha)/2 [dphi(X) g(Y,Z) + dphi(Y) g(X,Z)]
//
// Both are composed at the jet level, so derivatives of the new structure stay
// exact. The result keeps a declarative spec only when the parameters are
// constant (then the change is a constant rescaling of g).

#include "statcurv/structure.hpp"

#include <string>

namespace statcurv {

struct CpParams {
  Expr phi;
  Expr psi;
};

struct AlphaParams {
  double alpha = 0.0;
  Expr phi;
};

StatisticalStructure cp_transform(const StatisticalStructure& s, const CpParams& params);
StatisticalStructure alpha_transform(const StatisticalStructure& s, const AlphaParams& params);

/// A 1-conformal change as a conformal-projective one: (phi, psi) = (0, phi).
/// Throws SpecError unless alpha == 1.
CpParams one_conformal_embed(const AlphaParams& params);

}  // namespace statcurv
