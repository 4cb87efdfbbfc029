#include "statcurv/cli.hpp"
#include "statcurv/conformal_projective.hpp"
#include "statcurv/equivalence.hpp"
#include "statcurv/errors.hpp"
#include "statcurv/gallery.hpp"
#include "statcurv/sampling.hpp"
#include "statcurv/spec_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace statcurv;

namespace {

template <int Rank>
py::array_t<double> to_numpy(const TensorArray<double, Rank>& t) {
  std::vector<py::ssize_t> shape(Rank, t.dimension());
  py::array_t<double> out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

std::vector<double> point(const StatisticalStructure& s, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != s.dimension()) {
    throw SpecError("point has " + std::to_string(p.size()) + " coordinates, structure has dimension " +
                    std::to_string(s.dimension()));
  }
  return p;
}

Which which_of(bool dual) { return dual ? Which::Dual : Which::Primal; }

StatisticalStructure from_ref(const std::string& ref) { return build_structure(resolve_spec(ref)); }

py::dict validation_dict(const ValidationReport& r) {
  py::dict d;
  d["points"] = r.points;
  d["spd"] = r.spd;
  d["torsion"] = r.torsion;
  d["codazzi"] = r.codazzi;
  d["dual_torsion"] = r.dual_torsion;
  d["tolerance"] = r.tolerance;
  d["errors"] = r.errors;
  d["pass"] = r.pass();
  return d;
}

}  // namespace

PYBIND11_MODULE(_statcurv, m) {
  m.doc() = "Curvature and conformal-projective flatness of statistical manifolds";

  // Translators run newest first, so the base class goes in first.
  const auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UnsupportedDimension>(m, "UnsupportedDimension", base.ptr());
  py::register_exception<NonSpdMetric>(m, "NonSpdMetric", base.ptr());

  m.def(
      "jet",
      [](const std::string& expr, const std::vector<double>& p) {
        const Jet2 j = eval_jet2(parse_expression(expr, static_cast<int>(p.size())), p);
        return py::make_tuple(j.value, Vector(j.grad), Matrix(j.hess));
      },
      py::arg("expr"), py::arg("point"), "Value, gradient and Hessian of an expression at a point.");
  m.def(
      "canonical", [](const std::string& expr, int n) { return parse_expression(expr, n).to_string(); },
      py::arg("expr"), py::arg("dimension"));

  py::class_<StatisticalStructure>(m, "Structure")
      .def(py::init(&from_ref), py::arg("ref"), "Load from 'gallery:<name>' or a spec file path.")
      .def_static(
          "from_json", [](const std::string& text) { return build_structure(parse_spec(text)); }, py::arg("text"))
      .def_property_readonly("dimension", &StatisticalStructure::dimension)
      .def_property_readonly("label", &StatisticalStructure::label)
      .def_property_readonly("domain",
                             [](const StatisticalStructure& s) {
                               std::vector<std::pair<double, double>> d;
                               for (const auto& iv : s.domain()) d.emplace_back(iv.lo, iv.hi);
                               return d;
                             })
      .def("spec_json",
           [](const StatisticalStructure& s) -> std::optional<std::string> {
             if (!s.spec()) return std::nullopt;
             return dump_spec(*s.spec());
           })
      .def("sample", [](const StatisticalStructure& s, std::size_t count) { return halton_points(s.domain(), count); },
           py::arg("count") = 20)
      .def(
          "validate",
          [](const StatisticalStructure& s, int points, double tol) {
            return validation_dict(validate_structure(s, halton_points(s.domain(), static_cast<std::size_t>(points)), tol));
          },
          py::arg("points") = 20, py::arg("tol") = kStructureTolerance)
      .def("metric", [](const StatisticalStructure& s, const std::vector<double>& p) { return metric_at(s, point(s, p)).first; })
      .def("connection",
           [](const StatisticalStructure& s, const std::vector<double>& p, bool dual) {
             const PointTensors t = point_tensors(s, point(s, p));
             return to_numpy(dual ? t.gamma_star : t.gamma);
           },
           py::arg("point"), py::arg("dual") = false)
      .def("cubic", [](const StatisticalStructure& s, const std::vector<double>& p) { return to_numpy(cubic_at(s, point(s, p))); })
      .def("riemann",
           [](const StatisticalStructure& s, const std::vector<double>& p, bool dual) {
             return to_numpy(riemann_at(s, point(s, p), which_of(dual)));
           },
           py::arg("point"), py::arg("dual") = false)
      .def("ricci",
           [](const StatisticalStructure& s, const std::vector<double>& p, bool dual) {
             return ricci_at(s, point(s, p), which_of(dual));
           },
           py::arg("point"), py::arg("dual") = false)
      .def("scalar",
           [](const StatisticalStructure& s, const std::vector<double>& p, bool dual) {
             return scalar_at(s, point(s, p), which_of(dual));
           },
           py::arg("point"), py::arg("dual") = false)
      .def("L",
           [](const StatisticalStructure& s, const std::vector<double>& p, bool dual) {
             return L_at(s, point(s, p), which_of(dual));
           },
           py::arg("point"), py::arg("dual") = false)
      .def("W",
           [](const StatisticalStructure& s, const std::vector<double>& p, bool dual) {
             const CPTensors t = cp_tensors_at(s, point(s, p));
             return to_numpy(dual ? t.W_star : t.W);
           },
           py::arg("point"), py::arg("dual") = false)
      .def("W_direct", [](const StatisticalStructure& s, const std::vector<double>& p) { return to_numpy(W_direct_at(s, point(s, p))); })
      .def(
          "constant_curvature_fit",
          [](const StatisticalStructure& s, int points) {
            const auto fit = constant_curvature_fit(s, halton_points(s.domain(), static_cast<std::size_t>(points)));
            return py::make_tuple(fit.K, fit.residual);
          },
          py::arg("points") = 20)
      .def(
          "identities",
          [](const StatisticalStructure& s, int points, int trials, std::uint64_t seed) {
            const auto r = identity_residuals(s, points, trials, seed);
            py::dict d;
            d["sigma_eq"] = r.sigma_eq;
            d["rr_star"] = r.rr_star;
            d["ww_star"] = r.ww_star ? py::cast(*r.ww_star) : py::none();
            d["w_forms"] = r.w_forms ? py::cast(*r.w_forms) : py::none();
            return d;
          },
          py::arg("points") = kDefaultPoints, py::arg("trials") = kDefaultTrials, py::arg("seed") = 1)
      .def(
          "flatness",
          [](const StatisticalStructure& s, int points, int trials, double tol, std::uint64_t seed) {
            const auto r = flatness_report(s, points, trials, tol, seed);
            return py::make_tuple(std::string(to_string(r.verdict)), r.max_residual);
          },
          py::arg("points") = kDefaultPoints, py::arg("trials") = kDefaultTrials, py::arg("tol") = kFlatnessTolerance,
          py::arg("seed") = 1, "Returns (verdict, max normalized residual).")
      .def("dual", &dual_structure)
      .def(
          "cp_transform",
          [](const StatisticalStructure& s, const std::string& phi, const std::string& psi) {
            const int n = s.dimension();
            return cp_transform(s, {parse_expression(phi, n), parse_expression(psi, n)});
          },
          py::arg("phi"), py::arg("psi"))
      .def(
          "alpha_transform",
          [](const StatisticalStructure& s, double alpha, const std::string& phi) {
            return alpha_transform(s, {alpha, parse_expression(phi, s.dimension())});
          },
          py::arg("alpha"), py::arg("phi"))
      .def("__repr__", [](const StatisticalStructure& s) {
        return "<Structure " + s.label() + " n=" + std::to_string(s.dimension()) + ">";
      });

  m.def("gallery_names", &list_names);
  m.def(
      "gallery_spec", [](const std::string& name) { return dump_spec(lookup(name).spec); }, py::arg("name"));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
