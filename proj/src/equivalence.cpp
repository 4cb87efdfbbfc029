#include "statcurv/equivalence.hpp"

#include "statcurv/errors.hpp"

#include <cmath>
#include <memory>

namespace statcurv {
namespace {

void check_dimension(const StatisticalStructure& s, const Expr& e, const char* what) {
  if (e.empty()) throw SpecError(std::string(what) + " is empty");
  if (e.dimension() != s.dimension()) {
    throw SpecError(std::string(what) + " is written over dimension " + std::to_string(e.dimension()) +
                    ", structure has " + std::to_string(s.dimension()));
  }
}

/// Multiplies every expression string by a positive constant.
std::string scaled(const std::string& expr, double factor) {
  return format_number(factor) + "*(" + expr + ")";
}

/// Spec for the structure (e^c g, nabla) when the change is a constant rescale.
std::optional<ManifoldSpec> rescaled_spec(const StatisticalStructure& s, double factor, const std::string& label) {
  if (!s.spec()) return std::nullopt;
  ManifoldSpec spec = *s.spec();
  spec.name = label;
  for (auto& c : spec.metric.components) c = scaled(c, factor);
  // Gamma = Gamma_LC - 1/2 g^{-1} C is unchanged when g and C scale together.
  if (spec.connection.kind == ConnectionKind::Cubic) {
    for (auto& c : spec.connection.components) c = scaled(c, factor);
  }
  spec.provenance["rescaled_by"] = format_number(factor);
  return spec;
}

double constant_value(const Expr& e) {
  const std::vector<double> origin(static_cast<std::size_t>(e.dimension()), 0.0);
  return eval_value(e, origin);
}

}  // namespace

StatisticalStructure cp_transform(const StatisticalStructure& s, const CpParams& params) {
  check_dimension(s, params.phi, "phi");
  check_dimension(s, params.psi, "psi");
  const int n = s.dimension();
  auto base = std::make_shared<StatisticalStructure>(s);
  const Expr phi = params.phi;
  const Expr psi = params.psi;

  FieldEvaluator eval = [base, phi, psi, n](std::span<const double> p) {
    FieldJets in = base->evaluate(p);
    const Jet2 phi_j = eval_jet2(phi, p);
    const Jet2 psi_j = eval_jet2(psi, p);
    const Jet2 factor = exp(phi_j + psi_j);

    const auto inv = inverse_metric_jets(in.metric);
    std::vector<Jet1> dphi, grad_psi;
    for (int i = 0; i < n; ++i) dphi.push_back(partial(phi_j, i));
    for (int k = 0; k < n; ++k) {
      Jet1 acc = Jet1::constant(0.0, n);
      for (int l = 0; l < n; ++l) acc += inv(k, l) * partial(psi_j, l);
      grad_psi.push_back(std::move(acc));
    }

    FieldJets out;
    out.metric = MetricJets(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out.metric(i, j) = factor * in.metric(i, j);
    }
    out.connection = std::move(in.connection);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Jet1& c = out.connection(k, i, j);
          if (k == j) c += dphi[i];
          if (k == i) c += dphi[j];
          c -= truncate(in.metric(i, j)) * grad_psi[k];
        }
      }
    }
    return out;
  };

  const std::string label = "cp(" + s.label() + "; phi=" + phi.to_string() + ", psi=" + psi.to_string() + ")";
  std::optional<ManifoldSpec> spec;
  if (phi.is_constant() && psi.is_constant()) {
    spec = rescaled_spec(s, std::exp(constant_value(phi) + constant_value(psi)), label);
  }
  return StatisticalStructure(label, n, s.domain(), std::move(eval), std::move(spec));
}

StatisticalStructure alpha_transform(const StatisticalStructure& s, const AlphaParams& params) {
  check_dimension(s, params.phi, "phi");
  if (!std::isfinite(params.alpha)) throw SpecError("alpha must be finite");
  const int n = s.dimension();
  auto base = std::make_shared<StatisticalStructure>(s);
  const Expr phi = params.phi;
  const double a_plus = (1.0 + params.alpha) / 2.0;
  const double a_minus = (1.0 - params.alpha) / 2.0;

  FieldEvaluator eval = [base, phi, a_plus, a_minus, n](std::span<const double> p) {
    FieldJets in = base->evaluate(p);
    const Jet2 phi_j = eval_jet2(phi, p);
    const Jet2 factor = exp(phi_j);

    const auto inv = inverse_metric_jets(in.metric);
    std::vector<Jet1> dphi, grad_phi;
    for (int i = 0; i < n; ++i) dphi.push_back(partial(phi_j, i));
    for (int k = 0; k < n; ++k) {
      Jet1 acc = Jet1::constant(0.0, n);
      for (int l = 0; l < n; ++l) acc += inv(k, l) * dphi[l];
      grad_phi.push_back(std::move(acc));
    }

    FieldJets out;
    out.metric = MetricJets(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out.metric(i, j) = factor * in.metric(i, j);
    }
    out.connection = std::move(in.connection);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Jet1& c = out.connection(k, i, j);
          c -= a_plus * (truncate(in.metric(i, j)) * grad_phi[k]);
          if (k == j) c += a_minus * dphi[i];
          if (k == i) c += a_minus * dphi[j];
        }
      }
    }
    return out;
  };

  const std::string label =
      "alpha(" + s.label() + "; alpha=" + format_number(params.alpha) + ", phi=" + phi.to_string() + ")";
  std::optional<ManifoldSpec> spec;
  if (phi.is_constant()) spec = rescaled_spec(s, std::exp(constant_value(phi)), label);
  return StatisticalStructure(label, n, s.domain(), std::move(eval), std::move(spec));
}

CpParams one_conformal_embed(const AlphaParams& params) {
  if (params.alpha != 1.0) {
    throw SpecError("only alpha = 1 embeds into conformal-projective changes, got alpha = " +
                    format_number(params.alpha));
  }
  if (params.phi.empty()) throw SpecError("phi is empty");
  return {Expr::constant(0.0, params.phi.dimension()), params.phi};
}

}  // namespace statcurv
