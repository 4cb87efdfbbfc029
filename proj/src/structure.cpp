#include "statcurv/structure.hpp"

#include "statcurv/errors.hpp"
#include "statcurv/sampling.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <memory>

namespace statcurv {

const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::ClosedForm: return "closed_form";
    case MetricKind::Conformal: return "conformal";
    case MetricKind::Potential: return "potential";
  }
  return "?";
}

const char* to_string(ConnectionKind kind) {
  switch (kind) {
    case ConnectionKind::Flat: return "flat";
    case ConnectionKind::LeviCivita: return "levi_civita";
    case ConnectionKind::Coefficients: return "coefficients";
    case ConnectionKind::Cubic: return "cubic";
  }
  return "?";
}

// ---- StatisticalStructure ----------------------------------------------------

StatisticalStructure::StatisticalStructure(std::string label, int dimension, std::vector<Interval> domain,
                                           FieldEvaluator evaluator, std::optional<ManifoldSpec> spec)
    : label_(std::move(label)),
      n_(dimension),
      domain_(std::move(domain)),
      evaluator_(std::move(evaluator)),
      spec_(std::move(spec)) {}

bool StatisticalStructure::contains(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != n_) return false;
  for (int a = 0; a < n_; ++a) {
    if (!(p[a] >= domain_[a].lo && p[a] <= domain_[a].hi)) return false;
  }
  return true;
}

FieldJets StatisticalStructure::evaluate(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != n_) {
    throw SpecError("point has " + std::to_string(p.size()) + " coordinates, structure has dimension " +
                    std::to_string(n_));
  }
  if (!contains(p)) throw SpecError("point outside the domain box of '" + label_ + "'");
  return evaluator_(p);
}

// ---- jet building blocks -----------------------------------------------------

Matrix metric_values(const MetricJets& g) {
  const int n = g.dimension();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = g(i, j).value;
  }
  return out;
}

Tensor3 connection_values(const ConnectionJets& gamma) {
  const int n = gamma.dimension();
  Tensor3 out(n);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = gamma.data()[i].value;
  return out;
}

Matrix inverse_spd(const Matrix& g) {
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success || !g.allFinite()) throw NonSpdMetric("metric is not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(g.rows(), g.cols()));
  // Keep the inverse exactly symmetric.
  for (Eigen::Index i = 0; i < inv.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < inv.cols(); ++j) inv(j, i) = inv(i, j);
  }
  return inv;
}

TensorArray<Jet1, 2> inverse_metric_jets(const MetricJets& g) {
  const int n = g.dimension();
  const Matrix inv = inverse_spd(metric_values(g));
  TensorArray<Jet1, 2> out(n, Jet1::constant(0.0, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j).value = inv(i, j);
  }
  Matrix dg(n, n);
  for (int m = 0; m < n; ++m) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) dg(i, j) = g(i, j).grad[m];
    }
    const Matrix dinv = -inv * dg * inv;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        out(i, j).grad[m] = dinv(i, j);
        out(j, i).grad[m] = dinv(i, j);
      }
    }
  }
  return out;
}

ConnectionJets levi_civita_jets(const MetricJets& g) {
  const int n = g.dimension();
  const auto inv = inverse_metric_jets(g);
  // dg(l, i, j) = d_l g_ij
  TensorArray<Jet1, 3> dg(n);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) dg(l, i, j) = partial(g(i, j), l);
    }
  }
  ConnectionJets gamma(n, Jet1::constant(0.0, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Jet1 acc = Jet1::constant(0.0, n);
        for (int l = 0; l < n; ++l) acc += inv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
        gamma(k, i, j) = 0.5 * acc;
        gamma(k, j, i) = gamma(k, i, j);
      }
    }
  }
  return gamma;
}

ConnectionJets dual_connection_jets(const MetricJets& g, const ConnectionJets& gamma) {
  const int n = g.dimension();
  const auto inv = inverse_metric_jets(g);
  // a(k, i, j) = d_k g_ij - Gamma^m_ki g_mj
  TensorArray<Jet1, 3> a(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Jet1 acc = partial(g(i, j), k);
        for (int m = 0; m < n; ++m) acc -= gamma(m, k, i) * truncate(g(m, j));
        a(k, i, j) = std::move(acc);
      }
    }
  }
  ConnectionJets out(n, Jet1::constant(0.0, n));
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        Jet1 acc = Jet1::constant(0.0, n);
        for (int i = 0; i < n; ++i) acc += inv(l, i) * a(k, i, j);
        out(l, k, j) = std::move(acc);
      }
    }
  }
  return out;
}

Tensor3 cubic_values(const MetricJets& g, const ConnectionJets& gamma) {
  const int n = g.dimension();
  Tensor3 c(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double v = g(i, j).grad[k];
        for (int l = 0; l < n; ++l) v -= gamma(l, k, i).value * g(l, j).value + gamma(l, k, j).value * g(i, l).value;
        c(k, i, j) = v;
      }
    }
  }
  return c;
}

// ---- build_structure ---------------------------------------------------------

namespace {

struct CompiledSpec {
  int n = 0;
  MetricKind metric_kind{};
  std::vector<Expr> metric;  // closed_form: n*n; otherwise one entry (for potential: the n*n Hessian)
  ConnectionKind connection_kind{};
  std::vector<Expr> connection;
};

std::vector<Expr> parse_all(const std::vector<std::string>& sources, int n, const char* what) {
  std::vector<Expr> out;
  out.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    try {
      out.push_back(parse_expression(sources[i], n));
    } catch (const ParseError& e) {
      throw SpecError(std::string(what) + " component " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

void expect_count(const std::vector<std::string>& comps, std::size_t count, const char* what) {
  if (comps.size() != count) {
    throw SpecError(std::string(what) + " expects " + std::to_string(count) + " components, got " +
                    std::to_string(comps.size()));
  }
}

MetricJets evaluate_metric(const CompiledSpec& c, std::span<const double> p) {
  const int n = c.n;
  MetricJets g(n);
  switch (c.metric_kind) {
    case MetricKind::ClosedForm:
    case MetricKind::Potential:
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          g(i, j) = eval_jet2(c.metric[static_cast<std::size_t>(i * n + j)], p);
          g(j, i) = g(i, j);
        }
      }
      break;
    case MetricKind::Conformal: {
      const Jet2 f = eval_jet2(c.metric[0], p);
      const Jet2 zero = Jet2::constant(0.0, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g(i, j) = i == j ? f : zero;
      }
      break;
    }
  }
  return g;
}

ConnectionJets evaluate_connection(const CompiledSpec& c, const MetricJets& g, std::span<const double> p) {
  const int n = c.n;
  switch (c.connection_kind) {
    case ConnectionKind::Flat: return ConnectionJets(n, Jet1::constant(0.0, n));
    case ConnectionKind::LeviCivita: return levi_civita_jets(g);
    case ConnectionKind::Coefficients: {
      ConnectionJets gamma(n);
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = i; j < n; ++j) {
            gamma(k, i, j) = truncate(eval_jet2(c.connection[static_cast<std::size_t>((k * n + i) * n + j)], p));
            gamma(k, j, i) = gamma(k, i, j);
          }
        }
      }
      return gamma;
    }
    case ConnectionKind::Cubic: {
      ConnectionJets gamma = levi_civita_jets(g);
      const auto inv = inverse_metric_jets(g);
      TensorArray<Jet1, 3> cubic(n);
      for (std::size_t a = 0; a < cubic.size(); ++a) cubic.data()[a] = truncate(eval_jet2(c.connection[a], p));
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = i; j < n; ++j) {
            Jet1 acc = Jet1::constant(0.0, n);
            for (int l = 0; l < n; ++l) acc += inv(k, l) * cubic(l, i, j);
            gamma(k, i, j) -= 0.5 * acc;
            gamma(k, j, i) = gamma(k, i, j);
          }
        }
      }
      return gamma;
    }
  }
  throw Error("unknown connection kind");
}

}  // namespace

StatisticalStructure build_structure(const ManifoldSpec& spec) {
  const int n = spec.dimension;
  if (n < 2 || n > kMaxDimension) {
    throw SpecError("dimension must be in 2.." + std::to_string(kMaxDimension) + ", got " + std::to_string(n));
  }
  if (static_cast<int>(spec.domain.size()) != n) {
    throw SpecError("domain has " + std::to_string(spec.domain.size()) + " intervals for dimension " +
                    std::to_string(n));
  }
  for (const auto& iv : spec.domain) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) throw SpecError("degenerate domain interval");
  }

  auto compiled = std::make_shared<CompiledSpec>();
  compiled->n = n;
  compiled->metric_kind = spec.metric.kind;
  compiled->connection_kind = spec.connection.kind;
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  const std::size_t n3 = n2 * n;

  switch (spec.metric.kind) {
    case MetricKind::ClosedForm: {
      expect_count(spec.metric.components, n2, "closed_form metric");
      compiled->metric = parse_all(spec.metric.components, n, "metric");
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (compiled->metric[i * n + j].to_string() != compiled->metric[j * n + i].to_string()) {
            throw SpecError("metric is not symmetric as written: g_" + std::to_string(i + 1) + std::to_string(j + 1) +
                            " != g_" + std::to_string(j + 1) + std::to_string(i + 1));
          }
        }
      }
      break;
    }
    case MetricKind::Conformal:
      expect_count(spec.metric.components, 1, "conformal metric");
      compiled->metric = parse_all(spec.metric.components, n, "metric");
      break;
    case MetricKind::Potential: {
      expect_count(spec.metric.components, 1, "potential metric");
      const Expr psi = parse_all(spec.metric.components, n, "potential").front();
      // g_ij = d_i d_j psi; the curvature of the dual connection needs fourth
      // derivatives of psi, so the Hessian is formed symbolically and jetted.
      compiled->metric.assign(n2, Expr{});
      for (int i = 0; i < n; ++i) {
        const Expr di = differentiate(psi, i);
        for (int j = i; j < n; ++j) {
          compiled->metric[i * n + j] = differentiate(di, j);
          compiled->metric[j * n + i] = compiled->metric[i * n + j];
        }
      }
      break;
    }
  }

  switch (spec.connection.kind) {
    case ConnectionKind::Flat:
    case ConnectionKind::LeviCivita:
      if (!spec.connection.components.empty()) {
        throw SpecError(std::string(to_string(spec.connection.kind)) + " connection takes no components");
      }
      break;
    case ConnectionKind::Coefficients: {
      expect_count(spec.connection.components, n3, "coefficients connection");
      compiled->connection = parse_all(spec.connection.components, n, "connection");
      const auto& c = compiled->connection;
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = i + 1; j < n; ++j) {
            if (c[(k * n + i) * n + j].to_string() != c[(k * n + j) * n + i].to_string()) {
              throw SpecError("connection has torsion as written: Gamma^" + std::to_string(k + 1) + "_" +
                              std::to_string(i + 1) + std::to_string(j + 1) + " != Gamma^" + std::to_string(k + 1) +
                              "_" + std::to_string(j + 1) + std::to_string(i + 1));
            }
          }
        }
      }
      break;
    }
    case ConnectionKind::Cubic: {
      expect_count(spec.connection.components, n3, "cubic connection");
      compiled->connection = parse_all(spec.connection.components, n, "cubic tensor");
      const auto& c = compiled->connection;
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const std::string ref = c[(k * n + i) * n + j].to_string();
            if (ref != c[(i * n + k) * n + j].to_string() || ref != c[(k * n + j) * n + i].to_string()) {
              throw SpecError("cubic tensor is not totally symmetric as written at C_" + std::to_string(k + 1) +
                              std::to_string(i + 1) + std::to_string(j + 1));
            }
          }
        }
      }
      break;
    }
  }

  FieldEvaluator eval = [compiled](std::span<const double> p) {
    FieldJets out;
    out.metric = evaluate_metric(*compiled, p);
    out.connection = evaluate_connection(*compiled, out.metric, p);
    return out;
  };
  return StatisticalStructure(spec.name.empty() ? "spec" : spec.name, n, spec.domain, std::move(eval), spec);
}

StatisticalStructure dual_structure(const StatisticalStructure& s) {
  auto base = std::make_shared<StatisticalStructure>(s);
  FieldEvaluator eval = [base](std::span<const double> p) {
    FieldJets jets = base->evaluate(p);
    jets.connection = dual_connection_jets(jets.metric, jets.connection);
    return jets;
  };
  return StatisticalStructure("dual(" + s.label() + ")", s.dimension(), s.domain(), std::move(eval));
}

// ---- pointwise ---------------------------------------------------------------

PointTensors point_tensors(const StatisticalStructure& s, std::span<const double> p) {
  const FieldJets jets = s.evaluate(p);
  PointTensors out;
  out.g = metric_values(jets.metric);
  out.g_inv = inverse_spd(out.g);
  out.gamma = connection_values(jets.connection);
  out.gamma_star = connection_values(dual_connection_jets(jets.metric, jets.connection));
  out.cubic = cubic_values(jets.metric, jets.connection);
  return out;
}

std::pair<Matrix, Matrix> metric_at(const StatisticalStructure& s, std::span<const double> p) {
  const FieldJets jets = s.evaluate(p);
  Matrix g = metric_values(jets.metric);
  Matrix inv = inverse_spd(g);
  return {std::move(g), std::move(inv)};
}

Tensor3 levi_civita_at(const StatisticalStructure& s, std::span<const double> p) {
  return connection_values(levi_civita_jets(s.evaluate(p).metric));
}

Tensor3 cubic_at(const StatisticalStructure& s, std::span<const double> p) {
  const FieldJets jets = s.evaluate(p);
  return cubic_values(jets.metric, jets.connection);
}

Tensor3 dual_connection_at(const StatisticalStructure& s, std::span<const double> p) {
  const FieldJets jets = s.evaluate(p);
  return connection_values(dual_connection_jets(jets.metric, jets.connection));
}

Vector grad_scalar_at(const StatisticalStructure& s, const Expr& psi, std::span<const double> p) {
  if (psi.dimension() != s.dimension()) throw SpecError("scalar field dimension does not match the structure");
  const auto [g, inv] = metric_at(s, p);
  const Jet2 f = eval_jet2(psi, p);
  return inv * Vector(f.grad);
}

// ---- validation --------------------------------------------------------------

double torsion_residual(const Tensor3& gamma) {
  const int n = gamma.dimension();
  double m = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) m = std::max(m, std::abs(gamma(k, i, j) - gamma(k, j, i)));
    }
  }
  return m;
}

double codazzi_residual(const Tensor3& c) {
  const int n = c.dimension();
  double m = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double v = c(k, i, j);
        for (double w : {c(k, j, i), c(i, k, j), c(i, j, k), c(j, k, i), c(j, i, k)}) m = std::max(m, std::abs(v - w));
      }
    }
  }
  return m;
}

bool ValidationReport::pass() const {
  return points > 0 && spd && errors.empty() && torsion <= tolerance && codazzi <= tolerance &&
         dual_torsion <= tolerance;
}

ValidationReport validate_structure(const StatisticalStructure& s, const std::vector<std::vector<double>>& sample,
                                    double tol) {
  struct PointResult {
    bool spd = true;
    double torsion = 0.0, codazzi = 0.0, dual_torsion = 0.0;
    std::string error;
  };
  const auto results = parallel_map(sample.size(), [&](std::size_t i) {
    PointResult r;
    try {
      const PointTensors t = point_tensors(s, sample[i]);
      r.torsion = torsion_residual(t.gamma);
      r.codazzi = codazzi_residual(t.cubic);
      r.dual_torsion = torsion_residual(t.gamma_star);
    } catch (const NonSpdMetric& e) {
      r.spd = false;
      r.error = e.what();
    } catch (const Error& e) {
      r.error = e.what();
    }
    return r;
  });

  ValidationReport report;
  report.points = sample.size();
  report.tolerance = tol;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.spd) {
      report.spd = false;
      ++report.spd_failures;
    }
    if (!r.error.empty()) report.errors.push_back("point " + std::to_string(i) + ": " + r.error);
    report.torsion = std::max(report.torsion, r.torsion);
    report.codazzi = std::max(report.codazzi, r.codazzi);
    report.dual_torsion = std::max(report.dual_torsion, r.dual_torsion);
  }
  return report;
}

}  // namespace statcurv
