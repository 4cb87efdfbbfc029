#include "statcurv/curvature.hpp"

#include "statcurv/errors.hpp"
#include "statcurv/sampling.hpp"

#include <cmath>

namespace statcurv {

Tensor4 riemann_from_jets(const ConnectionJets& gamma) {
  const int n = gamma.dimension();
  Tensor4 r(n, 0.0);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          // d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
          double v = gamma(l, j, k).grad[i] - gamma(l, i, k).grad[j];
          for (int m = 0; m < n; ++m) {
            v += gamma(l, i, m).value * gamma(m, j, k).value - gamma(l, j, m).value * gamma(m, i, k).value;
          }
          r(l, k, i, j) = v;
          r(l, k, j, i) = -v;
        }
      }
    }
  }
  return r;
}

Matrix ricci_from_riemann(const Tensor4& riemann) {
  const int n = riemann.dimension();
  Matrix ric = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += riemann(i, k, i, j);
      ric(j, k) = v;
    }
  }
  return ric;
}

Matrix sharp(const Matrix& g_inv, const Matrix& bilinear) { return g_inv * bilinear.transpose(); }

double scalar_from_ricci(const Matrix& g_inv, const Matrix& ricci) { return g_inv.cwiseProduct(ricci).sum(); }

CurvatureBundle curvature_bundle(const StatisticalStructure& s, std::span<const double> p) {
  const FieldJets jets = s.evaluate(p);
  CurvatureBundle b;
  b.g = metric_values(jets.metric);
  b.g_inv = inverse_spd(b.g);
  b.riemann = riemann_from_jets(jets.connection);
  b.riemann_star = riemann_from_jets(dual_connection_jets(jets.metric, jets.connection));
  b.ricci = ricci_from_riemann(b.riemann);
  b.ricci_star = ricci_from_riemann(b.riemann_star);
  b.ricci_op = sharp(b.g_inv, b.ricci);
  b.ricci_star_op = sharp(b.g_inv, b.ricci_star);
  b.sigma = scalar_from_ricci(b.g_inv, b.ricci);
  b.sigma_star = scalar_from_ricci(b.g_inv, b.ricci_star);
  return b;
}

Tensor4 riemann_at(const StatisticalStructure& s, std::span<const double> p, Which which) {
  const FieldJets jets = s.evaluate(p);
  if (which == Which::Primal) return riemann_from_jets(jets.connection);
  return riemann_from_jets(dual_connection_jets(jets.metric, jets.connection));
}

Matrix ricci_at(const StatisticalStructure& s, std::span<const double> p, Which which) {
  return ricci_from_riemann(riemann_at(s, p, which));
}

Matrix ricci_operator_at(const StatisticalStructure& s, std::span<const double> p, Which which) {
  const CurvatureBundle b = curvature_bundle(s, p);
  return which == Which::Primal ? b.ricci_op : b.ricci_star_op;
}

double scalar_at(const StatisticalStructure& s, std::span<const double> p, Which which) {
  const CurvatureBundle b = curvature_bundle(s, p);
  return which == Which::Primal ? b.sigma : b.sigma_star;
}

double sigma_duality_residual(const StatisticalStructure& s, const std::vector<std::vector<double>>& sample) {
  const auto per_point = parallel_map(sample.size(), [&](std::size_t i) {
    const CurvatureBundle b = curvature_bundle(s, sample[i]);
    return std::abs(b.sigma - b.sigma_star) / (1.0 + std::abs(b.sigma));
  });
  double m = 0.0;
  for (double v : per_point) m = std::max(m, v);
  return m;
}

double lowered_curvature(const Tensor4& r, const Matrix& g, const Vector& x, const Vector& y, const Vector& z,
                         const Vector& u) {
  const int n = r.dimension();
  const Vector gu = g * u;
  double total = 0.0;
  for (int l = 0; l < n; ++l) {
    double comp = 0.0;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) comp += r(l, k, i, j) * x[i] * y[j] * z[k];
      }
    }
    total += comp * gu[l];
  }
  return total;
}

double dual_curvature_residual(const StatisticalStructure& s, std::span<const double> p, int trials,
                               std::uint64_t seed) {
  const CurvatureBundle b = curvature_bundle(s, p);
  auto rng = rng_stream(seed, 0);
  double m = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector x = random_unit_vector(rng, b.g);
    const Vector y = random_unit_vector(rng, b.g);
    const Vector z = random_unit_vector(rng, b.g);
    const Vector u = random_unit_vector(rng, b.g);
    const double v = lowered_curvature(b.riemann, b.g, x, y, z, u) + lowered_curvature(b.riemann_star, b.g, x, y, u, z);
    m = std::max(m, std::abs(v));
  }
  return m;
}

Tensor4 constant_curvature_pattern(const Matrix& g, double K) {
  const int n = static_cast<int>(g.rows());
  Tensor4 out(n, 0.0);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          out(l, k, i, j) = K * (g(j, k) * (l == i ? 1.0 : 0.0) - g(i, k) * (l == j ? 1.0 : 0.0));
        }
      }
    }
  }
  return out;
}

ConstantCurvatureFit constant_curvature_fit(const StatisticalStructure& s,
                                            const std::vector<std::vector<double>>& sample) {
  if (sample.empty()) throw Error("constant_curvature_fit needs at least one point");
  struct Local {
    Tensor4 r;
    Tensor4 unit;  // pattern with K = 1
  };
  const auto locals = parallel_map(sample.size(), [&](std::size_t i) {
    const FieldJets jets = s.evaluate(sample[i]);
    return Local{riemann_from_jets(jets.connection), constant_curvature_pattern(metric_values(jets.metric), 1.0)};
  });

  double num = 0.0;
  double den = 0.0;
  for (const auto& loc : locals) {
    for (std::size_t a = 0; a < loc.r.size(); ++a) {
      num += loc.r.data()[a] * loc.unit.data()[a];
      den += loc.unit.data()[a] * loc.unit.data()[a];
    }
  }
  ConstantCurvatureFit fit;
  fit.K = den > 0.0 ? num / den : 0.0;
  for (const auto& loc : locals) {
    for (std::size_t a = 0; a < loc.r.size(); ++a) {
      fit.residual = std::max(fit.residual, std::abs(loc.r.data()[a] - fit.K * loc.unit.data()[a]));
    }
  }
  return fit;
}

}  // namespace statcurv
