#include "statcurv/conformal_projective.hpp"

#include "statcurv/errors.hpp"
#include "statcurv/sampling.hpp"

#include <cmath>

namespace statcurv {
namespace {

void require_dimension(int n) {
  if (n < 3) {
    throw UnsupportedDimension("conformal-projective curvature needs dimension >= 3, got " + std::to_string(n));
  }
}

}  // namespace

const char* to_string(FlatnessVerdict v) {
  switch (v) {
    case FlatnessVerdict::Flat: return "flat";
    case FlatnessVerdict::NotFlat: return "not_flat";
    case FlatnessVerdict::Undetermined: return "undetermined";
  }
  return "?";
}

std::optional<FlatnessVerdict> parse_verdict(const std::string& s) {
  if (s == "flat") return FlatnessVerdict::Flat;
  if (s == "not_flat") return FlatnessVerdict::NotFlat;
  if (s == "undetermined") return FlatnessVerdict::Undetermined;
  return std::nullopt;
}

Matrix L_from_bundle(const CurvatureBundle& b, Which which) {
  const int n = static_cast<int>(b.g.rows());
  require_dimension(n);
  const Matrix& ric = which == Which::Primal ? b.ricci : b.ricci_star;
  const Matrix& other = which == Which::Primal ? b.ricci_star : b.ricci;
  const double sigma = which == Which::Primal ? b.sigma : b.sigma_star;
  return ((static_cast<double>(n - 1) * ric + other) / n - sigma / (2.0 * (n - 1)) * b.g) / static_cast<double>(n - 2);
}

Tensor4 assemble_W(const Tensor4& riemann, const Matrix& L, const Matrix& L_star_sharp, const Matrix& g) {
  const int n = riemann.dimension();
  Tensor4 w(n, 0.0);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          // R^l_kij + delta^l_j L_ik - delta^l_i L_jk + (L*# d_j)^l g_ik - (L*# d_i)^l g_jk
          double v = riemann(l, k, i, j);
          if (l == j) v += L(i, k);
          if (l == i) v -= L(j, k);
          v += L_star_sharp(l, j) * g(i, k) - L_star_sharp(l, i) * g(j, k);
          w(l, k, i, j) = v;
          w(l, k, j, i) = -v;
        }
      }
    }
  }
  return w;
}

CPTensors cp_tensors_from_bundle(const CurvatureBundle& b) {
  CPTensors t;
  t.L = L_from_bundle(b, Which::Primal);
  t.L_star = L_from_bundle(b, Which::Dual);
  t.L_sharp = sharp(b.g_inv, t.L);
  t.L_star_sharp = sharp(b.g_inv, t.L_star);
  t.W = assemble_W(b.riemann, t.L, t.L_star_sharp, b.g);
  // The dual structure has R*, and the roles of L and L* exchanged.
  t.W_star = assemble_W(b.riemann_star, t.L_star, t.L_sharp, b.g);
  return t;
}

Tensor4 W_direct_from_bundle(const CurvatureBundle& b) {
  const int n = static_cast<int>(b.g.rows());
  require_dimension(n);
  const double nm1 = n - 1;
  const Matrix A = nm1 * b.ricci + b.ricci_star;        // (n-1) Ric + Ric*
  const Matrix B = nm1 * b.ricci_star_op + b.ricci_op;  // (n-1) Ric*# + Ric#
  const double c1 = 1.0 / (static_cast<double>(n) * (n - 2));
  const double c2 = b.sigma / ((n - 1.0) * (n - 2.0));
  Tensor4 w(n, 0.0);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double di = l == i ? 1.0 : 0.0;
          const double dj = l == j ? 1.0 : 0.0;
          const double bracket = dj * A(i, k) - di * A(j, k) + B(l, j) * b.g(i, k) - B(l, i) * b.g(j, k);
          w(l, k, i, j) = b.riemann(l, k, i, j) + c1 * bracket + c2 * (di * b.g(j, k) - dj * b.g(i, k));
        }
      }
    }
  }
  return w;
}

Matrix L_at(const StatisticalStructure& s, std::span<const double> p, Which which) {
  require_dimension(s.dimension());
  return L_from_bundle(curvature_bundle(s, p), which);
}

Matrix sharp_at(const StatisticalStructure& s, std::span<const double> p, const Matrix& bilinear) {
  const auto [g, inv] = metric_at(s, p);
  if (bilinear.rows() != g.rows() || bilinear.cols() != g.cols()) throw SpecError("bilinear form has the wrong shape");
  return sharp(inv, bilinear);
}

CPTensors cp_tensors_at(const StatisticalStructure& s, std::span<const double> p) {
  require_dimension(s.dimension());
  return cp_tensors_from_bundle(curvature_bundle(s, p));
}

Tensor4 W_at(const StatisticalStructure& s, std::span<const double> p) { return cp_tensors_at(s, p).W; }

Tensor4 W_direct_at(const StatisticalStructure& s, std::span<const double> p) {
  require_dimension(s.dimension());
  return W_direct_from_bundle(curvature_bundle(s, p));
}

double cp_duality_residual(const StatisticalStructure& s, std::span<const double> p, int trials, std::uint64_t seed) {
  require_dimension(s.dimension());
  const CurvatureBundle b = curvature_bundle(s, p);
  const CPTensors t = cp_tensors_from_bundle(b);
  auto rng = rng_stream(seed, 0);
  double m = 0.0;
  for (int q = 0; q < trials; ++q) {
    const Vector x = random_unit_vector(rng, b.g);
    const Vector y = random_unit_vector(rng, b.g);
    const Vector z = random_unit_vector(rng, b.g);
    const Vector u = random_unit_vector(rng, b.g);
    const double v = lowered_curvature(t.W, b.g, x, y, z, u) + lowered_curvature(t.W_star, b.g, x, y, u, z);
    m = std::max(m, std::abs(v));
  }
  return m;
}

IdentityResiduals identity_residuals(const StatisticalStructure& s, int points, int trials, std::uint64_t seed) {
  if (points <= 0 || trials <= 0) throw SpecError("identity sampling needs positive point and trial counts");
  const bool with_w = s.dimension() >= 3;
  const auto sample = halton_points(s.domain(), static_cast<std::size_t>(points));
  struct Local {
    double sigma_eq = 0.0, rr_star = 0.0, ww_star = 0.0, w_forms = 0.0;
  };
  const auto per_point = parallel_map(sample.size(), [&](std::size_t i) {
    const CurvatureBundle b = curvature_bundle(s, sample[i]);
    Local r;
    r.sigma_eq = std::abs(b.sigma - b.sigma_star) / (1.0 + std::abs(b.sigma));
    std::optional<CPTensors> t;
    if (with_w) {
      t = cp_tensors_from_bundle(b);
      r.w_forms = max_abs_diff(t->W, W_direct_from_bundle(b));
    }
    auto rng = rng_stream(seed, i);
    for (int q = 0; q < trials; ++q) {
      const Vector x = random_unit_vector(rng, b.g);
      const Vector y = random_unit_vector(rng, b.g);
      const Vector z = random_unit_vector(rng, b.g);
      const Vector u = random_unit_vector(rng, b.g);
      r.rr_star = std::max(r.rr_star, std::abs(lowered_curvature(b.riemann, b.g, x, y, z, u) +
                                               lowered_curvature(b.riemann_star, b.g, x, y, u, z)));
      if (t) {
        r.ww_star = std::max(r.ww_star, std::abs(lowered_curvature(t->W, b.g, x, y, z, u) +
                                                 lowered_curvature(t->W_star, b.g, x, y, u, z)));
      }
    }
    return r;
  });

  IdentityResiduals out;
  out.points = sample.size();
  out.trials = trials;
  Local m;
  for (const auto& r : per_point) {
    m.sigma_eq = std::max(m.sigma_eq, r.sigma_eq);
    m.rr_star = std::max(m.rr_star, r.rr_star);
    m.ww_star = std::max(m.ww_star, r.ww_star);
    m.w_forms = std::max(m.w_forms, r.w_forms);
  }
  out.sigma_eq = m.sigma_eq;
  out.rr_star = m.rr_star;
  if (with_w) {
    out.ww_star = m.ww_star;
    out.w_forms = m.w_forms;
  }
  return out;
}

FlatnessReport flatness_report(const StatisticalStructure& s, int points, int trials, double tol, std::uint64_t seed) {
  require_dimension(s.dimension());
  if (points <= 0 || trials <= 0) throw SpecError("flatness sampling needs positive point and trial counts");
  const auto sample = halton_points(s.domain(), static_cast<std::size_t>(points));
  const auto per_point = parallel_map(sample.size(), [&](std::size_t i) {
    const CurvatureBundle b = curvature_bundle(s, sample[i]);
    const Tensor4 w = cp_tensors_from_bundle(b).W;
    auto rng = rng_stream(seed, i);
    double m = 0.0;
    for (int q = 0; q < trials; ++q) {
      const Vector x = random_unit_vector(rng, b.g);
      const Vector y = random_unit_vector(rng, b.g);
      const Vector z = random_unit_vector(rng, b.g);
      const Vector u = random_unit_vector(rng, b.g);
      const double norms = std::sqrt(x.dot(b.g * x) * y.dot(b.g * y) * z.dot(b.g * z) * u.dot(b.g * u));
      m = std::max(m, std::abs(lowered_curvature(w, b.g, x, y, z, u)) / norms);
    }
    return m;
  });

  FlatnessReport r;
  r.points = sample.size();
  r.samples = sample.size() * static_cast<std::size_t>(trials);
  r.tolerance = tol;
  for (double v : per_point) r.max_residual = std::max(r.max_residual, v);
  if (s.dimension() < 4) {
    r.verdict = FlatnessVerdict::Undetermined;
  } else {
    r.verdict = r.max_residual <= tol ? FlatnessVerdict::Flat : FlatnessVerdict::NotFlat;
  }
  return r;
}

}  // namespace statcurv
