#pragma once

// Independent numerical oracles for the test suites. Nothing here calls into
// the jet machinery; derivatives come from central differences only.

#include "statcurv/conformal_projective.hpp"
#include "statcurv/expr.hpp"
#include "statcurv/gallery.hpp"
#include "statcurv/sampling.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace statcurv::testing {

inline constexpr double kFdStep = 1e-4;

using ScalarFn = std::function<double(const std::vector<double>&)>;

inline std::vector<double> shifted(std::vector<double> p, int i, double d) {
  p[static_cast<std::size_t>(i)] += d;
  return p;
}

inline Vector fd_gradient(const ScalarFn& f, const std::vector<double>& p, double h = kFdStep) {
  const int n = static_cast<int>(p.size());
  Vector g(n);
  for (int i = 0; i < n; ++i) g(i) = (f(shifted(p, i, h)) - f(shifted(p, i, -h))) / (2 * h);
  return g;
}

inline Matrix fd_hessian(const ScalarFn& f, const std::vector<double>& p, double h = kFdStep) {
  const int n = static_cast<int>(p.size());
  Matrix H(n, n);
  const double f0 = f(p);
  for (int i = 0; i < n; ++i) {
    H(i, i) = (f(shifted(p, i, h)) - 2 * f0 + f(shifted(p, i, -h))) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      const double pp = f(shifted(shifted(p, i, h), j, h));
      const double pm = f(shifted(shifted(p, i, h), j, -h));
      const double mp = f(shifted(shifted(p, i, -h), j, h));
      const double mm = f(shifted(shifted(p, i, -h), j, -h));
      H(i, j) = H(j, i) = (pp - pm - mp + mm) / (4 * h * h);
    }
  }
  return H;
}

/// Random expression text over x1..xn. Every construct stays finite on
/// [-1,1]^n: divisors and log/sqrt arguments are bounded below by 1.
/// normsq enters divided by n, and by default pow only takes leaves; both keep
/// fourth derivatives small enough for a central-difference oracle at h = 1e-4
/// to resolve 1e-6.
class RandomExpr {
 public:
  RandomExpr(int n, std::uint64_t seed, bool nested_pow = false)
      : n_(n), nested_pow_(nested_pow), rng_(rng_stream(seed, 0)) {}

  std::string operator()(int depth = 3) { return gen(depth); }

 private:
  int pick(int count) { return static_cast<int>(uniform01(rng_) * count) % count; }
  std::string number() { return format_number(std::round((4.0 * uniform01(rng_) - 2.0) * 100.0) / 100.0); }

  std::string leaf() {
    switch (pick(4)) {
      case 0: return number();
      case 1: return "normsq/" + std::to_string(n_);
      default: return "x" + std::to_string(pick(n_) + 1);
    }
  }

  std::string gen(int depth) {
    if (depth == 0) return leaf();
    const int op = pick(12);
    const std::string a = gen(op == 7 && !nested_pow_ ? 0 : depth - 1);
    switch (op) {
      case 0: return "(" + a + " + " + gen(depth - 1) + ")";
      case 1: return "(" + a + " - " + gen(depth - 1) + ")";
      case 2: return "(" + a + ")*(" + gen(depth - 1) + ")";
      case 3: return "(" + a + ")/(2 + cos(" + gen(depth - 1) + "))";
      case 4: return "exp(0.5*sin(" + a + "))";
      case 5: return "log(1 + pow(" + a + ", 2))";
      case 6: return "sqrt(1 + pow(" + a + ", 2))";
      case 7: return "pow(" + a + ", " + std::to_string(2 + pick(2)) + ")";
      case 8: return "pow(2 + sin(" + a + "), -2)";
      case 9: return "sin(" + a + ")";
      case 10: return "cos(" + a + ")";
      default: return "-(" + a + ")";
    }
  }

  int n_;
  bool nested_pow_;
  std::mt19937_64 rng_;
};

/// Relative error with a unit floor so exact zeros do not divide by zero.
inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

struct JetCheck {
  double grad = 0.0;
  double hess = 0.0;
};

/// Worst relative gradient and Hessian mismatch between eval_jet2 and central
/// differences of eval_value.
inline JetCheck jet_vs_fd(const Expr& e, const std::vector<double>& p) {
  const Jet2 j = eval_jet2(e, p);
  const ScalarFn f = [&](const std::vector<double>& q) { return eval_value(e, q); };
  const Vector g = fd_gradient(f, p);
  const Matrix H = fd_hessian(f, p);
  JetCheck c;
  for (int i = 0; i < g.size(); ++i) {
    c.grad = std::max(c.grad, rel_err(j.grad(i), g(i)));
    for (int k = 0; k < g.size(); ++k) c.hess = std::max(c.hess, rel_err(j.hess(i, k), H(i, k)));
  }
  return c;
}

inline std::vector<double> random_point(std::mt19937_64& rng, const std::vector<Interval>& box) {
  std::vector<double> p;
  for (const auto& iv : box) {
    const double mid = 0.5 * (iv.lo + iv.hi), half = 0.5 * kSampleBoxFraction * (iv.hi - iv.lo);
    p.push_back(mid + half * (2.0 * uniform01(rng) - 1.0));
  }
  return p;
}

/// Riemann tensor from connection values alone, differentiating Gamma by
/// central differences.
inline Tensor4 fd_riemann(const std::function<Tensor3(const std::vector<double>&)>& gamma_at,
                          const std::vector<double>& p, double h = kFdStep) {
  const int n = static_cast<int>(p.size());
  const Tensor3 G = gamma_at(p);
  std::vector<Tensor3> dG;  // dG[m](k,i,j) = d_m Gamma^k_ij
  for (int m = 0; m < n; ++m) {
    const Tensor3 a = gamma_at(shifted(p, m, h)), b = gamma_at(shifted(p, m, -h));
    Tensor3 d(n, 0.0);
    for (std::size_t q = 0; q < d.data().size(); ++q) d.data()[q] = (a.data()[q] - b.data()[q]) / (2 * h);
    dG.push_back(d);
  }
  Tensor4 R(n, 0.0);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = dG[i](l, j, k) - dG[j](l, i, k);
          for (int m = 0; m < n; ++m) v += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
          R(l, k, i, j) = v;
        }
  return R;
}

inline std::vector<GalleryEntry> all_gallery_entries() {
  std::vector<GalleryEntry> out;
  for (const auto& name : list_names()) out.push_back(lookup(name));
  return out;
}

/// The four n = 4 space-form style entries with their curvature constants.
struct SpaceForm {
  const char* name;
  double K;
};
inline constexpr SpaceForm kSpaceForms4[] = {
    {"euclidean4", 0.0}, {"poincare_ball4", -1.0}, {"sphere_stereographic4", 1.0}, {"exp_family4", 0.0}};

}  // namespace statcurv::testing
