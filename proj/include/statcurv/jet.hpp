#pragma once

// Truncated Taylor jets for forward-mode differentiation.
//
// Jet2 carries value, gradient and Hessian of a scalar field at a point and is
// closed under the arithmetic used by the expression language. Jet1 carries
// value and gradient only; it is what connection coefficients need, since the
// curvature consumes first derivatives of the connection and nothing more.
//
// Storage is bounded by kMaxDimension so that jets live on the stack.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>

namespace statcurv {

inline constexpr int kMaxDimension = 8;

using JetVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDimension, 1>;
using JetMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDimension, kMaxDimension>;

struct Jet1 {
  double value = 0.0;
  JetVector grad;

  Jet1() = default;
  Jet1(double v, JetVector g) : value(v), grad(std::move(g)) {}

  static Jet1 constant(double v, int n) { return {v, JetVector::Zero(n)}; }

  int dimension() const { return static_cast<int>(grad.size()); }
};

struct Jet2 {
  double value = 0.0;
  JetVector grad;
  JetMatrix hess;

  Jet2() = default;
  Jet2(double v, JetVector g, JetMatrix h) : value(v), grad(std::move(g)), hess(std::move(h)) {}

  static Jet2 constant(double v, int n) { return {v, JetVector::Zero(n), JetMatrix::Zero(n, n)}; }

  /// Coordinate function x_{index+1} evaluated at `v`.
  static Jet2 variable(double v, int n, int index) {
    Jet2 out = constant(v, n);
    out.grad[index] = 1.0;
    return out;
  }

  int dimension() const { return static_cast<int>(grad.size()); }

  bool finite() const { return std::isfinite(value) && grad.allFinite() && hess.allFinite(); }
};

namespace detail {

// Mirrors the upper triangle into the lower one so that mixed partials are
// bit-identical regardless of the order in which terms were accumulated.
inline void mirror_upper(JetMatrix& h) {
  const auto n = h.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) h(j, i) = h(i, j);
  }
}

// f(a) given f(a.value), f'(a.value), f''(a.value).
inline Jet2 chain(const Jet2& a, double f0, double f1, double f2) {
  Jet2 out;
  out.value = f0;
  out.grad = f1 * a.grad;
  out.hess = f1 * a.hess + f2 * (a.grad * a.grad.transpose());
  mirror_upper(out.hess);
  return out;
}

}  // namespace detail

// ---- Jet2 arithmetic -------------------------------------------------------

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.value + b.value, a.grad + b.grad, a.hess + b.hess}; }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.value - b.value, a.grad - b.grad, a.hess - b.hess}; }
inline Jet2 operator-(const Jet2& a) { return {-a.value, -a.grad, -a.hess}; }
inline Jet2 operator+(const Jet2& a, double c) { return {a.value + c, a.grad, a.hess}; }
inline Jet2 operator*(double c, const Jet2& a) { return {c * a.value, c * a.grad, c * a.hess}; }
inline Jet2 operator*(const Jet2& a, double c) { return c * a; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 out;
  out.value = a.value * b.value;
  out.grad = b.value * a.grad + a.value * b.grad;
  out.hess = b.value * a.hess + a.value * b.hess + a.grad * b.grad.transpose() + b.grad * a.grad.transpose();
  detail::mirror_upper(out.hess);
  return out;
}

/// Reciprocal; the caller guarantees a.value != 0.
inline Jet2 reciprocal(const Jet2& a) {
  const double inv = 1.0 / a.value;
  return detail::chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value);
  return detail::chain(a, e, e, e);
}

inline Jet2 log(const Jet2& a) {
  const double inv = 1.0 / a.value;
  return detail::chain(a, std::log(a.value), inv, -inv * inv);
}

inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.value);
  return detail::chain(a, s, 0.5 / s, -0.25 / (s * a.value));
}

inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.value);
  const double c = std::cos(a.value);
  return detail::chain(a, s, c, -s);
}

inline Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.value);
  const double c = std::cos(a.value);
  return detail::chain(a, c, -s, -c);
}

/// Integer power. Negative exponents require a.value != 0.
inline Jet2 powi(const Jet2& a, int k) {
  if (k == 0) return Jet2::constant(1.0, a.dimension());
  const double x = a.value;
  const double f0 = std::pow(x, k);
  const double f1 = k * std::pow(x, k - 1);
  const double f2 = (k == 1) ? 0.0 : static_cast<double>(k) * (k - 1) * std::pow(x, k - 2);
  return detail::chain(a, f0, f1, f2);
}

// ---- Jet1 arithmetic -------------------------------------------------------

inline Jet1 operator+(const Jet1& a, const Jet1& b) { return {a.value + b.value, a.grad + b.grad}; }
inline Jet1 operator-(const Jet1& a, const Jet1& b) { return {a.value - b.value, a.grad - b.grad}; }
inline Jet1 operator-(const Jet1& a) { return {-a.value, -a.grad}; }
inline Jet1 operator*(double c, const Jet1& a) { return {c * a.value, c * a.grad}; }
inline Jet1 operator*(const Jet1& a, double c) { return c * a; }
inline Jet1 operator*(const Jet1& a, const Jet1& b) {
  return {a.value * b.value, b.value * a.grad + a.value * b.grad};
}
inline Jet1& operator+=(Jet1& a, const Jet1& b) {
  a.value += b.value;
  a.grad += b.grad;
  return a;
}
inline Jet1& operator-=(Jet1& a, const Jet1& b) {
  a.value -= b.value;
  a.grad -= b.grad;
  return a;
}

// ---- Order conversions -----------------------------------------------------

/// Drops the second-order part.
inline Jet1 truncate(const Jet2& a) { return {a.value, a.grad}; }

/// The partial derivative d/dx_{index+1} of a Jet2, as a Jet1.
inline Jet1 partial(const Jet2& a, int index) { return {a.grad[index], a.hess.row(index).transpose()}; }

}  // namespace statcurv
