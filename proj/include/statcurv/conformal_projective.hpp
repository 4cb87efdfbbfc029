#pragma once

// The conformal-projective curvature tensor W of a statistical structure.
//
// Production route, from the auxiliary tensors
//   L  = 1/(n-2) { [(n-1) Ric + Ric*]/n - sigma /(2(n-1)) g }
//   L* = 1/(n-2) { [(n-1) Ric* + Ric]/n - sigma*/(2(n-1)) g }
// as
//   W(X,Y)Z = R(X,Y)Z + Y L(X,Z) - X L(Y,Z) + L*#(Y) g(X,Z) - L*#(X) g(Y,Z).
//
// W_direct_at assembles the same tensor straight from Ric, Ric*, their sharps
// and sigma without going through L; the two must agree on every statistical
// manifold because sigma = sigma* there.
//
// Components: W(d_i, d_j) d_k = W^l_kij d_l, stored as w(l, k, i, j).

#include "statcurv/curvature.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace statcurv {

struct CPTensors {
  Matrix L;
  Matrix L_star;
  Matrix L_sharp;
  Matrix L_star_sharp;
  Tensor4 W;
  Tensor4 W_star;
};

enum class FlatnessVerdict { Flat, NotFlat, Undetermined };
const char* to_string(FlatnessVerdict v);
std::optional<FlatnessVerdict> parse_verdict(const std::string& s);

struct FlatnessReport {
  double max_residual = 0.0;  ///< max |g(W(X,Y)Z,U)| / (|X||Y||Z||U|), g-norms
  std::size_t points = 0;
  std::size_t samples = 0;    ///< quadruples evaluated
  FlatnessVerdict verdict = FlatnessVerdict::Undetermined;
  double tolerance = 0.0;
};

inline constexpr double kFlatnessTolerance = 1e-8;
inline constexpr int kDefaultPoints = 20;
inline constexpr int kDefaultTrials = 50;

/// L (Which::Primal) or L* (Which::Dual) from a curvature bundle.
Matrix L_from_bundle(const CurvatureBundle& b, Which which);
/// Assembles W from R, L, L*# and g (production formula).
Tensor4 assemble_W(const Tensor4& riemann, const Matrix& L, const Matrix& L_star_sharp, const Matrix& g);
CPTensors cp_tensors_from_bundle(const CurvatureBundle& b);

Matrix L_at(const StatisticalStructure& s, std::span<const double> p, Which which = Which::Primal);
Matrix sharp_at(const StatisticalStructure& s, std::span<const double> p, const Matrix& bilinear);
CPTensors cp_tensors_at(const StatisticalStructure& s, std::span<const double> p);
Tensor4 W_at(const StatisticalStructure& s, std::span<const double> p);
Tensor4 W_direct_at(const StatisticalStructure& s, std::span<const double> p);
Tensor4 W_direct_from_bundle(const CurvatureBundle& b);

/// max over `trials` random g-unit X, Y, Z, U of |g(W(X,Y)Z,U) + g(W*(X,Y)U,Z)|.
double cp_duality_residual(const StatisticalStructure& s, std::span<const double> p, int trials, std::uint64_t seed);

/// The four pointwise identities checked together over Halton points:
/// sigma = sigma*, the R/R* pairing, the W/W* pairing, and agreement of the two
/// W assemblies. W-based entries are absent when n < 3.
struct IdentityResiduals {
  std::size_t points = 0;
  int trials = 0;
  double sigma_eq = 0.0;
  double rr_star = 0.0;
  std::optional<double> ww_star;
  std::optional<double> w_forms;
};

IdentityResiduals identity_residuals(const StatisticalStructure& s, int points = kDefaultPoints,
                                     int trials = kDefaultTrials, std::uint64_t seed = 1);

FlatnessReport flatness_report(const StatisticalStructure& s, int points = kDefaultPoints,
                               int trials = kDefaultTrials, double tol = kFlatnessTolerance, std::uint64_t seed = 1);

}  // namespace statcurv
