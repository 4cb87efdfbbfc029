#pragma once

// Curvature of a statistical structure and of its dual.
//
// Sign convention: R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
// stored as R^l_kij with R(d_i, d_j) d_k = R^l_kij d_l, i.e. riemann(l, k, i, j).
// Ricci contracts the argument slot X: Ric(Y,Z) = tr{X -> R(X,Y)Z}, so
// Ric_jk = R^i_kij. Ricci is not assumed symmetric.

#include "statcurv/structure.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace statcurv {

enum class Which { Primal, Dual };

struct CurvatureBundle {
  Matrix g;
  Matrix g_inv;
  Tensor4 riemann;
  Tensor4 riemann_star;
  Matrix ricci;
  Matrix ricci_star;
  Matrix ricci_op;       ///< (Ric# X)^a = ricci_op(a, x) X^x
  Matrix ricci_star_op;
  double sigma = 0.0;
  double sigma_star = 0.0;
};

struct ConstantCurvatureFit {
  double K = 0.0;
  double residual = 0.0;  ///< max |R^l_kij - K (g_jk delta^l_i - g_ik delta^l_j)| over the sample
};

/// R^l_kij from connection jets; antisymmetric in (i, j) bit-exactly.
Tensor4 riemann_from_jets(const ConnectionJets& gamma);
/// Ric_jk = R^i_kij.
Matrix ricci_from_riemann(const Tensor4& riemann);
/// The (1,1) tensor B# with g(B# X, Y) = B(X, Y); as a matrix, g^{-1} B^T.
Matrix sharp(const Matrix& g_inv, const Matrix& bilinear);
/// sigma = g^{jk} Ric_jk.
double scalar_from_ricci(const Matrix& g_inv, const Matrix& ricci);

CurvatureBundle curvature_bundle(const StatisticalStructure& s, std::span<const double> p);

Tensor4 riemann_at(const StatisticalStructure& s, std::span<const double> p, Which which = Which::Primal);
Matrix ricci_at(const StatisticalStructure& s, std::span<const double> p, Which which = Which::Primal);
Matrix ricci_operator_at(const StatisticalStructure& s, std::span<const double> p, Which which = Which::Primal);
double scalar_at(const StatisticalStructure& s, std::span<const double> p, Which which = Which::Primal);

/// max over the sample of |sigma - sigma*| / (1 + |sigma|).
double sigma_duality_residual(const StatisticalStructure& s, const std::vector<std::vector<double>>& sample);

/// g(R(X,Y)Z, U) for vectors given in chart components.
double lowered_curvature(const Tensor4& r, const Matrix& g, const Vector& x, const Vector& y, const Vector& z,
                         const Vector& u);

/// max over `trials` random g-unit X, Y, Z, U of |g(R(X,Y)Z,U) + g(R*(X,Y)U,Z)|.
double dual_curvature_residual(const StatisticalStructure& s, std::span<const double> p, int trials,
                               std::uint64_t seed);

/// Least-squares K for R^l_kij ~ K (g_jk delta^l_i - g_ik delta^l_j) over the sample.
ConstantCurvatureFit constant_curvature_fit(const StatisticalStructure& s,
                                            const std::vector<std::vector<double>>& sample);

/// The constant-curvature pattern K (g_jk delta^l_i - g_ik delta^l_j).
Tensor4 constant_curvature_pattern(const Matrix& g, double K);

}  // namespace statcurv
