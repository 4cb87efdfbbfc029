#pragma once

// Statistical structures (g, nabla) on a single chart.
//
// Index convention used throughout the library: Gamma^k_ij is stored with the
// contravariant index first, gamma(k, i, j), and nabla_{d_i} d_j = Gamma^k_ij d_k.
// The cubic tensor is C_kij = (nabla_k g)_ij.

#include "statcurv/expr.hpp"
#include "statcurv/jet.hpp"
#include "statcurv/tensor.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace statcurv {

// ---- declarative description ------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class MetricKind { ClosedForm, Conformal, Potential };
enum class ConnectionKind { Flat, LeviCivita, Coefficients, Cubic };

struct MetricSpec {
  MetricKind kind = MetricKind::ClosedForm;
  /// ClosedForm: n*n entries row-major. Conformal: the factor f (g = f delta).
  /// Potential: psi (g = Hess psi).
  std::vector<std::string> components;
};

struct ConnectionSpec {
  ConnectionKind kind = ConnectionKind::Flat;
  /// Coefficients: Gamma^k_ij, Cubic: C_kij; both n^3 entries in (k, i, j) order.
  std::vector<std::string> components;
};

struct ManifoldSpec {
  std::string name;
  int dimension = 0;
  std::vector<Interval> domain;
  MetricSpec metric;
  ConnectionSpec connection;
  /// Free-form provenance (family, seed, amplitude, ...). Serialized verbatim.
  std::map<std::string, std::string> provenance;
};

const char* to_string(MetricKind kind);
const char* to_string(ConnectionKind kind);

// ---- evaluable structure -----------------------------------------------------

using MetricJets = TensorArray<Jet2, 2>;
using ConnectionJets = TensorArray<Jet1, 3>;

/// Metric with derivatives up to second order and connection with first
/// derivatives, at one point.
struct FieldJets {
  MetricJets metric;
  ConnectionJets connection;
};

using FieldEvaluator = std::function<FieldJets(std::span<const double>)>;

class StatisticalStructure {
 public:
  StatisticalStructure(std::string label, int dimension, std::vector<Interval> domain, FieldEvaluator evaluator,
                       std::optional<ManifoldSpec> spec = std::nullopt);

  const std::string& label() const { return label_; }
  int dimension() const { return n_; }
  const std::vector<Interval>& domain() const { return domain_; }

  /// The declarative source, when the structure can still be written as one.
  const std::optional<ManifoldSpec>& spec() const { return spec_; }

  bool contains(std::span<const double> p) const;

  /// Jets at p. Throws SpecError when p is outside the domain box.
  FieldJets evaluate(std::span<const double> p) const;

 private:
  std::string label_;
  int n_;
  std::vector<Interval> domain_;
  FieldEvaluator evaluator_;
  std::optional<ManifoldSpec> spec_;
};

/// Parses every expression and assembles the evaluator. Rejects malformed
/// expressions, shape mismatches, and arrays that are not symmetric as written.
StatisticalStructure build_structure(const ManifoldSpec& spec);

/// (M, g, nabla*) as a structure of its own.
StatisticalStructure dual_structure(const StatisticalStructure& s);

// ---- jet-level building blocks (shared with transforms) ---------------------

/// g^{-1} together with its first derivatives. Throws NonSpdMetric.
TensorArray<Jet1, 2> inverse_metric_jets(const MetricJets& g);

ConnectionJets levi_civita_jets(const MetricJets& g);
ConnectionJets dual_connection_jets(const MetricJets& g, const ConnectionJets& gamma);

// ---- pointwise values --------------------------------------------------------

struct PointTensors {
  Matrix g;
  Matrix g_inv;
  Tensor3 gamma;
  Tensor3 gamma_star;
  Tensor3 cubic;
};

Matrix metric_values(const MetricJets& g);
Tensor3 connection_values(const ConnectionJets& gamma);
/// C_kij = d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il.
Tensor3 cubic_values(const MetricJets& g, const ConnectionJets& gamma);
/// Inverse via Cholesky. Throws NonSpdMetric.
Matrix inverse_spd(const Matrix& g);

PointTensors point_tensors(const StatisticalStructure& s, std::span<const double> p);

std::pair<Matrix, Matrix> metric_at(const StatisticalStructure& s, std::span<const double> p);
Tensor3 levi_civita_at(const StatisticalStructure& s, std::span<const double> p);
Tensor3 cubic_at(const StatisticalStructure& s, std::span<const double> p);
Tensor3 dual_connection_at(const StatisticalStructure& s, std::span<const double> p);
/// Contravariant gradient (grad_g psi)^k = g^{kl} d_l psi.
Vector grad_scalar_at(const StatisticalStructure& s, const Expr& psi, std::span<const double> p);

// ---- validation --------------------------------------------------------------

struct ValidationReport {
  std::size_t points = 0;
  bool spd = true;           ///< metric SPD at every sampled point
  std::size_t spd_failures = 0;
  double torsion = 0.0;      ///< max |Gamma^k_ij - Gamma^k_ji|
  double codazzi = 0.0;      ///< max over index permutations of |C_kij - C_perm|
  double dual_torsion = 0.0; ///< max |Gamma*^k_ij - Gamma*^k_ji|
  double tolerance = 0.0;
  std::vector<std::string> errors;  ///< evaluation failures, one per point
  bool pass() const;
};

inline constexpr double kStructureTolerance = 1e-9;

ValidationReport validate_structure(const StatisticalStructure& s, const std::vector<std::vector<double>>& sample,
                                    double tol = kStructureTolerance);

/// Max over the six index permutations of |C_kij - C_perm(kij)|.
double codazzi_residual(const Tensor3& cubic);
/// Max |T^k_ij - T^k_ji|.
double torsion_residual(const Tensor3& gamma);

}  // namespace statcurv
