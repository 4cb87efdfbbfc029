#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

namespace statcurv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense cube of components over a chart of dimension n. Index order is the
/// component order written in the symbol, e.g. Gamma^k_ij is (k, i, j) and
/// R^l_kij is (l, k, i, j).
template <class T, int Rank>
class TensorArray {
 public:
  TensorArray() = default;
  explicit TensorArray(int n, const T& fill = T{}) : n_(n), data_(size_for(n), fill) {}

  int dimension() const { return n_; }
  std::size_t size() const { return data_.size(); }

  template <class... I>
  T& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

 private:
  static std::size_t size_for(int n) {
    std::size_t s = 1;
    for (int r = 0; r < Rank; ++r) s *= static_cast<std::size_t>(n);
    return s;
  }
  std::size_t offset(const std::array<int, Rank>& idx) const {
    std::size_t o = 0;
    for (int r = 0; r < Rank; ++r) {
      assert(idx[r] >= 0 && idx[r] < n_);
      o = o * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[r]);
    }
    return o;
  }

  int n_ = 0;
  std::vector<T> data_;
};

using Tensor3 = TensorArray<double, 3>;
using Tensor4 = TensorArray<double, 4>;

/// Largest absolute componentwise difference.
template <class T, int Rank>
double max_abs_diff(const TensorArray<T, Rank>& a, const TensorArray<T, Rank>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    m = std::max(m, d < 0 ? -d : d);
  }
  return m;
}

template <class T, int Rank>
double max_abs(const TensorArray<T, Rank>& a) {
  double m = 0.0;
  for (const double v : a.data()) m = std::max(m, v < 0 ? -v : v);
  return m;
}

}  // namespace statcurv
