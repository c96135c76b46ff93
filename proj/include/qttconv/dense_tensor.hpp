#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "qttconv/common.hpp"

namespace qttconv {

/// Product of a list of mode sizes.
inline Index num_elements(std::span<const Index> mode_sizes) {
  return std::accumulate(mode_sizes.begin(), mode_sizes.end(), Index{1}, std::multiplies<>{});
}

/// Full-format K-mode tensor. Data is flat with the first index fastest, so
/// element (i_1, .., i_K) lives at i_1 + i_2 M_1 + i_3 M_1 M_2 + ...
template <typename Scalar_>
class DenseTensor {
 public:
  using Scalar = Scalar_;
  using RealScalar = RealOf<Scalar>;

  DenseTensor() = default;

  explicit DenseTensor(std::vector<Index> mode_sizes)
      : modes_(std::move(mode_sizes)), data_(Vector<Scalar>::Zero(checked_size(modes_))) {}

  DenseTensor(std::vector<Index> mode_sizes, Vector<Scalar> data) : modes_(std::move(mode_sizes)), data_(std::move(data)) {
    if (checked_size(modes_) != data_.size())
      throw std::invalid_argument("DenseTensor: data length does not match product of mode sizes");
  }

  DenseTensor(std::vector<Index> mode_sizes, std::initializer_list<Scalar> values)
      : DenseTensor(std::move(mode_sizes), Eigen::Map<const Vector<Scalar>>(values.begin(), Index(values.size()))) {}

  /// Vector-shaped tensor (one mode).
  static DenseTensor vector(Vector<Scalar> v) {
    const Index n = v.size();
    return DenseTensor({n}, std::move(v));
  }

  const std::vector<Index>& mode_sizes() const { return modes_; }
  Index mode_size(Index k) const { return modes_.at(std::size_t(k)); }
  Index order() const { return Index(modes_.size()); }
  Index size() const { return data_.size(); }

  const Vector<Scalar>& data() const { return data_; }
  Vector<Scalar>& data() { return data_; }

  Index flat_index(std::span<const Index> idx) const {
    if (Index(idx.size()) != order()) throw std::out_of_range("DenseTensor: index has wrong number of modes");
    Index flat = 0, stride = 1;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < 0 || idx[k] >= modes_[k]) throw std::out_of_range("DenseTensor: index out of range");
      flat += idx[k] * stride;
      stride *= modes_[k];
    }
    return flat;
  }

  const Scalar& operator()(std::span<const Index> idx) const { return data_[flat_index(idx)]; }
  Scalar& operator()(std::span<const Index> idx) { return data_[flat_index(idx)]; }
  const Scalar& operator()(std::initializer_list<Index> idx) const {
    return (*this)(std::span<const Index>(idx.begin(), idx.size()));
  }
  Scalar& operator()(std::initializer_list<Index> idx) { return (*this)(std::span<const Index>(idx.begin(), idx.size())); }

  /// Same data under new mode sizes (metadata only).
  DenseTensor reshaped(std::vector<Index> mode_sizes) const& { return DenseTensor(std::move(mode_sizes), data_); }
  DenseTensor reshaped(std::vector<Index> mode_sizes) && {
    return DenseTensor(std::move(mode_sizes), std::move(data_));
  }

  bool operator==(const DenseTensor& other) const { return modes_ == other.modes_ && data_ == other.data_; }

 private:
  static Index checked_size(const std::vector<Index>& modes) {
    for (Index m : modes)
      if (m <= 0) throw std::invalid_argument("DenseTensor: mode sizes must be positive");
    return num_elements(modes);
  }

  std::vector<Index> modes_;
  Vector<Scalar> data_;
};

/// k-th unfolding: rows group modes 1..k, columns modes k+1..K.
template <typename Scalar>
Matrix<Scalar> unfold(const DenseTensor<Scalar>& t, Index k) {
  if (k < 1 || k > t.order() - 1) throw std::out_of_range("unfold: mode count k must satisfy 1 <= k <= K-1");
  const auto& m = t.mode_sizes();
  const Index rows = num_elements(std::span<const Index>(m.data(), std::size_t(k)));
  return Eigen::Map<const Matrix<Scalar>>(t.data().data(), rows, t.size() / rows);
}

/// Inverse of unfold: column-major reinterpretation of the matrix.
template <typename Derived>
DenseTensor<typename Derived::Scalar> fold(const Eigen::MatrixBase<Derived>& a, std::vector<Index> mode_sizes) {
  using Scalar = typename Derived::Scalar;
  if (num_elements(mode_sizes) != a.size()) throw std::invalid_argument("fold: size mismatch");
  Matrix<Scalar> m = a;
  return DenseTensor<Scalar>(std::move(mode_sizes), Eigen::Map<const Vector<Scalar>>(m.data(), m.size()));
}

template <typename Scalar>
RealOf<Scalar> frobenius_norm(const DenseTensor<Scalar>& t) {
  return t.data().norm();
}

template <typename Scalar>
DenseTensor<cplx> to_complex(const DenseTensor<Scalar>& t) {
  return DenseTensor<cplx>(t.mode_sizes(), t.data().template cast<cplx>());
}

inline DenseTensor<double> real_part(const DenseTensor<cplx>& t) {
  return DenseTensor<double>(t.mode_sizes(), t.data().real());
}

/// Throws NumericalError if any entry is NaN or Inf.
template <typename Scalar>
void require_finite(const DenseTensor<Scalar>& t, const char* what) {
  if (!t.data().allFinite()) throw NumericalError(std::string(what) + ": non-finite values");
}

/// Calls f(idx) for every multi-index in storage order (first index fastest).
template <typename F>
void for_each_index(std::span<const Index> mode_sizes, F&& f) {
  std::vector<Index> idx(mode_sizes.size(), 0);
  const Index total = num_elements(mode_sizes);
  for (Index flat = 0; flat < total; ++flat) {
    f(std::span<const Index>(idx));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (++idx[k] < mode_sizes[k]) break;
      idx[k] = 0;
    }
  }
}

}  // namespace qttconv
