#pragma once

#include "qttconv/dense_tensor.hpp"

namespace qttconv {

/// Quantized layout of a D-dimensional array with 2^K samples per dimension.
/// Bits are concatenated per dimension: x-bits i_1..i_K (least significant
/// first), then y-bits, so sample (x, y) sits at QTT index with
/// x = sum_k i_k 2^{k-1} and y = sum_k i_{K+k} 2^{k-1}.
struct QttLayout {
  Index dims = 1;
  Index bits = 1;

  Index num_modes() const { return dims * bits; }
  Index side() const { return Index{1} << bits; }

  /// Layout of a tensor with equal power-of-two mode sizes.
  static QttLayout of(const std::vector<Index>& mode_sizes) {
    if (mode_sizes.empty()) throw std::invalid_argument("QttLayout: tensor has no modes");
    for (Index m : mode_sizes)
      if (m != mode_sizes.front()) throw std::invalid_argument("QttLayout: all dimensions must have equal length");
    return {Index(mode_sizes.size()), log2_exact(std::uint64_t(mode_sizes.front()))};
  }
};

/// Reshape to D*K binary modes. Because storage is first-index-fastest this
/// is a metadata-only operation.
template <typename Scalar>
DenseTensor<Scalar> qtt_pack(const DenseTensor<Scalar>& v, const QttLayout& layout) {
  if (v.order() != layout.dims) throw std::invalid_argument("qtt_pack: dimension mismatch");
  for (Index m : v.mode_sizes())
    if (!is_power_of_two(std::uint64_t(m)) || m != layout.side())
      throw std::invalid_argument("qtt_pack: every dimension must have length 2^K");
  return v.reshaped(std::vector<Index>(std::size_t(layout.num_modes()), 2));
}

template <typename Scalar>
DenseTensor<Scalar> qtt_pack(const DenseTensor<Scalar>& v) {
  return qtt_pack(v, QttLayout::of(v.mode_sizes()));
}

template <typename Scalar>
DenseTensor<Scalar> qtt_unpack(const DenseTensor<Scalar>& packed, const QttLayout& layout) {
  if (packed.order() != layout.num_modes()) throw std::invalid_argument("qtt_unpack: mode count mismatch");
  for (Index m : packed.mode_sizes())
    if (m != 2) throw std::invalid_argument("qtt_unpack: modes must have size 2");
  return packed.reshaped(std::vector<Index>(std::size_t(layout.dims), layout.side()));
}

}  // namespace qttconv
