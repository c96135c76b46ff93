#pragma once

#include "qttconv/fourier.hpp"

namespace qttconv {

/// Embeds t at indices 0..M_d-1 of a tensor with every mode of size `padded`.
template <typename Scalar>
DenseTensor<Scalar> zero_pad(const DenseTensor<Scalar>& t, Index padded) {
  for (Index m : t.mode_sizes())
    if (m > padded) throw std::invalid_argument("zero_pad: target size smaller than input");
  DenseTensor<Scalar> out(std::vector<Index>(t.mode_sizes().size(), padded));
  Index flat = 0;
  for_each_index(std::span<const Index>(t.mode_sizes()),
                 [&](std::span<const Index> idx) { out(idx) = t.data()[flat++]; });
  return out;
}

/// Block of extent `n` per mode starting at `offset` in every mode.
template <typename Scalar>
DenseTensor<Scalar> crop(const DenseTensor<Scalar>& t, Index offset, Index n) {
  for (Index m : t.mode_sizes())
    if (offset < 0 || offset + n > m) throw std::invalid_argument("crop: window exceeds tensor");
  const std::vector<Index> modes(t.mode_sizes().size(), n);
  DenseTensor<Scalar> out(modes);
  std::vector<Index> src(modes.size());
  Index flat = 0;
  for_each_index(std::span<const Index>(modes), [&](std::span<const Index> idx) {
    for (std::size_t d = 0; d < idx.size(); ++d) src[d] = idx[d] + offset;
    out.data()[flat++] = t(std::span<const Index>(src));
  });
  return out;
}

/// Centering offset of the 'same'-shaped convolution.
inline Index same_offset(Index n) { return (n - 1) / 2; }

namespace detail {
inline Index checked_grid_size(const std::vector<Index>& a, const std::vector<Index>& b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": signal and kernel shapes differ");
  return common_mode_size(a, what);
}
}  // namespace detail

/// Riemann-sum convolution by direct summation, O(N^{2D}):
///   I_j = dx^D sum_i f_i g_{j - i + (N-1)/2}
/// over all legal subscripts. Ground-truth oracle for the fast routes.
template <typename Scalar>
DenseTensor<Scalar> direct_convolution(const DenseTensor<Scalar>& f, const DenseTensor<Scalar>& g, double dx) {
  const Index n = detail::checked_grid_size(f.mode_sizes(), g.mode_sizes(), "direct_convolution");
  if (!(dx > 0)) throw std::invalid_argument("direct_convolution: dx must be positive");
  const Index c = same_offset(n);
  const auto modes = std::span<const Index>(f.mode_sizes());
  const double scale = std::pow(dx, double(f.order()));
  DenseTensor<Scalar> out(f.mode_sizes());
  std::vector<Index> gi(modes.size());
  Index out_flat = 0;
  for_each_index(modes, [&](std::span<const Index> j) {
    Scalar acc{0};
    Index f_flat = 0;
    for_each_index(modes, [&](std::span<const Index> i) {
      bool legal = true;
      for (std::size_t d = 0; d < i.size() && legal; ++d) {
        gi[d] = j[d] - i[d] + c;
        legal = gi[d] >= 0 && gi[d] < n;
      }
      if (legal) acc += f.data()[f_flat] * g(std::span<const Index>(gi));
      ++f_flat;
    });
    out.data()[out_flat++] = Scalar(scale) * acc;
  });
  return out;
}

/// Same result as direct_convolution through zero padding to 2^K >= 2N-1,
/// IDFT(DFT(f0) . DFT(g0)) and extraction of the central block.
template <typename Scalar>
DenseTensor<Scalar> fft_convolution(const DenseTensor<Scalar>& f, const DenseTensor<Scalar>& g, double dx) {
  const Index n = detail::checked_grid_size(f.mode_sizes(), g.mode_sizes(), "fft_convolution");
  if (!(dx > 0)) throw std::invalid_argument("fft_convolution: dx must be positive");
  Index padded = 1;
  while (padded < 2 * n - 1) padded <<= 1;
  auto fh = dft(zero_pad(f, padded));
  const auto gh = dft(zero_pad(g, padded));
  fh.data().array() *= gh.data().array();
  auto circ = idft(fh);
  circ.data() *= std::pow(dx, double(f.order()));
  auto out = crop(circ, same_offset(n), n);
  if constexpr (is_complex_v<Scalar>) {
    return out;
  } else {
    return real_part(out);
  }
}

}  // namespace qttconv
