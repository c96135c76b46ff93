#pragma once

#include <numbers>

#include "qttconv/dense_tensor.hpp"

namespace qttconv {

enum class FftAlgorithm { Naive, Radix2 };

namespace detail {

inline Index common_mode_size(const std::vector<Index>& modes, const char* what) {
  if (modes.empty()) throw std::invalid_argument(std::string(what) + ": tensor has no modes");
  for (Index m : modes)
    if (m != modes.front()) throw std::invalid_argument(std::string(what) + ": all mode sizes must be equal");
  return modes.front();
}

// exp(sign * 2 pi i m / n) for m = 0..n-1
inline std::vector<cplx> roots_of_unity(Index n, int sign) {
  std::vector<cplx> w(static_cast<std::size_t>(n));
  for (Index m = 0; m < n; ++m)
    w[std::size_t(m)] = std::polar(1.0, sign * 2.0 * std::numbers::pi * double(m) / double(n));
  return w;
}

inline DenseTensor<cplx> naive_transform(const DenseTensor<cplx>& t, int sign) {
  const Index n = common_mode_size(t.mode_sizes(), "dft");
  if (t.size() > 4096) throw std::invalid_argument("dft: naive transform is limited to 4096 elements");
  const auto w = roots_of_unity(n, sign);
  DenseTensor<cplx> out(t.mode_sizes());
  const auto modes = std::span<const Index>(t.mode_sizes());
  Index out_flat = 0;
  for_each_index(modes, [&](std::span<const Index> alpha) {
    cplx acc{0.0, 0.0};
    Index in_flat = 0;
    for_each_index(modes, [&](std::span<const Index> j) {
      Index phase = 0;
      for (std::size_t d = 0; d < j.size(); ++d) phase = (phase + j[d] * alpha[d]) % n;
      acc += t.data()[in_flat++] * w[std::size_t(phase)];
    });
    out.data()[out_flat++] = acc;
  });
  return out;
}

// In-place iterative radix-2 transform of the strided line x[0], x[stride], ...
inline void radix2_line(cplx* x, Index n, Index stride, const std::vector<cplx>& w) {
  for (Index i = 1, j = 0; i < n; ++i) {
    Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i * stride], x[j * stride]);
  }
  for (Index len = 2; len <= n; len <<= 1) {
    const Index half = len / 2, step = n / len;
    for (Index start = 0; start < n; start += len) {
      for (Index k = 0; k < half; ++k) {
        cplx& a = x[(start + k) * stride];
        cplx& b = x[(start + k + half) * stride];
        const cplx t = b * w[std::size_t(k * step)];
        b = a - t;
        a += t;
      }
    }
  }
}

inline DenseTensor<cplx> radix2_transform(DenseTensor<cplx> t, int sign) {
  const Index n = common_mode_size(t.mode_sizes(), "dft");
  if (!is_power_of_two(std::uint64_t(n))) throw std::invalid_argument("dft: radix-2 path requires a power-of-two size");
  const auto w = roots_of_unity(n, sign);
  cplx* data = t.data().data();
  Index stride = 1;
  for (Index d = 0; d < t.order(); ++d) {
    const Index block = stride * n;
    for (Index outer = 0; outer < t.size(); outer += block)
      for (Index inner = 0; inner < stride; ++inner) radix2_line(data + outer + inner, n, stride, w);
    stride = block;
  }
  return t;
}

}  // namespace detail

/// D-dimensional DFT with omega_N = exp(-2 pi i / N). Every mode must have size N.
template <typename Scalar>
DenseTensor<cplx> dft(const DenseTensor<Scalar>& t, FftAlgorithm algo = FftAlgorithm::Radix2) {
  auto c = to_complex(t);
  return algo == FftAlgorithm::Naive ? detail::naive_transform(c, -1) : detail::radix2_transform(std::move(c), -1);
}

/// Inverse DFT including the 1/N^D factor.
template <typename Scalar>
DenseTensor<cplx> idft(const DenseTensor<Scalar>& t, FftAlgorithm algo = FftAlgorithm::Radix2) {
  auto c = to_complex(t);
  auto out = algo == FftAlgorithm::Naive ? detail::naive_transform(c, +1) : detail::radix2_transform(std::move(c), +1);
  out.data() /= double(out.size());
  return out;
}

}  // namespace qttconv
