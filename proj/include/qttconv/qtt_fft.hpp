#pragma once

#include <numbers>

#include "qttconv/qtt.hpp"
#include "qttconv/tt_tensor.hpp"

namespace qttconv {

enum class FftDirection { Forward, Inverse };

/// Truncation applied inside the QTT transform. A Tolerance(eps) budget is
/// split evenly over the internal rounding steps so the whole transform stays
/// within relative error eps.
struct FftPolicy {
  TruncationPolicy truncation = Tolerance{1e-12};
  FftDirection direction = FftDirection::Forward;
};

namespace detail {

// y(.., a, ..) = sum_j H(a, j) x(.., j, ..) with H = [[1, 1], [1, -1]] on core p.
inline void butterfly(TTCore<cplx>& c) {
  for (Index b = 0; b < c.right(); ++b)
    for (Index a = 0; a < c.left(); ++a) {
      const cplx x0 = c(a, 0, b), x1 = c(a, 1, b);
      c(a, 0, b) = x0 + x1;
      c(a, 1, b) = x0 - x1;
    }
}

// Multiplies the a = 1 branch (mode of core p) by
//   exp(sign 2 pi i j' / 2^{p-lo+1}),   j' = sum_{k=lo}^{p-1} j_k 2^{k-lo},
// a rank-2 Hadamard factor spanning cores lo..p.
inline void twiddle(std::vector<TTCore<cplx>>& cores, Index lo, Index p, int sign) {
  const double n = std::ldexp(1.0, int(p - lo + 1));
  for (Index k = lo; k <= p; ++k) {
    const auto& old = cores[std::size_t(k)];
    const bool start = k == lo, stop = k == p;
    const Index l = old.left(), r = old.right();
    TTCore<cplx> c(start ? l : 2 * l, 2, stop ? r : 2 * r);
    if (stop) {
      for (Index b = 0; b < r; ++b)
        for (Index a = 0; a < l; ++a) {
          c(a, 0, b) = old(a, 0, b);
          c(l + a, 1, b) = old(a, 1, b);
        }
    } else {
      const cplx phase = std::polar(1.0, sign * 2.0 * std::numbers::pi * std::ldexp(1.0, int(k - lo)) / n);
      for (Index j = 0; j < 2; ++j) {
        const cplx w = j ? phase : cplx{1.0};
        for (Index b = 0; b < r; ++b)
          for (Index a = 0; a < l; ++a) {
            const cplx x = old(a, j, b);
            c(a, j, b) = x;
            c(start ? a : l + a, j, r + b) = x * w;
          }
      }
    }
    cores[std::size_t(k)] = std::move(c);
  }
}

inline void check_qtt_modes(const TTTensor<cplx>& v, const QttLayout& layout) {
  for (Index m : v.mode_sizes())
    if (m != 2) throw std::invalid_argument("qtt_fft: every mode must have size 2");
  if (v.order() != layout.num_modes()) throw std::invalid_argument("qtt_fft: mode count does not match layout");
}

// Tolerance budgets are split evenly over the rounding steps of a transform.
inline TruncationPolicy stage_policy(const TruncationPolicy& policy, Index roundings) {
  if (const auto* tol = std::get_if<Tolerance>(&policy)) return Tolerance{tol->value / double(std::max<Index>(roundings, 1))};
  return policy;
}

// Decimation-in-frequency stages on cores lo..hi; leaves that block in
// bit-reversed frequency order.
inline TTTensor<cplx> dif_block(TTTensor<cplx> v, Index lo, Index hi, int sign, const TruncationPolicy& stage) {
  for (Index p = hi; p >= lo; --p) {
    auto& cores = v.mutable_cores();
    butterfly(cores[std::size_t(p)]);
    if (p > lo) {
      twiddle(cores, lo, p, sign);
      v.check();
      v = round(v, stage);
    }
  }
  return v;
}

// Exact inverse of dif_block(sign): bit-reversed input, natural output.
// The 1/2 of every inverse butterfly is applied once at the end by the caller.
inline TTTensor<cplx> dif_block_inverse(TTTensor<cplx> v, Index lo, Index hi, int sign, const TruncationPolicy& stage) {
  for (Index p = lo; p <= hi; ++p) {
    if (p > lo) {
      twiddle(v.mutable_cores(), lo, p, -sign);
      v.check();
    }
    butterfly(v.mutable_cores()[std::size_t(p)]);
    if (p > lo) v = round(v, stage);
  }
  return v;
}

}  // namespace detail

/// Rank-truncated D-dimensional DFT of a tensor in QTT layout. Each
/// dimension is a radix-2 decimation-in-frequency sweep over its K cores
/// (butterfly, twiddle, rounding), after which the bit-reversed output is
/// restored by reversing that block of cores.
inline TTTensor<cplx> qtt_transform(TTTensor<cplx> v, const QttLayout& layout, const FftPolicy& policy) {
  detail::check_qtt_modes(v, layout);
  validate(policy.truncation);
  const int sign = policy.direction == FftDirection::Forward ? -1 : +1;
  const Index d = layout.dims, k = layout.bits;
  const auto stage = detail::stage_policy(policy.truncation, d * (k - 1) + (d > 1 ? d : 0));
  for (Index dim = 0; dim < d; ++dim) {
    const Index lo = dim * k, hi = lo + k - 1;
    v = detail::dif_block(std::move(v), lo, hi, sign, stage);
    // In 2D the reversal routes the bond to the other block through every
    // core of this one, so interior ranks grow until the next rounding.
    v = reverse_modes(v, lo, hi);
    if (d > 1) v = round(v, stage);
  }
  if (sign > 0) v = scaled(std::move(v), cplx{std::ldexp(1.0, -int(d * k))});
  return v;
}

/// Forward transform without the final permutation: the frequency bits of
/// every dimension come out reversed. Enough for pointwise products, which do
/// not care about ordering.
inline TTTensor<cplx> qtt_fft_bitreversed(TTTensor<cplx> v, const QttLayout& layout, const TruncationPolicy& truncation) {
  detail::check_qtt_modes(v, layout);
  validate(truncation);
  const Index d = layout.dims, k = layout.bits;
  const auto stage = detail::stage_policy(truncation, d * (k - 1));
  for (Index dim = 0; dim < d; ++dim) v = detail::dif_block(std::move(v), dim * k, dim * k + k - 1, -1, stage);
  return v;
}

/// Inverse DFT of a spectrum in the order produced by qtt_fft_bitreversed;
/// the result is in natural order and includes the 1/N^D factor.
inline TTTensor<cplx> qtt_ifft_bitreversed(TTTensor<cplx> v, const QttLayout& layout, const TruncationPolicy& truncation) {
  detail::check_qtt_modes(v, layout);
  validate(truncation);
  const Index d = layout.dims, k = layout.bits;
  const auto stage = detail::stage_policy(truncation, d * (k - 1));
  for (Index dim = 0; dim < d; ++dim) v = detail::dif_block_inverse(std::move(v), dim * k, dim * k + k - 1, -1, stage);
  return scaled(std::move(v), cplx{std::ldexp(1.0, -int(d * k))});
}

inline TTTensor<cplx> qtt_fft(const TTTensor<cplx>& v, const QttLayout& layout, TruncationPolicy truncation) {
  return qtt_transform(v, layout, FftPolicy{std::move(truncation), FftDirection::Forward});
}

inline TTTensor<cplx> qtt_ifft(const TTTensor<cplx>& v, const QttLayout& layout, TruncationPolicy truncation) {
  return qtt_transform(v, layout, FftPolicy{std::move(truncation), FftDirection::Inverse});
}

/// One-dimensional convenience overloads.
inline TTTensor<cplx> qtt_fft(const TTTensor<cplx>& v, TruncationPolicy truncation) {
  return qtt_fft(v, QttLayout{1, v.order()}, std::move(truncation));
}
inline TTTensor<cplx> qtt_ifft(const TTTensor<cplx>& v, TruncationPolicy truncation) {
  return qtt_ifft(v, QttLayout{1, v.order()}, std::move(truncation));
}

}  // namespace qttconv
