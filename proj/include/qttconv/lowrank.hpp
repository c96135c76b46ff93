#pragma once

#include <variant>

#include "qttconv/random.hpp"

namespace qttconv {

// ---------------------------------------------------------------------------
// Truncation policies
// ---------------------------------------------------------------------------

/// Frobenius budget. For a single matrix the value is the absolute bound on
/// the discarded tail; for tensor-train routines it is relative to ||t||_F.
struct Tolerance {
  double value = 0.0;
};

/// Keep at most `rank` singular triplets.
struct MaxRank {
  Index rank = 1;
};

/// Cut after the first index k with sigma_{k+1} / sigma_k < ratio.
struct DropOff {
  double ratio = 0.5;
};

/// Rank cap realized by a randomized SVD with `oversampling` extra probes.
struct Randomized {
  Index rank = 1;
  Index oversampling = 5;
  std::uint64_t seed = 0;
};

using TruncationPolicy = std::variant<Tolerance, MaxRank, DropOff, Randomized>;

/// Singular values below this fraction of sigma_1 count as numerical zero.
inline constexpr double kSingularValueFloor = 1e-14;

inline void validate(const TruncationPolicy& policy) {
  std::visit(
      [](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Tolerance>) {
          if (!(p.value >= 0.0)) throw std::invalid_argument("Tolerance must be nonnegative");
        } else if constexpr (std::is_same_v<P, MaxRank>) {
          if (p.rank < 1) throw std::invalid_argument("MaxRank must be at least 1");
        } else if constexpr (std::is_same_v<P, DropOff>) {
          if (!(p.ratio > 0.0 && p.ratio < 1.0)) throw std::invalid_argument("DropOff ratio must lie in (0, 1)");
        } else {
          if (p.rank < 1) throw std::invalid_argument("Randomized rank must be at least 1");
          if (p.oversampling < 0) throw std::invalid_argument("oversampling must be nonnegative");
        }
      },
      policy);
}

std::string describe(const TruncationPolicy& policy);

/// Command-line spelling of a policy: "tolerance:1e-10", "maxrank:10",
/// "dropoff:0.02", "randomized:10[:p[:seed]]". Throws std::invalid_argument.
TruncationPolicy parse_policy(const std::string& text);

/// Largest rank the policy can produce, or -1 when unbounded.
inline Index rank_cap(const TruncationPolicy& policy) {
  if (auto* m = std::get_if<MaxRank>(&policy)) return m->rank;
  if (auto* r = std::get_if<Randomized>(&policy)) return r->rank;
  return -1;
}

// ---------------------------------------------------------------------------
// SVD
// ---------------------------------------------------------------------------

template <typename Scalar>
struct SVDResult {
  Matrix<Scalar> U;
  Vector<RealOf<Scalar>> S;
  Matrix<Scalar> V;

  Index rank() const { return S.size(); }

  Matrix<Scalar> reconstruct() const { return U * S.template cast<Scalar>().asDiagonal() * V.adjoint(); }

  void truncate(Index r) {
    r = std::min(r, rank());
    U.conservativeResize(Eigen::NoChange, r);
    V.conservativeResize(Eigen::NoChange, r);
    S.conservativeResize(r);
  }
};

/// Thrown by rsvd when k + p exceeds min(m, n); callers fall back to a
/// deterministic SVD.
class SketchTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thin SVD through Eigen's divide-and-conquer solver.
template <typename Derived>
SVDResult<typename Derived::Scalar> thin_svd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd: empty matrix");
  Eigen::BDCSVD<Matrix<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SVDResult<Scalar> r{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  if (!r.S.allFinite()) throw NumericalError("svd: non-finite singular values");
  return r;
}

/// sqrt(sum_{i >= r} s_i^2) for every r = 0..n.
template <typename Real>
std::vector<Real> tail_norms(const Vector<Real>& s) {
  std::vector<Real> tail(std::size_t(s.size()) + 1, Real(0));
  for (Index i = s.size() - 1; i >= 0; --i) tail[std::size_t(i)] = std::hypot(tail[std::size_t(i) + 1], s[i]);
  return tail;
}

/// Number of numerically nonzero singular values (at least 1).
template <typename Real>
Index numerical_rank(const Vector<Real>& s) {
  Index r = 0;
  const Real floor = s.size() ? kSingularValueFloor * s[0] : Real(0);
  while (r < s.size() && s[r] > floor) ++r;
  return std::max<Index>(r, 1);
}

/// Rank kept by a deterministic truncation of the singular values `s`.
/// `tolerance` is the absolute tail bound for the Tolerance policy.
/// With `fixed_rank`, rank caps keep min(cap, len(s)) values even when
/// some are numerically zero (fixed-rank sweeps keep their staircase).
template <typename Real>
Index select_rank(const Vector<Real>& s, const TruncationPolicy& policy, double tolerance, bool fixed_rank = false) {
  const Index n = s.size();
  if (std::holds_alternative<Tolerance>(policy)) {
    const auto tail = tail_norms(s);
    Index r = 1;
    while (r < n && tail[std::size_t(r)] > tolerance) ++r;
    return r;
  }
  if (const auto* d = std::get_if<DropOff>(&policy)) {
    const Index kept = numerical_rank(s);
    for (Index k = 0; k + 1 < kept; ++k)
      if (s[k + 1] / s[k] < d->ratio) return k + 1;
    return kept;
  }
  const Index cap = rank_cap(policy);
  return std::min(cap, fixed_rank ? n : numerical_rank(s));
}

/// Randomized SVD with a Gaussian range finder (k + p probes). The sampler is
/// taken by value so the call is a pure function of its arguments.
/// With `truncate` the result keeps the leading k triplets, otherwise k + p.
template <typename Derived>
SVDResult<typename Derived::Scalar> rsvd(const Eigen::MatrixBase<Derived>& a, Index k, Index p, GaussianSampler rng,
                                         bool truncate = true) {
  using Scalar = typename Derived::Scalar;
  const Index m = a.rows(), n = a.cols();
  if (m == 0 || n == 0) throw std::invalid_argument("rsvd: empty matrix");
  if (k < 1 || p < 0) throw std::invalid_argument("rsvd: need k >= 1 and p >= 0");
  const Index l = k + p;
  if (l > std::min(m, n)) throw SketchTooLarge("rsvd: k + p exceeds min(m, n)");

  const Matrix<Scalar> omega = rng.matrix(n, l).template cast<Scalar>();
  const Matrix<Scalar> y = a * omega;
  Eigen::HouseholderQR<Matrix<Scalar>> qr(y);
  const Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(m, l);
  const Matrix<Scalar> b = q.adjoint() * a;
  auto small = thin_svd(b);
  SVDResult<Scalar> out{q * small.U, std::move(small.S), std::move(small.V)};
  if (truncate) out.truncate(k);
  return out;
}

/// SVD truncated according to `policy`; Tolerance is an absolute Frobenius
/// bound on ||A - U S V^*||. Randomized falls back to the deterministic
/// rank cap when min(m, n) <= rank + oversampling.
template <typename Derived>
SVDResult<typename Derived::Scalar> truncated_svd(const Eigen::MatrixBase<Derived>& a, const TruncationPolicy& policy,
                                                  bool fixed_rank = false) {
  validate(policy);
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("truncated_svd: empty matrix");
  if (const auto* r = std::get_if<Randomized>(&policy)) {
    if (std::min(a.rows(), a.cols()) > r->rank + r->oversampling)
      return rsvd(a, r->rank, r->oversampling, GaussianSampler(r->seed));
  }
  auto svd = thin_svd(a);
  const double tol = std::holds_alternative<Tolerance>(policy) ? std::get<Tolerance>(policy).value : 0.0;
  svd.truncate(select_rank(svd.S, policy, tol, fixed_rank));
  return svd;
}

}  // namespace qttconv
