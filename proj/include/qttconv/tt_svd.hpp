#pragma once

#include <functional>

#include "qttconv/tt_tensor.hpp"

namespace qttconv {

/// Shape of one unfolding visited by the TT-SVD sweep.
struct SweepStep {
  Index k = 0;           ///< 1-based unfolding number
  Index rows = 0;        ///< m_k = M_k r_{k-1}
  Index cols = 0;        ///< n_k
  Index left_rank = 1;   ///< r_{k-1}
  Index rank = 1;        ///< r_k chosen by the truncation
  bool randomized = false;
};

using SweepObserver = std::function<void(const SweepStep&)>;

/// Left-to-right TT-SVD sweep. Per policy:
///  - Tolerance(eps): per-bond bound tau = eps ||t||_F / sqrt(K-1), hence
///    ||t - full(result)||_F <= eps ||t||_F.
///  - MaxRank(R): r_k = min(R, m_k, n_k); the rank staircase is kept even
///    where singular values vanish (zero padding), so storage is predictable.
///  - DropOff(delta): relative singular value drop per unfolding.
///  - Randomized(R, p): randomized SVD of each unfolding with p extra probes,
///    switching to the deterministic rank-R SVD when min(m_k, n_k) <= R + p.
///    The sampler for unfolding k is seeded with seed + k.
template <typename Scalar>
TTTensor<Scalar> tt_svd(const DenseTensor<Scalar>& t, const TruncationPolicy& policy,
                        const SweepObserver& observer = {}) {
  validate(policy);
  if (t.size() == 0 || t.order() == 0) throw std::invalid_argument("tt_svd: empty tensor");
  require_finite(t, "tt_svd");
  const auto& modes = t.mode_sizes();
  const Index order = t.order();
  using Core = TTCore<Scalar>;
  std::vector<Core> cores;
  if (order == 1) {
    cores.emplace_back(1, modes[0], 1, t.data());
    return TTTensor<Scalar>(std::move(cores));
  }

  double tau = 0.0;
  if (const auto* tol = std::get_if<Tolerance>(&policy))
    tau = tol->value * double(frobenius_norm(t)) / std::sqrt(double(order - 1));
  const auto* randomized = std::get_if<Randomized>(&policy);
  const TruncationPolicy bond = randomized ? TruncationPolicy{MaxRank{randomized->rank}} : detail::bond_policy(policy, tau);
  const bool fixed_rank = std::holds_alternative<MaxRank>(policy) || randomized;

  Vector<Scalar> residual = t.data();
  Index left = 1;
  for (Index k = 0; k + 1 < order; ++k) {
    const Index m = left * modes[std::size_t(k)];
    const Index n = residual.size() / m;
    const Eigen::Map<const Matrix<Scalar>> unfolding(residual.data(), m, n);
    const bool use_rsvd = randomized && std::min(m, n) > randomized->rank + randomized->oversampling;
    auto svd = use_rsvd ? rsvd(unfolding, randomized->rank, randomized->oversampling,
                               GaussianSampler(randomized->seed + std::uint64_t(k)))
                        : truncated_svd(unfolding, bond, fixed_rank);
    if (observer) observer(SweepStep{k + 1, m, n, left, svd.rank(), use_rsvd});
    cores.push_back(Core::from_left_unfolding(svd.U, left, modes[std::size_t(k)]));
    const Matrix<Scalar> carry = svd.S.template cast<Scalar>().asDiagonal() * svd.V.adjoint();
    residual = Eigen::Map<const Vector<Scalar>>(carry.data(), carry.size());
    left = svd.rank();
  }
  cores.emplace_back(left, modes.back(), 1, std::move(residual));
  return TTTensor<Scalar>(std::move(cores));
}

/// Randomized TT decomposition by Gaussian sketching: each unfolding C is
/// replaced by its projection onto orth(C Omega) with `rank` columns, without
/// an inner SVD. Unfoldings too small to sketch are orthogonalized exactly.
template <typename Scalar>
TTTensor<Scalar> tt_sketch(const DenseTensor<Scalar>& t, Index rank, std::uint64_t seed,
                           const SweepObserver& observer = {}) {
  if (rank < 1) throw std::invalid_argument("tt_sketch: rank must be at least 1");
  require_finite(t, "tt_sketch");
  const auto& modes = t.mode_sizes();
  const Index order = t.order();
  using Core = TTCore<Scalar>;
  std::vector<Core> cores;
  Vector<Scalar> residual = t.data();
  Index left = 1;
  for (Index k = 0; k + 1 < order; ++k) {
    const Index m = left * modes[std::size_t(k)];
    const Index n = residual.size() / m;
    const Eigen::Map<const Matrix<Scalar>> unfolding(residual.data(), m, n);
    const bool sketch = rank < std::min(m, n);
    const Index s = sketch ? rank : std::min(m, n);
    Matrix<Scalar> y;
    if (sketch)
      y = unfolding * GaussianSampler(seed + std::uint64_t(k)).matrix(n, s).template cast<Scalar>();
    else
      y = unfolding;
    Eigen::HouseholderQR<Matrix<Scalar>> qr(y);
    const Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(m, s);
    if (observer) observer(SweepStep{k + 1, m, n, left, s, sketch});
    cores.push_back(Core::from_left_unfolding(q, left, modes[std::size_t(k)]));
    const Matrix<Scalar> carry = q.adjoint() * unfolding;
    residual = Eigen::Map<const Vector<Scalar>>(carry.data(), carry.size());
    left = s;
  }
  cores.emplace_back(left, modes.back(), 1, std::move(residual));
  return TTTensor<Scalar>(std::move(cores));
}

}  // namespace qttconv
