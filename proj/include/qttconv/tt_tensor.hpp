#pragma once

#include "qttconv/dense_tensor.hpp"
#include "qttconv/lowrank.hpp"

namespace qttconv {

/// Three-mode TT core of shape left x mode x right, stored flat with the left
/// rank index fastest: (a, i, b) -> a + left * (i + mode * b). Both the left
/// unfolding (left*mode x right) and the right unfolding (left x mode*right)
/// are column-major views of the same buffer.
template <typename Scalar_>
class TTCore {
 public:
  using Scalar = Scalar_;
  using StridedMap = Eigen::Map<const Matrix<Scalar>, 0, Eigen::OuterStride<>>;

  TTCore() = default;
  TTCore(Index left, Index mode, Index right)
      : left_(left), mode_(mode), right_(right), data_(Vector<Scalar>::Zero(left * mode * right)) {
    if (left < 1 || mode < 1 || right < 1) throw std::invalid_argument("TTCore: dimensions must be positive");
  }
  TTCore(Index left, Index mode, Index right, Vector<Scalar> data)
      : left_(left), mode_(mode), right_(right), data_(std::move(data)) {
    if (left < 1 || mode < 1 || right < 1) throw std::invalid_argument("TTCore: dimensions must be positive");
    if (data_.size() != left * mode * right) throw std::invalid_argument("TTCore: data length mismatch");
  }

  /// Core whose left unfolding is `m` (rows = left * mode).
  template <typename Derived>
  static TTCore from_left_unfolding(const Eigen::MatrixBase<Derived>& m, Index left, Index mode) {
    Matrix<Scalar> tmp = m;
    return TTCore(left, mode, tmp.cols(), Eigen::Map<const Vector<Scalar>>(tmp.data(), tmp.size()));
  }
  /// Core whose right unfolding is `m` (cols = mode * right).
  template <typename Derived>
  static TTCore from_right_unfolding(const Eigen::MatrixBase<Derived>& m, Index mode, Index right) {
    Matrix<Scalar> tmp = m;
    return TTCore(tmp.rows(), mode, right, Eigen::Map<const Vector<Scalar>>(tmp.data(), tmp.size()));
  }

  Index left() const { return left_; }
  Index mode() const { return mode_; }
  Index right() const { return right_; }
  Index size() const { return data_.size(); }

  const Vector<Scalar>& data() const { return data_; }
  Vector<Scalar>& data() { return data_; }

  Scalar operator()(Index a, Index i, Index b) const { return data_[a + left_ * (i + mode_ * b)]; }
  Scalar& operator()(Index a, Index i, Index b) { return data_[a + left_ * (i + mode_ * b)]; }

  Eigen::Map<const Matrix<Scalar>> left_unfolding() const { return {data_.data(), left_ * mode_, right_}; }
  Eigen::Map<const Matrix<Scalar>> right_unfolding() const { return {data_.data(), left_, mode_ * right_}; }

  /// The left x right matrix A_i of the core.
  StridedMap slice(Index i) const {
    return StridedMap(data_.data() + left_ * i, left_, right_, Eigen::OuterStride<>(left_ * mode_));
  }

  /// Core as a dense (left, mode, right) tensor.
  DenseTensor<Scalar> as_dense() const { return DenseTensor<Scalar>({left_, mode_, right_}, data_); }

 private:
  Index left_ = 1, mode_ = 1, right_ = 1;
  Vector<Scalar> data_;
};

/// Tensor train: a(i_1..i_K) = A1[i_1] A2[i_2] ... AK[i_K] with r_0 = r_K = 1.
template <typename Scalar_>
class TTTensor {
 public:
  using Scalar = Scalar_;
  using Core = TTCore<Scalar>;

  TTTensor() = default;
  explicit TTTensor(std::vector<Core> cores) : cores_(std::move(cores)) { check(); }

  /// Rank-1 train u_1 (x) u_2 (x) ... from one vector per mode.
  static TTTensor rank_one(const std::vector<Vector<Scalar>>& factors) {
    std::vector<Core> cores;
    for (const auto& u : factors) cores.emplace_back(1, u.size(), 1, u);
    return TTTensor(std::move(cores));
  }

  Index order() const { return Index(cores_.size()); }
  const std::vector<Core>& cores() const { return cores_; }
  const Core& core(Index k) const { return cores_.at(std::size_t(k)); }

  /// Mutable access for in-place algorithms; call check() afterwards.
  std::vector<Core>& mutable_cores() { return cores_; }

  std::vector<Index> mode_sizes() const {
    std::vector<Index> m;
    for (const auto& c : cores_) m.push_back(c.mode());
    return m;
  }

  /// r_0 .. r_K.
  std::vector<Index> ranks() const {
    std::vector<Index> r{1};
    for (const auto& c : cores_) r.push_back(c.right());
    return r;
  }

  Index max_rank() const {
    const auto r = ranks();
    return *std::max_element(r.begin(), r.end());
  }

  void check() const {
    if (cores_.empty()) throw std::invalid_argument("TTTensor: no cores");
    if (cores_.front().left() != 1 || cores_.back().right() != 1)
      throw std::invalid_argument("TTTensor: boundary ranks must be 1");
    for (std::size_t k = 1; k < cores_.size(); ++k)
      if (cores_[k - 1].right() != cores_[k].left()) throw std::invalid_argument("TTTensor: adjacent ranks disagree");
  }

 private:
  std::vector<Core> cores_;
};

/// Number of stored scalars, sum_k r_{k-1} M_k r_k.
template <typename Scalar>
Index storage_count(const TTTensor<Scalar>& t) {
  Index n = 0;
  for (const auto& c : t.cores()) n += c.size();
  return n;
}

template <typename Scalar>
TTTensor<cplx> to_complex(const TTTensor<Scalar>& t) {
  std::vector<TTCore<cplx>> cores;
  for (const auto& c : t.cores()) cores.emplace_back(c.left(), c.mode(), c.right(), c.data().template cast<cplx>());
  return TTTensor<cplx>(std::move(cores));
}

/// Entry at the multi-index, O(K r^2).
template <typename Scalar>
Scalar element(const TTTensor<Scalar>& t, std::span<const Index> idx) {
  if (Index(idx.size()) != t.order()) throw std::out_of_range("element: index has wrong number of modes");
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Ones(1);
  for (Index k = 0; k < t.order(); ++k) {
    const auto& c = t.core(k);
    const Index i = idx[std::size_t(k)];
    if (i < 0 || i >= c.mode()) throw std::out_of_range("element: index out of range");
    row = row * c.slice(i);
  }
  return row(0, 0);
}

template <typename Scalar>
Scalar element(const TTTensor<Scalar>& t, std::initializer_list<Index> idx) {
  return element(t, std::span<const Index>(idx.begin(), idx.size()));
}

/// Dense expansion by successive (prefix x r) * (r x M r') products; the
/// result is reshaped to `mode_sizes`, whose product must match the train.
template <typename Scalar>
DenseTensor<Scalar> full(const TTTensor<Scalar>& t, std::vector<Index> mode_sizes) {
  const auto tt_modes = t.mode_sizes();
  if (num_elements(mode_sizes) != num_elements(tt_modes)) throw std::invalid_argument("full: size mismatch");
  Matrix<Scalar> a = t.core(0).left_unfolding();
  for (Index k = 1; k < t.order(); ++k) {
    const auto& c = t.core(k);
    Matrix<Scalar> next = a * c.right_unfolding();
    // (prefix x M r) -> (prefix M x r), a metadata-only reshape in column-major order
    a = Eigen::Map<const Matrix<Scalar>>(next.data(), next.rows() * c.mode(), c.right());
  }
  return DenseTensor<Scalar>(std::move(mode_sizes), Eigen::Map<const Vector<Scalar>>(a.data(), a.size()));
}

template <typename Scalar>
DenseTensor<Scalar> full(const TTTensor<Scalar>& t) {
  return full(t, t.mode_sizes());
}

/// Contraction of the last mode of `a` with the first mode of `b`.
template <typename Scalar>
DenseTensor<Scalar> contract(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b) {
  if (a.order() < 1 || b.order() < 1) throw std::invalid_argument("contract: tensors need at least one mode");
  const Index shared = a.mode_sizes().back();
  if (shared != b.mode_sizes().front()) throw std::invalid_argument("contract: dimension mismatch");
  std::vector<Index> modes(a.mode_sizes().begin(), a.mode_sizes().end() - 1);
  modes.insert(modes.end(), b.mode_sizes().begin() + 1, b.mode_sizes().end());
  const Index p = a.size() / shared, q = b.size() / shared;
  const Matrix<Scalar> c = Eigen::Map<const Matrix<Scalar>>(a.data().data(), p, shared) *
                           Eigen::Map<const Matrix<Scalar>>(b.data().data(), shared, q);
  if (modes.empty()) modes.push_back(1);
  return DenseTensor<Scalar>(std::move(modes), Eigen::Map<const Vector<Scalar>>(c.data(), c.size()));
}

/// Contraction of all cores, A1 o A2 o ... o AK, with the unit boundary modes dropped.
template <typename Scalar>
DenseTensor<Scalar> contract_chain(const TTTensor<Scalar>& t) {
  auto acc = t.core(0).as_dense();
  for (Index k = 1; k < t.order(); ++k) acc = contract(acc, t.core(k).as_dense());
  std::vector<Index> modes(acc.mode_sizes().begin() + 1, acc.mode_sizes().end() - 1);
  return std::move(acc).reshaped(std::move(modes));
}

/// Element-wise product; ranks multiply.
template <typename Scalar>
TTTensor<Scalar> hadamard(const TTTensor<Scalar>& a, const TTTensor<Scalar>& b) {
  if (a.mode_sizes() != b.mode_sizes()) throw std::invalid_argument("hadamard: shape mismatch");
  std::vector<TTCore<Scalar>> cores;
  for (Index k = 0; k < a.order(); ++k) {
    const auto &x = a.core(k), &y = b.core(k);
    // bond (p, q) -> p * rank_b + q, i.e. slices are Kronecker products
    TTCore<Scalar> c(x.left() * y.left(), x.mode(), x.right() * y.right());
    for (Index i = 0; i < x.mode(); ++i)
      for (Index px = 0; px < x.left(); ++px)
        for (Index qx = 0; qx < x.right(); ++qx) {
          const Scalar xv = x(px, i, qx);
          for (Index py = 0; py < y.left(); ++py)
            for (Index qy = 0; qy < y.right(); ++qy) c(px * y.left() + py, i, qx * y.right() + qy) = xv * y(py, i, qy);
        }
    cores.push_back(std::move(c));
  }
  return TTTensor<Scalar>(std::move(cores));
}

/// a + b with block-structured cores; ranks add.
template <typename Scalar>
TTTensor<Scalar> add(const TTTensor<Scalar>& a, const TTTensor<Scalar>& b) {
  if (a.mode_sizes() != b.mode_sizes()) throw std::invalid_argument("add: shape mismatch");
  const Index n = a.order();
  if (n == 1) return TTTensor<Scalar>({TTCore<Scalar>(1, a.core(0).mode(), 1, a.core(0).data() + b.core(0).data())});
  std::vector<TTCore<Scalar>> cores;
  for (Index k = 0; k < n; ++k) {
    const auto &x = a.core(k), &y = b.core(k);
    const bool first = k == 0, last = k == n - 1;
    TTCore<Scalar> c(first ? 1 : x.left() + y.left(), x.mode(), last ? 1 : x.right() + y.right());
    const Index dl = first ? 0 : x.left(), dr = last ? 0 : x.right();
    for (Index i = 0; i < x.mode(); ++i) {
      for (Index p = 0; p < x.left(); ++p)
        for (Index q = 0; q < x.right(); ++q) c(p, i, q) = x(p, i, q);
      for (Index p = 0; p < y.left(); ++p)
        for (Index q = 0; q < y.right(); ++q) c(dl + p, i, dr + q) += y(p, i, q);
    }
    cores.push_back(std::move(c));
  }
  return TTTensor<Scalar>(std::move(cores));
}


template <typename Scalar>
TTTensor<Scalar> scaled(TTTensor<Scalar> t, Scalar alpha) {
  t.mutable_cores().front().data() *= alpha;
  return t;
}

namespace detail {

// Per-bond policy used inside sweeps: relative tolerances become absolute.
inline TruncationPolicy bond_policy(const TruncationPolicy& policy, double absolute_tolerance) {
  if (std::holds_alternative<Tolerance>(policy)) return Tolerance{absolute_tolerance};
  return policy;
}

// Right-to-left orthogonalization of cores lo+1..K-1 (all but `lo` become
// right-orthonormal); the norm collects in core lo.
template <typename Scalar>
void right_orthogonalize(std::vector<TTCore<Scalar>>& cores, Index lo = 0) {
  for (Index k = Index(cores.size()) - 1; k > lo; --k) {
    auto& c = cores[std::size_t(k)];
    const Matrix<Scalar> at = c.right_unfolding().adjoint();  // (mode*right) x left
    const Index s = std::min(at.rows(), at.cols());
    Eigen::HouseholderQR<Matrix<Scalar>> qr(at);
    const Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(at.rows(), s);
    const Matrix<Scalar> r = qr.matrixQR().topRows(s).template triangularView<Eigen::Upper>();
    const Index mode = c.mode(), right = c.right();
    c = TTCore<Scalar>::from_right_unfolding(q.adjoint(), mode, right);
    auto& prev = cores[std::size_t(k - 1)];
    prev = TTCore<Scalar>::from_left_unfolding(prev.left_unfolding() * r.adjoint(), prev.left(), prev.mode());
  }
}

}  // namespace detail

/// Rank re-compression: right-to-left orthogonalization, then a left-to-right
/// truncated-SVD sweep. Tolerance(eps) bounds the relative Frobenius error by
/// eps (eps ||t|| / sqrt(K-1) per bond).
template <typename Scalar>
TTTensor<Scalar> round(const TTTensor<Scalar>& t, const TruncationPolicy& policy) {
  validate(policy);
  auto cores = t.cores();
  const Index n = Index(cores.size());
  if (n == 1) return t;
  detail::right_orthogonalize(cores);
  double abs_tol = 0.0;
  if (const auto* tol = std::get_if<Tolerance>(&policy))
    abs_tol = tol->value * double(cores.front().data().norm()) / std::sqrt(double(n - 1));
  const auto bond = detail::bond_policy(policy, abs_tol);
  for (Index k = 0; k + 1 < n; ++k) {
    auto& c = cores[std::size_t(k)];
    auto svd = truncated_svd(c.left_unfolding(), bond);
    const Index left = c.left(), mode = c.mode();
    c = TTCore<Scalar>::from_left_unfolding(svd.U, left, mode);
    auto& next = cores[std::size_t(k + 1)];
    const Matrix<Scalar> carry = svd.S.template cast<Scalar>().asDiagonal() * svd.V.adjoint();
    next = TTCore<Scalar>::from_right_unfolding(carry * next.right_unfolding(), next.mode(), next.right());
  }
  return TTTensor<Scalar>(std::move(cores));
}

/// Reverses the order of modes lo..hi (inclusive). The boundary bonds r_{lo-1}
/// and r_hi are routed through the reversed block, so interior ranks grow by
/// r_{lo-1} * r_hi; for a whole train this is an exact core transposition.
template <typename Scalar>
TTTensor<Scalar> reverse_modes(const TTTensor<Scalar>& t, Index lo, Index hi) {
  if (lo < 0 || hi >= t.order() || lo > hi) throw std::out_of_range("reverse_modes: bad range");
  if (lo == hi) return t;
  const auto& old = t.cores();
  const Index a = old[std::size_t(lo)].left(), b = old[std::size_t(hi)].right();
  std::vector<TTCore<Scalar>> cores(old.begin(), old.begin() + lo);
  // interior bond index (alpha, beta, gamma) -> alpha + a * (beta + b * gamma)
  for (Index j = 0; lo + j <= hi; ++j) {
    const auto& src = old[std::size_t(hi - j)];  // src(gamma_in, i, gamma_out)
    const bool first = j == 0, last = lo + j == hi;
    const Index gin = src.right(), gout = src.left();
    const Index left = first ? a : a * b * gin;
    const Index right = last ? b : a * b * gout;
    TTCore<Scalar> c(left, src.mode(), right);
    for (Index al = 0; al < a; ++al)
      for (Index be = 0; be < b; ++be)
        for (Index i = 0; i < src.mode(); ++i)
          for (Index g_out = 0; g_out < (last ? 1 : gout); ++g_out)
            for (Index g_in = 0; g_in < (first ? 1 : gin); ++g_in) {
              const Index row = first ? al : al + a * (be + b * g_in);
              const Index col = last ? be : al + a * (be + b * g_out);
              // the old first core of the block receives alpha, the old last one emits beta
              const Index src_left = last ? al : g_out;
              const Index src_right = first ? be : g_in;
              c(row, i, col) = src(src_left, i, src_right);
            }
    cores.push_back(std::move(c));
  }
  cores.insert(cores.end(), old.begin() + hi + 1, old.end());
  return TTTensor<Scalar>(std::move(cores));
}

}  // namespace qttconv
