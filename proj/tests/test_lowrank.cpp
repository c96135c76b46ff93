#include <gtest/gtest.h>

#include <cmath>

#include "qttconv/lowrank.hpp"

using namespace qttconv;

namespace {

Matrix<double> gaussian(Index m, Index n, std::uint64_t seed) { return GaussianSampler(seed).matrix(m, n); }

double spectral_norm(const Matrix<double>& a) {
  Eigen::JacobiSVD<Matrix<double>> svd(a);
  return svd.singularValues()(0);
}

template <typename S>
void expect_valid(const SVDResult<S>& r) {
  const Index k = r.rank();
  ASSERT_EQ(r.U.cols(), k);
  ASSERT_EQ(r.V.cols(), k);
  EXPECT_LE((r.U.adjoint() * r.U - Matrix<S>::Identity(k, k)).norm(), 1e-10);
  EXPECT_LE((r.V.adjoint() * r.V - Matrix<S>::Identity(k, k)).norm(), 1e-10);
  for (Index i = 0; i < k; ++i) {
    EXPECT_GE(r.S[i], 0.0);
    if (i) EXPECT_LE(r.S[i], r.S[i - 1]);
  }
}

}  // namespace

TEST(TruncatedSvd, RankOneOuterProduct) {
  Vector<double> u(2), v(2);
  u << 1, 2;
  v << 3, 4;
  const Matrix<double> a = u * v.transpose();
  const auto r = truncated_svd(a, MaxRank{5});
  expect_valid(r);
  ASSERT_EQ(r.rank(), 1);
  EXPECT_NEAR(r.S[0], std::sqrt(5.0) * 5.0, 1e-12);
  EXPECT_NEAR(r.S[0], 11.1803398875, 1e-9);
}

TEST(TruncatedSvd, IdentityKeepsEverythingAtZeroTolerance) {
  const auto r = truncated_svd(Matrix<double>::Identity(4, 4), Tolerance{0.0});
  ASSERT_EQ(r.rank(), 4);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(r.S[i], 1.0, 1e-15);
}

TEST(TruncatedSvd, DropOffCutsAtFirstLargeDrop) {
  Vector<double> d(4);
  d << 1, 0.5, 0.004, 0.003;
  const Matrix<double> a = d.asDiagonal();
  EXPECT_EQ(truncated_svd(a, DropOff{0.02}).rank(), 2);
  // no ratio below 0.001: everything above the floor survives
  EXPECT_EQ(truncated_svd(a, DropOff{0.001}).rank(), 4);
}

TEST(TruncatedSvd, DropOffIgnoresNumericalZeros) {
  Vector<double> d(4);
  d << 1, 0.9, 0.8, 1e-17;
  EXPECT_EQ(truncated_svd(Matrix<double>(d.asDiagonal()), DropOff{1e-20}).rank(), 3);
}

TEST(TruncatedSvd, ToleranceIsMinimalRankMeetingBound) {
  const auto a = gaussian(30, 20, 3);
  const auto s = thin_svd(a).S;
  const auto tail = tail_norms(s);
  for (double tau : {0.5, 2.0, 5.0, 10.0}) {
    const auto r = truncated_svd(a, Tolerance{tau});
    const double resid = (a - r.reconstruct()).norm();
    EXPECT_LE(resid, tau + 1e-12);
    if (r.rank() > 1) EXPECT_GT(tail[std::size_t(r.rank() - 1)], tau);
  }
}

TEST(TruncatedSvd, ResidualEqualsTailNorm) {
  const auto a = gaussian(25, 18, 4);
  const auto tail = tail_norms(thin_svd(a).S);
  for (Index r = 1; r <= 18; ++r) {
    const auto svd = truncated_svd(a, MaxRank{r});
    expect_valid(svd);
    EXPECT_NEAR((a - svd.reconstruct()).norm(), tail[std::size_t(r)], 1e-10);
  }
}

TEST(TruncatedSvd, ResidualIsMonotoneInRank) {
  const auto a = gaussian(40, 30, 5);
  double prev = a.norm() + 1.0;
  for (Index r = 1; r <= 30; ++r) {
    const double resid = (a - truncated_svd(a, MaxRank{r}).reconstruct()).norm();
    EXPECT_LE(resid, prev + 1e-12);
    prev = resid;
  }
}

TEST(TruncatedSvd, MaxRankUsesNumericalRankUnlessFixed) {
  Vector<double> u = Vector<double>::LinSpaced(6, 1, 6);
  const Matrix<double> a = u * u.transpose();
  EXPECT_EQ(truncated_svd(a, MaxRank{4}).rank(), 1);
  EXPECT_EQ(truncated_svd(a, MaxRank{4}, true).rank(), 4);
}

TEST(TruncatedSvd, ComplexInput) {
  Matrix<cplx> a = gaussian(12, 9, 6).cast<cplx>() + cplx(0, 1) * gaussian(12, 9, 7).cast<cplx>();
  const auto r = truncated_svd(a, MaxRank{9});
  expect_valid(r);
  EXPECT_LE((a - r.reconstruct()).norm() / a.norm(), 1e-12);
}

TEST(TruncatedSvd, Errors) {
  EXPECT_THROW(truncated_svd(Matrix<double>(0, 3), MaxRank{1}), std::invalid_argument);
  EXPECT_THROW(truncated_svd(gaussian(3, 3, 1), DropOff{1.5}), std::invalid_argument);
  EXPECT_THROW(truncated_svd(gaussian(3, 3, 1), DropOff{0.0}), std::invalid_argument);
  EXPECT_THROW(truncated_svd(gaussian(3, 3, 1), MaxRank{0}), std::invalid_argument);
  EXPECT_THROW(truncated_svd(gaussian(3, 3, 1), Tolerance{-1}), std::invalid_argument);
}

TEST(Rsvd, ExactOnRankOneMatrix) {
  Vector<double> u = Vector<double>::LinSpaced(8, -1, 2), v = Vector<double>::LinSpaced(6, 0.5, 3);
  const Matrix<double> a = u * v.transpose();
  const auto r = rsvd(a, 1, 2, GaussianSampler(11));
  EXPECT_EQ(r.rank(), 1);
  EXPECT_LE((a - r.reconstruct()).norm(), 1e-10);
}

TEST(Rsvd, RecoversEmbeddedDiagonal) {
  Matrix<double> a = Matrix<double>::Zero(50, 50);
  for (Index i = 0; i < 10; ++i) a(i, i) = double(10 - i);
  const auto r = rsvd(a, 10, 5, GaussianSampler(12));
  expect_valid(r);
  EXPECT_LE((a - r.reconstruct()).norm(), 1e-8);
  for (Index i = 0; i < 10; ++i) EXPECT_NEAR(r.S[i], double(10 - i), 1e-10);
}

TEST(Rsvd, KeepsOversampledTripletsOnRequest) {
  const auto r = rsvd(gaussian(40, 30, 13), 6, 4, GaussianSampler(1), false);
  EXPECT_EQ(r.rank(), 10);
  expect_valid(r);
}

TEST(Rsvd, BitReproducibleForFixedSeed) {
  const auto a = gaussian(60, 45, 14);
  const auto r1 = rsvd(a, 8, 5, GaussianSampler(99));
  const auto r2 = rsvd(a, 8, 5, GaussianSampler(99));
  EXPECT_EQ(r1.U, r2.U);
  EXPECT_EQ(r1.S, r2.S);
  EXPECT_EQ(r1.V, r2.V);
  const auto r3 = rsvd(a, 8, 5, GaussianSampler(100));
  EXPECT_NE(r1.U, r3.U);
}

TEST(Rsvd, SpectralBoundHoldsInAlmostAllTrials) {
  const Index m = 100, n = 80, k = 10, p = 5;
  int held = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = gaussian(m, n, 1000 + std::uint64_t(trial));
    const double sigma_next = thin_svd(a).S[k];
    const auto r = rsvd(a, k, p, GaussianSampler(5000 + std::uint64_t(trial)));
    const double bound = (1.0 + 11.0 * std::sqrt(double(k + p)) * std::sqrt(double(std::min(m, n)))) * sigma_next;
    held += spectral_norm(a - r.reconstruct()) <= bound;
  }
  EXPECT_GE(held, 49);
}

TEST(Rsvd, SketchTooLargeSignalsFallback) {
  EXPECT_THROW(rsvd(gaussian(10, 8, 1), 5, 4, GaussianSampler(0)), SketchTooLarge);
  EXPECT_THROW(rsvd(gaussian(10, 8, 1), 0, 4, GaussianSampler(0)), std::invalid_argument);
  // truncated_svd falls back to the deterministic SVD instead
  const auto a = gaussian(10, 8, 1);
  const auto r = truncated_svd(a, Randomized{5, 4, 0});
  EXPECT_EQ(r.rank(), 5);
  EXPECT_NEAR((a - r.reconstruct()).norm(), tail_norms(thin_svd(a).S)[5], 1e-10);
}

TEST(GaussianSampler, MomentsAndDeterminism) {
  GaussianSampler a(7), b(7);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a();
    EXPECT_EQ(x, b());
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Policy, ParseAndDescribe) {
  EXPECT_EQ(describe(parse_policy("maxrank:10")), "maxrank(10)");
  EXPECT_EQ(describe(parse_policy("tolerance:1e-10")), "tolerance(1e-10)");
  EXPECT_EQ(describe(parse_policy("tol:0.5")), "tolerance(0.5)");
  EXPECT_EQ(describe(parse_policy("dropoff:0.02")), "dropoff(0.02)");
  EXPECT_EQ(describe(parse_policy("randomized:10")), "randomized(10,p=5,seed=0)");
  EXPECT_EQ(describe(parse_policy("randomized:10:3:7")), "randomized(10,p=3,seed=7)");
  for (const char* bad : {"maxrank", "maxrank:0", "maxrank:2.5", "dropoff:2", "foo:1", "tolerance:x", "maxrank:3:4"})
    EXPECT_THROW(parse_policy(bad), std::invalid_argument) << bad;
  EXPECT_EQ(rank_cap(MaxRank{7}), 7);
  EXPECT_EQ(rank_cap(Tolerance{1e-3}), -1);
}
