#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qttconv/signals.hpp"

using namespace qttconv;

TEST(Grid, MidpointsAreSymmetricAndInside) {
  for (Index n : {1, 7, 8, 1023}) {
    const Grid g{1, n, 3.0};
    EXPECT_DOUBLE_EQ(g.dx() * double(n), 6.0);
    EXPECT_NEAR(g.point(0), -3.0 + g.dx() / 2, 1e-14);
    for (Index j = 0; j < n; ++j) {
      EXPECT_EQ(g.point(j), -g.point(n - 1 - j));
      EXPECT_GT(g.point(j), -3.0);
      EXPECT_LT(g.point(j), 3.0);
    }
  }
  EXPECT_EQ(Grid({1, 7, 1.0}).point(3), 0.0);
}

TEST(GafKernel, UnitDiscreteMass) {
  const Grid g1{1, 255, 10.0};
  const auto k1 = gaf_kernel(g1, KernelSpec{4 * g1.dx()});
  EXPECT_NEAR(k1.data().sum() * g1.dx(), 1.0, 1e-12);
  EXPECT_NEAR(k1.data().sum(), 1.0 / g1.dx(), 1e-12 / g1.dx());

  const Grid g2{2, 63, 1.0};
  const auto k2 = gaf_kernel(g2, KernelSpec{2 * g2.dx()});
  EXPECT_NEAR(k2.data().sum() * g2.dx() * g2.dx(), 1.0, 1e-12);
}

TEST(GafKernel, WideResolutionApproachesConstant) {
  for (Index dims : {1, 2}) {
    const Grid g{dims, 15, 2.0};
    const auto k = gaf_kernel(g, KernelSpec{1e7});
    const double expected = 1.0 / std::pow(4.0, double(dims));
    for (Index i = 0; i < k.size(); ++i) EXPECT_NEAR(k.data()[i], expected, 1e-9);
  }
}

TEST(GafKernel, SymmetricUnderIndexReversal) {
  const Grid g{1, 1023, 10.0};
  const auto k = gaf_kernel(g, KernelSpec{4 * g.dx()});
  for (Index j = 0; j < g.n; ++j) EXPECT_EQ(k.data()[j], k.data()[g.n - 1 - j]);

  const Grid g2{2, 31, 1.0};
  const auto k2 = gaf_kernel(g2, KernelSpec{2 * g2.dx()});
  for (Index x = 0; x < 31; ++x)
    for (Index y = 0; y < 31; ++y) {
      EXPECT_EQ(k2({x, y}), k2({30 - x, y}));
      EXPECT_EQ(k2({x, y}), k2({y, x}));
    }
}

TEST(GafKernel, PeakAndFirstZero) {
  const double res = 0.04 * std::numbers::pi;
  EXPECT_EQ(gaf_profile(0.0, res), 1.0);
  EXPECT_NEAR(gaf_profile(res, res), 0.0, 1e-15);
  EXPECT_NEAR(gaf_profile(-res, res), 0.0, 1e-15);

  const Grid g{1, 2001, 10.0};
  const auto k = gaf_kernel(g, KernelSpec{res});
  const Index mid = 1000;
  EXPECT_EQ(g.point(mid), 0.0);
  Index argmax = 0;
  k.data().maxCoeff(&argmax);
  EXPECT_EQ(argmax, mid);
  // positive inside the main lobe, negative just beyond the first zero
  for (Index j = 0; j < g.n; ++j) {
    const double x = std::abs(g.point(j));
    if (x < res - 1e-12) EXPECT_GT(k.data()[j], 0.0);
    if (x > res + 1e-12 && x < 1.9 * res) EXPECT_LT(k.data()[j], 0.0);
  }
}

TEST(GafKernel, RejectsBadSpec) {
  EXPECT_THROW(gaf_kernel(Grid{1, 7, 1.0}, KernelSpec{0.0}), std::invalid_argument);
  EXPECT_THROW(gaf_kernel(Grid{3, 7, 1.0}, KernelSpec{1.0}), std::invalid_argument);
  EXPECT_THROW(gaf_kernel(Grid{1, 0, 1.0}, KernelSpec{1.0}), std::invalid_argument);
}

TEST(Reflectivity, ExampleOneValues) {
  const auto setup = example_setup(1);
  const auto g = setup.grid(10);
  const auto f = reflectivity(1, g);
  EXPECT_DOUBLE_EQ(f.data()[(g.n - 1) / 2], -0.7);
  for (Index j = 0; j < g.n; ++j) {
    const double x = g.point(j);
    EXPECT_LE(std::abs(f.data()[j]), 1.1 * std::exp(-std::pow(3 * x / 10, 2)) + 1e-15);
    const double ref = std::exp(-std::pow(0.3 * x, 2)) * (0.4 * std::sin(8 * std::numbers::pi * x) - 0.7 * std::cos(6 * std::numbers::pi * x));
    EXPECT_NEAR(f.data()[j], ref, 1e-14);
  }
}

TEST(Reflectivity, ExampleTwoUsesGridSpacing) {
  const auto g = example_setup(2).grid(8);
  const auto f = reflectivity(2, g);
  const double dx = g.dx(), pi = std::numbers::pi;
  for (Index j : {0, 17, 63, 100}) {
    const double x = g.point(j);
    const double ref = std::exp(-9 * x * x) * (0.9 * std::sin(2 * x * pi / (5 * dx)) + 1.4 * std::cos(x * pi / (3 * dx)));
    EXPECT_NEAR(f.data()[j], ref, 1e-13);
  }
  EXPECT_DOUBLE_EQ(f.data()[(g.n - 1) / 2], 1.4);
}

TEST(Reflectivity, ExampleThreeOrigin) {
  const auto g = example_setup(3).grid(6);
  const auto f = reflectivity(3, g);
  const Index c = (g.n - 1) / 2;
  EXPECT_EQ(f({c, c}), 0.0);
  // x is the first (fastest) index
  const double x = g.point(5), y = g.point(20), pi = std::numbers::pi;
  const double ref = std::exp(-(4 * x * x + 4 * y * y)) *
                     (std::sin(2 * pi * x) - std::cos(7 * pi * y) + std::cos(4 * pi * x * y) - std::sin(3 * pi * x * y));
  EXPECT_NEAR(f({5, 20}), ref, 1e-14);
}

TEST(Reflectivity, PureAndValidated) {
  const auto g = example_setup(1).grid(9);
  EXPECT_EQ(reflectivity(1, g), reflectivity(1, g));
  EXPECT_THROW(reflectivity(3, g), std::invalid_argument);
  EXPECT_THROW(reflectivity(2, g), std::invalid_argument);  // half-width 10 is example 1's
  EXPECT_THROW(reflectivity(4, g), std::invalid_argument);
  EXPECT_THROW(reflectivity(1, Grid{1, 7, 1.0}), std::invalid_argument);
}

TEST(Noise, ZeroVarianceIsIdentity) {
  const auto f = reflectivity(1, example_setup(1).grid(8));
  EXPECT_EQ(add_noise(f, NoiseSpec{0.0, 3}), f);
}

TEST(Noise, SampleVarianceWithinTwoPercent) {
  DenseTensor<double> z({Index{1} << 20});
  for (double var : {0.02, 0.1, 4e-4}) {
    const auto xi = add_noise(z, NoiseSpec{var, 12345});
    const double mean = xi.data().mean();
    const double sample_var = (xi.data().array() - mean).square().sum() / double(xi.size() - 1);
    EXPECT_NEAR(sample_var / var, 1.0, 0.02) << "variance " << var;
    EXPECT_NEAR(mean, 0.0, 5 * std::sqrt(var / double(xi.size())));
  }
}

TEST(Noise, SeedDeterminesRealization) {
  const auto f = reflectivity(1, example_setup(1).grid(10));
  const auto a = add_noise(f, NoiseSpec{0.01, 42}), b = add_noise(f, NoiseSpec{0.01, 42});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, add_noise(f, NoiseSpec{0.01, 43}));
  EXPECT_THROW(add_noise(f, NoiseSpec{-1.0, 0}), std::invalid_argument);
}

TEST(Examples, FixedParameters) {
  const auto e1 = example_setup(1), e2 = example_setup(2), e3 = example_setup(3);
  EXPECT_EQ(e1.dims, 1);
  EXPECT_EQ(e1.half_width, 10.0);
  EXPECT_EQ(e1.resolution_factor, 4.0);
  EXPECT_EQ(e2.half_width, 1.0);
  EXPECT_EQ(e2.resolution_factor, 2.0);
  EXPECT_EQ(e3.dims, 2);
  EXPECT_EQ(e3.resolution_factor, 2.0);
  EXPECT_EQ(e3.default_bits, 10);
  // the noise level is a standard deviation
  EXPECT_DOUBLE_EQ(e1.noise(0).variance, 0.02 * 0.02);
  EXPECT_DOUBLE_EQ(e2.noise(0).variance, 0.01 * 0.01);
  EXPECT_DOUBLE_EQ(e3.noise(0).variance, 0.1 * 0.1);
  const auto g = e1.grid(20);
  EXPECT_EQ(g.n, (Index{1} << 19) - 1);
  EXPECT_DOUBLE_EQ(e1.kernel(g).resolution, 4 * g.dx());
  EXPECT_THROW(example_setup(0), std::invalid_argument);
}
