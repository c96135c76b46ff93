#include "qttconv/signals.hpp"

#include <cmath>
#include <numbers>

#include "qttconv/random.hpp"

namespace qttconv {

namespace {

constexpr double pi = std::numbers::pi;

void check_grid(const Grid& grid) {
  if (grid.dims < 1 || grid.dims > 2) throw std::invalid_argument("grid: only 1D and 2D grids are supported");
  if (grid.n < 1) throw std::invalid_argument("grid: need at least one sample");
  if (!(grid.half_width > 0)) throw std::invalid_argument("grid: half-width must be positive");
}

double example1(double x) {
  const double env = std::exp(-std::pow(3.0 * x / 10.0, 2));
  return env * (0.4 * std::sin(8.0 * pi * x) - 0.7 * std::cos(6.0 * pi * x));
}

double example2(double x, double dx) {
  const double env = std::exp(-std::pow(3.0 * x, 2));
  return env * (0.9 * std::sin(2.0 * x * pi / (5.0 * dx)) + 1.4 * std::cos(x * pi / (3.0 * dx)));
}

double example3(double x, double y) {
  const double env = std::exp(-(std::pow(2.0 * x, 2) + std::pow(2.0 * y, 2)));
  return env * (std::sin(2.0 * pi * x) - std::cos(7.0 * pi * y) + std::cos(4.0 * pi * x * y) -
                std::sin(3.0 * pi * x * y));
}

}  // namespace

double gaf_profile(double x, double resolution) {
  const double u = pi * std::abs(x) / resolution;
  return u == 0.0 ? 1.0 : std::sin(u) / u;
}

DenseTensor<double> gaf_kernel(const Grid& grid, const KernelSpec& spec) {
  check_grid(grid);
  if (!(spec.resolution > 0)) throw std::invalid_argument("gaf_kernel: resolution must be positive");
  Vector<double> profile(grid.n);
  for (Index j = 0; j < grid.n; ++j) profile[j] = gaf_profile(grid.point(j), spec.resolution);

  DenseTensor<double> g(grid.shape());
  if (grid.dims == 1) {
    g.data() = profile;
  } else {
    const Matrix<double> outer = profile * profile.transpose();
    g.data() = Eigen::Map<const Vector<double>>(outer.data(), outer.size());
  }
  const double mass = g.data().sum() * std::pow(grid.dx(), double(grid.dims));
  if (mass == 0.0) throw NumericalError("gaf_kernel: kernel has zero discrete mass");
  g.data() /= mass;
  return g;
}

DenseTensor<double> reflectivity(int example_id, const Grid& grid) {
  check_grid(grid);
  const ExampleSetup setup = example_setup(example_id);
  if (grid.dims != setup.dims) throw std::invalid_argument("reflectivity: grid dimension does not match example");
  if (grid.half_width != setup.half_width) throw std::invalid_argument("reflectivity: grid half-width does not match example");

  DenseTensor<double> f(grid.shape());
  auto& v = f.data();
  switch (example_id) {
    case 1:
      for (Index j = 0; j < grid.n; ++j) v[j] = example1(grid.point(j));
      break;
    case 2:
      for (Index j = 0; j < grid.n; ++j) v[j] = example2(grid.point(j), grid.dx());
      break;
    default:
      for (Index jy = 0; jy < grid.n; ++jy)
        for (Index jx = 0; jx < grid.n; ++jx) v[jx + grid.n * jy] = example3(grid.point(jx), grid.point(jy));
      break;
  }
  return f;
}

DenseTensor<double> add_noise(const DenseTensor<double>& f, const NoiseSpec& spec) {
  if (!(spec.variance >= 0)) throw std::invalid_argument("add_noise: variance must be nonnegative");
  DenseTensor<double> out = f;
  if (spec.variance == 0.0) return out;
  const double sigma = std::sqrt(spec.variance);
  GaussianSampler rng(spec.seed);
  for (Index i = 0; i < out.size(); ++i) out.data()[i] += sigma * rng();
  return out;
}

ExampleSetup example_setup(int example_id) {
  switch (example_id) {
    case 1:
      return ExampleSetup{1, 1, 10.0, 4.0, 0.02, 0.02, 20};
    case 2:
      return ExampleSetup{2, 1, 1.0, 2.0, 0.01, 0.01, 20};
    case 3:
      return ExampleSetup{3, 2, 1.0, 2.0, 0.1, 0.09, 10};
    default:
      throw std::invalid_argument("unknown example id " + std::to_string(example_id));
  }
}

}  // namespace qttconv
