#pragma once

#include "qttconv/dense_tensor.hpp"

namespace qttconv {

/// Midpoint grid on [-L, L]^D with n samples per dimension:
/// x_j = -L + dx/2 + j dx, dx = 2L / n.
struct Grid {
  Index dims = 1;
  Index n = 1;
  double half_width = 1.0;

  double dx() const { return 2.0 * half_width / double(n); }
  /// Sample coordinate; exactly antisymmetric under j -> n-1-j.
  double point(Index j) const { return double(2 * j + 1 - n) * dx() / 2.0; }
  std::vector<Index> shape() const { return std::vector<Index>(std::size_t(dims), n); }
};

/// Sinc imaging kernel; `resolution` is the distance from the central
/// maximum to the first zero (the same in every direction).
struct KernelSpec {
  double resolution = 1.0;
};

/// White noise with the given variance; equal seeds give equal realizations.
struct NoiseSpec {
  double variance = 0.0;
  std::uint64_t seed = 0;
};

/// sin(pi x / resolution) / (pi x / resolution), with value 1 at x = 0.
double gaf_profile(double x, double resolution);

/// Sampled kernel normalized to unit discrete mass: sum_j g_j dx^D = 1.
/// In 2D the kernel is the product of the 1D profiles.
DenseTensor<double> gaf_kernel(const Grid& grid, const KernelSpec& spec);

/// Ground reflectivity of the numbered example (1 and 2 are 1D, 3 is 2D).
DenseTensor<double> reflectivity(int example_id, const Grid& grid);

/// f + xi with xi_j ~ N(0, variance) i.i.d.
DenseTensor<double> add_noise(const DenseTensor<double>& f, const NoiseSpec& spec);

/// Fixed parameters of the three reference examples.
struct ExampleSetup {
  int id = 1;
  Index dims = 1;
  double half_width = 10.0;
  double resolution_factor = 4.0;  ///< kernel resolution in units of dx
  double noise_sigma = 0.02;       ///< standard deviation of the additive noise
  double dropoff = 0.02;           ///< singular value drop-off threshold used for this example
  Index default_bits = 20;         ///< K, with N = 2^{K-1} - 1 samples per dimension

  Grid grid(Index bits) const { return Grid{dims, (Index{1} << (bits - 1)) - 1, half_width}; }
  KernelSpec kernel(const Grid& g) const { return KernelSpec{resolution_factor * g.dx()}; }
  NoiseSpec noise(std::uint64_t seed) const { return NoiseSpec{noise_sigma * noise_sigma, seed}; }
};

ExampleSetup example_setup(int example_id);

}  // namespace qttconv
