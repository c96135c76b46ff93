// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any
// gating criterion fails. Criterion 10 is reported only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qttconv/bench.hpp"
#include "qttconv/convolution.hpp"
#include "qttconv/fourier.hpp"
#include "qttconv/qtt_conv.hpp"
#include "qttconv/qtt_fft.hpp"
#include "qttconv/tt_svd.hpp"

using namespace qttconv;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 42;
int gating_failures = 0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(int id, bool pass, const std::string& what, const std::string& detail, bool gating = true) {
  std::printf("%s criterion %d%s: %s [%s]\n", pass ? "PASS" : "FAIL", id, gating ? "" : " (non-gating)", what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (gating && !pass) ++gating_failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DenseTensor<double> gaussian_tensor(std::vector<Index> modes, std::uint64_t seed) {
  GaussianSampler rng(seed);
  DenseTensor<double> t(std::move(modes));
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = rng();
  return t;
}

TTTensor<cplx> random_qtt(Index modes, Index rank, std::uint64_t seed) {
  GaussianSampler rng(seed);
  std::vector<TTCore<cplx>> cores;
  for (Index k = 0; k < modes; ++k) {
    TTCore<cplx> c(k == 0 ? 1 : rank, 2, k == modes - 1 ? 1 : rank);
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = cplx(rng(), rng());
    cores.push_back(std::move(c));
  }
  return TTTensor<cplx>(std::move(cores));
}

void oracle_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::uint64_t seed = 1;
  const std::vector<std::pair<Index, std::vector<Index>>> cases = {{1, {7, 15, 31, 63, 127}}, {2, {7, 15, 31}}};
  for (const auto& [dims, sizes] : cases)
    for (Index n : sizes) {
      const Index bits = Index(std::log2(double(n + 1))) + 1;
      const std::vector<Index> shape(std::size_t(dims), n);
      const auto f = gaussian_tensor(shape, seed++), g = gaussian_tensor(shape, seed++);
      const double dx = 2.0 / double(n);
      const ConvolutionPlan plan{dims, bits, dx, Tolerance{1e-12}, Tolerance{1e-12}};
      const auto image = qtt_convolve(f, g, plan).image;
      worst = std::max(worst, bench::relative_error(image, direct_convolution(f, g, dx)));
    }
  const double secs = seconds_since(t0);
  report(1, worst <= 1e-8 && secs < 30.0, "qtt_convolve matches direct convolution",
         fmt("max rel err %.3e <= 1e-8, %.2f s < 30 s", worst, secs));
}

void fft_correctness() {
  const auto t0 = Clock::now();
  double worst_fwd = 0.0, worst_trip = 0.0;
  for (Index bits = 6; bits <= 12; ++bits) {
    const QttLayout layout{1, bits};
    const Index n = layout.side();
    const auto v = random_qtt(bits, 5, 100 + std::uint64_t(bits));
    const auto x = full(v, {n});
    const auto y = qtt_fft(v, layout, Tolerance{1e-10});
    const auto ref = dft(x, FftAlgorithm::Radix2);
    worst_fwd = std::max(worst_fwd, (full(y, {n}).data() - ref.data()).norm() / ref.data().norm());
    const auto back = qtt_ifft(y, layout, Tolerance{1e-10});
    worst_trip = std::max(worst_trip, (full(back, {n}).data() - x.data()).norm() / x.data().norm());
  }
  const double secs = seconds_since(t0);
  report(2, worst_fwd <= 1e-9 && worst_trip <= 1e-9 && secs < 20.0, "QTT-FFT vs dense radix-2 FFT and round trip",
         fmt("fft %.3e, round trip %.3e (<= 1e-9), %.2f s < 20 s", worst_fwd, worst_trip, secs));
}

void sweep_shapes() {
  bool ok = true;
  Index steps = 0;
  for (Index bits : {8, 12, 16})
    for (Index r : {4, 10}) {
      const auto data = qtt_pack(gaussian_tensor({Index{1} << bits}, std::uint64_t(bits * 100 + r)));
      Index prev_rank = 1;
      tt_svd(data, MaxRank{r}, [&](const SweepStep& s) {
        ++steps;
        ok &= s.left_rank == prev_rank;
        ok &= s.rows == 2 * s.left_rank && s.rows <= 2 * r;
        ok &= s.cols == (Index{1} << (bits - s.k));
        prev_rank = s.rank;
      });
    }
  report(3, ok && steps == 7 + 11 + 15 + 7 + 11 + 15, "MaxRank TT-SVD unfolding shapes m_k = 2r_{k-1} <= 2R, n_k = 2^{K-k}",
         fmt("%lld sweep steps checked", (long long)steps));
}

void storage_table() {
  const std::pair<Index, Index> table[] = {{16, 2088}, {20, 2888}, {24, 3688}, {26, 4088}, {28, 4488}};
  bool ok = true;
  std::string detail;
  for (auto [bits, expected] : table) {
    std::vector<TTCore<double>> cores;
    Index left = 1;
    for (Index k = 1; k <= bits; ++k) {
      const Index right = std::min<Index>({Index{1} << std::min<Index>(k, 62), Index{1} << (bits - k), 10});
      cores.emplace_back(left, 2, right);
      left = right;
    }
    const Index counted = storage_count(TTTensor<double>(std::move(cores)));
    const Index closed = 2 * (1 * 2 * 2) + 2 * (2 * 2 * 4) + 2 * (4 * 2 * 8) + 2 * (8 * 2 * 10) + (bits - 8) * (10 * 2 * 10);
    ok &= counted == expected && closed == expected;
    detail += fmt("K=%lld:%lld ", (long long)bits, (long long)counted);
  }
  // the same numbers from an actual decomposition of the example signal
  for (Index bits : {16, 20}) {
    bench::ExperimentConfig cfg;
    cfg.bits = bits;
    cfg.seed = kSeed;
    const auto r = bench::run_experiment(cfg);
    const Index expected = bits == 16 ? 2088 : 2888;
    ok &= r.ok() && r.storage_tt == expected;
    detail += fmt("run K=%lld:%lld ", (long long)bits, (long long)r.storage_tt);
  }
  detail.pop_back();
  report(4, ok, "storage table and closed form", detail);
}

bench::ExperimentRecord run(int example, bench::Method m, Index bits) {
  bench::ExperimentConfig cfg;
  cfg.example_id = example;
  cfg.bits = bits;
  cfg.method = m;
  cfg.seed = kSeed;
  auto r = bench::run_experiment(cfg);
  if (!r.ok()) std::printf("  run failed: %s\n", r.error.c_str());
  return r;
}

void example_one() {
  const auto base = run(1, bench::Method::FftReference, 20);
  const auto t0 = Clock::now();
  const auto qtt = run(1, bench::Method::MaxRankTTSVD, 20);
  const double secs = seconds_since(t0);
  const double e_xi = base.relative_error, e_q = qtt.relative_error;
  const bool ok = base.ok() && qtt.ok() && e_xi >= 0.028 && e_xi <= 0.048 && e_q <= 0.006 && e_q < 0.25 * e_xi && secs < 10.0;
  report(5, ok, "Example 1 denoising (K=20, R_max=10, R^_max=15)",
         fmt("E2(I_xi)=%.4f in [0.028,0.048], E2(I_QTT0)=%.5f <= 0.006 and < 0.25*E2(I_xi), %.2f s < 10 s", e_xi, e_q,
             secs));

  // the other reading of the noise level, for the record
  const auto setup = example_setup(1);
  const auto grid = setup.grid(20);
  const auto clean = reflectivity(1, grid);
  const auto kernel = gaf_kernel(grid, setup.kernel(grid));
  const auto reference = fft_convolution(clean, kernel, grid.dx());
  const auto noisy = add_noise(clean, NoiseSpec{0.02, kSeed});
  std::printf("  info: with variance 0.02 instead of std 0.02, E2(I_xi) = %.4f\n",
              bench::relative_error(fft_convolution(noisy, kernel, grid.dx()), reference));
}

void example_two() {
  const auto base = run(2, bench::Method::FftReference, 20);
  const auto qtt = run(2, bench::Method::MaxRankTTSVD, 20);
  const double e_xi = base.relative_error, e_q = qtt.relative_error;
  report(6, base.ok() && qtt.ok() && e_xi >= 0.009 && e_xi <= 0.018 && e_q <= 0.003,
         "Example 2 denoising (K=20)", fmt("E2(I_xi)=%.4f in [0.009,0.018], E2(I_QTT0)=%.5f <= 0.003", e_xi, e_q));
}

void example_three() {
  const auto base = run(3, bench::Method::FftReference, 10);
  const auto qtt = run(3, bench::Method::MaxRankTTSVD, 10);
  const auto rnd = run(3, bench::Method::MaxRankTTRSVD, 10);
  const double e_xi = base.relative_error, e_q = qtt.relative_error, e_r = rnd.relative_error;
  report(7, base.ok() && qtt.ok() && rnd.ok() && e_xi >= 0.08 && e_xi <= 0.15 && e_q <= 0.030 && e_r <= 0.09,
         "Example 3 denoising (D=2, K=10)",
         fmt("E2(I_xi)=%.4f in [0.08,0.15], E2(I_QTT0)=%.4f <= 0.030, E2(I_QTTr)=%.4f <= 0.09", e_xi, e_q, e_r));
}

void rank_recovery() {
  Index ranks[2];
  for (int ex : {1, 2}) {
    const auto setup = example_setup(ex);
    const auto grid = setup.grid(20);
    const ConvolutionPlan plan{1, 20, grid.dx(), Tolerance{1e-10}, Tolerance{1e-10}};
    ranks[ex - 1] = tt_svd(pad_and_pack(reflectivity(ex, grid), plan), Tolerance{1e-10}).max_rank();
  }
  report(8, std::abs(ranks[0] - 17) <= 1 && std::abs(ranks[1] - 26) <= 1, "TT-rank of noise-free data (Tolerance 1e-10, K=20)",
         fmt("Example 1: %lld (17 +- 1), Example 2: %lld (26 +- 1)", (long long)ranks[0], (long long)ranks[1]));
}

void rsvd_bound() {
  const Index m = 100, n = 80, k = 10, p = 5;
  int held = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix<double> a = GaussianSampler(1000 + std::uint64_t(trial)).matrix(m, n);
    const double sigma_next = thin_svd(a).S[k];
    const auto r = rsvd(a, k, p, GaussianSampler(5000 + std::uint64_t(trial)));
    const Matrix<double> resid = a - r.reconstruct();
    const double err = Eigen::JacobiSVD<Matrix<double>>(resid).singularValues()(0);
    held += err <= (1.0 + 11.0 * std::sqrt(double(k + p)) * std::sqrt(double(std::min(m, n)))) * sigma_next;
  }
  report(9, held >= 49, "randomized SVD spectral bound (100x80, k=10, p=5)", fmt("held in %d/50 trials, need 49", held));
}

void scaling_trend() {
  std::vector<double> t_qtt, t_ref;
  std::string detail;
  for (Index bits = 18; bits <= 24; ++bits) {
    const auto q = run(1, bench::Method::MaxRankTTSVD, bits);
    const auto f = run(1, bench::Method::FftReference, bits);
    t_qtt.push_back(q.timings.total_ms);
    t_ref.push_back(f.timings.total_ms);
    detail += fmt("K=%lld %.0f/%.0f ms ", (long long)bits, q.timings.total_ms, f.timings.total_ms);
  }
  // doubling the grid should roughly double the QTT time: per-step growth well under 4x
  bool linear = true;
  for (std::size_t i = 1; i < t_qtt.size(); ++i) linear &= t_qtt[i] / t_qtt[i - 1] < 3.0;
  const bool ratio_falls = t_qtt.back() / t_ref.back() < t_qtt.front() / t_ref.front();
  detail += fmt("ratio t_QTT0/t_xi %.2f -> %.2f", t_qtt.front() / t_ref.front(), t_qtt.back() / t_ref.back());
  report(10, linear && ratio_falls, "scaling trend K=18..24 (QTT0/FFT times)", detail, false);
}

}  // namespace

int main() {
  try {
    oracle_equivalence();
    fft_correctness();
    sweep_shapes();
    storage_table();
    example_one();
    example_two();
    example_three();
    rank_recovery();
    rsvd_bound();
    scaling_trend();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance run aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d gating failure(s)\n", gating_failures ? "FAIL" : "PASS", gating_failures);
  return gating_failures ? 1 : 0;
}
