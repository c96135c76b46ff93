// qttconv command-line front end.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

#include "qttconv/bench.hpp"
#include "qttconv/convolution.hpp"
#include "qttconv/io.hpp"
#include "qttconv/signals.hpp"

using namespace qttconv;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kNumerical = 2 };

void print_ranks(std::ostream& os, const std::vector<Index>& ranks) {
  for (std::size_t k = 0; k < ranks.size(); ++k) os << (k ? " " : "") << ranks[k];
  os << '\n';
}

template <typename T>
void emit(const T& t, const std::string& out, const std::string& csv) {
  if (out.empty() && csv.empty()) throw std::invalid_argument("nothing to do: give --out and/or --csv");
  if (!out.empty()) io::save_dense(out, t);
  if (!csv.empty()) io::save_csv(csv, t);
}

std::ofstream open_text(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

// x, [y,] clean, noisy, reference, image in grid order.
void write_plot(const std::string& path, const bench::ExampleData& d, const DenseTensor<double>& image) {
  auto os = open_text(path);
  os << (d.grid.dims == 1 ? "x" : "x,y") << ",clean,noisy,reference,image\n";
  os.precision(12);
  Index flat = 0;
  for_each_index(d.grid.shape(), [&](std::span<const Index> idx) {
    for (Index i : idx) os << d.grid.point(i) << ',';
    os << d.clean.data()[flat] << ',' << d.noisy.data()[flat] << ',' << d.reference.data()[flat] << ','
       << image.data()[flat] << '\n';
    ++flat;
  });
}

struct KernelArgs {
  int example = 0;
  Index bits = 0;
  Index dims = 1;
  Index samples = 0;
  double half_width = 1.0;
  double resolution = 0.0;
  std::string out, csv;
};

int run_kernel(const KernelArgs& a) {
  DenseTensor<double> g;
  if (a.example) {
    const auto setup = example_setup(a.example);
    const auto grid = setup.grid(a.bits ? a.bits : setup.default_bits);
    g = gaf_kernel(grid, setup.kernel(grid));
  } else {
    if (a.samples < 1 || !(a.resolution > 0))
      throw std::invalid_argument("kernel: give --example or --samples and --resolution");
    g = gaf_kernel(Grid{a.dims, a.samples, a.half_width}, KernelSpec{a.resolution});
  }
  emit(g, a.out, a.csv);
  return kOk;
}

struct SignalArgs {
  int example = 1;
  Index bits = 0;
  std::uint64_t seed = 0;
  bool clean = false;
  std::string out, csv;
};

int run_signal(const SignalArgs& a) {
  const auto setup = example_setup(a.example);
  const auto grid = setup.grid(a.bits ? a.bits : setup.default_bits);
  auto f = reflectivity(a.example, grid);
  if (!a.clean) f = add_noise(f, setup.noise(a.seed));
  emit(f, a.out, a.csv);
  return kOk;
}

struct DecomposeArgs {
  std::string in, out, policy = "tolerance:1e-10";
  bool qtt = false;
};

int run_decompose(const DecomposeArgs& a) {
  const auto policy = parse_policy(a.policy);
  auto tensor = io::load_dense(a.in);
  std::visit(
      [&](auto& t) {
        if (a.qtt) {
          Index side = 1;
          while (side < t.mode_sizes().front()) side *= 2;
          if (side != t.mode_sizes().front()) t = zero_pad(t, side);
          t = qtt_pack(t, QttLayout::of(t.mode_sizes()));
        }
        const auto tt = tt_svd(t, policy);
        std::cout << "policy   " << describe(policy) << "\nranks    ";
        print_ranks(std::cout, tt.ranks());
        std::cout << "storage  " << storage_count(tt) << " of " << t.size() << '\n';
        if (!a.out.empty()) io::save_tt(a.out, tt);
      },
      tensor);
  return kOk;
}

struct InspectArgs {
  std::string in, full;
};

int run_inspect(const InspectArgs& a) {
  const auto tensor = io::load_tt(a.in);
  std::visit(
      [&](const auto& tt) {
        std::cout << "order    " << tt.order() << "\nmodes    ";
        print_ranks(std::cout, tt.mode_sizes());
        std::cout << "ranks    ";
        print_ranks(std::cout, tt.ranks());
        std::cout << "storage  " << storage_count(tt) << '\n';
        if (!a.full.empty()) io::save_dense(a.full, full(tt));
      },
      tensor);
  return kOk;
}

struct ConvolveArgs {
  std::string signal, kernel, out, record, reference;
  double dx = 1.0;
  std::string decomposition = "maxrank:10", fft = "maxrank:15";
};

int run_convolve(const ConvolveArgs& a) {
  const auto f = io::load_real(a.signal);
  const auto g = io::load_real(a.kernel);
  if (f.mode_sizes() != g.mode_sizes()) throw std::invalid_argument("convolve: signal and kernel shapes differ");
  const Index n = f.mode_sizes().front();
  if (!is_power_of_two(std::uint64_t(n + 1)))
    throw std::invalid_argument("convolve: need N = 2^(K-1) - 1 samples per dimension");
  ConvolutionPlan plan{f.order(), Index(log2_exact(std::uint64_t(n + 1))) + 1, a.dx, parse_policy(a.decomposition),
                       parse_policy(a.fft)};
  auto result = qtt_convolve(f, g, plan);
  if (!a.reference.empty())
    result.record.errors.emplace_back("E2", bench::relative_error(result.image, io::load_real(a.reference)));
  if (!a.out.empty()) io::save_dense(a.out, result.image);
  const auto json = result.record.to_json().dump(2);
  if (a.record.empty()) {
    std::cout << json << '\n';
  } else {
    open_text(a.record) << json << '\n';
  }
  return kOk;
}

struct ExperimentArgs {
  int example = 1;
  Index bits = 0;
  std::string method = "maxrank-ttsvd";
  Index r_max = 10, r_hat_max = 15, oversampling = 5, lr_rank = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::string json, csv, plot;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  bench::ExperimentConfig cfg;
  cfg.example_id = a.example;
  cfg.bits = a.bits ? a.bits : example_setup(a.example).default_bits;
  cfg.method = bench::parse_method(a.method);
  cfg.r_max = a.r_max;
  cfg.r_hat_max = a.r_hat_max;
  cfg.oversampling = a.oversampling;
  cfg.seed = a.seed;
  if (a.delta > 0) cfg.delta = a.delta;
  if (a.lr_rank > 0) cfg.lowrank_rank = a.lr_rank;

  const auto data = bench::make_example(cfg);
  DenseTensor<double> image;
  const auto rec = bench::run_on(cfg, data, &image);
  std::cout << bench::to_string(cfg.method) << " example " << cfg.example_id << " K=" << cfg.bits
            << "  E2=" << rec.relative_error << "  total " << rec.timings.total_ms << " ms  storage "
            << rec.storage_tt << "/" << rec.storage_full << '\n';
  if (!a.json.empty()) open_text(a.json) << rec.to_json().dump(2) << '\n';
  if (!a.csv.empty()) {
    auto os = open_text(a.csv);
    bench::write_csv(os, {rec});
  }
  if (!a.plot.empty()) write_plot(a.plot, data, image);
  return kOk;
}

struct SuiteArgs {
  std::string config, out, json;
  int threads = 0;
};

int run_suite_cmd(const SuiteArgs& a) {
  std::ifstream is(a.config);
  if (!is) throw std::runtime_error("cannot open " + a.config);
  const auto configs = bench::parse_configs(nlohmann::json::parse(is));
  const auto report = bench::run_suite(configs, a.threads > 0 ? a.threads : bench::thread_budget());
  if (a.out.empty()) {
    bench::write_csv(std::cout, report.records);
  } else {
    auto os = open_text(a.out);
    bench::write_csv(os, report.records);
  }
  if (!a.json.empty()) open_text(a.json) << report.to_json().dump(2) << '\n';

  int rc = kOk;
  for (const auto& r : report.records) {
    if (r.ok()) continue;
    std::cerr << "run failed: " << bench::to_string(r.config.method) << " example " << r.config.example_id
              << " K=" << r.config.bits << " rep " << r.repetition << ": " << r.error << '\n';
    rc = std::max(rc, r.error.rfind("numerical:", 0) == 0 ? int(kNumerical) : int(kInvalid));
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QTT convolution and denoising toolkit"};
  app.require_subcommand(1);

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "write a normalized sinc kernel");
  kernel->add_option("--example", ka.example, "use the grid and resolution of example 1, 2 or 3");
  kernel->add_option("-K,--bits", ka.bits, "K, with N = 2^(K-1) - 1 samples");
  kernel->add_option("--dims", ka.dims, "D for a custom grid")->check(CLI::Range(1, 2));
  kernel->add_option("--samples", ka.samples, "N for a custom grid");
  kernel->add_option("--half-width", ka.half_width, "L for a custom grid");
  kernel->add_option("--resolution", ka.resolution, "distance to the first zero for a custom grid");
  kernel->add_option("-o,--out", ka.out, "binary tensor file");
  kernel->add_option("--csv", ka.csv, "CSV export");

  SignalArgs sa;
  auto* signal = app.add_subcommand("signal", "write an example reflectivity, noisy unless --clean");
  signal->add_option("--example", sa.example)->check(CLI::Range(1, 3));
  signal->add_option("-K,--bits", sa.bits);
  signal->add_option("--seed", sa.seed);
  signal->add_flag("--clean", sa.clean, "omit the noise");
  signal->add_option("-o,--out", sa.out);
  signal->add_option("--csv", sa.csv);

  DecomposeArgs da;
  auto* decompose = app.add_subcommand("decompose", "TT-SVD of a tensor file");
  decompose->add_option("-i,--in", da.in)->required();
  decompose->add_option("-o,--out", da.out, "TT file");
  decompose->add_option("--policy", da.policy, "tolerance:EPS | maxrank:R | dropoff:DELTA | randomized:R[:P[:SEED]]");
  decompose->add_flag("--qtt", da.qtt, "zero-pad to a power of two and reshape into binary modes first");

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect", "print the shape of a TT file");
  inspect->add_option("-i,--in", ia.in)->required();
  inspect->add_option("--full", ia.full, "also expand to a dense tensor file");

  ConvolveArgs ca;
  auto* convolve = app.add_subcommand("convolve", "QTT convolution of two tensor files");
  convolve->add_option("--signal", ca.signal)->required();
  convolve->add_option("--kernel", ca.kernel)->required();
  convolve->add_option("--dx", ca.dx, "grid spacing");
  convolve->add_option("--decomposition", ca.decomposition, "policy for the TT-SVD of both inputs");
  convolve->add_option("--fft", ca.fft, "policy for the QTT-FFT stages");
  convolve->add_option("--reference", ca.reference, "tensor file to compute E2 against");
  convolve->add_option("-o,--out", ca.out, "image tensor file");
  convolve->add_option("--record", ca.record, "JSON record (default stdout)");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "run one method on a named example");
  experiment->add_option("--example", ea.example)->check(CLI::Range(1, 3));
  experiment->add_option("--method", ea.method,
                         "fft-reference | maxrank-ttsvd | maxrank-ttrsvd | dropoff-ttsvd | randomized-tt | lowrank-matrix");
  experiment->add_option("-K,--bits", ea.bits);
  experiment->add_option("--rmax", ea.r_max);
  experiment->add_option("--rhat", ea.r_hat_max);
  experiment->add_option("--delta", ea.delta);
  experiment->add_option("-p,--oversampling", ea.oversampling);
  experiment->add_option("--lr-rank", ea.lr_rank);
  experiment->add_option("--seed", ea.seed);
  experiment->add_option("--json", ea.json);
  experiment->add_option("--csv", ea.csv);
  experiment->add_option("--plot", ea.plot, "CSV with grid, clean, noisy, reference and image columns");

  SuiteArgs sua;
  auto* suite = app.add_subcommand("suite", "run a JSON list of experiments and write a CSV report");
  suite->add_option("-c,--config", sua.config)->required();
  suite->add_option("-o,--out", sua.out, "CSV report (default stdout)");
  suite->add_option("--json", sua.json, "full JSON report with medians");
  suite->add_option("--threads", sua.threads, "overrides QTTCONV_THREADS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (*kernel) return run_kernel(ka);
    if (*signal) return run_signal(sa);
    if (*decompose) return run_decompose(da);
    if (*inspect) return run_inspect(ia);
    if (*convolve) return run_convolve(ca);
    if (*experiment) return run_experiment_cmd(ea);
    if (*suite) return run_suite_cmd(sua);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kOk;
}
