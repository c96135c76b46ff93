#include "qttconv/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "qttconv/convolution.hpp"
#include "qttconv/signals.hpp"

namespace qttconv::bench {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr std::pair<Method, const char*> kMethods[] = {
    {Method::FftReference, "fft-reference"},   {Method::MaxRankTTSVD, "maxrank-ttsvd"},
    {Method::MaxRankTTRSVD, "maxrank-ttrsvd"}, {Method::DropOffTTSVD, "dropoff-ttsvd"},
    {Method::RandomizedTT, "randomized-tt"},   {Method::LowRankMatrix, "lowrank-matrix"},
};

constexpr Index kDefaultLowRank = 23;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ExperimentRecord run_qtt(const ExperimentConfig& cfg, const ExampleData& data, ConvolutionPlan plan,
                         DenseTensor<double>* image) {
  ExperimentRecord rec;
  ConvolutionResult res;
  if (cfg.method == Method::RandomizedTT) {
    const auto t0 = Clock::now();
    const auto fs = tt_sketch(pad_and_pack(data.noisy, plan), cfg.r_max, cfg.seed);
    const auto gs = tt_sketch(pad_and_pack(data.kernel, plan), cfg.r_max, cfg.seed + 0x9e3779b9u);
    res = qtt_convolve_decomposed(fs, gs, plan, elapsed_ms(t0));
    res.record.policy = "sketch(" + std::to_string(cfg.r_max) + ") / fft " + describe(plan.fft);
  } else {
    res = qtt_convolve(data.noisy, data.kernel, plan);
  }
  rec.timings = res.record.timings;
  rec.signal_ranks = res.record.ranks_per_stage.front().second;
  rec.max_rank = res.record.max_rank();
  rec.storage_tt = res.record.storage("signal_tt");
  rec.relative_error = relative_error(res.image, data.reference);
  res.record.errors.emplace_back("E2", rec.relative_error);
  rec.pipeline = res.record.to_json();
  if (image) *image = std::move(res.image);
  return rec;
}

ExperimentRecord run_lowrank(const ExperimentConfig& cfg, const ExampleData& data, DenseTensor<double>* out) {
  ExperimentRecord rec;
  const Index n = data.grid.n;
  const Index r = cfg.resolved_lowrank_rank();
  auto t0 = Clock::now();
  const Eigen::Map<const Matrix<double>> a(data.noisy.data().data(), n, n);
  const auto svd = truncated_svd(a, MaxRank{r}, true);
  const Matrix<double> approx = svd.reconstruct();
  rec.timings.decompose_ms = elapsed_ms(t0);
  t0 = Clock::now();
  const auto image = fft_convolution(DenseTensor<double>({n, n}, Eigen::Map<const Vector<double>>(approx.data(), approx.size())),
                                     data.kernel, data.grid.dx());
  rec.timings.fft_ms = elapsed_ms(t0);
  rec.timings.total_ms = rec.timings.decompose_ms + rec.timings.fft_ms;
  rec.storage_tt = svd.rank() * (2 * n + 1);
  rec.max_rank = svd.rank();
  rec.relative_error = relative_error(image, data.reference);
  if (out) *out = image;
  return rec;
}

}  // namespace

std::string to_string(Method m) {
  for (const auto& [k, name] : kMethods)
    if (k == m) return name;
  throw std::invalid_argument("unknown method");
}

Method parse_method(const std::string& name) {
  for (const auto& [k, s] : kMethods)
    if (name == s) return k;
  throw std::invalid_argument("unknown method '" + name + "'");
}

Index ExperimentConfig::resolved_dims() const { return dims.value_or(example_setup(example_id).dims); }
double ExperimentConfig::resolved_delta() const { return delta.value_or(example_setup(example_id).dropoff); }
Index ExperimentConfig::resolved_lowrank_rank() const { return lowrank_rank.value_or(kDefaultLowRank); }

void ExperimentConfig::validate() const {
  const auto setup = example_setup(example_id);
  if (dims && *dims != setup.dims)
    throw std::invalid_argument("config: example " + std::to_string(example_id) + " is " + std::to_string(setup.dims) + "D");
  const Index d = resolved_dims();
  if (bits < 3) throw std::invalid_argument("config: K must be at least 3");
  if (bits * d > 30) throw std::invalid_argument("config: 2^{DK} exceeds the supported grid size");
  if (repetitions < 1) throw std::invalid_argument("config: repetitions must be at least 1");
  switch (method) {
    case Method::FftReference:
      break;
    case Method::MaxRankTTSVD:
    case Method::MaxRankTTRSVD:
    case Method::RandomizedTT:
      if (r_max < 1 || r_hat_max < 1) throw std::invalid_argument("config: R_max and R^_max must be positive");
      if (method == Method::MaxRankTTRSVD && oversampling < 0) throw std::invalid_argument("config: p must be nonnegative");
      break;
    case Method::DropOffTTSVD: {
      const double dl = resolved_delta();
      if (!(dl > 0 && dl < 1)) throw std::invalid_argument("config: delta must lie in (0, 1)");
      break;
    }
    case Method::LowRankMatrix:
      if (d != 2) throw std::invalid_argument("config: lowrank-matrix is only defined for 2D examples");
      if (resolved_lowrank_rank() < 1) throw std::invalid_argument("config: low-rank rank must be positive");
      break;
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"example_id", example_id}, {"K", bits},           {"D", resolved_dims()},
                   {"method", to_string(method)}, {"R_max", r_max},  {"R_hat_max", r_hat_max},
                   {"delta", resolved_delta()},   {"p", oversampling}, {"seed", seed},
                   {"repetitions", repetitions}};
  if (method == Method::LowRankMatrix) j["lr_rank"] = resolved_lowrank_rank();
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "example_id") c.example_id = v.get<int>();
    else if (key == "K") c.bits = v.get<Index>();
    else if (key == "D") c.dims = v.get<Index>();
    else if (key == "method") c.method = parse_method(v.get<std::string>());
    else if (key == "R_max") c.r_max = v.get<Index>();
    else if (key == "R_hat_max") c.r_hat_max = v.get<Index>();
    else if (key == "delta") c.delta = v.get<double>();
    else if (key == "p") c.oversampling = v.get<Index>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "repetitions") c.repetitions = v.get<int>();
    else if (key == "lr_rank") c.lowrank_rank = v.get<Index>();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return c;
}

nlohmann::json ExperimentRecord::to_json() const {
  nlohmann::json j{{"config", config.to_json()},
                   {"repetition", repetition},
                   {"method", to_string(config.method)},
                   {"relative_error", ok() ? nlohmann::json(relative_error) : nlohmann::json(nullptr)},
                   {"timings_ms",
                    {{"decompose", timings.decompose_ms},
                     {"fft", timings.fft_ms},
                     {"hadamard", timings.hadamard_ms},
                     {"ifft", timings.ifft_ms},
                     {"full", timings.full_ms},
                     {"total", timings.total_ms}}},
                   {"rank_profile", signal_ranks},
                   {"max_rank", max_rank},
                   {"storage_elements", {{"full", storage_full}, {"tt", storage_tt}}}};
  if (!pipeline.is_null()) j["pipeline"] = pipeline;
  if (!ok()) j["error"] = error;
  return j;
}

double relative_error(const DenseTensor<double>& a, const DenseTensor<double>& ref) {
  if (a.mode_sizes() != ref.mode_sizes()) throw std::invalid_argument("relative_error: shape mismatch");
  const double denom = ref.data().norm();
  if (denom == 0.0) throw std::invalid_argument("relative_error: reference has zero norm");
  return (a.data() - ref.data()).norm() / denom;
}

ExampleData make_example(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto setup = example_setup(cfg.example_id);
  ExampleData d{setup.grid(cfg.bits), {}, {}, {}, {}};
  d.clean = reflectivity(cfg.example_id, d.grid);
  d.noisy = add_noise(d.clean, setup.noise(cfg.seed));
  d.kernel = gaf_kernel(d.grid, setup.kernel(d.grid));
  d.reference = fft_convolution(d.clean, d.kernel, d.grid.dx());
  return d;
}

ExperimentRecord run_on(const ExperimentConfig& cfg, const ExampleData& data, DenseTensor<double>* image) {
  cfg.validate();
  const Index dims = cfg.resolved_dims();
  ExperimentRecord rec;
  ConvolutionPlan plan{dims, cfg.bits, data.grid.dx(), MaxRank{cfg.r_max}, MaxRank{cfg.r_hat_max}};
  switch (cfg.method) {
    case Method::FftReference: {
      const auto t0 = Clock::now();
      const auto out = fft_convolution(data.noisy, data.kernel, data.grid.dx());
      rec.timings.fft_ms = rec.timings.total_ms = elapsed_ms(t0);
      rec.relative_error = relative_error(out, data.reference);
      rec.storage_tt = Index{1} << (dims * cfg.bits);
      if (image) *image = out;
      break;
    }
    case Method::MaxRankTTSVD:
    case Method::RandomizedTT:
      rec = run_qtt(cfg, data, plan, image);
      break;
    case Method::MaxRankTTRSVD:
      plan.decomposition = Randomized{cfg.r_max, cfg.oversampling, cfg.seed};
      rec = run_qtt(cfg, data, plan, image);
      break;
    case Method::DropOffTTSVD:
      plan.decomposition = plan.fft = DropOff{cfg.resolved_delta()};
      rec = run_qtt(cfg, data, plan, image);
      break;
    case Method::LowRankMatrix:
      rec = run_lowrank(cfg, data, image);
      break;
  }
  rec.config = cfg;
  rec.storage_full = Index{1} << (dims * cfg.bits);
  if (!std::isfinite(rec.relative_error)) throw NumericalError("run_experiment: non-finite error");
  return rec;
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg) { return run_on(cfg, make_example(cfg)); }

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json j{{"records", nlohmann::json::array()}, {"medians", nlohmann::json::array()}};
  for (const auto& r : records) j["records"].push_back(r.to_json());
  for (const auto& r : medians) j["medians"].push_back(r.to_json());
  return j;
}

int thread_budget() {
  const char* env = std::getenv("QTTCONV_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw std::invalid_argument("QTTCONV_THREADS must be a positive integer");
  return int(std::min<long>(v, 256));
}

SuiteReport run_suite(const std::vector<ExperimentConfig>& configs, int threads) {
  if (configs.empty()) throw std::invalid_argument("run_suite: no configurations");
  if (threads < 1) throw std::invalid_argument("run_suite: thread count must be positive");
  for (const auto& c : configs) c.validate();

  std::vector<std::vector<ExperimentRecord>> per_config(configs.size());
  std::mutex timing;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const auto& cfg = configs[i];
      auto& out = per_config[i];
      std::optional<ExampleData> data;
      std::string setup_error;
      try {
        data = make_example(cfg);
      } catch (const std::exception& e) {
        setup_error = e.what();
      }
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        ExperimentRecord rec;
        if (data) {
          std::lock_guard lock(timing);
          try {
            rec = run_on(cfg, *data);
          } catch (const NumericalError& e) {
            rec.error = std::string("numerical: ") + e.what();
          } catch (const std::exception& e) {
            rec.error = e.what();
          }
        } else {
          rec.error = setup_error;
        }
        rec.config = cfg;
        rec.repetition = rep;
        if (!rec.ok()) rec.relative_error = std::numeric_limits<double>::quiet_NaN();
        out.push_back(std::move(rec));
      }
    }
  };

  const int n_threads = int(std::min<std::size_t>(std::size_t(threads), configs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SuiteReport report;
  for (auto& runs : per_config) {
    std::vector<const ExperimentRecord*> good;
    for (const auto& r : runs)
      if (r.ok()) good.push_back(&r);
    if (!good.empty()) {
      ExperimentRecord m = *good.front();
      m.repetition = -1;
      auto med = [&](auto field) {
        std::vector<double> v;
        for (const auto* r : good) v.push_back(field(*r));
        return median(std::move(v));
      };
      m.relative_error = med([](const ExperimentRecord& r) { return r.relative_error; });
      m.timings.decompose_ms = med([](const ExperimentRecord& r) { return r.timings.decompose_ms; });
      m.timings.fft_ms = med([](const ExperimentRecord& r) { return r.timings.fft_ms; });
      m.timings.hadamard_ms = med([](const ExperimentRecord& r) { return r.timings.hadamard_ms; });
      m.timings.ifft_ms = med([](const ExperimentRecord& r) { return r.timings.ifft_ms; });
      m.timings.full_ms = med([](const ExperimentRecord& r) { return r.timings.full_ms; });
      m.timings.total_ms = med([](const ExperimentRecord& r) { return r.timings.total_ms; });
      m.pipeline = nullptr;
      report.medians.push_back(std::move(m));
    }
    for (auto& r : runs) report.records.push_back(std::move(r));
  }
  return report;
}

std::vector<ExperimentConfig> parse_configs(const nlohmann::json& j) {
  std::vector<ExperimentConfig> out;
  if (j.is_array()) {
    for (const auto& item : j) out.push_back(ExperimentConfig::from_json(item));
  } else if (j.is_object() && j.contains("configs")) {
    return parse_configs(j.at("configs"));
  } else {
    out.push_back(ExperimentConfig::from_json(j));
  }
  if (out.empty()) throw std::invalid_argument("config file lists no experiments");
  return out;
}

void write_csv_header(std::ostream& os) {
  os << "method,example,K,D,Rmax,RhatMax,delta,p,seed,E2,t_decomp_ms,t_fft_ms,t_hadamard_ms,t_ifft_ms,t_full_ms,"
        "t_total_ms,storage_full,storage_tt\n";
}

void write_csv_row(std::ostream& os, const ExperimentRecord& r) {
  const auto& c = r.config;
  const auto& t = r.timings;
  const auto flags = os.flags();
  os << to_string(c.method) << ',' << c.example_id << ',' << c.bits << ',' << c.resolved_dims() << ',' << c.r_max << ','
     << c.r_hat_max << ',' << c.resolved_delta() << ',' << c.oversampling << ',' << c.seed << ',';
  os << std::setprecision(9) << r.relative_error << ',' << std::fixed << std::setprecision(3) << t.decompose_ms << ','
     << t.fft_ms << ',' << t.hadamard_ms << ',' << t.ifft_ms << ',' << t.full_ms << ',' << t.total_ms << ',';
  os.flags(flags);
  os << r.storage_full << ',' << r.storage_tt << '\n';
}

void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  write_csv_header(os);
  for (const auto& r : records) write_csv_row(os, r);
}

}  // namespace qttconv::bench
