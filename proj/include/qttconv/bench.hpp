#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qttconv/qtt_conv.hpp"
#include "qttconv/signals.hpp"

namespace qttconv::bench {

enum class Method {
  FftReference,   ///< dense FFT convolution of the noisy data
  MaxRankTTSVD,   ///< TT-SVD capped at R_max, QTT-FFT capped at R^_max
  MaxRankTTRSVD,  ///< TT-SVD with randomized SVD (R_max, p)
  DropOffTTSVD,   ///< singular value drop-off delta in both stages
  RandomizedTT,   ///< Gaussian-sketch TT decomposition at rank R_max
  LowRankMatrix,  ///< 2D only: rank-R matrix SVD of the noisy data, then FFT
};

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct ExperimentConfig {
  int example_id = 1;
  Index bits = 20;  ///< K
  std::optional<Index> dims;  ///< D; defaults to the example's dimension
  Method method = Method::MaxRankTTSVD;
  Index r_max = 10;
  Index r_hat_max = 15;
  std::optional<double> delta;  ///< defaults to the example's drop-off threshold
  Index oversampling = 5;
  std::uint64_t seed = 0;
  int repetitions = 1;
  std::optional<Index> lowrank_rank;  ///< defaults to 23

  /// Throws std::invalid_argument for bad or inconsistent parameters.
  void validate() const;
  Index resolved_dims() const;
  double resolved_delta() const;
  Index resolved_lowrank_rank() const;

  nlohmann::json to_json() const;
  /// Accepts the keys written by to_json(); unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct ExperimentRecord {
  ExperimentConfig config;
  int repetition = 0;
  double relative_error = 0.0;
  StageTimings timings;
  std::vector<Index> signal_ranks;  ///< empty for the dense methods
  Index max_rank = 0;               ///< over all recorded QTT stages
  Index storage_full = 0;
  Index storage_tt = 0;  ///< storage of the decomposed signal (dense methods: what they store)
  nlohmann::json pipeline;  ///< ConvolutionRecord of QTT runs
  std::string error;        ///< non-empty when the run failed

  bool ok() const { return error.empty(); }
  nlohmann::json to_json() const;
};

/// ||a - ref|| / ||ref|| over all entries.
double relative_error(const DenseTensor<double>& a, const DenseTensor<double>& ref);

/// Noisy signal, kernel and the noise-free reference image of one example.
struct ExampleData {
  Grid grid;
  DenseTensor<double> clean;
  DenseTensor<double> noisy;
  DenseTensor<double> kernel;
  DenseTensor<double> reference;
};

ExampleData make_example(const ExperimentConfig& cfg);

/// Runs the timed part of one experiment on prepared data; the computed
/// image is copied to `image` when given.
ExperimentRecord run_on(const ExperimentConfig& cfg, const ExampleData& data, DenseTensor<double>* image = nullptr);

/// Generates the data (untimed) and runs the experiment once.
ExperimentRecord run_experiment(const ExperimentConfig& cfg);

struct SuiteReport {
  std::vector<ExperimentRecord> records;  ///< config order, then repetition order
  std::vector<ExperimentRecord> medians;  ///< one per config (successful runs only)
  nlohmann::json to_json() const;
};

/// Harness parallelism from QTTCONV_THREADS (default 1).
int thread_budget();

/// Runs every config `repetitions` times. Failures are recorded and the suite
/// continues. Data generation may overlap across worker threads, but the timed
/// sections never run concurrently.
SuiteReport run_suite(const std::vector<ExperimentConfig>& configs, int threads = thread_budget());

/// Parses either a single config object or an array of them.
std::vector<ExperimentConfig> parse_configs(const nlohmann::json& j);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ExperimentRecord& r);
void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);

}  // namespace qttconv::bench
