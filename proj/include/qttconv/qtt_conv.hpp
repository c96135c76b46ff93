#pragma once

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "qttconv/qtt_fft.hpp"
#include "qttconv/tt_svd.hpp"

namespace qttconv {

/// Parameters of one QTT convolution. Signals have N = 2^{K-1} - 1 samples
/// per dimension and are zero-padded to 2^K.
struct ConvolutionPlan {
  Index dims = 1;
  Index bits = 2;  ///< K
  double dx = 1.0;
  TruncationPolicy decomposition = Tolerance{1e-12};  ///< applied to signal and kernel
  TruncationPolicy fft = Tolerance{1e-12};            ///< inside QTT-FFT / QTT-iFFT and after the Hadamard product

  Index samples() const { return (Index{1} << (bits - 1)) - 1; }
  QttLayout layout() const { return QttLayout{dims, bits}; }
  void validate() const;
};

struct StageTimings {
  double decompose_ms = 0;
  double fft_ms = 0;
  double hadamard_ms = 0;
  double ifft_ms = 0;
  double full_ms = 0;
  double total_ms = 0;
};

/// Diagnostics of one run: TT-ranks after every stage, storage counts and
/// wall times. `errors` is filled by callers that know a reference.
struct ConvolutionRecord {
  std::string policy;
  std::vector<std::pair<std::string, std::vector<Index>>> ranks_per_stage;
  std::vector<std::pair<std::string, Index>> storage_elements;
  StageTimings timings;
  std::vector<std::pair<std::string, double>> errors;

  /// Largest TT-rank seen in any recorded stage.
  Index max_rank() const;
  Index storage(const std::string& key) const;
  nlohmann::json to_json() const;
};

struct ConvolutionResult {
  DenseTensor<double> image;
  ConvolutionRecord record;
};

/// Step 1: zero-pad to 2^K per dimension and reshape to 2 x ... x 2.
DenseTensor<double> pad_and_pack(const DenseTensor<double>& x, const ConvolutionPlan& plan);

/// Step 3: QiFFT(QFFT(F) . QFFT(G)), the Hadamard product rounded under the
/// FFT policy before the inverse transform.
TTTensor<cplx> convolve_tt(const TTTensor<double>& signal, const TTTensor<double>& kernel, const ConvolutionPlan& plan,
                           ConvolutionRecord* record = nullptr);

/// Step 4: expand, crop the central N^D block at offset (N-1)/2 and scale by dx^D.
DenseTensor<double> retrieve(const TTTensor<cplx>& image, const ConvolutionPlan& plan);

/// Steps 3-4 for already decomposed QTT inputs.
ConvolutionResult qtt_convolve_decomposed(const TTTensor<double>& signal, const TTTensor<double>& kernel,
                                          const ConvolutionPlan& plan, double decompose_ms = 0.0);

/// The whole pipeline (steps 1-4) for dense signal and kernel of shape N^D.
ConvolutionResult qtt_convolve(const DenseTensor<double>& signal, const DenseTensor<double>& kernel,
                               const ConvolutionPlan& plan);

}  // namespace qttconv
