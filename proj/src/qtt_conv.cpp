#include "qttconv/qtt_conv.hpp"

#include <chrono>

#include "qttconv/convolution.hpp"

namespace qttconv {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_shape(const DenseTensor<double>& x, const ConvolutionPlan& plan, const char* what) {
  if (x.mode_sizes() != std::vector<Index>(std::size_t(plan.dims), plan.samples()))
    throw std::invalid_argument(std::string(what) + ": expected shape N^D with N = 2^{K-1}-1 = " +
                                std::to_string(plan.samples()));
}

void require_finite(const TTTensor<cplx>& t, const char* what) {
  for (const auto& c : t.cores())
    if (!c.data().allFinite()) throw NumericalError(std::string(what) + ": non-finite TT core");
}

}  // namespace

void ConvolutionPlan::validate() const {
  if (dims < 1 || dims > 2) throw std::invalid_argument("plan: D must be 1 or 2");
  if (bits < 2) throw std::invalid_argument("plan: K must be at least 2");
  if (bits * dims > 62) throw std::invalid_argument("plan: grid too large");
  if (!(dx > 0)) throw std::invalid_argument("plan: dx must be positive");
  qttconv::validate(decomposition);
  qttconv::validate(fft);
  if (std::holds_alternative<Randomized>(fft))
    throw std::invalid_argument("plan: the FFT policy must be Tolerance, MaxRank or DropOff");
}

Index ConvolutionRecord::max_rank() const {
  Index r = 1;
  for (const auto& [name, ranks] : ranks_per_stage)
    for (Index x : ranks) r = std::max(r, x);
  return r;
}

Index ConvolutionRecord::storage(const std::string& key) const {
  for (const auto& [name, n] : storage_elements)
    if (name == key) return n;
  throw std::out_of_range("record has no storage entry " + key);
}

nlohmann::json ConvolutionRecord::to_json() const {
  nlohmann::json j;
  j["policy"] = policy;
  j["ranks_per_stage"] = nlohmann::json::object();
  for (const auto& [name, ranks] : ranks_per_stage) j["ranks_per_stage"][name] = ranks;
  j["storage_elements"] = nlohmann::json::object();
  for (const auto& [name, n] : storage_elements) j["storage_elements"][name] = n;
  j["timings_ms"] = {{"decompose", timings.decompose_ms}, {"fft", timings.fft_ms},
                     {"hadamard", timings.hadamard_ms},   {"ifft", timings.ifft_ms},
                     {"full", timings.full_ms},           {"total", timings.total_ms}};
  j["errors"] = nlohmann::json::object();
  for (const auto& [name, e] : errors) j["errors"][name] = e;
  return j;
}

DenseTensor<double> pad_and_pack(const DenseTensor<double>& x, const ConvolutionPlan& plan) {
  check_shape(x, plan, "pad_and_pack");
  return qtt_pack(zero_pad(x, Index{1} << plan.bits), plan.layout());
}

TTTensor<cplx> convolve_tt(const TTTensor<double>& signal, const TTTensor<double>& kernel, const ConvolutionPlan& plan,
                           ConvolutionRecord* record) {
  plan.validate();
  const auto layout = plan.layout();
  auto t0 = Clock::now();
  // Both spectra stay in bit-reversed order; the inverse accepts that order.
  const auto fs = qtt_fft_bitreversed(to_complex(signal), layout, plan.fft);
  const auto gs = qtt_fft_bitreversed(to_complex(kernel), layout, plan.fft);
  const double fft_ms = elapsed_ms(t0);

  t0 = Clock::now();
  const auto product = round(hadamard(fs, gs), plan.fft);
  const double hadamard_ms = elapsed_ms(t0);

  t0 = Clock::now();
  auto image = qtt_ifft_bitreversed(product, layout, plan.fft);
  const double ifft_ms = elapsed_ms(t0);
  require_finite(image, "qtt_convolve");

  if (record) {
    record->ranks_per_stage.emplace_back("signal_fft", fs.ranks());
    record->ranks_per_stage.emplace_back("kernel_fft", gs.ranks());
    record->ranks_per_stage.emplace_back("hadamard", product.ranks());
    record->ranks_per_stage.emplace_back("image", image.ranks());
    record->timings.fft_ms = fft_ms;
    record->timings.hadamard_ms = hadamard_ms;
    record->timings.ifft_ms = ifft_ms;
  }
  return image;
}

DenseTensor<double> retrieve(const TTTensor<cplx>& image, const ConvolutionPlan& plan) {
  const auto side = Index{1} << plan.bits;
  auto dense = real_part(full(image, std::vector<Index>(std::size_t(plan.dims), side)));
  const Index n = plan.samples();
  auto out = crop(dense, same_offset(n), n);
  out.data() *= std::pow(plan.dx, double(plan.dims));
  require_finite(out, "qtt_convolve");
  return out;
}

ConvolutionResult qtt_convolve_decomposed(const TTTensor<double>& signal, const TTTensor<double>& kernel,
                                          const ConvolutionPlan& plan, double decompose_ms) {
  plan.validate();
  ConvolutionResult result;
  auto& rec = result.record;
  rec.policy = describe(plan.decomposition) + " / fft " + describe(plan.fft);
  rec.ranks_per_stage.emplace_back("signal", signal.ranks());
  rec.ranks_per_stage.emplace_back("kernel", kernel.ranks());
  rec.storage_elements.emplace_back("full", Index{1} << (plan.bits * plan.dims));
  rec.storage_elements.emplace_back("signal_tt", storage_count(signal));
  rec.storage_elements.emplace_back("kernel_tt", storage_count(kernel));
  rec.timings.decompose_ms = decompose_ms;

  const auto image = convolve_tt(signal, kernel, plan, &rec);
  const auto t0 = Clock::now();
  result.image = retrieve(image, plan);
  rec.timings.full_ms = elapsed_ms(t0);
  rec.timings.total_ms =
      decompose_ms + rec.timings.fft_ms + rec.timings.hadamard_ms + rec.timings.ifft_ms + rec.timings.full_ms;
  return result;
}

ConvolutionResult qtt_convolve(const DenseTensor<double>& signal, const DenseTensor<double>& kernel,
                               const ConvolutionPlan& plan) {
  plan.validate();
  check_shape(signal, plan, "qtt_convolve");
  check_shape(kernel, plan, "qtt_convolve");
  const auto t0 = Clock::now();
  const auto fs = tt_svd(pad_and_pack(signal, plan), plan.decomposition);
  const auto gs = tt_svd(pad_and_pack(kernel, plan), plan.decomposition);
  return qtt_convolve_decomposed(fs, gs, plan, elapsed_ms(t0));
}

}  // namespace qttconv
