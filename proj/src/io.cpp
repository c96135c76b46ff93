#include "qttconv/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

namespace qttconv::io {

static_assert(std::endian::native == std::endian::little, "binary tensor I/O assumes a little-endian host");

namespace {

constexpr char kDenseMagic[4] = {'Q', 'T', 'T', 'D'};
constexpr char kTTMagic[4] = {'Q', 'T', 'T', 'T'};
// Refuse headers that would make us allocate absurd amounts of memory.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::invalid_argument(std::string(what) + ": truncated header");
  return v;
}

void expect_magic(std::istream& is, const char (&magic)[4], const char* what) {
  char buf[4];
  if (!is.read(buf, 4) || std::memcmp(buf, magic, 4) != 0) throw std::invalid_argument(std::string(what) + ": bad magic");
}

std::vector<Index> get_sizes(std::istream& is, std::size_t count, const char* what) {
  std::vector<Index> out(count);
  for (auto& m : out) {
    const auto v = get<std::uint64_t>(is, what);
    if (v == 0 || v > kMaxElements) throw std::invalid_argument(std::string(what) + ": invalid size in header");
    m = Index(v);
  }
  return out;
}

// Everything left in the stream, as doubles.
std::vector<double> rest(std::istream& is, const char* what) {
  std::vector<char> bytes{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  if (bytes.size() % sizeof(double) != 0) throw std::invalid_argument(std::string(what) + ": payload is not a multiple of 8 bytes");
  std::vector<double> out(bytes.size() / sizeof(double));
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

void put_values(std::ostream& os, const double* p, Index n) { os.write(reinterpret_cast<const char*>(p), std::streamsize(n * 8)); }
void put_values(std::ostream& os, const cplx* p, Index n) { os.write(reinterpret_cast<const char*>(p), std::streamsize(n * 16)); }

template <typename Scalar>
void write_dense_impl(std::ostream& os, const DenseTensor<Scalar>& t) {
  os.write(kDenseMagic, 4);
  put<std::uint32_t>(os, std::uint32_t(t.order()));
  for (Index m : t.mode_sizes()) put<std::uint64_t>(os, std::uint64_t(m));
  put_values(os, t.data().data(), t.size());
  if (!os) throw std::runtime_error("write_dense: stream error");
}

template <typename Scalar>
void write_tt_impl(std::ostream& os, const TTTensor<Scalar>& t) {
  os.write(kTTMagic, 4);
  put<std::uint32_t>(os, std::uint32_t(t.order()));
  for (Index r : t.ranks()) put<std::uint64_t>(os, std::uint64_t(r));
  for (Index m : t.mode_sizes()) put<std::uint64_t>(os, std::uint64_t(m));
  for (const auto& c : t.cores()) put_values(os, c.data().data(), c.size());
  if (!os) throw std::runtime_error("write_tt: stream error");
}

template <typename Scalar>
TTTensor<Scalar> build_tt(const std::vector<Index>& ranks, const std::vector<Index>& modes, const std::vector<double>& payload) {
  constexpr std::size_t width = is_complex_v<Scalar> ? 2 : 1;
  std::vector<TTCore<Scalar>> cores;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    TTCore<Scalar> c(ranks[k], modes[k], ranks[k + 1]);
    std::memcpy(static_cast<void*>(c.data().data()), payload.data() + pos, std::size_t(c.size()) * width * sizeof(double));
    pos += std::size_t(c.size()) * width;
    cores.push_back(std::move(c));
  }
  return TTTensor<Scalar>(std::move(cores));
}

template <typename Scalar>
void write_csv_impl(std::ostream& os, const DenseTensor<Scalar>& t) {
  for (Index d = 0; d < t.order(); ++d) os << 'i' << d << ',';
  os << (is_complex_v<Scalar> ? "re,im\n" : "value\n");
  os << std::setprecision(17);
  Index flat = 0;
  for_each_index(t.mode_sizes(), [&](std::span<const Index> idx) {
    for (Index i : idx) os << i << ',';
    const Scalar v = t.data()[flat++];
    if constexpr (is_complex_v<Scalar>)
      os << v.real() << ',' << v.imag() << '\n';
    else
      os << v << '\n';
  });
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return is;
}

}  // namespace

void write_dense(std::ostream& os, const DenseTensor<double>& t) { write_dense_impl(os, t); }
void write_dense(std::ostream& os, const DenseTensor<cplx>& t) { write_dense_impl(os, t); }

AnyDense read_dense(std::istream& is) {
  expect_magic(is, kDenseMagic, "read_dense");
  const auto order = get<std::uint32_t>(is, "read_dense");
  if (order == 0 || order > 64) throw std::invalid_argument("read_dense: invalid mode count");
  const auto modes = get_sizes(is, order, "read_dense");
  std::uint64_t n = 1;
  for (Index m : modes) {
    n *= std::uint64_t(m);
    if (n > kMaxElements) throw std::invalid_argument("read_dense: tensor too large");
  }
  const auto payload = rest(is, "read_dense");
  if (payload.size() == n) {
    DenseTensor<double> t(modes);
    std::memcpy(t.data().data(), payload.data(), n * sizeof(double));
    return t;
  }
  if (payload.size() == 2 * n) {
    DenseTensor<cplx> t(modes);
    std::memcpy(reinterpret_cast<double*>(t.data().data()), payload.data(), 2 * n * sizeof(double));
    return t;
  }
  throw std::invalid_argument("read_dense: payload size does not match header");
}

void write_tt(std::ostream& os, const TTTensor<double>& t) { write_tt_impl(os, t); }
void write_tt(std::ostream& os, const TTTensor<cplx>& t) { write_tt_impl(os, t); }

AnyTT read_tt(std::istream& is) {
  expect_magic(is, kTTMagic, "read_tt");
  const auto order = get<std::uint32_t>(is, "read_tt");
  if (order == 0 || order > 256) throw std::invalid_argument("read_tt: invalid order");
  const auto ranks = get_sizes(is, order + 1, "read_tt");
  const auto modes = get_sizes(is, order, "read_tt");
  if (ranks.front() != 1 || ranks.back() != 1) throw std::invalid_argument("read_tt: boundary ranks must be 1");
  std::uint64_t n = 0;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    n += std::uint64_t(ranks[k]) * std::uint64_t(modes[k]) * std::uint64_t(ranks[k + 1]);
    if (n > kMaxElements) throw std::invalid_argument("read_tt: cores too large");
  }
  const auto payload = rest(is, "read_tt");
  if (payload.size() == n) return build_tt<double>(ranks, modes, payload);
  if (payload.size() == 2 * n) return build_tt<cplx>(ranks, modes, payload);
  throw std::invalid_argument("read_tt: payload size does not match header");
}

void write_csv(std::ostream& os, const DenseTensor<double>& t) { write_csv_impl(os, t); }
void write_csv(std::ostream& os, const DenseTensor<cplx>& t) { write_csv_impl(os, t); }

void save_dense(const std::string& path, const AnyDense& t) {
  auto os = open_out(path);
  std::visit([&](const auto& x) { write_dense(os, x); }, t);
}

AnyDense load_dense(const std::string& path) {
  auto is = open_in(path);
  return read_dense(is);
}

void save_tt(const std::string& path, const AnyTT& t) {
  auto os = open_out(path);
  std::visit([&](const auto& x) { write_tt(os, x); }, t);
}

AnyTT load_tt(const std::string& path) {
  auto is = open_in(path);
  return read_tt(is);
}

void save_csv(const std::string& path, const AnyDense& t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  std::visit([&](const auto& x) { write_csv(os, x); }, t);
}

DenseTensor<double> load_real(const std::string& path) {
  auto t = load_dense(path);
  if (auto* r = std::get_if<DenseTensor<double>>(&t)) return std::move(*r);
  throw std::invalid_argument(path + ": expected a real tensor");
}

}  // namespace qttconv::io
