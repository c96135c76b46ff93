#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "qttconv/tt_tensor.hpp"

namespace qttconv::io {

// Binary layouts, all little-endian:
//   dense: "QTTD" u32 order, u64 mode sizes, f64 payload (first index fastest)
//   TT:    "QTTT" u32 K, u64 r_0..r_K, u64 mode sizes, f64 cores in order
// A complex payload stores interleaved (re, im) pairs and is recognized by
// its length, so there is no type flag in the header.

using AnyDense = std::variant<DenseTensor<double>, DenseTensor<cplx>>;
using AnyTT = std::variant<TTTensor<double>, TTTensor<cplx>>;

void write_dense(std::ostream& os, const DenseTensor<double>& t);
void write_dense(std::ostream& os, const DenseTensor<cplx>& t);
AnyDense read_dense(std::istream& is);

void write_tt(std::ostream& os, const TTTensor<double>& t);
void write_tt(std::ostream& os, const TTTensor<cplx>& t);
AnyTT read_tt(std::istream& is);

/// One row per element: index columns i0..i{D-1}, then `value` (or `re,im`).
void write_csv(std::ostream& os, const DenseTensor<double>& t);
void write_csv(std::ostream& os, const DenseTensor<cplx>& t);

// File wrappers; they throw std::runtime_error when the file cannot be opened.
void save_dense(const std::string& path, const AnyDense& t);
AnyDense load_dense(const std::string& path);
void save_tt(const std::string& path, const AnyTT& t);
AnyTT load_tt(const std::string& path);
void save_csv(const std::string& path, const AnyDense& t);

/// Loads a dense file and insists on a real payload.
DenseTensor<double> load_real(const std::string& path);

}  // namespace qttconv::io
