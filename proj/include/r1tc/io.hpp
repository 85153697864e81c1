#pragma once

#include "r1tc/tensor.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace r1tc {

/// Malformed input, carrying the source name and 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what);
  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

// Tensor text format ("R1T v1"):
//   d
//   n_1 ... n_d
//   N values, row-major (last index fastest), any whitespace layout.
// Mask text format ("R1M v1"):
//   d
//   n_1 ... n_d
//   one 1-based tuple per line, optionally followed by an observed value.
// Readers accept an optional leading "R1T v1" / "R1M v1" line and '#' comments.

DenseTensor read_tensor(std::istream& in, const std::string& source = "<stream>");
DenseTensor read_tensor_file(const std::string& path);
void write_tensor(std::ostream& out, const DenseTensor& t);
void write_tensor_file(const std::string& path, const DenseTensor& t);

/// Reads a mask file. Values are returned when every tuple line carries one;
/// a file mixing valued and bare tuple lines is rejected.
struct MaskFile {
  Mask mask;
  bool has_values = false;
  Eigen::VectorXd values;  // aligned with mask.cells() when has_values

  ObservedTensor observed() const;
};

MaskFile read_mask(std::istream& in, const std::string& source = "<stream>");
MaskFile read_mask_file(const std::string& path);
void write_mask(std::ostream& out, const Mask& mask);
void write_observed(std::ostream& out, const ObservedTensor& obs);
void write_observed_file(const std::string& path, const ObservedTensor& obs);

/// Shortest decimal text that round-trips a double.
std::string format_double(double v);

}  // namespace r1tc
