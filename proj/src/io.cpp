#include "r1tc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace r1tc {

ParseError::ParseError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
      source_(source),
      line_(line) {}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

struct LineReader {
  std::istream& in;
  std::string source;
  int line_no = 0;

  // Next non-empty, non-comment line; false at end of input.
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(source, line_no, what);
  }
};

double parse_number(LineReader& r, const std::string& token) {
  double v = 0.0;
  std::size_t used = 0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    r.fail("not a number: '" + token + "'");
  }
  if (used != token.size()) r.fail("not a number: '" + token + "'");
  return v;
}

int parse_int(LineReader& r, const std::string& token) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    r.fail("not an integer: '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// Reads the optional magic line, d, and dims.
Shape read_header(LineReader& r, const char* magic) {
  std::string line;
  if (!r.next(line)) r.fail("empty input");
  auto toks = split(line);
  if (toks.size() == 2 && toks[0] == magic && toks[1] == "v1") {
    if (!r.next(line)) r.fail("missing order line");
    toks = split(line);
  }
  if (toks.size() != 1) r.fail("expected the tensor order d");
  const int d = parse_int(r, toks[0]);
  if (d < 1) r.fail("order must be >= 1");
  if (!r.next(line)) r.fail("missing dimension line");
  toks = split(line);
  if (static_cast<int>(toks.size()) != d)
    r.fail("expected " + std::to_string(d) + " dimensions");
  std::vector<int> dims;
  for (const auto& t : toks) dims.push_back(parse_int(r, t));
  try {
    return Shape(std::move(dims));
  } catch (const std::exception& e) {
    r.fail(e.what());
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

void write_header(std::ostream& out, const Shape& s) {
  out << s.order() << '\n';
  for (int k = 0; k < s.order(); ++k) out << (k ? " " : "") << s.dim(k);
  out << '\n';
}

}  // namespace

DenseTensor read_tensor(std::istream& in, const std::string& source) {
  LineReader r{in, source};
  Shape shape = read_header(r, "R1T");
  Eigen::VectorXd values(shape.numel());
  Index filled = 0;
  std::string line;
  while (r.next(line)) {
    for (const auto& tok : split(line)) {
      if (filled == shape.numel()) r.fail("more values than the shape holds");
      values[filled++] = parse_number(r, tok);
    }
  }
  if (filled != shape.numel())
    r.fail("expected " + std::to_string(shape.numel()) + " values, got " +
           std::to_string(filled));
  return DenseTensor(shape, std::move(values));
}

DenseTensor read_tensor_file(const std::string& path) {
  auto f = open_in(path);
  return read_tensor(f, path);
}

void write_tensor(std::ostream& out, const DenseTensor& t) {
  write_header(out, t.shape());
  const int last = t.shape().dim(t.shape().order() - 1);
  for (Index i = 0; i < t.shape().numel(); ++i) {
    out << format_double(t(i)) << ((i + 1) % last == 0 ? '\n' : ' ');
  }
}

void write_tensor_file(const std::string& path, const DenseTensor& t) {
  auto f = open_out(path);
  write_tensor(f, t);
}

ObservedTensor MaskFile::observed() const {
  if (!has_values) throw std::invalid_argument("mask file carries no values");
  return ObservedTensor(mask, values);
}

MaskFile read_mask(std::istream& in, const std::string& source) {
  LineReader r{in, source};
  Shape shape = read_header(r, "R1M");
  const int d = shape.order();
  std::vector<std::pair<Index, double>> rows;
  int valued = -1;
  std::string line;
  while (r.next(line)) {
    auto toks = split(line);
    const bool with_value = static_cast<int>(toks.size()) == d + 1;
    if (!with_value && static_cast<int>(toks.size()) != d)
      r.fail("expected " + std::to_string(d) + " coordinates and an optional value");
    if (valued == -1) valued = with_value;
    if (valued != static_cast<int>(with_value))
      r.fail("mixes tuples with and without values");
    std::vector<int> c(d);
    for (int k = 0; k < d; ++k) {
      c[k] = parse_int(r, toks[k]) - 1;
      if (c[k] < 0 || c[k] >= shape.dim(k))
        r.fail("coordinate " + toks[k] + " outside 1.." + std::to_string(shape.dim(k)));
    }
    const double v = with_value ? parse_number(r, toks[d]) : 0.0;
    rows.emplace_back(shape.linearize(IndexTuple(std::move(c))), v);
  }
  std::sort(rows.begin(), rows.end());
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].first == rows[i - 1].first)
      r.fail("duplicate tuple " + shape.delinearize(rows[i].first).to_string());
  MaskFile out;
  std::vector<Index> cells;
  out.values.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    cells.push_back(rows[i].first);
    out.values[static_cast<Index>(i)] = rows[i].second;
  }
  out.mask = Mask(shape, std::move(cells));
  out.has_values = valued == 1;
  if (!out.has_values) out.values.resize(0);
  return out;
}

MaskFile read_mask_file(const std::string& path) {
  auto f = open_in(path);
  return read_mask(f, path);
}

void write_mask(std::ostream& out, const Mask& mask) {
  write_header(out, mask.shape());
  for (const auto& t : mask.tuples()) {
    for (int k = 0; k < t.order(); ++k) out << (k ? " " : "") << t[k] + 1;
    out << '\n';
  }
}

void write_observed(std::ostream& out, const ObservedTensor& obs) {
  write_header(out, obs.shape());
  for (Index i = 0; i < obs.mask.size(); ++i) {
    const auto t = obs.mask.tuple(i);
    for (int k = 0; k < t.order(); ++k) out << t[k] + 1 << ' ';
    out << format_double(obs.values[i]) << '\n';
  }
}

void write_observed_file(const std::string& path, const ObservedTensor& obs) {
  auto f = open_out(path);
  write_observed(f, obs);
}

}  // namespace r1tc
