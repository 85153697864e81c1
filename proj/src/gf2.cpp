#include "r1tc/gf2.hpp"

#include <bit>
#include <stdexcept>
#include <utility>

namespace r1tc {

GF2Matrix::GF2Matrix(Index rows, Index cols)
    : rows_(rows), cols_(cols), wpr_((cols + kWordBits - 1) / kWordBits) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative GF2Matrix size");
  data_.assign(static_cast<std::size_t>(rows_ * wpr_), 0);
}

void GF2Matrix::set(Index r, Index c, bool v) {
  Word& w = data_[r * wpr_ + c / kWordBits];
  const Word bit = Word(1) << (c % kWordBits);
  w = v ? (w | bit) : (w & ~bit);
}

void GF2Matrix::set_row(Index r, const BitVector& bits) {
  if (static_cast<Index>(bits.size()) != cols_)
    throw std::invalid_argument("row length mismatch");
  Word* w = row(r);
  for (Index i = 0; i < wpr_; ++i) w[i] = 0;
  for (Index c = 0; c < cols_; ++c)
    if (bits[c]) w[c / kWordBits] |= Word(1) << (c % kWordBits);
}

BitVector GF2Matrix::row_bits(Index r) const {
  BitVector out(cols_);
  for (Index c = 0; c < cols_; ++c) out[c] = get(r, c);
  return out;
}

void GF2Matrix::append_row(const BitVector& bits) {
  data_.resize(data_.size() + wpr_, 0);
  ++rows_;
  set_row(rows_ - 1, bits);
}

BitVector GF2Matrix::multiply(const BitVector& z) const {
  if (static_cast<Index>(z.size()) != cols_)
    throw std::invalid_argument("multiply: vector length mismatch");
  GF2Matrix packed(1, cols_);
  packed.set_row(0, z);
  BitVector out(rows_);
  for (Index r = 0; r < rows_; ++r) {
    int parity = 0;
    for (Index i = 0; i < wpr_; ++i) parity ^= std::popcount(row(r)[i] & packed.row(0)[i]) & 1;
    out[r] = static_cast<std::uint8_t>(parity);
  }
  return out;
}

BitVector indicator_vector(const IndexTuple& alpha, const Shape& shape) {
  if (!shape.contains(alpha))
    throw std::out_of_range("indicator_vector: tuple outside shape");
  BitVector v(shape.dim_sum(), 0);
  for (int k = 0; k < shape.order(); ++k) v[shape.block_offset(k) + alpha[k]] = 1;
  return v;
}

GF2Matrix build_indicator_matrix(const Mask& mask) {
  if (mask.empty()) throw std::invalid_argument("indicator matrix of an empty mask");
  const Shape& s = mask.shape();
  GF2Matrix m(mask.size(), s.dim_sum());
  for (Index r = 0; r < mask.size(); ++r) {
    const Index cell = mask.cells()[r];
    for (int k = 0; k < s.order(); ++k) m.set(r, s.block_offset(k) + s.coord(cell, k), true);
  }
  return m;
}

namespace {

// In-place forward elimination over the rows of `m` with an optional extra
// right-hand-side column. Returns pivot columns in row order.
struct Echelon {
  GF2Matrix m;
  BitVector rhs;
  std::vector<Index> pivots;
};

Echelon eliminate(GF2Matrix m, BitVector rhs) {
  const Index rows = m.rows();
  const Index wpr = m.words_per_row();
  std::vector<Index> pivots;
  Index r = 0;
  for (Index c = 0; c < m.cols() && r < rows; ++c) {
    Index p = r;
    while (p < rows && !m.get(p, c)) ++p;
    if (p == rows) continue;
    if (p != r) {
      std::swap_ranges(m.row(p), m.row(p) + wpr, m.row(r));
      if (!rhs.empty()) std::swap(rhs[p], rhs[r]);
    }
    // Full reduction so pivot columns are clean in every other row.
    for (Index i = 0; i < rows; ++i) {
      if (i != r && m.get(i, c)) {
        GF2Matrix::Word* dst = m.row(i);
        const GF2Matrix::Word* src = m.row(r);
        for (Index w = c / GF2Matrix::kWordBits; w < wpr; ++w) dst[w] ^= src[w];
        if (!rhs.empty()) rhs[i] ^= rhs[r];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(rhs), std::move(pivots)};
}

}  // namespace

Index gf2_rank(const GF2Matrix& m) {
  // Forward-only elimination; cheaper than the fully reduced form.
  GF2Matrix a = m;
  const Index rows = a.rows();
  const Index wpr = a.words_per_row();
  Index r = 0;
  for (Index c = 0; c < a.cols() && r < rows; ++c) {
    Index p = r;
    while (p < rows && !a.get(p, c)) ++p;
    if (p == rows) continue;
    if (p != r) std::swap_ranges(a.row(p), a.row(p) + wpr, a.row(r));
    for (Index i = r + 1; i < rows; ++i) {
      if (a.get(i, c)) {
        GF2Matrix::Word* dst = a.row(i);
        const GF2Matrix::Word* src = a.row(r);
        for (Index w = c / GF2Matrix::kWordBits; w < wpr; ++w) dst[w] ^= src[w];
      }
    }
    ++r;
  }
  return r;
}

bool unique_recovery(const Mask& mask) {
  const Shape& s = mask.shape();
  return gf2_rank(build_indicator_matrix(mask)) == s.dim_sum() - s.order() + 1;
}

std::vector<Index> standard_gauge_columns(const Shape& shape) {
  std::vector<Index> cols;
  for (int k = 1; k < shape.order(); ++k) cols.push_back(shape.block_offset(k));
  return cols;
}

GF2SolveResult gf2_solve(const GF2Matrix& m, const BitVector& rhs,
                         const std::vector<Index>& gauge_columns) {
  if (static_cast<Index>(rhs.size()) != m.rows())
    throw std::invalid_argument("gf2_solve: rhs length does not match rows");
  GF2SolveResult result;
  result.rank = gf2_rank(m);

  GF2Matrix aug = m;
  BitVector b = rhs;
  for (Index c : gauge_columns) {
    if (c < 0 || c >= m.cols()) throw std::out_of_range("gauge column out of range");
    BitVector row(m.cols(), 0);
    row[c] = 1;
    aug.append_row(row);
    b.push_back(0);
  }
  Echelon e = eliminate(std::move(aug), std::move(b));
  const Index rank = static_cast<Index>(e.pivots.size());
  for (Index i = rank; i < e.m.rows(); ++i) {
    if (e.rhs[i]) {
      result.status = GF2Status::inconsistent;
      return result;
    }
  }
  BitVector z(m.cols(), 0);
  for (Index i = 0; i < rank; ++i) z[e.pivots[i]] = e.rhs[i];
  result.solution = std::move(z);
  result.status = rank == m.cols() ? GF2Status::unique_up_to_gauge
                                   : GF2Status::underdetermined;
  return result;
}

}  // namespace r1tc
