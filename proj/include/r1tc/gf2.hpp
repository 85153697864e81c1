#pragma once

#include "r1tc/tensor.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace r1tc {

/// Dense vector over F2, one byte per entry (0 or 1).
using BitVector = std::vector<std::uint8_t>;

/// Row-major bit-packed matrix over F2. Padding bits past cols() are zero.
class GF2Matrix {
 public:
  using Word = std::uint64_t;
  static constexpr int kWordBits = 64;

  GF2Matrix() = default;
  GF2Matrix(Index rows, Index cols);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index words_per_row() const { return wpr_; }

  bool get(Index r, Index c) const {
    return (data_[r * wpr_ + c / kWordBits] >> (c % kWordBits)) & 1U;
  }
  void set(Index r, Index c, bool v);
  void flip(Index r, Index c) { data_[r * wpr_ + c / kWordBits] ^= Word(1) << (c % kWordBits); }

  const Word* row(Index r) const { return data_.data() + r * wpr_; }
  Word* row(Index r) { return data_.data() + r * wpr_; }

  void set_row(Index r, const BitVector& bits);
  BitVector row_bits(Index r) const;
  /// Appends a row; the matrix keeps its column count.
  void append_row(const BitVector& bits);

  /// m * z over F2.
  BitVector multiply(const BitVector& z) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Index wpr_ = 0;
  std::vector<Word> data_;
};

enum class GF2Status { unique_up_to_gauge, inconsistent, underdetermined };

struct GF2SolveResult {
  GF2Status status = GF2Status::inconsistent;
  std::optional<BitVector> solution;
  Index rank = 0;
};

/// v_alpha: one 1 inside each axis block, at position alpha_k.
BitVector indicator_vector(const IndexTuple& alpha, const Shape& shape);

/// Rows are indicator vectors of the mask cells in canonical order.
GF2Matrix build_indicator_matrix(const Mask& mask);

Index gf2_rank(const GF2Matrix& m);

/// rank(V_Omega) == n - d + 1.
bool unique_recovery(const Mask& mask);

/// Solves m z = rhs. The columns in gauge_columns are pinned to zero; status
/// is unique_up_to_gauge when the pinned system has full column rank. The
/// returned solution sets every remaining free variable to zero.
GF2SolveResult gf2_solve(const GF2Matrix& m, const BitVector& rhs,
                         const std::vector<Index>& gauge_columns = {});

/// Columns fixed by the standard gauge: the first coordinate of axes 2..d.
std::vector<Index> standard_gauge_columns(const Shape& shape);

}  // namespace r1tc
