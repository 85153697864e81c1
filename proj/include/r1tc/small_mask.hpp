#pragma once

#include "r1tc/propagation.hpp"

#include <cstdint>
#include <vector>

namespace r1tc {

/// Condition profiles for shapes with at most 64 cells, with masks encoded as
/// 64-bit cell sets. Squares, generalized squares and axis neighbourhoods are
/// precomputed once per shape; this is the hot path of exhaustive tables.
class SmallMaskAnalyzer {
 public:
  using Bits = std::uint64_t;

  explicit SmallMaskAnalyzer(const Shape& shape);

  const Shape& shape() const { return shape_; }
  Bits full_set() const { return full_; }

  bool unique(Bits mask) const;
  Bits closure_gs(Bits mask) const;
  Bits closure_s(Bits mask) const;
  Bits closure_sr(Bits mask) const;
  bool a_propagation(Bits mask, AStart start = AStart::first_cell) const;
  ConditionProfile profile(Bits mask) const;

  static Bits encode(const Mask& mask);

 private:
  struct Quad {
    Bits all;
    std::uint8_t c[4];  // opposite pairs (c0,c1), (c2,c3) for squares
  };

  Shape shape_;
  Bits full_ = 0;
  std::vector<Quad> squares_;
  std::vector<Bits> gs_quads_;
  std::vector<Bits> neighbours_;            // per cell
  std::vector<std::vector<Bits>> slices_;   // [axis][value] -> cells
  std::vector<std::uint64_t> indicator_;    // per cell, n <= 64 bits
};

}  // namespace r1tc
