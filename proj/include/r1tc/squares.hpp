#pragma once

#include "r1tc/tensor.hpp"

#include <array>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace r1tc {

/// A square {a1, a2; a3, a4}: two opposite pairs with equal coordinate-wise
/// min and max. Stored as linear cell indices in canonical form: each pair
/// sorted, then the two pairs sorted.
struct Square {
  std::array<Index, 2> pair_a{};
  std::array<Index, 2> pair_b{};

  static Square canonical(Index a1, Index a2, Index a3, Index a4);

  std::array<Index, 4> cells() const {
    return {pair_a[0], pair_a[1], pair_b[0], pair_b[1]};
  }

  friend bool operator==(const Square&, const Square&) = default;
  friend auto operator<=>(const Square&, const Square&) = default;
};

class SquareBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultSquareCap = 10'000'000;

/// True iff the tuples are distinct and (a1,a2), (a3,a4) are opposite pairs.
bool is_square(const IndexTuple& a1, const IndexTuple& a2, const IndexTuple& a3,
               const IndexTuple& a4);
bool is_square(const Shape& shape, Index a1, Index a2, Index a3, Index a4);

/// True iff the tuples are distinct and their F2 indicator vectors sum to 0.
bool is_generalized_square(const IndexTuple& a1, const IndexTuple& a2,
                           const IndexTuple& a3, const IndexTuple& a4);
bool is_generalized_square(const Shape& shape, Index a1, Index a2, Index a3,
                           Index a4);

/// Exact number of squares of a shape, computed combinatorially.
double count_squares(const Shape& shape);

/// All squares in canonical form, sorted. Throws SquareBudgetExceeded when
/// count_squares(shape) > cap.
std::vector<Square> enumerate_squares(const Shape& shape,
                                      std::size_t cap = kDefaultSquareCap);

/// Calls fn(p, q) for every pair {p, q} opposite to the pair {a, b}, i.e. for
/// every square {a, b; p, q}. Each square is reported once (p < q).
template <class Fn>
void for_each_complementary_pair(const Shape& shape, Index a, Index b, Fn&& fn) {
  const int d = shape.order();
  int diff[64];
  int m = 0;
  for (int k = 0; k < d; ++k)
    if (shape.coord(a, k) != shape.coord(b, k)) diff[m++] = k;
  if (m < 2) return;
  // Subsets S of the differing axes with the first differing axis excluded;
  // S and its complement give the same unordered pair.
  const unsigned long long limit = 1ULL << (m - 1);
  for (unsigned long long s = 1; s < limit; ++s) {
    Index p = a;
    Index q = b;
    for (int j = 0; j < m - 1; ++j) {
      if (s & (1ULL << j)) {
        const int k = diff[j + 1];
        const int ak = shape.coord(a, k);
        const int bk = shape.coord(b, k);
        p += (bk - ak) * shape.stride(k);
        q += (ak - bk) * shape.stride(k);
      }
    }
    if (p < q)
      fn(p, q);
    else
      fn(q, p);
  }
}

/// Calls fn(partner, p, q) for every square {cell, partner; p, q} containing
/// cell. Each square containing cell is reported exactly once.
template <class Fn>
void for_each_square_containing(const Shape& shape, Index cell, Fn&& fn) {
  const Index total = shape.numel();
  for (Index other = 0; other < total; ++other) {
    if (other == cell) continue;
    for_each_complementary_pair(shape, cell, other,
                                [&](Index p, Index q) { fn(other, p, q); });
  }
}

}  // namespace r1tc
