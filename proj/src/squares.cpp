#include "r1tc/squares.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace r1tc {

Square Square::canonical(Index a1, Index a2, Index a3, Index a4) {
  std::array<Index, 2> p{std::min(a1, a2), std::max(a1, a2)};
  std::array<Index, 2> q{std::min(a3, a4), std::max(a3, a4)};
  if (q < p) std::swap(p, q);
  return Square{p, q};
}

namespace {

void check_same_order(const IndexTuple& a1, const IndexTuple& a2,
                      const IndexTuple& a3, const IndexTuple& a4) {
  const int d = a1.order();
  if (a2.order() != d || a3.order() != d || a4.order() != d)
    throw std::invalid_argument("tuples of different order");
}

bool distinct4(const IndexTuple& a1, const IndexTuple& a2, const IndexTuple& a3,
               const IndexTuple& a4) {
  return a1 != a2 && a1 != a3 && a1 != a4 && a2 != a3 && a2 != a4 && a3 != a4;
}

}  // namespace

bool is_square(const IndexTuple& a1, const IndexTuple& a2, const IndexTuple& a3,
               const IndexTuple& a4) {
  check_same_order(a1, a2, a3, a4);
  if (!distinct4(a1, a2, a3, a4)) return false;
  for (int k = 0; k < a1.order(); ++k) {
    if (std::max(a1[k], a2[k]) != std::max(a3[k], a4[k])) return false;
    if (std::min(a1[k], a2[k]) != std::min(a3[k], a4[k])) return false;
  }
  return true;
}

bool is_square(const Shape& shape, Index a1, Index a2, Index a3, Index a4) {
  return is_square(shape.delinearize(a1), shape.delinearize(a2),
                   shape.delinearize(a3), shape.delinearize(a4));
}

bool is_generalized_square(const IndexTuple& a1, const IndexTuple& a2,
                           const IndexTuple& a3, const IndexTuple& a4) {
  check_same_order(a1, a2, a3, a4);
  if (!distinct4(a1, a2, a3, a4)) return false;
  // Per block the four one-hot vectors cancel iff the coordinates pair up.
  for (int k = 0; k < a1.order(); ++k) {
    int v[4] = {a1[k], a2[k], a3[k], a4[k]};
    std::sort(v, v + 4);
    if (v[0] != v[1] || v[2] != v[3]) return false;
  }
  return true;
}

bool is_generalized_square(const Shape& shape, Index a1, Index a2, Index a3,
                           Index a4) {
  return is_generalized_square(shape.delinearize(a1), shape.delinearize(a2),
                               shape.delinearize(a3), shape.delinearize(a4));
}

double count_squares(const Shape& shape) {
  // Sum over sets D of differing axes: ordered pairs differing exactly on D,
  // times (2^{|D|-1} - 1) complementary pairs, over 4 (two unordered pairs).
  const int d = shape.order();
  if (d > 30) throw std::invalid_argument("count_squares: order too large");
  double total = 0.0;
  for (unsigned long long s = 0; s < (1ULL << d); ++s) {
    const int m = std::popcount(s);
    if (m < 2) continue;
    double ordered = 1.0;
    for (int k = 0; k < d; ++k) {
      const double n = shape.dim(k);
      ordered *= (s & (1ULL << k)) ? n * (n - 1) : n;
    }
    total += ordered * (std::ldexp(1.0, m - 1) - 1.0) / 4.0;
  }
  return total;
}

std::vector<Square> enumerate_squares(const Shape& shape, std::size_t cap) {
  const double expected = count_squares(shape);
  if (expected > static_cast<double>(cap))
    throw SquareBudgetExceeded("shape " + shape.to_string() + " has " +
                               std::to_string(expected) +
                               " squares, above the cap of " +
                               std::to_string(cap));
  std::vector<Square> out;
  out.reserve(static_cast<std::size_t>(expected));
  const Index total = shape.numel();
  for (Index a = 0; a < total; ++a) {
    for (Index b = a + 1; b < total; ++b) {
      for_each_complementary_pair(shape, a, b, [&](Index p, Index q) {
        // Each square is met from both of its opposite pairs; keep one.
        if (std::array<Index, 2>{a, b} < std::array<Index, 2>{p, q})
          out.push_back(Square{{a, b}, {p, q}});
      });
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace r1tc
