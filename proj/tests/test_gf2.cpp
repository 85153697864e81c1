#include "r1tc/gf2.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace r1tc;
using namespace testing_support;

namespace {

BitVector bits(std::initializer_list<int> v) { return BitVector(v.begin(), v.end()); }

GF2Matrix random_matrix(Index r, Index c, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution b(p);
  GF2Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m.set(i, j, b(rng));
  return m;
}

// Rank oracle: size of the row span, enumerated as a set of bit strings.
Index span_rank(const GF2Matrix& m) {
  std::set<BitVector> span{BitVector(m.cols(), 0)};
  for (Index r = 0; r < m.rows(); ++r) {
    const BitVector row = m.row_bits(r);
    std::set<BitVector> next = span;
    for (BitVector v : span) {
      for (Index j = 0; j < m.cols(); ++j) v[j] ^= row[j];
      next.insert(v);
    }
    span.swap(next);
  }
  Index rank = 0;
  while ((std::size_t(1) << rank) < span.size()) ++rank;
  return rank;
}

}  // namespace

TEST_CASE("indicator vectors") {
  const Shape s({2, 2, 2});
  CHECK(indicator_vector(IndexTuple::from_one_based({1, 1, 1}), s) == bits({1, 0, 1, 0, 1, 0}));
  CHECK(indicator_vector(IndexTuple::from_one_based({2, 2, 2}), s) == bits({0, 1, 0, 1, 0, 1}));
  CHECK(indicator_vector(IndexTuple::from_one_based({1}), Shape({3})) == bits({1, 0, 0}));
  CHECK_THROWS(indicator_vector(IndexTuple({0, 0}), s));
}

TEST_CASE("indicator matrix of the linear-system example") {
  const GF2Matrix v = build_indicator_matrix(example_linear_system_mask());
  CHECK(v.rows() == 4);
  CHECK(v.cols() == 6);
  CHECK(v.row_bits(0) == bits({1, 0, 1, 0, 1, 0}));
  CHECK(v.row_bits(1) == bits({1, 0, 0, 1, 0, 1}));
  CHECK(v.row_bits(2) == bits({0, 1, 1, 0, 0, 1}));
  CHECK(v.row_bits(3) == bits({0, 1, 0, 1, 0, 1}));
  CHECK(gf2_rank(v) == 4);
  CHECK(unique_recovery(example_linear_system_mask()));
  for (Index r = 0; r < v.rows(); ++r) {
    int ones = 0;
    for (Index c = 0; c < v.cols(); ++c) ones += v.get(r, c);
    CHECK(ones == 3);
  }
}

TEST_CASE("indicator matrix edge cases") {
  const Shape s({2, 2, 2});
  const GF2Matrix one = build_indicator_matrix(Mask(s, std::vector<Index>{5}));
  CHECK(one.rows() == 1);
  CHECK(gf2_rank(one) == 1);
  CHECK_FALSE(unique_recovery(Mask(s, std::vector<Index>{5})));
  CHECK_THROWS(build_indicator_matrix(Mask(s)));
  CHECK_THROWS(unique_recovery(Mask(s)));
  const GF2Matrix full = build_indicator_matrix(Mask::full(Shape({2, 2})));
  CHECK(full.rows() == 4);
  CHECK(gf2_rank(full) == 3);
  CHECK(span_rank(full) == 3);
}

TEST_CASE("unique recovery of the GS-fails example and full grids") {
  // As printed, the 16 indicator rows span only 15 dimensions (one short of
  // n - d + 1); a real-rank computation agrees.
  CHECK(gf2_rank(build_indicator_matrix(gs_fails_mask())) == 15);
  CHECK_FALSE(unique_recovery(gs_fails_mask()));
  for (const Shape s : {Shape({1}), Shape({4}), Shape({2, 3}), Shape({3, 1, 2}), Shape({2, 2, 2, 2})})
    CHECK(unique_recovery(Mask::full(s)));
}

TEST_CASE("rank agrees with span enumeration and is invariant under row operations") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Index r = 1 + trial % 10, c = 1 + (trial * 7) % 12;
    GF2Matrix m = random_matrix(r, c, 0.4, rng);
    const Index rank = gf2_rank(m);
    CHECK(rank == span_rank(m));
    CHECK(rank <= std::min(r, c));
    // Add row 0 into every other row, then reverse row order.
    GF2Matrix m2(r, c);
    for (Index i = 0; i < r; ++i) {
      BitVector row = m.row_bits(i);
      if (i > 0)
        for (Index j = 0; j < c; ++j) row[j] ^= m.get(0, j);
      m2.set_row(r - 1 - i, row);
    }
    CHECK(gf2_rank(m2) == rank);
  }
  GF2Matrix id(70, 70);
  for (Index i = 0; i < 70; ++i) id.set(i, i, true);
  CHECK(gf2_rank(id) == 70);
}

TEST_CASE("solving the sign system of the linear-system example") {
  const Mask m = example_linear_system_mask();
  const GF2Matrix v = build_indicator_matrix(m);
  const auto gauge = standard_gauge_columns(m.shape());
  CHECK(gauge == std::vector<Index>{2, 4});
  const BitVector rhs = bits({0, 1, 1, 1});
  const GF2SolveResult res = gf2_solve(v, rhs, gauge);
  CHECK(res.status == GF2Status::unique_up_to_gauge);
  REQUIRE(res.solution);
  CHECK(v.multiply(*res.solution) == rhs);
  CHECK((*res.solution)[2] == 0);
  CHECK((*res.solution)[4] == 0);
  CHECK(res.rank == 4);
}

TEST_CASE("gf2_solve classifies consistency") {
  std::mt19937_64 rng(2);
  const Shape s({3, 3, 2});
  std::uniform_int_distribution<Index> pick(0, s.numel() - 1);
  int inconsistent_seen = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Mask m = random_mask(s, 0.6, rng);
    if (m.empty()) continue;
    const GF2Matrix v = build_indicator_matrix(m);
    const auto gauge = standard_gauge_columns(s);
    // Zero rhs is always consistent with the zero solution.
    const auto zero = gf2_solve(v, BitVector(v.rows(), 0), gauge);
    CHECK(zero.status != GF2Status::inconsistent);
    CHECK(*zero.solution == BitVector(v.cols(), 0));
    // An rhs in the column space.
    BitVector z(v.cols());
    for (auto& b : z) b = rng() & 1U;
    for (Index g : gauge) z[g] = 0;
    const BitVector rhs = v.multiply(z);
    const auto res = gf2_solve(v, rhs, gauge);
    REQUIRE(res.status != GF2Status::inconsistent);
    CHECK(v.multiply(*res.solution) == rhs);
    CHECK((res.status == GF2Status::unique_up_to_gauge) == unique_recovery(m));
    if (res.status == GF2Status::unique_up_to_gauge) CHECK(*res.solution == z);
    // Flipping one bit leaves the row space exactly when the rows are dependent.
    if (res.rank < v.rows()) {
      BitVector bad = rhs;
      bool found = false;
      for (Index i = 0; i < v.rows() && !found; ++i) {
        bad[i] ^= 1;
        const auto r2 = gf2_solve(v, bad, gauge);
        if (r2.status == GF2Status::inconsistent) {
          found = true;
          CHECK_FALSE(r2.solution);
        } else {
          bad[i] ^= 1;
        }
      }
      CHECK(found);
      ++inconsistent_seen;
    }
  }
  CHECK(inconsistent_seen > 0);
  CHECK_THROWS(gf2_solve(GF2Matrix(2, 3), BitVector(3, 0)));
}
