#include "r1tc/gf2.hpp"
#include "r1tc/propagation.hpp"
#include "r1tc/small_mask.hpp"
#include "r1tc/squares.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numeric>
#include <set>

using namespace r1tc;
using namespace testing_support;

namespace {

// Naive fixpoints: rescan every quadruple until nothing changes.
std::vector<char> naive_closure(const Mask& mask, const std::string& rule) {
  const Shape& s = mask.shape();
  const Index n = s.numel();
  std::vector<char> in = mask.membership();
  const std::vector<char> omega = in;
  bool changed = true;
  while (changed) {
    changed = false;
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b)
        for (Index c = 0; c < n; ++c)
          for (Index g = 0; g < n; ++g) {
            if (in[g]) continue;
            bool fire = false;
            if (rule == "gs") fire = in[a] && in[b] && in[c] && is_generalized_square(s, a, b, c, g);
            if (rule == "s") fire = in[a] && in[b] && in[c] && is_square(s, a, b, c, g);
            // {a, b; c, g}: a, c observed, b propagated.
            if (rule == "sr") fire = omega[a] && omega[c] && in[b] && is_square(s, a, b, c, g);
            if (fire) {
              in[g] = 1;
              changed = true;
            }
          }
  }
  return in;
}

// Union-find connectivity of the bipartite row/column graph of a 2-D mask.
bool bipartite_connected(const Mask& m) {
  const int r = m.shape().dim(0), c = m.shape().dim(1);
  std::vector<int> parent(r + c);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Index cell : m.cells())
    parent[find(m.shape().coord(cell, 0))] = find(r + m.shape().coord(cell, 1));
  for (int v = 0; v < r + c; ++v)
    if (find(v) != find(0)) return false;
  return true;
}

}  // namespace

TEST_CASE("GS closure on the reference masks") {
  const Mask holds = gs_holds_mask();
  const auto p = propagate_gs(holds);
  CHECK(p.full());
  CHECK(replay_trace(holds, p, "gs"));
  const Mask fails = gs_fails_mask();
  const auto q = propagate_gs(fails);
  CHECK(q.size() == fails.size());
  CHECK(q.cells() == fails.cells());
  CHECK(propagate_gs(Mask::full(Shape({2, 3, 2}))).full());
}

TEST_CASE("S closure on the reference masks") {
  const Mask holds = s_holds_mask();
  const auto p = propagate_s(holds);
  CHECK(p.full());
  CHECK(replay_trace(holds, p, "s"));
  const auto q = propagate_s(gs_holds_mask());
  CHECK(q.cells() == gs_holds_mask().cells());
  CHECK(propagate_s(Mask::full(Shape({3, 2}))).full());
}

TEST_CASE("SR closure on the reference masks") {
  const Mask sys = example_linear_system_mask();
  const auto p = propagate_sr(sys);
  CHECK(p.full());
  CHECK(replay_trace(sys, p, "sr"));
  const Mask s3 = s_holds_mask();
  const auto q = propagate_sr(s3);
  CHECK(q.size() == s3.shape().numel() - 1);
  CHECK_FALSE(q.contains(cell_of(s3.shape(), {3, 4, 1})));
  CHECK(replay_trace(s3, q, "sr"));
  CHECK(propagate_sr(Mask::full(Shape({2, 2, 2}))).full());
}

TEST_CASE("A-propagation examples") {
  const Mask a = a_holds_mask();
  const auto r = a_propagation(a);
  CHECK(r.holds);
  const Shape& s = a.shape();
  CHECK(r.sequence == std::vector<Index>{cell_of(s, {1, 1, 1}), cell_of(s, {1, 2, 1}),
                                         cell_of(s, {1, 2, 2}), cell_of(s, {2, 2, 2})});
  CHECK_FALSE(a_propagation(example_linear_system_mask()).holds);
  CHECK(a_propagation(Mask::full(Shape({3, 1, 4}))).holds);
  CHECK_FALSE(a_propagation(Mask(Shape({2, 2}))).holds);
}

TEST_CASE("anchored and unanchored A-propagation") {
  // The first cell is isolated; a later component covers every axis value.
  const Shape s({2, 2, 2});
  const Mask m = mask_of(s, {{1, 1, 1}, {1, 2, 2}, {2, 2, 2}, {2, 1, 2}, {2, 2, 1}});
  CHECK_FALSE(a_propagation(m, AStart::first_cell).holds);
  const auto any = a_propagation(m, AStart::any_cell);
  CHECK(any.holds);
  CHECK(any.sequence.front() == cell_of(s, {1, 2, 2}));
  SmallMaskAnalyzer an(s);
  CHECK_FALSE(an.a_propagation(SmallMaskAnalyzer::encode(m)));
  CHECK(an.a_propagation(SmallMaskAnalyzer::encode(m), AStart::any_cell));
}

TEST_CASE("A-propagation sequences are strongly connected") {
  std::mt19937_64 rng(21);
  const Shape s({4, 3, 3});
  int held = 0;
  for (int t = 0; t < 200; ++t) {
    const Mask m = random_mask(s, 0.4, rng);
    for (AStart mode : {AStart::first_cell, AStart::any_cell}) {
      const auto r = a_propagation(m, mode);
      if (!r.holds) continue;
      ++held;
      std::vector<std::set<int>> seen(3);
      for (std::size_t i = 0; i < r.sequence.size(); ++i) {
        CHECK(m.contains(r.sequence[i]));
        if (i > 0) {
          bool linked = false;
          for (std::size_t j = 0; j < i && !linked; ++j) {
            int diff = 0;
            for (int k = 0; k < 3; ++k) diff += s.coord(r.sequence[i], k) != s.coord(r.sequence[j], k);
            linked = diff == 1;
          }
          CHECK(linked);
        }
        for (int k = 0; k < 3; ++k) seen[k].insert(s.coord(r.sequence[i], k));
      }
      for (int k = 0; k < 3; ++k) CHECK(static_cast<int>(seen[k].size()) == s.dim(k));
      if (mode == AStart::first_cell) CHECK(r.sequence.front() == m.cells().front());
    }
  }
  CHECK(held > 10);
}

TEST_CASE("condition profiles of the reference masks") {
  CHECK(condition_profile(example_linear_system_mask()) == ConditionProfile{true, true, true, true, false});
  CHECK(condition_profile(gs_fails_mask()) == ConditionProfile{false, false, false, false, false});
  CHECK(condition_profile(s_holds_mask()) == ConditionProfile{true, true, true, false, false});
  CHECK(condition_profile(gs_holds_mask()) == ConditionProfile{true, true, false, false, false});
  CHECK(condition_profile(a_holds_mask()) == ConditionProfile{true, true, true, true, true});
  CHECK(condition_profile(Mask(Shape({2, 2}))) == ConditionProfile{});
  CHECK(to_json(condition_profile(example_linear_system_mask())) ==
        R"({"unique":true,"gs":true,"s":true,"sr":true,"a":false})");
}

TEST_CASE("closures agree with naive rescans") {
  std::mt19937_64 rng(31);
  for (const Shape s : {Shape({2, 2, 2}), Shape({3, 2, 2}), Shape({2, 3})}) {
    for (int t = 0; t < 25; ++t) {
      const Mask m = random_mask(s, 0.35, rng);
      CHECK(propagate_gs(m).member == naive_closure(m, "gs"));
      CHECK(propagate_s(m).member == naive_closure(m, "s"));
      CHECK(propagate_sr(m).member == naive_closure(m, "sr"));
    }
  }
}

TEST_CASE("bitmask analyzer agrees with the general implementation") {
  std::mt19937_64 rng(41);
  for (const Shape s : {Shape({3, 3, 2}), Shape({2, 2, 2, 2}), Shape({4, 4}), Shape({2, 2, 2, 2, 2})}) {
    SmallMaskAnalyzer an(s);
    for (int t = 0; t < 150; ++t) {
      const Mask m = random_mask(s, 0.1 + 0.005 * t, rng);
      const auto bits = SmallMaskAnalyzer::encode(m);
      auto to_bits = [](const PropagatedSet& p) {
        SmallMaskAnalyzer::Bits b = 0;
        for (Index c : p.cells()) b |= SmallMaskAnalyzer::Bits(1) << c;
        return b;
      };
      CHECK(an.closure_gs(bits) == to_bits(propagate_gs(m)));
      CHECK(an.closure_s(bits) == to_bits(propagate_s(m)));
      CHECK(an.closure_sr(bits) == to_bits(propagate_sr(m)));
      for (AStart mode : {AStart::first_cell, AStart::any_cell})
        CHECK(an.a_propagation(bits, mode) == a_propagation(m, mode).holds);
      if (!m.empty()) {
        CHECK(an.unique(bits) == unique_recovery(m));
        CHECK(an.profile(bits) == condition_profile(m));
      }
    }
  }
}

TEST_CASE("implication chain and monotonicity on random masks") {
  std::mt19937_64 rng(51);
  for (const Shape s : {Shape({3, 3, 3}), Shape({4, 3, 2}), Shape({2, 2, 2, 3}), Shape({5, 5, 5})}) {
    for (int t = 0; t < 60; ++t) {
      const Mask m = random_mask(s, 0.08 + 0.004 * t, rng);
      ConditionProfile p;
      CHECK_NOTHROW(p = condition_profile(m));
      // Superset by adding random cells.
      std::vector<Index> cells = m.cells();
      for (int e = 0; e < 3; ++e) cells.push_back(static_cast<Index>(rng() % s.numel()));
      std::sort(cells.begin(), cells.end());
      cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
      const Mask bigger(s, cells);
      auto subset = [](const PropagatedSet& a, const PropagatedSet& b) {
        for (Index c = 0; c < a.shape.numel(); ++c)
          if (a.member[c] && !b.member[c]) return false;
        return true;
      };
      CHECK(subset(propagate_gs(m), propagate_gs(bigger)));
      CHECK(subset(propagate_s(m), propagate_s(bigger)));
      CHECK(subset(propagate_sr(m), propagate_sr(bigger)));
    }
  }
}

TEST_CASE("all conditions coincide with bipartite connectivity for matrices") {
  const Shape s({3, 3});
  SmallMaskAnalyzer an(s);
  for (SmallMaskAnalyzer::Bits b = 1; b <= an.full_set(); ++b) {
    std::vector<Index> cells;
    for (Index c = 0; c < 9; ++c)
      if ((b >> c) & 1U) cells.push_back(c);
    const Mask m(s, cells);
    const bool conn = bipartite_connected(m);
    const ConditionProfile p = an.profile(b);
    CHECK(p.unique == conn);
    CHECK(p.gs == conn);
    CHECK(p.s == conn);
    CHECK(p.sr == conn);
    CHECK(an.a_propagation(b, AStart::any_cell) == conn);
  }
  std::mt19937_64 rng(61);
  for (int t = 0; t < 100; ++t) {
    const Mask m = random_mask(Shape({4, 6}), 0.25, rng);
    if (m.empty()) continue;
    const bool conn = bipartite_connected(m);
    const auto p = condition_profile(m);
    CHECK(p.unique == conn);
    CHECK(p.sr == conn);
    CHECK(a_propagation(m, AStart::any_cell).holds == conn);
  }
}

TEST_CASE("weights from the S-holds example") {
  const Mask m = s_holds_mask();
  const WeightVector w = generate_weights(m, 0.01);
  const Index special = cell_of(m.shape(), {3, 4, 1});
  for (Index c = 0; c < m.shape().numel(); ++c) {
    CHECK(w.w[c] == doctest::Approx(c == special ? 0.01 : 1.0));
    CHECK(w.layer[c] == (c == special ? 1 : 0));
  }
}

TEST_CASE("weights edge cases") {
  const WeightVector w = generate_weights(example_linear_system_mask(), 0.5);
  CHECK(w.w == Eigen::VectorXd::Ones(8));
  CHECK_THROWS_AS(generate_weights(gs_holds_mask(), 0.1), PropagationFailure);
  CHECK_THROWS_AS(generate_weights(s_holds_mask(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(generate_weights(s_holds_mask(), 1.0), std::invalid_argument);
}

TEST_CASE("weights follow a hand replay of the layered loop") {
  // Independent replay: start from the SR closure and add, layer by layer,
  // every cell completing a square of current members; layer l gets theta^l.
  const double theta = 0.1;
  const Shape s({3, 3, 3, 3});
  const Mask m = mask_of(s, {{1, 1, 2, 3}, {1, 2, 3, 3}, {1, 3, 3, 1}, {1, 3, 3, 2}, {2, 2, 2, 1},
                             {2, 3, 1, 2}, {3, 1, 1, 3}, {3, 1, 3, 1}, {3, 3, 2, 1}});
  REQUIRE(propagate_s(m).full());
  const auto squares = enumerate_squares(s);
  std::vector<char> in = propagate_sr(m).member;
  std::vector<int> layer(s.numel(), 0);
  for (int l = 1; std::count(in.begin(), in.end(), 1) < s.numel(); ++l) {
    std::vector<Index> batch;
    for (const auto& sq : squares) {
      int missing = 0;
      Index miss = -1;
      for (Index x : sq.cells())
        if (!in[x]) ++missing, miss = x;
      if (missing == 1) batch.push_back(miss);
    }
    REQUIRE_FALSE(batch.empty());
    for (Index b : batch) {
      in[b] = 1;
      layer[b] = l;
    }
  }
  CHECK(*std::max_element(layer.begin(), layer.end()) == 2);
  const WeightVector w = generate_weights(m, theta);
  for (Index c = 0; c < s.numel(); ++c) {
    CHECK(w.layer[c] == layer[c]);
    CHECK(w.w[c] == doctest::Approx(std::pow(theta, layer[c])));
  }
  std::set<double> values(w.w.data(), w.w.data() + w.w.size());
  CHECK(values.size() == 3);
}
