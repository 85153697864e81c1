#pragma once

#include "r1tc/tensor.hpp"

#include <initializer_list>
#include <random>
#include <vector>

namespace testing_support {

using namespace r1tc;

inline Mask mask_of(const Shape& s, std::initializer_list<std::vector<int>> one_based) {
  std::vector<IndexTuple> t;
  for (const auto& c : one_based) t.push_back(IndexTuple::from_one_based(c));
  return Mask(s, t);
}

inline Index cell_of(const Shape& s, std::vector<int> one_based) {
  return s.linearize(IndexTuple::from_one_based(one_based));
}

inline RankOneFactors random_factors(const Shape& s, std::mt19937_64& rng, double lo = 0.1,
                                     double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  RankOneFactors f;
  for (int k = 0; k < s.order(); ++k) {
    Eigen::VectorXd v(s.dim(k));
    for (auto& x : v) x = u(rng);
    f.factors.push_back(v);
  }
  return f;
}

inline Mask random_mask(const Shape& s, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution b(p);
  std::vector<Index> cells;
  for (Index c = 0; c < s.numel(); ++c)
    if (b(rng)) cells.push_back(c);
  return Mask(s, cells);
}

// Example masks used across suites.
inline Mask example_linear_system_mask() {
  return mask_of(Shape({2, 2, 2}), {{1, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 2}});
}
inline Mask gs_holds_mask() {
  return mask_of(Shape({3, 3, 2}),
                 {{1, 1, 1}, {1, 2, 2}, {2, 1, 2}, {3, 2, 1}, {2, 3, 1}, {3, 3, 2}});
}
inline Mask gs_fails_mask() {
  return mask_of(Shape({6, 6, 6}),
                 {{1, 1, 1}, {2, 2, 1}, {3, 3, 1}, {4, 1, 2}, {3, 4, 2}, {2, 5, 2},
                  {5, 2, 3}, {6, 3, 3}, {1, 4, 3}, {4, 2, 4}, {1, 5, 4}, {3, 6, 4},
                  {2, 6, 5}, {5, 1, 5}, {4, 3, 6}, {5, 5, 6}});
}
inline Mask s_holds_mask() {
  return mask_of(Shape({3, 4, 3}), {{1, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 2}, {3, 3, 2},
                                    {3, 1, 3}, {3, 3, 3}, {2, 4, 3}});
}
inline Mask a_holds_mask() {
  return mask_of(Shape({2, 2, 2}), {{1, 1, 1}, {1, 2, 1}, {1, 2, 2}, {2, 2, 2}});
}

}  // namespace testing_support
