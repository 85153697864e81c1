#pragma once

#include "r1tc/tensor.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace r1tc {

/// One closure step: `added` was deduced from the three witnesses.
struct PropagationStep {
  Index added = 0;
  std::array<Index, 3> witnesses{};
};

/// Result of a GS / S / SR closure. The trace lists every cell outside the
/// mask in the order it entered, with witnesses that were members before it.
struct PropagatedSet {
  Shape shape;
  std::vector<char> member;  // length N
  std::vector<PropagationStep> trace;

  Index size() const;
  bool full() const { return size() == shape.numel(); }
  bool contains(Index cell) const { return member[cell] != 0; }
  std::vector<Index> cells() const;
};

/// Least fixpoint of: {a1,a2,a3,b} generalized square, a_i members => b.
PropagatedSet propagate_gs(const Mask& mask);
/// Least fixpoint of: {a1,a2;a3,b} square, a_i members => b.
PropagatedSet propagate_s(const Mask& mask);
/// Least fixpoint of: {a1,b;a2,g} square, a1,a2 in mask, b member => g.
PropagatedSet propagate_sr(const Mask& mask);

struct APropagationResult {
  bool holds = false;
  /// A strongly connected ordering of a covering component when holds.
  std::vector<Index> sequence;
};

/// Where a strongly connected sequence may start.
enum class AStart {
  first_cell,  // anchored at the lexicographically smallest observed cell
  any_cell,    // any observed cell, i.e. any connected component
};

/// Cells are adjacent when they differ in exactly one axis. Holds iff the
/// component of the starting cell covers every value of every axis. The
/// anchored form is the one the condition tables count.
APropagationResult a_propagation(const Mask& mask, AStart start = AStart::first_cell);

struct ConditionProfile {
  bool unique = false;
  bool gs = false;
  bool s = false;
  bool sr = false;
  bool a = false;

  friend bool operator==(const ConditionProfile&, const ConditionProfile&) = default;
};

/// All five conditions (A anchored at the first cell). Throws std::logic_error if the implication chain
/// a => sr => s => gs => unique is violated.
ConditionProfile condition_profile(const Mask& mask);

std::string to_json(const ConditionProfile& p);

struct WeightVector {
  Shape shape;
  Eigen::VectorXd w;           // length N, entries in (0, 1]
  std::vector<int> layer;      // 0 on P_SR(mask), l for the l-th added layer
};

class PropagationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Layered weights: 1 on P_SR(mask); the l-th square-propagation layer beyond
/// it gets theta^l. Throws PropagationFailure when S-propagation fails and
/// std::invalid_argument unless 0 < theta < 1.
WeightVector generate_weights(const Mask& mask, double theta);

/// Replays a trace against the mask; true iff every step is justified by the
/// named rule ("gs", "s", "sr") and the replay reproduces `set`.
bool replay_trace(const Mask& mask, const PropagatedSet& set, const std::string& rule);

}  // namespace r1tc
