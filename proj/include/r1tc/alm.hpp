#pragma once

#include "r1tc/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <utility>
#include <vector>

namespace r1tc {

struct AlmParams {
  int k = 2;  // columns of Y
  int q = 2;  // CP rank of each column tensor
  double rho = 10.0;
  /// Weight of the data terms; <= 0 means rho / 2.
  double data_weight = 100.0;
  Index batch1 = 150;  // observations per subproblem
  Index batch2 = 300;  // averaged symmetry constraints per subproblem
  int rounds_per_batch = 25;
  int num_batches = 20;
  std::uint64_t seed = 0;
  // Inner L-BFGS.
  int max_inner_iters = 200;
  double grad_tol = 1e-6;
  int lbfgs_memory = 10;
  /// Adds (rho/2)(|t|^2 - 1)^2 so that X_00 stays near 1.
  bool anchor = true;
  int readout_sweeps = 5;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Factored moment matrix X = Y Y^T, Y = [t; Ytilde], where column i of
/// Ytilde is vec(sum_j u(i,j,1) x ... x u(i,j,d)). All parameters live in one
/// packed vector: t first, then the factor vectors ordered by (i, j, axis).
struct AlmState {
  Shape shape;
  int k = 0;
  int q = 0;
  Eigen::VectorXd theta;

  /// Subsampled observation positions (indices into obs.values).
  std::vector<Index> batch1;
  /// Subsampled pairs (alpha, beta): alpha an observed cell, beta any cell.
  std::vector<std::pair<Index, Index>> batch2;
  /// Multipliers aligned with batch2.
  Eigen::VectorXd lambda;

  AlmState() = default;
  AlmState(Shape shape, int k, int q);

  Index num_params() const { return theta.size(); }
  Index factor_offset(int i, int j, int axis) const {
    return k + (static_cast<Index>(i) * q + j) * shape.dim_sum() + shape.block_offset(axis);
  }
  auto t() { return theta.head(k); }
  auto t() const { return theta.head(k); }
  auto factor(int i, int j, int axis) {
    return theta.segment(factor_offset(i, j, axis), shape.dim(axis));
  }
  auto factor(int i, int j, int axis) const {
    return theta.segment(factor_offset(i, j, axis), shape.dim(axis));
  }

  /// Entry `cell` of the i-th column tensor.
  double column_entry(int i, Index cell) const;
  /// Entry of X, with 0 the homogenizing index and 1 + cell a tensor entry.
  double moment_entry(Index row, Index col) const;
  /// (1/d) sum_s X at the pair with coordinate s swapped between alpha and beta.
  double avg_entry(Index alpha, Index beta) const;
  /// Dense (N+1) x (N+1) X; for small shapes only.
  Eigen::MatrixXd moment() const;
};

/// Standard normal entries for t and every factor vector.
AlmState random_alm_state(const Shape& shape, int k, int q, std::mt19937_64& rng);

/// Draws new batches. Multipliers of pairs kept from the previous batch carry
/// over; new pairs start at zero.
void resample_batches(AlmState& s, const ObservedTensor& obs, const AlmParams& p,
                      std::mt19937_64& rng);

/// tr(X) restricted to the tensor block, plus the batch data terms
/// w [(X_aa - T_a^2)^2 + (x_a - T_a)^2] with w the data weight, the batch averaged symmetry terms
/// lambda g + (rho/2) g^2 with g = avg(X_ab) - X_ab, and the anchor term if
/// enabled. Fills grad (resized) when non-null.
double modified_lagrangian(const AlmState& s, const ObservedTensor& obs, const AlmParams& p,
                           Eigen::VectorXd* grad = nullptr);

/// Current averaged-symmetry residuals g over batch2.
Eigen::VectorXd symmetry_residuals(const AlmState& s);

/// x-block of X, sum_i t_i vec(T_i), projected to rank one.
DenseTensor alm_readout(const AlmState& s, int sweeps = 5);

struct AlmDiagnostics {
  std::vector<double> objective;  // per round, after the inner solve
  std::vector<double> violation;  // per round, max |g| over batch2
  long rounds = 0;
  int restarts = 0;  // fresh initializations after a non-finite objective
  int best_batch = -1;  // -1: initialization readout
  double best_fit = 0.0;  // ||readout - observations|| on the mask
};

struct AlmResult {
  DenseTensor tensor;
  AlmState state;  // final iterate
  AlmDiagnostics diagnostics;
};

/// Noisy completion by augmented Lagrangian rounds on the factored program.
/// Each batch draw runs rounds_per_batch rounds of inner minimization followed
/// by lambda += rho g. Returns the readout with the best fit on the mask over
/// all batches. Per-round diagnostics are written as CSV to `trace` if given.
AlmResult alm_solve(const ObservedTensor& obs, const AlmParams& params,
                    std::ostream* trace = nullptr);

}  // namespace r1tc
