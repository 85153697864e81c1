#pragma once

#include "r1tc/propagation.hpp"
#include "r1tc/squares.hpp"
#include "r1tc/tensor.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace r1tc {

enum class SdpKind { exact, weighted_exact, noisy };
const char* to_string(SdpKind k);

/// One term coeff * M(row, col) of a linear constraint on the symmetric
/// moment matrix. Indices refer to the (N+1) x (N+1) matrix, row 0 being the
/// homogenizing coordinate and row 1 + cell the tensor entry `cell`.
struct ConstraintTerm {
  Index row = 0;
  Index col = 0;
  double coeff = 0.0;
};

struct AffineConstraint {
  std::vector<ConstraintTerm> terms;
  double rhs = 0.0;
};

/// min <cost, M> + cost_constant  s.t.  M PSD, every affine constraint holds.
struct SdpProblem {
  Shape shape;
  SdpKind kind = SdpKind::exact;
  ObservedTensor obs;
  std::optional<WeightVector> weights;
  std::optional<double> penalty;
  std::vector<Square> squares;
  Eigen::MatrixXd cost;
  double cost_constant = 0.0;
  std::vector<AffineConstraint> constraints;

  Index size() const { return cost.rows(); }
};

/// Trace (or diag(w)) objective with M00 = 1, x = That and X_aa = That^2 on
/// the mask, and X_{a1,a2} = X_{a3,a4} for every square.
SdpProblem build_sdp_exact(const ObservedTensor& obs,
                           const std::optional<WeightVector>& weights = std::nullopt,
                           std::size_t square_cap = kDefaultSquareCap);

/// tr(X) + C * sum_{a in mask} (X_aa - 2 That_a x_a + That_a^2) with only
/// M00 = 1 and the square constraints kept hard.
SdpProblem build_sdp_noisy(const ObservedTensor& obs, double C,
                           std::size_t square_cap = kDefaultSquareCap);

enum class SdpStatus { optimal, max_iters, infeasible };
const char* to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-7;
  double eps_psd = 1e-7;
  long max_iters = 200000;
  Index size_cap = 600;
  double sigma = 1.0;       // initial penalty
  double relaxation = 1.6;  // over-relaxation factor in (0, 2)
  int adapt_every = 25;     // residual-balancing period, 0 disables
  int anderson_memory = 10; // 0 disables acceleration
  /// Iteration of the first Jacobi rescaling by the dual estimate; later ones
  /// follow every 5 * rescale_every iterations. 0 disables.
  long rescale_every = 200;
  /// Optional warm start for the moment matrix.
  std::optional<Eigen::MatrixXd> warm_start;
};

struct SdpSolution {
  Eigen::MatrixXd moment;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  long iterations = 0;
  SdpStatus status = SdpStatus::max_iters;
};

/// ADMM on the split  M in {affine}, M in PSD, run on a diagonally rescaled
/// copy of the problem. The affine projection is exact: constraints are fixed
/// entries and pairwise entry equalities, so projecting fits one value per
/// class of tied entries. Stops once the relative primal and dual residuals
/// and the relative objective gap are all below opts.tol. Throws
/// std::invalid_argument for constraints of any other form and when size()
/// exceeds opts.size_cap.
SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts = {});

struct RankOneExtraction {
  DenseTensor tensor;
  bool tight = false;
  double eigen_ratio = 0.0;        // lambda_2 / lambda_1 of the moment matrix
  double recovery_residual = 0.0;  // max |x_a - That_a| over the mask
};

/// Reads x = M(0, 1:) / M(0, 0). Throws std::invalid_argument unless the
/// solution status is optimal.
RankOneExtraction extract_rank_one(const SdpSolution& sol, const ObservedTensor& obs,
                                   double tight_tol = 1e-3);

/// Largest violation of any affine constraint of p at m.
double max_constraint_violation(const SdpProblem& p, const Eigen::MatrixXd& m);

/// Debug format: dims, kind, cost and constraint triplets, and optionally a
/// moment matrix. Loading restores everything needed by solve_sdp.
nlohmann::json to_json(const SdpProblem& p);
nlohmann::json to_json(const SdpSolution& s);
SdpProblem sdp_problem_from_json(const nlohmann::json& j);
SdpSolution sdp_solution_from_json(const nlohmann::json& j);

}  // namespace r1tc
