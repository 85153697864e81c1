#pragma once

#include "r1tc/tensor.hpp"

#include <cstdint>
#include <optional>

namespace r1tc {

enum class ExactStatus { unique, infeasible, non_unique };

const char* to_string(ExactStatus s);

struct ExactCompletionResult {
  ExactStatus status = ExactStatus::infeasible;
  std::optional<DenseTensor> tensor;
  std::optional<RankOneFactors> factors;
  /// max |T_alpha - That_alpha| over the mask; NaN when no tensor is produced.
  double residual = 0.0;
  /// (n - d + 1) - rank(V_Omega); positive exactly when status is non_unique.
  Index rank_deficit = 0;
};

struct ExactOptions {
  /// Relative pivot threshold of the normal-equation factorization.
  double pivot_tol = 1e-10;
  /// Log-system consistency: residual < consistency_tol * (1 + ||log|T||_inf).
  double consistency_tol = 1e-8;
};

/// Rank-one completion through the log-magnitude system over R and the sign
/// system over F2. Throws std::invalid_argument on an empty mask or a zero
/// observation.
ExactCompletionResult complete_exact(const ObservedTensor& obs,
                                     const ExactOptions& opts = {});

/// Checks T_a1 T_a2 = T_a3 T_a4 within tol on every square. Shapes with more
/// than max_checks squares are checked on max_checks uniformly sampled squares.
bool verify_rank_one(const DenseTensor& t, double tol,
                     double max_checks = 1e7, std::uint64_t seed = 0);

}  // namespace r1tc
