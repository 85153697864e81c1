#include "r1tc/exact.hpp"

#include "r1tc/gf2.hpp"
#include "r1tc/squares.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace r1tc {

const char* to_string(ExactStatus s) {
  switch (s) {
    case ExactStatus::unique: return "unique";
    case ExactStatus::infeasible: return "infeasible";
    case ExactStatus::non_unique: return "non-unique";
  }
  return "?";
}

ExactCompletionResult complete_exact(const ObservedTensor& obs,
                                     const ExactOptions& opts) {
  if (obs.mask.empty()) throw std::invalid_argument("complete_exact: empty mask");
  obs.require_nonzero();
  const Shape& shape = obs.shape();
  const Index n = shape.dim_sum();
  const Index dof = n - shape.order() + 1;
  const Index m = obs.mask.size();

  ExactCompletionResult result;
  result.residual = std::numeric_limits<double>::quiet_NaN();

  const GF2Matrix v = build_indicator_matrix(obs.mask);
  BitVector signs(m);
  for (Index i = 0; i < m; ++i) signs[i] = obs.values[i] < 0 ? 1 : 0;
  const auto gauge = standard_gauge_columns(shape);
  const GF2SolveResult sign_sol = gf2_solve(v, signs, gauge);
  result.rank_deficit = dof - sign_sol.rank;

  // Log-magnitude system restricted to the non-gauge columns.
  std::vector<Index> free_cols;
  {
    std::vector<char> pinned(n, 0);
    for (Index c : gauge) pinned[c] = 1;
    for (Index c = 0; c < n; ++c)
      if (!pinned[c]) free_cols.push_back(c);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, static_cast<Index>(free_cols.size()));
  for (Index r = 0; r < m; ++r)
    for (Index j = 0; j < static_cast<Index>(free_cols.size()); ++j)
      a(r, j) = v.get(r, free_cols[j]) ? 1.0 : 0.0;
  Eigen::VectorXd b(m);
  for (Index i = 0; i < m; ++i) b[i] = std::log(std::abs(obs.values[i]));

  const Eigen::MatrixXd normal = a.transpose() * a;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  const Eigen::VectorXd diag = ldlt.vectorD().cwiseAbs();
  const double scale = std::max(1.0, normal.diagonal().cwiseAbs().maxCoeff());
  const bool real_full_rank = diag.minCoeff() > opts.pivot_tol * scale;
  Eigen::VectorXd y_free;
  if (real_full_rank) {
    y_free = ldlt.solve(a.transpose() * b);
  } else {
    // Minimum-norm least squares for the consistency test only.
    y_free = a.completeOrthogonalDecomposition().solve(b);
  }
  const double log_resid = (a * y_free - b).cwiseAbs().maxCoeff();
  const bool log_consistent =
      log_resid < opts.consistency_tol * (1.0 + b.cwiseAbs().maxCoeff());

  if (sign_sol.status == GF2Status::inconsistent || !log_consistent) {
    result.status = ExactStatus::infeasible;
    return result;
  }
  if (result.rank_deficit > 0 || !real_full_rank) {
    result.status = ExactStatus::non_unique;
    return result;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (Index j = 0; j < static_cast<Index>(free_cols.size()); ++j) y[free_cols[j]] = y_free[j];
  const BitVector& z = *sign_sol.solution;
  RankOneFactors f;
  for (int k = 0; k < shape.order(); ++k) {
    Eigen::VectorXd u(shape.dim(k));
    for (int i = 0; i < shape.dim(k); ++i) {
      const Index c = shape.block_offset(k) + i;
      u[i] = (z[c] ? -1.0 : 1.0) * std::exp(y[c]);
    }
    f.factors.push_back(std::move(u));
  }
  DenseTensor t = expand(f, shape);
  double resid = 0.0;
  for (Index i = 0; i < m; ++i)
    resid = std::max(resid, std::abs(t(obs.mask.cells()[i]) - obs.values[i]));
  result.status = ExactStatus::unique;
  result.residual = resid;
  result.tensor = std::move(t);
  result.factors = std::move(f);
  return result;
}

bool verify_rank_one(const DenseTensor& t, double tol, double max_checks,
                     std::uint64_t seed) {
  const Shape& s = t.shape();
  auto holds = [&](Index a1, Index a2, Index a3, Index a4) {
    return std::abs(t(a1) * t(a2) - t(a3) * t(a4)) <= tol;
  };
  if (count_squares(s) <= max_checks) {
    bool ok = true;
    const Index total = s.numel();
    for (Index a = 0; a < total && ok; ++a)
      for (Index b = a + 1; b < total && ok; ++b)
        for_each_complementary_pair(s, a, b, [&](Index p, Index q) {
          if (ok && !holds(a, b, p, q)) ok = false;
        });
    return ok;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> cell(0, s.numel() - 1);
  const auto checks = static_cast<long long>(max_checks);
  for (long long done = 0; done < checks;) {
    const Index a = cell(rng);
    const Index b = cell(rng);
    int diff[64];
    int m = 0;
    for (int k = 0; k < s.order(); ++k)
      if (s.coord(a, k) != s.coord(b, k)) diff[m++] = k;
    if (m < 2) continue;
    // Random proper nonempty subset of the differing axes.
    std::uniform_int_distribution<unsigned long long> pick(1, (1ULL << m) - 2);
    const unsigned long long sub = pick(rng);
    Index p = a;
    Index q = b;
    for (int j = 0; j < m; ++j) {
      if (sub & (1ULL << j)) {
        const int k = diff[j];
        const int ak = s.coord(a, k);
        const int bk = s.coord(b, k);
        p += (bk - ak) * s.stride(k);
        q += (ak - bk) * s.stride(k);
      }
    }
    if (!holds(a, b, p, q)) return false;
    ++done;
  }
  return true;
}

}  // namespace r1tc
