#include "r1tc/completion.hpp"

#include "r1tc/exact.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace r1tc {

const char* to_string(CompletionMode m) { return m == CompletionMode::exact ? "exact" : "noisy"; }

const char* to_string(Backend b) {
  switch (b) {
    case Backend::linear_algebra: return "linear-algebra";
    case Backend::sdp: return "sdp";
    case Backend::alm: return "alm";
    case Backend::alt_min: return "alt-min";
  }
  return "?";
}

CompletionMode parse_mode(const std::string& s) {
  if (s == "exact") return CompletionMode::exact;
  if (s == "noisy") return CompletionMode::noisy;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

Backend parse_backend(const std::string& s) {
  for (Backend b : {Backend::linear_algebra, Backend::sdp, Backend::alm, Backend::alt_min})
    if (s == to_string(b)) return b;
  throw std::invalid_argument("unknown backend '" + s + "'");
}

double relative_distance(const DenseTensor& t, const DenseTensor& truth) {
  if (!(t.shape() == truth.shape())) throw std::invalid_argument("relative_distance: shape mismatch");
  const double n = truth.norm();
  if (n == 0.0) throw std::invalid_argument("relative_distance: truth has zero norm");
  return (t.values() - truth.values()).norm() / n;
}

AltMinResult alternating_min(const ObservedTensor& obs, int rank, const AltMinOptions& opts) {
  if (rank < 1) throw std::invalid_argument("alternating_min: rank must be at least 1");
  if (opts.restarts < 1 || opts.max_sweeps < 0)
    throw std::invalid_argument("alternating_min: restarts >= 1 and max_sweeps >= 0 required");
  const Shape& shape = obs.shape();
  const int d = shape.order();
  const Index m = obs.mask.size();

  std::vector<std::vector<int>> coords(m, std::vector<int>(d));
  // Observations grouped by (axis, row) for the row updates.
  std::vector<std::vector<std::vector<Index>>> rows(d);
  for (int k = 0; k < d; ++k) rows[k].resize(shape.dim(k));
  for (Index i = 0; i < m; ++i)
    for (int k = 0; k < d; ++k) {
      coords[i][k] = shape.coord(obs.mask.cells()[i], k);
      rows[k][coords[i][k]].push_back(i);
    }

  std::vector<Eigen::MatrixXd> u(d);
  Eigen::VectorXd p(rank);
  const auto product_except = [&](Index i, int skip) {
    p.setOnes();
    for (int l = 0; l < d; ++l)
      if (l != skip) p.array() *= u[l].row(coords[i][l]).transpose().array();
  };
  const auto objective_and_grad = [&](double& gnorm) {
    double f = 0.0;
    std::vector<Eigen::MatrixXd> g(d);
    for (int k = 0; k < d; ++k) g[k] = Eigen::MatrixXd::Zero(u[k].rows(), rank);
    for (Index i = 0; i < m; ++i) {
      product_except(i, -1);
      const double e = p.sum() - obs.values[i];
      f += e * e;
      for (int k = 0; k < d; ++k) {
        product_except(i, k);
        g[k].row(coords[i][k]) += 2.0 * e * p.transpose();
      }
    }
    gnorm = 0.0;
    for (const auto& gk : g) gnorm = std::max(gnorm, gk.cwiseAbs().maxCoeff());
    return f;
  };

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  AltMinResult best;
  best.objective = std::numeric_limits<double>::infinity();
  bool any_finite = false;
  std::vector<Eigen::MatrixXd> best_u;

  for (int restart = 0; restart < opts.restarts; ++restart) {
    for (int k = 0; k < d; ++k) {
      u[k].resize(shape.dim(k), rank);
      for (Index r = 0; r < u[k].size(); ++r) u[k].data()[r] = unif(rng);
    }
    int sweeps = 0;
    double f = 0.0, gnorm = 0.0;
    for (; sweeps < opts.max_sweeps; ++sweeps) {
      for (int k = 0; k < d; ++k)
        for (int row = 0; row < shape.dim(k); ++row) {
          const auto& members = rows[k][row];
          if (members.empty()) continue;
          Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rank, rank);
          Eigen::VectorXd b = Eigen::VectorXd::Zero(rank);
          for (const Index i : members) {
            product_except(i, k);
            a += p * p.transpose();
            b += obs.values[i] * p;
          }
          if (rank == 1) {
            if (a(0, 0) > 0.0) u[k](row, 0) = b[0] / a(0, 0);
          } else {
            u[k].row(row) = a.completeOrthogonalDecomposition().solve(b).transpose();
          }
        }
      f = objective_and_grad(gnorm);
      if (!std::isfinite(f) || gnorm <= opts.grad_tol) break;
    }
    if (opts.max_sweeps == 0) f = objective_and_grad(gnorm);
    if (!std::isfinite(f)) continue;
    any_finite = true;
    if (f < best.objective) {
      best.objective = f;
      best.sweeps = sweeps;
      best_u = u;
    }
  }

  if (!any_finite) {
    best.diverged = true;
    best_u = u;
    best.objective = std::numeric_limits<double>::quiet_NaN();
  }
  DenseTensor out(shape);
  for (int c = 0; c < rank; ++c) {
    RankOneFactors f;
    for (int k = 0; k < d; ++k) f.factors.push_back(best_u[k].col(c));
    out.values() += expand(f, shape).values();
    if (rank == 1) best.factors = f;
  }
  best.tensor = std::move(out);
  return best;
}

GreedyResult greedy_lowrank(const ObservedTensor& obs, int r, const GreedyOptions& opts) {
  if (r < 1) throw std::invalid_argument("greedy_lowrank: r must be at least 1");
  if (opts.backend != Backend::sdp && opts.backend != Backend::alm)
    throw std::invalid_argument("greedy_lowrank: backend must be sdp or alm");
  GreedyResult res;
  res.tensor = DenseTensor(obs.shape());
  ObservedTensor residual = obs;
  res.residual_norms.push_back(residual.values.norm());

  for (int k = 0; k < r; ++k) {
    DenseTensor component;
    if (opts.backend == Backend::sdp) {
      const SdpSolution sol = solve_sdp(build_sdp_noisy(residual, opts.C), opts.sdp);
      if (sol.status != SdpStatus::optimal)
        throw CompletionFailure("greedy_lowrank: step " + std::to_string(k + 1) + " SDP status " +
                                to_string(sol.status) + ", residual norm so far " +
                                std::to_string(res.residual_norms.back()));
      component = extract_rank_one(sol, residual).tensor;
    } else {
      AlmParams p = opts.alm;
      p.seed += static_cast<std::uint64_t>(k);
      component = alm_solve(residual, p).tensor;
      if (!component.values().allFinite())
        throw CompletionFailure("greedy_lowrank: step " + std::to_string(k + 1) +
                                " ALM diverged, residual norm so far " +
                                std::to_string(res.residual_norms.back()));
    }
    res.tensor.values() += component.values();
    res.components.push_back(std::move(component));
    residual.values = obs.values - restrict(res.tensor, obs.mask).values;
    const double n = residual.values.norm();
    if (n > res.residual_norms.back() * (1.0 + 1e-12)) ++res.monotonicity_violations;
    res.residual_norms.push_back(n);
  }
  return res;
}

namespace {

RankOneExtraction solve_and_extract(const SdpProblem& p, const SdpOptions& o, nlohmann::json& diag,
                                    const char* tag, bool& optimal) {
  const SdpSolution sol = solve_sdp(p, o);
  diag[tag] = {{"status", to_string(sol.status)},
               {"iterations", sol.iterations},
               {"objective", sol.objective}};
  optimal = sol.status == SdpStatus::optimal;
  if (!optimal) return {};
  RankOneExtraction ex = extract_rank_one(sol, p.obs);
  diag[tag]["eigen_ratio"] = ex.eigen_ratio;
  return ex;
}

}  // namespace

CompletionReport complete(const CompletionRequest& req, const std::optional<DenseTensor>& truth) {
  const auto start = std::chrono::steady_clock::now();
  const ObservedTensor& obs = req.obs;
  if (obs.mask.empty()) throw std::invalid_argument("complete: empty mask");
  if (req.rank < 1) throw std::invalid_argument("complete: rank must be at least 1");
  if (truth && !(truth->shape() == obs.shape()))
    throw std::invalid_argument("complete: truth shape does not match");
  const bool exact = req.mode == CompletionMode::exact;
  if (exact) {
    obs.require_nonzero();
    if (req.rank != 1) throw std::invalid_argument("complete: exact mode is rank one");
    if (req.backend == Backend::alm)
      throw std::invalid_argument("complete: the alm backend solves the noisy program only");
  } else if (req.backend == Backend::linear_algebra) {
    throw std::invalid_argument("complete: the linear-algebra backend is exact mode only");
  }

  CompletionReport rep;
  rep.conditions = condition_profile(obs.mask);
  auto& diag = rep.diagnostics;
  diag["backend"] = to_string(req.backend);
  diag["mode"] = to_string(req.mode);

  if (req.backend == Backend::alt_min) {
    AltMinResult r = alternating_min(obs, req.rank, req.alt_min);
    diag["objective"] = r.objective;
    diag["sweeps"] = r.sweeps;
    diag["diverged"] = r.diverged;
    if (r.diverged) throw CompletionFailure("alternating minimization diverged on every restart");
    rep.tensor = std::move(r.tensor);
  } else if (exact && req.backend == Backend::linear_algebra) {
    ExactCompletionResult r = complete_exact(obs);
    diag["status"] = to_string(r.status);
    diag["rank_deficit"] = r.rank_deficit;
    if (!r.tensor) throw CompletionFailure(std::string("exact completion: ") + to_string(r.status));
    diag["residual"] = r.residual;
    rep.tensor = std::move(*r.tensor);
  } else if (exact) {
    bool optimal = false;
    RankOneExtraction ex = solve_and_extract(build_sdp_exact(obs), req.sdp, diag, "plain", optimal);
    if ((!optimal || !ex.tight) && req.weights == WeightsPolicy::auto_layered && rep.conditions.s) {
      const WeightVector w = generate_weights(obs.mask, req.theta);
      ex = solve_and_extract(build_sdp_exact(obs, w), req.sdp, diag, "weighted", optimal);
      rep.weighted_retry = true;
    }
    if (!optimal) throw CompletionFailure("SDP solve did not converge");
    rep.tight = ex.tight;
    rep.tensor = std::move(ex.tensor);
  } else if (req.rank > 1) {
    GreedyOptions g{req.backend, req.C, req.sdp, req.alm};
    GreedyResult r = greedy_lowrank(obs, req.rank, g);
    diag["residual_norms"] = r.residual_norms;
    diag["monotonicity_violations"] = r.monotonicity_violations;
    rep.tensor = std::move(r.tensor);
  } else if (req.backend == Backend::sdp) {
    bool optimal = false;
    RankOneExtraction ex = solve_and_extract(build_sdp_noisy(obs, req.C), req.sdp, diag, "noisy", optimal);
    if (!optimal) throw CompletionFailure("SDP solve did not converge");
    rep.tight = ex.tight;
    rep.tensor = std::move(ex.tensor);
  } else {
    AlmResult r = alm_solve(obs, req.alm);
    diag["rounds"] = r.diagnostics.rounds;
    diag["restarts"] = r.diagnostics.restarts;
    diag["best_batch"] = r.diagnostics.best_batch;
    diag["best_fit"] = r.diagnostics.best_fit;
    rep.tensor = std::move(r.tensor);
  }

  if (truth) rep.relative_distance = relative_distance(rep.tensor, *truth);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace r1tc
