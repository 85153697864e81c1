#include "r1tc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <limits>

namespace r1tc {

const char* to_string(SdpKind k) {
  switch (k) {
    case SdpKind::exact: return "exact";
    case SdpKind::weighted_exact: return "weighted-exact";
    case SdpKind::noisy: return "noisy";
  }
  return "?";
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::max_iters: return "max-iters";
    case SdpStatus::infeasible: return "infeasible";
  }
  return "?";
}

namespace {

AffineConstraint fix(Index r, Index c, double v) { return {{{r, c, 1.0}}, v}; }

void add_square_constraints(SdpProblem& p, std::size_t cap) {
  p.squares = enumerate_squares(p.shape, cap);
  p.constraints.reserve(p.constraints.size() + p.squares.size());
  for (const Square& sq : p.squares) {
    p.constraints.push_back({{{1 + sq.pair_a[0], 1 + sq.pair_a[1], 1.0},
                              {1 + sq.pair_b[0], 1 + sq.pair_b[1], -1.0}},
                             0.0});
  }
}

}  // namespace

SdpProblem build_sdp_exact(const ObservedTensor& obs, const std::optional<WeightVector>& weights,
                           std::size_t square_cap) {
  obs.require_nonzero();
  const Shape& s = obs.shape();
  SdpProblem p;
  p.shape = s;
  p.kind = weights ? SdpKind::weighted_exact : SdpKind::exact;
  p.obs = obs;
  p.weights = weights;
  const Index m = s.numel() + 1;
  p.cost = Eigen::MatrixXd::Zero(m, m);
  if (weights) {
    if (!(weights->shape == s) || weights->w.size() != s.numel())
      throw std::invalid_argument("build_sdp_exact: weights do not match the shape");
    p.cost.diagonal().tail(s.numel()) = weights->w;
  } else {
    p.cost.diagonal().tail(s.numel()).setOnes();
  }
  p.constraints.push_back(fix(0, 0, 1.0));
  for (Index i = 0; i < obs.mask.size(); ++i) {
    const Index r = 1 + obs.mask.cells()[i];
    const double t = obs.values[i];
    p.constraints.push_back(fix(0, r, t));
    p.constraints.push_back(fix(r, r, t * t));
  }
  add_square_constraints(p, square_cap);
  return p;
}

SdpProblem build_sdp_noisy(const ObservedTensor& obs, double C, std::size_t square_cap) {
  if (!(C > 0.0)) throw std::invalid_argument("build_sdp_noisy: C must be positive");
  const Shape& s = obs.shape();
  SdpProblem p;
  p.shape = s;
  p.kind = SdpKind::noisy;
  p.obs = obs;
  p.penalty = C;
  const Index m = s.numel() + 1;
  p.cost = Eigen::MatrixXd::Zero(m, m);
  p.cost.diagonal().tail(s.numel()).setOnes();
  for (Index i = 0; i < obs.mask.size(); ++i) {
    const Index r = 1 + obs.mask.cells()[i];
    const double t = obs.values[i];
    p.cost(r, r) += C;
    p.cost(0, r) = p.cost(r, 0) = -C * t;
    p.cost_constant += C * t * t;
  }
  p.constraints.push_back(fix(0, 0, 1.0));
  add_square_constraints(p, square_cap);
  return p;
}

namespace {

// Exact weighted projection onto the affine set when every constraint either
// fixes one entry or ties two entries. Tied entries form classes sharing one
// value t in the original variable. Under the congruence M = D M' D a member
// at (r, c) carries M'_rc = t / (d_r d_c), so projecting a class is a scalar
// least-squares fit of t, weighting off-diagonal positions twice.
class ClassProjector {
 public:
  ClassProjector(Index m, const std::vector<AffineConstraint>& cons) : m_(m) {
    parent_.resize(static_cast<std::size_t>(m * m));
    std::iota(parent_.begin(), parent_.end(), Index(0));
    std::vector<std::pair<Index, double>> fixes;
    for (const auto& c : cons) {
      if (c.terms.size() == 1) {
        const auto& t = c.terms[0];
        if (t.coeff == 0.0) throw std::invalid_argument("solve_sdp: zero coefficient");
        fixes.emplace_back(pos(t.row, t.col), c.rhs / t.coeff);
      } else if (c.terms.size() == 2 && c.rhs == 0.0 && c.terms[0].coeff == -c.terms[1].coeff &&
                 c.terms[0].coeff != 0.0) {
        unite(pos(c.terms[0].row, c.terms[0].col), pos(c.terms[1].row, c.terms[1].col));
      } else {
        throw std::invalid_argument(
            "solve_sdp: only fixed-entry and entry-equality constraints are supported");
      }
    }
    std::vector<Index> class_of(parent_.size(), -1);
    auto class_for = [&](Index root) {
      if (class_of[root] < 0) {
        class_of[root] = static_cast<Index>(classes_.size());
        classes_.push_back({});
      }
      return class_of[root];
    };
    for (auto [p, v] : fixes) {
      Class& k = classes_[class_for(find(p))];
      if (k.fixed && std::abs(k.value - v) > 1e-12 * (1.0 + std::abs(v))) infeasible_ = true;
      k.fixed = true;
      k.value = v;
    }
    // Unfixed singleton positions are left out: projection keeps them as is.
    std::vector<Index> size(parent_.size(), 0);
    for (Index p = 0; p < static_cast<Index>(parent_.size()); ++p)
      if (is_upper(p)) ++size[find(p)];
    for (Index p = 0; p < static_cast<Index>(parent_.size()); ++p) {
      if (!is_upper(p)) continue;
      const Index r = find(p);
      if (class_of[r] < 0 && size[r] < 2) continue;
      classes_[class_for(r)].members.push_back(p);
    }
    rescale(Eigen::VectorXd::Ones(m));
  }

  bool infeasible() const { return infeasible_; }

  void rescale(const Eigen::VectorXd& d) {
    for (Class& k : classes_) {
      k.coeff.resize(k.members.size());
      k.weight_sum = 0.0;
      for (std::size_t i = 0; i < k.members.size(); ++i) {
        const Index p = k.members[i];
        const double a = 1.0 / (d[p / m_] * d[p % m_]);
        k.coeff[i] = a;
        k.weight_sum += weight(p) * a * a;
      }
    }
  }

  void project(Eigen::MatrixXd& y) const {
    for (const Class& k : classes_) {
      double t = k.value;
      if (!k.fixed) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k.members.size(); ++i) {
          const Index p = k.members[i];
          acc += weight(p) * k.coeff[i] * y(p / m_, p % m_);
        }
        t = acc / k.weight_sum;
      }
      for (std::size_t i = 0; i < k.members.size(); ++i) {
        const Index p = k.members[i];
        y(p / m_, p % m_) = y(p % m_, p / m_) = k.coeff[i] * t;
      }
    }
  }

 private:
  struct Class {
    bool fixed = false;
    double value = 0.0;
    double weight_sum = 0.0;
    std::vector<Index> members;  // upper-triangle positions row * m + col
    std::vector<double> coeff;
  };

  double weight(Index p) const { return p / m_ == p % m_ ? 1.0 : 2.0; }
  Index pos(Index r, Index c) const {
    if (r < 0 || c < 0 || r >= m_ || c >= m_)
      throw std::invalid_argument("solve_sdp: constraint index outside the matrix");
    return r <= c ? r * m_ + c : c * m_ + r;
  }
  bool is_upper(Index p) const { return p / m_ <= p % m_; }
  Index find(Index x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  Index m_;
  std::vector<Index> parent_;
  std::vector<Class> classes_;
  bool infeasible_ = false;
};
class AndersonMixer {
 public:
  AndersonMixer(Index n, int memory)
      : n_(n), mem_(std::max(memory, 0)), df_(n, mem_), dg_(n, mem_) {}

  void clear() {
    count_ = 0;
    has_prev_ = false;
  }

  // Records (x, g(x)) and writes the next iterate; next may alias x. Returns
  // false when the plain step g(x) was taken.
  bool step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& gx, Eigen::MatrixXd& next) {
    if (mem_ == 0) {
      next = gx;
      return false;
    }
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n_), gv(gx.data(), n_);
    Eigen::VectorXd f = gv - xv;
    if (has_prev_) {
      const Index col = head_++ % mem_;
      df_.col(col) = f - f_prev_;
      dg_.col(col) = gv - g_prev_;
      count_ = std::min<Index>(count_ + 1, mem_);
    }
    f_prev_ = f;
    g_prev_ = gv;
    has_prev_ = true;
    if (count_ == 0) {
      next = gx;
      return false;
    }
    const auto df = df_.leftCols(count_);
    Eigen::MatrixXd gram = df.transpose() * df;
    gram.diagonal().array() += 1e-10 * gram.trace() + 1e-300;
    const Eigen::VectorXd gamma = gram.ldlt().solve(df.transpose() * f);
    if (!gamma.allFinite()) {
      clear();
      next = gx;
      return false;
    }
    Eigen::VectorXd out = gv - dg_.leftCols(count_) * gamma;
    next = Eigen::Map<Eigen::MatrixXd>(out.data(), x.rows(), x.cols());
    next = 0.5 * (next + next.transpose()).eval();
    return true;
  }

 private:
  Index n_;
  Index mem_;
  Eigen::MatrixXd df_, dg_;
  Eigen::VectorXd f_prev_, g_prev_;
  Index count_ = 0;
  Index head_ = 0;
  bool has_prev_ = false;
};

// Projection onto the PSD cone through a full symmetric eigendecomposition.
class PsdProjector {
 public:
  explicit PsdProjector(Index m) : es_(m) {}

  void project(const Eigen::MatrixXd& in, Eigen::MatrixXd& out) {
    es_.compute(in);
    const Eigen::VectorXd& lam = es_.eigenvalues();  // ascending
    const Eigen::MatrixXd& v = es_.eigenvectors();
    const Index m = in.rows();
    Index first_pos = 0;
    while (first_pos < m && lam[first_pos] <= 0.0) ++first_pos;
    const Index npos = m - first_pos;
    if (npos <= m / 2) {
      const auto vp = v.rightCols(npos);
      out.noalias() = vp * lam.tail(npos).asDiagonal() * vp.transpose();
    } else {
      const auto vn = v.leftCols(first_pos);
      out = in;
      out.noalias() -= vn * lam.head(first_pos).asDiagonal() * vn.transpose();
    }
    out = 0.5 * (out + out.transpose()).eval();
  }

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_;
};

}  // namespace

namespace {

// Initial scaling D = diag(1, d) with d the magnitude of a rank-one
// least-squares fit to log|That|: d_b = exp(sum_k y_k(b_k)).
Eigen::VectorXd preconditioner(const SdpProblem& p) {
  const Shape& s = p.shape;
  const Index m = p.size();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(m);
  if (m != s.numel() + 1) return d;
  std::vector<Index> rows;
  for (Index i = 0; i < p.obs.values.size(); ++i)
    if (p.obs.values[i] != 0.0 && std::isfinite(p.obs.values[i])) rows.push_back(i);
  if (rows.empty()) return d;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Index>(rows.size()), s.dim_sum());
  Eigen::VectorXd b(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index cell = p.obs.mask.cells()[rows[r]];
    for (int k = 0; k < s.order(); ++k) a(static_cast<Index>(r), s.block_offset(k) + s.coord(cell, k)) = 1.0;
    b[static_cast<Index>(r)] = std::log(std::abs(p.obs.values[rows[r]]));
  }
  const Eigen::VectorXd y = a.completeOrthogonalDecomposition().solve(b);
  for (Index c = 0; c < s.numel(); ++c) {
    double e = 0.0;
    for (int k = 0; k < s.order(); ++k) e += y[s.block_offset(k) + s.coord(c, k)];
    d[1 + c] = std::exp(std::clamp(e, -300.0, 300.0));
  }
  return d;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts) {
  const Index m = p.size();
  if (m > opts.size_cap)
    throw std::invalid_argument("solve_sdp: matrix size " + std::to_string(m) +
                                " exceeds the cap of " + std::to_string(opts.size_cap));
  if (p.cost.cols() != m) throw std::invalid_argument("solve_sdp: cost matrix is not square");
  if (!(opts.relaxation > 0.0 && opts.relaxation < 2.0))
    throw std::invalid_argument("solve_sdp: relaxation must lie in (0, 2)");

  SdpSolution sol;
  ClassProjector affine(m, p.constraints);
  if (affine.infeasible()) {
    sol.status = SdpStatus::infeasible;
    sol.moment = Eigen::MatrixXd::Zero(m, m);
    return sol;
  }
  PsdProjector psd(m);

  // Work on M' = D^{-1} M D^{-1} with the cost rescaled to unit max entry.
  const Eigen::MatrixXd sym_cost = 0.5 * (p.cost + p.cost.transpose());
  Eigen::VectorXd d = preconditioner(p);
  Eigen::MatrixXd cost;
  double cost_scale = 1.0, cost_norm = 0.0;
  auto apply_scaling = [&] {
    affine.rescale(d);
    cost = d.asDiagonal() * sym_cost * d.asDiagonal();
    cost_scale = cost.cwiseAbs().maxCoeff();
    if (!(cost_scale > 0.0)) cost_scale = 1.0;
    cost /= cost_scale;
    cost_norm = cost.norm();
  };
  apply_scaling();
  double sigma = opts.sigma;

  // The iterate is a single matrix s whose PSD part is w and whose negative
  // part is u; one ADMM sweep is the map s -> F(s), accelerated by Anderson
  // mixing with a residual safeguard.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
  if (opts.warm_start) {
    if (opts.warm_start->rows() != m || opts.warm_start->cols() != m)
      throw std::invalid_argument("solve_sdp: bad warm start");
    s = d.cwiseInverse().asDiagonal() * *opts.warm_start * d.cwiseInverse().asDiagonal();
  }
  Eigen::MatrixXd w(m, m), z(m, m), g(m, m), w_prev = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd plain(m, m);
  const double alpha = opts.relaxation;
  AndersonMixer mixer(m * m, opts.anderson_memory);
  bool mixed = false;
  double last_fnorm = std::numeric_limits<double>::infinity();
  auto restart = [&] {
    mixer.clear();
    mixed = false;
    last_fnorm = std::numeric_limits<double>::infinity();
    w_prev = w;
  };
  long next_rescale = opts.rescale_every;

  long it = 0;
  for (; it < opts.max_iters; ++it) {
    psd.project(s, w);
    z = 2.0 * w - s - cost / sigma;
    affine.project(z);
    g = alpha * z + (1.0 - alpha) * w + (s - w);
    const double fnorm = (g - s).norm();

    if (mixed && fnorm > last_fnorm) {
      // Rejected extrapolation: fall back to the plain step.
      mixer.clear();
      mixed = false;
      s = plain;
      continue;
    }
    last_fnorm = fnorm;

    const double gap = (z - w).norm();
    const double u_norm = (s - w).norm();
    sol.primal_residual = gap / (1.0 + std::max(z.norm(), w.norm()));
    sol.dual_residual = sigma * gap / (1.0 + std::max(cost_norm, sigma * u_norm));
    // Objective gap: z is feasible for the constraints, and
    // cost + sigma (u - w + z) lies in the range of the constraint adjoint.
    const double pobj = (cost.array() * w.array()).sum();
    const double dobj = ((cost + sigma * (s - 2.0 * w + z)).array() * z.array()).sum();
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (sol.primal_residual <= opts.tol && sol.dual_residual <= opts.tol && rel_gap <= opts.tol) {
      ++it;
      sol.status = SdpStatus::optimal;
      break;
    }

    if (opts.rescale_every > 0 && it + 1 == next_rescale) {
      // Diagonal rescaling from the current dual slack S = -sigma u.
      next_rescale += 5 * opts.rescale_every;
      Eigen::MatrixXd slack = -sigma * (s - w);
      Eigen::VectorXd diag = slack.diagonal();
      const double top = diag.maxCoeff();
      if (top > 0.0) {
        Eigen::VectorXd e = diag.cwiseMax(1e-12 * top).cwiseSqrt().cwiseInverse();
        e /= std::exp(e.array().log().mean());
        if (e.maxCoeff() / e.minCoeff() > 2.0) {
          const double old_scale = cost_scale;
          d = d.cwiseProduct(e);
          apply_scaling();
          const double ratio = old_scale / cost_scale;
          w = e.cwiseInverse().asDiagonal() * w * e.cwiseInverse().asDiagonal();
          slack = (ratio * e).asDiagonal() * slack * e.asDiagonal();
          s = w - slack / sigma;
          restart();
          continue;
        }
      }
    }
    if (opts.adapt_every > 0 && (it + 1) % opts.adapt_every == 0) {
      constexpr double kMu = 5.0, kTau = 2.0;
      const double progress = sigma * (w - w_prev).norm() / (1.0 + cost_norm);
      double factor = 1.0;
      if (sol.primal_residual > kMu * progress) factor = kTau;
      else if (progress > kMu * sol.primal_residual) factor = 1.0 / kTau;
      if (factor != 1.0) {
        sigma *= factor;
        s = w + (s - w) / factor;
        restart();
        continue;
      }
    }
    w_prev = w;

    plain = g;
    mixed = mixer.step(s, g, s);
  }
  sol.iterations = it;
  sol.moment = d.asDiagonal() * w * d.asDiagonal();
  sol.moment = 0.5 * (sol.moment + sol.moment.transpose()).eval();
  sol.objective = (p.cost.array() * sol.moment.array()).sum() + p.cost_constant;
  return sol;
}

RankOneExtraction extract_rank_one(const SdpSolution& sol, const ObservedTensor& obs,
                                   double tight_tol) {
  if (sol.status != SdpStatus::optimal)
    throw std::invalid_argument(std::string("extract_rank_one: solution status is ") +
                                to_string(sol.status));
  const Index m = sol.moment.rows();
  const Shape& s = obs.shape();
  if (m != s.numel() + 1) throw std::invalid_argument("extract_rank_one: size mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.moment, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& lam = es.eigenvalues();
  RankOneExtraction out;
  const double l1 = lam[m - 1];
  const double l2 = m > 1 ? std::max(lam[m - 2], 0.0) : 0.0;
  out.eigen_ratio = l1 > 0.0 ? l2 / l1 : 1.0;
  out.tight = out.eigen_ratio <= tight_tol;
  const double m00 = sol.moment(0, 0);
  Eigen::VectorXd x = sol.moment.row(0).tail(m - 1).transpose();
  if (m00 > 0.0) x /= m00;
  out.tensor = DenseTensor(s, x);
  for (Index i = 0; i < obs.mask.size(); ++i)
    out.recovery_residual =
        std::max(out.recovery_residual, std::abs(x[obs.mask.cells()[i]] - obs.values[i]));
  return out;
}

double max_constraint_violation(const SdpProblem& p, const Eigen::MatrixXd& m) {
  double worst = 0.0;
  for (const auto& c : p.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coeff * m(t.row, t.col);
    worst = std::max(worst, std::abs(lhs - c.rhs));
  }
  return worst;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    std::vector<double> r(a.cols());
    for (Index j = 0; j < a.cols(); ++j) r[j] = a(i, j);
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const Index r = static_cast<Index>(j.size());
  Eigen::MatrixXd a(r, r);
  for (Index i = 0; i < r; ++i) {
    if (static_cast<Index>(j[i].size()) != r) throw std::invalid_argument("matrix is not square");
    for (Index k = 0; k < r; ++k) a(i, k) = j[i][k].get<double>();
  }
  return a;
}

}  // namespace

nlohmann::json to_json(const SdpProblem& p) {
  nlohmann::json j;
  j["dims"] = p.shape.dims();
  j["kind"] = to_string(p.kind);
  j["size"] = p.size();
  std::vector<Index> cells(p.obs.mask.cells());
  j["mask"] = cells;
  j["values"] = std::vector<double>(p.obs.values.data(), p.obs.values.data() + p.obs.values.size());
  if (p.penalty) j["penalty"] = *p.penalty;
  if (p.weights)
    j["weights"] = std::vector<double>(p.weights->w.data(), p.weights->w.data() + p.weights->w.size());
  nlohmann::json cost = nlohmann::json::array();
  for (Index r = 0; r < p.cost.rows(); ++r)
    for (Index c = r; c < p.cost.cols(); ++c)
      if (p.cost(r, c) != 0.0) cost.push_back({r, c, p.cost(r, c)});
  j["cost"] = cost;
  j["cost_constant"] = p.cost_constant;
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : p.constraints) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : c.terms) terms.push_back({t.row, t.col, t.coeff});
    cons.push_back({{"terms", terms}, {"rhs", c.rhs}});
  }
  j["constraints"] = cons;
  return j;
}

SdpProblem sdp_problem_from_json(const nlohmann::json& j) {
  SdpProblem p;
  p.shape = Shape(j.at("dims").get<std::vector<int>>());
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exact") p.kind = SdpKind::exact;
  else if (kind == "weighted-exact") p.kind = SdpKind::weighted_exact;
  else if (kind == "noisy") p.kind = SdpKind::noisy;
  else throw std::invalid_argument("unknown SDP kind '" + kind + "'");
  const Index m = j.at("size").get<Index>();
  if (m != p.shape.numel() + 1) throw std::invalid_argument("size does not match dims");
  const auto cells = j.at("mask").get<std::vector<Index>>();
  const auto vals = j.at("values").get<std::vector<double>>();
  p.obs = ObservedTensor(Mask(p.shape, cells), Eigen::Map<const Eigen::VectorXd>(
                                                   vals.data(), static_cast<Index>(vals.size())));
  if (j.contains("penalty")) p.penalty = j["penalty"].get<double>();
  if (j.contains("weights")) {
    const auto w = j["weights"].get<std::vector<double>>();
    WeightVector wv;
    wv.shape = p.shape;
    wv.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Index>(w.size()));
    wv.layer.assign(w.size(), 0);
    p.weights = wv;
  }
  p.cost = Eigen::MatrixXd::Zero(m, m);
  for (const auto& t : j.at("cost")) {
    const Index r = t[0].get<Index>(), c = t[1].get<Index>();
    if (r < 0 || c < 0 || r >= m || c >= m) throw std::invalid_argument("cost index out of range");
    p.cost(r, c) = p.cost(c, r) = t[2].get<double>();
  }
  p.cost_constant = j.value("cost_constant", 0.0);
  for (const auto& c : j.at("constraints")) {
    AffineConstraint a;
    for (const auto& t : c.at("terms")) a.terms.push_back({t[0].get<Index>(), t[1].get<Index>(), t[2].get<double>()});
    a.rhs = c.at("rhs").get<double>();
    p.constraints.push_back(std::move(a));
  }
  return p;
}

nlohmann::json to_json(const SdpSolution& s) {
  return {{"status", to_string(s.status)},
          {"objective", s.objective},
          {"primal_residual", s.primal_residual},
          {"dual_residual", s.dual_residual},
          {"iterations", s.iterations},
          {"moment", matrix_to_json(s.moment)}};
}

SdpSolution sdp_solution_from_json(const nlohmann::json& j) {
  SdpSolution s;
  const std::string st = j.at("status").get<std::string>();
  if (st == "optimal") s.status = SdpStatus::optimal;
  else if (st == "max-iters") s.status = SdpStatus::max_iters;
  else if (st == "infeasible") s.status = SdpStatus::infeasible;
  else throw std::invalid_argument("unknown SDP status '" + st + "'");
  s.objective = j.at("objective").get<double>();
  s.primal_residual = j.value("primal_residual", 0.0);
  s.dual_residual = j.value("dual_residual", 0.0);
  s.iterations = j.value("iterations", 0L);
  s.moment = matrix_from_json(j.at("moment"));
  return s;
}

}  // namespace r1tc
