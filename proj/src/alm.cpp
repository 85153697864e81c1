#include "r1tc/alm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace r1tc {

void AlmParams::validate() const {
  if (k < 1 || q < 1) throw std::invalid_argument("alm: k and q must be at least 1");
  if (!(rho > 0.0) || !std::isfinite(rho) || !std::isfinite(data_weight))
    throw std::invalid_argument("alm: rho and data_weight must be finite, rho positive");
  if (batch1 < 1 || batch2 < 1) throw std::invalid_argument("alm: batch sizes must be at least 1");
  if (rounds_per_batch < 0 || num_batches < 0)
    throw std::invalid_argument("alm: round and batch counts must be nonnegative");
  if (max_inner_iters < 0 || lbfgs_memory < 1 || !(grad_tol >= 0.0))
    throw std::invalid_argument("alm: invalid inner solver settings");
  if (readout_sweeps < 0) throw std::invalid_argument("alm: readout_sweeps must be nonnegative");
}

AlmState::AlmState(Shape s, int k_, int q_) : shape(std::move(s)), k(k_), q(q_) {
  theta = Eigen::VectorXd::Zero(k + static_cast<Index>(k) * q * shape.dim_sum());
}

double AlmState::column_entry(int i, Index cell) const {
  double sum = 0.0;
  for (int j = 0; j < q; ++j) {
    double p = 1.0;
    for (int a = 0; a < shape.order(); ++a) p *= theta[factor_offset(i, j, a) + shape.coord(cell, a)];
    sum += p;
  }
  return sum;
}

double AlmState::moment_entry(Index row, Index col) const {
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const double a = row == 0 ? theta[i] : column_entry(i, row - 1);
    const double b = col == 0 ? theta[i] : column_entry(i, col - 1);
    sum += a * b;
  }
  return sum;
}

double AlmState::avg_entry(Index alpha, Index beta) const {
  double sum = 0.0;
  for (int s = 0; s < shape.order(); ++s) {
    const Index a = shape.with_coord(alpha, s, shape.coord(beta, s));
    const Index b = shape.with_coord(beta, s, shape.coord(alpha, s));
    sum += moment_entry(1 + a, 1 + b);
  }
  return sum / shape.order();
}

Eigen::MatrixXd AlmState::moment() const {
  const Index n = shape.numel();
  Eigen::MatrixXd y(n + 1, k);
  y.row(0) = t().transpose();
  for (int i = 0; i < k; ++i)
    for (Index c = 0; c < n; ++c) y(1 + c, i) = column_entry(i, c);
  return y * y.transpose();
}

AlmState random_alm_state(const Shape& shape, int k, int q, std::mt19937_64& rng) {
  AlmState s(shape, k, q);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& x : s.theta) x = normal(rng);
  return s;
}

namespace {

// Uniform m-subset of [0, n) by Floyd's algorithm, in draw order.
std::vector<Index> sample_subset(Index n, Index m, std::mt19937_64& rng) {
  std::vector<Index> out;
  if (m >= n) {
    out.resize(n);
    for (Index i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  std::unordered_set<Index> seen;
  out.reserve(m);
  for (Index j = n - m; j < n; ++j) {
    const Index r = std::uniform_int_distribution<Index>(0, j)(rng);
    const Index pick = seen.count(r) ? j : r;
    seen.insert(pick);
    out.push_back(pick);
  }
  return out;
}

// Value and gradient of the factored Lagrangian. Coordinates are decoded once
// per cell into scratch buffers.
class LagrangianEvaluator {
 public:
  LagrangianEvaluator(const AlmState& s, Eigen::VectorXd* grad)
      : s_(s), d_(s.shape.order()), grad_(grad), pre_(d_ + 1), suf_(d_ + 1) {}

  void decode(Index cell, std::vector<int>& c) const {
    c.resize(d_);
    for (int a = 0; a < d_; ++a) c[a] = s_.shape.coord(cell, a);
  }

  double entry(int i, const std::vector<int>& c) const {
    double sum = 0.0;
    for (int j = 0; j < s_.q; ++j) {
      double p = 1.0;
      for (int a = 0; a < d_; ++a) p *= s_.theta[s_.factor_offset(i, j, a) + c[a]];
      sum += p;
    }
    return sum;
  }

  // grad += coef * d entry(i, c) / d theta
  void add_entry_grad(int i, const std::vector<int>& c, double coef) {
    if (!grad_ || coef == 0.0) return;
    for (int j = 0; j < s_.q; ++j) {
      pre_[0] = 1.0;
      for (int a = 0; a < d_; ++a) pre_[a + 1] = pre_[a] * s_.theta[s_.factor_offset(i, j, a) + c[a]];
      suf_[d_] = 1.0;
      for (int a = d_ - 1; a >= 0; --a) suf_[a] = suf_[a + 1] * s_.theta[s_.factor_offset(i, j, a) + c[a]];
      for (int a = 0; a < d_; ++a) (*grad_)[s_.factor_offset(i, j, a) + c[a]] += coef * pre_[a] * suf_[a + 1];
    }
  }

  // sum_i |vec T_i|^2 through the q x q Gram matrices of each axis.
  double trace() {
    const int q = s_.q;
    double total = 0.0;
    std::vector<Eigen::MatrixXd> gram(d_);
    for (int i = 0; i < s_.k; ++i) {
      for (int a = 0; a < d_; ++a) {
        Eigen::MatrixXd u(s_.shape.dim(a), q);
        for (int j = 0; j < q; ++j) u.col(j) = s_.factor(i, j, a);
        gram[a] = u.transpose() * u;
      }
      Eigen::MatrixXd all = Eigen::MatrixXd::Ones(q, q);
      for (int a = 0; a < d_; ++a) all.array() *= gram[a].array();
      total += all.sum();
      if (!grad_) continue;
      for (int a = 0; a < d_; ++a) {
        Eigen::MatrixXd others = Eigen::MatrixXd::Ones(q, q);
        for (int b = 0; b < d_; ++b)
          if (b != a) others.array() *= gram[b].array();
        for (int j = 0; j < q; ++j) {
          auto g = grad_->segment(s_.factor_offset(i, j, a), s_.shape.dim(a));
          for (int jj = 0; jj < q; ++jj) g += 2.0 * others(j, jj) * s_.factor(i, jj, a);
        }
      }
    }
    return total;
  }

 private:
  const AlmState& s_;
  int d_;
  Eigen::VectorXd* grad_;
  std::vector<double> pre_, suf_;
};

}  // namespace

void resample_batches(AlmState& s, const ObservedTensor& obs, const AlmParams& p,
                      std::mt19937_64& rng) {
  const Index m = obs.mask.size();
  const Index n = s.shape.numel();
  s.batch1 = sample_subset(m, p.batch1, rng);
  std::sort(s.batch1.begin(), s.batch1.end());

  std::unordered_map<Index, double> carried;
  for (std::size_t r = 0; r < s.batch2.size(); ++r)
    carried[s.batch2[r].first * n + s.batch2[r].second] = s.lambda[r];

  // Pairs are keyed alpha * N + beta with alpha ranging over observed cells.
  const std::vector<Index> keys = sample_subset(m * n, p.batch2, rng);
  s.batch2.clear();
  s.lambda = Eigen::VectorXd::Zero(static_cast<Index>(keys.size()));
  for (std::size_t r = 0; r < keys.size(); ++r) {
    const Index alpha = obs.mask.cells()[keys[r] / n];
    const Index beta = keys[r] % n;
    s.batch2.emplace_back(alpha, beta);
    if (auto it = carried.find(alpha * n + beta); it != carried.end()) s.lambda[r] = it->second;
  }
}

double modified_lagrangian(const AlmState& s, const ObservedTensor& obs, const AlmParams& p,
                           Eigen::VectorXd* grad) {
  if (grad) grad->setZero(s.num_params());
  LagrangianEvaluator ev(s, grad);
  const int k = s.k;
  const int d = s.shape.order();
  double value = ev.trace();
  const double w = p.data_weight > 0.0 ? p.data_weight : 0.5 * p.rho;

  std::vector<int> ca, cb;
  Eigen::VectorXd ea(k), eb(k);
  for (const Index pos : s.batch1) {
    const double target = obs.values[pos];
    ev.decode(obs.mask.cells()[pos], ca);
    for (int i = 0; i < k; ++i) ea[i] = ev.entry(i, ca);
    const double r1 = ea.squaredNorm() - target * target;
    const double r2 = s.t().dot(ea) - target;
    value += w * (r1 * r1 + r2 * r2);
    if (!grad) continue;
    for (int i = 0; i < k; ++i) {
      ev.add_entry_grad(i, ca, 2.0 * w * (2.0 * r1 * ea[i] + r2 * s.theta[i]));
      (*grad)[i] += 2.0 * w * r2 * ea[i];
    }
  }

  std::vector<int> sa, sb;
  std::vector<Eigen::VectorXd> swa(d, Eigen::VectorXd(k)), swb(d, Eigen::VectorXd(k));
  for (std::size_t r = 0; r < s.batch2.size(); ++r) {
    ev.decode(s.batch2[r].first, ca);
    ev.decode(s.batch2[r].second, cb);
    for (int i = 0; i < k; ++i) {
      ea[i] = ev.entry(i, ca);
      eb[i] = ev.entry(i, cb);
    }
    double avg = 0.0;
    for (int a = 0; a < d; ++a) {
      sa = ca;
      sb = cb;
      std::swap(sa[a], sb[a]);
      for (int i = 0; i < k; ++i) {
        swa[a][i] = ev.entry(i, sa);
        swb[a][i] = ev.entry(i, sb);
      }
      avg += swa[a].dot(swb[a]);
    }
    const double g = avg / d - ea.dot(eb);
    value += s.lambda[r] * g + 0.5 * p.rho * g * g;
    if (!grad) continue;
    const double h = s.lambda[r] + p.rho * g;
    for (int i = 0; i < k; ++i) {
      ev.add_entry_grad(i, ca, -h * eb[i]);
      ev.add_entry_grad(i, cb, -h * ea[i]);
    }
    for (int a = 0; a < d; ++a) {
      sa = ca;
      sb = cb;
      std::swap(sa[a], sb[a]);
      for (int i = 0; i < k; ++i) {
        ev.add_entry_grad(i, sa, h / d * swb[a][i]);
        ev.add_entry_grad(i, sb, h / d * swa[a][i]);
      }
    }
  }

  if (p.anchor) {
    const double e = s.t().squaredNorm() - 1.0;
    value += 0.5 * p.rho * e * e;
    if (grad) grad->head(k) += 2.0 * p.rho * e * s.t();
  }
  return value;
}

Eigen::VectorXd symmetry_residuals(const AlmState& s) {
  Eigen::VectorXd g(static_cast<Index>(s.batch2.size()));
  for (std::size_t r = 0; r < s.batch2.size(); ++r) {
    const auto [a, b] = s.batch2[r];
    g[r] = s.avg_entry(a, b) - s.moment_entry(1 + a, 1 + b);
  }
  return g;
}

DenseTensor alm_readout(const AlmState& s, int sweeps) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(s.shape.numel());
  for (int i = 0; i < s.k; ++i)
    for (int j = 0; j < s.q; ++j) {
      RankOneFactors f;
      for (int a = 0; a < s.shape.order(); ++a) f.factors.push_back(s.factor(i, j, a));
      x += s.theta[i] * expand(f, s.shape).values();
    }
  return expand(rank_one_approximation(DenseTensor(s.shape, std::move(x)), sweeps), s.shape);
}

namespace {

struct InnerResult {
  double value = 0.0;
  bool finite = true;
};

// L-BFGS with Armijo backtracking. Stops on |grad|_inf <= gtol or the
// iteration cap; reports non-finite values instead of throwing.
InnerResult lbfgs(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fg,
                  Eigen::VectorXd& x, int max_iters, double gtol, int memory) {
  Eigen::VectorXd g;
  double f = fg(x, g);
  if (!std::isfinite(f) || !g.allFinite()) return {f, false};
  std::deque<Eigen::VectorXd> ss, ys;
  std::deque<double> rhos;
  Eigen::VectorXd xn, gn, dir;
  std::vector<double> alpha;
  for (int it = 0; it < max_iters; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= gtol) break;
    // Two-loop recursion.
    dir = -g;
    alpha.assign(ss.size(), 0.0);
    for (int m = static_cast<int>(ss.size()) - 1; m >= 0; --m) {
      alpha[m] = rhos[m] * ss[m].dot(dir);
      dir -= alpha[m] * ys[m];
    }
    if (!ss.empty()) dir *= ss.back().dot(ys.back()) / ys.back().squaredNorm();
    else dir /= std::max(1.0, g.norm());
    for (std::size_t m = 0; m < ss.size(); ++m) {
      const double beta = rhos[m] * ys[m].dot(dir);
      dir += (alpha[m] - beta) * ss[m];
    }
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      ss.clear(), ys.clear(), rhos.clear();
      dir = -g / std::max(1.0, g.norm());
      slope = g.dot(dir);
    }
    double step = 1.0;
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + step * dir;
      fn = fg(xn, gn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if (!gn.allFinite()) return {fn, false};
    Eigen::VectorXd sv = xn - x, yv = gn - g;
    const double sy = sv.dot(yv);
    if (sy > 1e-12 * sv.norm() * yv.norm()) {
      ss.push_back(std::move(sv));
      ys.push_back(std::move(yv));
      rhos.push_back(1.0 / sy);
      if (static_cast<int>(ss.size()) > memory) ss.pop_front(), ys.pop_front(), rhos.pop_front();
    }
    x.swap(xn);
    g.swap(gn);
    f = fn;
  }
  return {f, std::isfinite(f)};
}

double fit_on_mask(const DenseTensor& t, const ObservedTensor& obs) {
  double sum = 0.0;
  for (Index i = 0; i < obs.mask.size(); ++i) {
    const double r = t(obs.mask.cells()[i]) - obs.values[i];
    sum += r * r;
  }
  return std::sqrt(sum);
}

}  // namespace

AlmResult alm_solve(const ObservedTensor& obs, const AlmParams& params, std::ostream* trace) {
  params.validate();
  if (obs.mask.empty()) throw std::invalid_argument("alm_solve: empty mask");
  std::mt19937_64 rng(params.seed);
  AlmResult res;
  AlmState& s = res.state;
  s = random_alm_state(obs.shape(), params.k, params.q, rng);
  AlmDiagnostics& diag = res.diagnostics;

  res.tensor = alm_readout(s, params.readout_sweeps);
  diag.best_fit = fit_on_mask(res.tensor, obs);
  if (trace) *trace << "batch,round,objective,violation\n";

  const auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    s.theta = x;
    return modified_lagrangian(s, obs, params, &g);
  };

  for (int b = 0; b < params.num_batches; ++b) {
    resample_batches(s, obs, params, rng);
    for (int r = 0; r < params.rounds_per_batch; ++r) {
      Eigen::VectorXd x = s.theta;
      const InnerResult inner =
          lbfgs(fg, x, params.max_inner_iters, params.grad_tol, params.lbfgs_memory);
      if (!inner.finite || !x.allFinite()) {
        ++diag.restarts;
        AlmState fresh = random_alm_state(obs.shape(), params.k, params.q, rng);
        s.theta = std::move(fresh.theta);
        s.lambda.setZero();
        continue;
      }
      s.theta = std::move(x);
      const Eigen::VectorXd g = symmetry_residuals(s);
      s.lambda += params.rho * g;
      const double viol = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
      diag.objective.push_back(inner.value);
      diag.violation.push_back(viol);
      ++diag.rounds;
      if (trace) *trace << b << ',' << r << ',' << inner.value << ',' << viol << '\n';
    }
    DenseTensor candidate = alm_readout(s, params.readout_sweeps);
    const double fit = fit_on_mask(candidate, obs);
    if (std::isfinite(fit) && fit < diag.best_fit) {
      diag.best_fit = fit;
      diag.best_batch = b;
      res.tensor = std::move(candidate);
    }
  }
  return res;
}

}  // namespace r1tc
