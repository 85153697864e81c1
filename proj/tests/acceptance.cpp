// Acceptance runner. Usage: acceptance [criterion ...]; with no arguments every
// criterion runs. Prints one PASS/FAIL line per criterion and exits nonzero if
// any failed.

#include "r1tc/alm.hpp"
#include "r1tc/completion.hpp"
#include "r1tc/exact.hpp"
#include "r1tc/experiments.hpp"
#include "r1tc/propagation.hpp"
#include "r1tc/sdp.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace r1tc;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream log;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    log << "  [" << (ok ? "ok" : "FAILED") << "] " << what << "\n";
  }
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(prec);
  s << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << v;
  return s.str();
}

RankOneFactors uniform_factors(const Shape& s, double lo, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, 1.0);
  RankOneFactors f;
  for (int k = 0; k < s.order(); ++k) {
    Eigen::VectorXd v(s.dim(k));
    for (auto& x : v) x = u(rng);
    f.factors.push_back(v);
  }
  return f;
}

Mask sr_mask(const Shape& s, double p, std::mt19937_64& rng) {
  Mask m;
  do m = sample_mask(MaskDistribution::bernoulli(s, p), rng);
  while (m.empty() || !propagate_sr(m).full());
  return m;
}

double eigen_ratio(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const Index n = ev.size();
  return ev[n - 1] > 0 ? std::max(0.0, ev[n - 2]) / ev[n - 1] : 1.0;
}

double max_rel_error(const DenseTensor& a, const DenseTensor& b) {
  return ((a.values() - b.values()).array().abs() / b.values().array().abs()).maxCoeff();
}

// x = M(0, 1:) / M(0, 0), usable for unconverged iterates too.
DenseTensor readout(const SdpSolution& sol, const Shape& s) {
  DenseTensor t(s);
  t.values() = sol.moment.row(0).tail(s.numel()).transpose() / sol.moment(0, 0);
  return t;
}

void table_check(Outcome& o, const Shape& s, const Population& pop, const std::array<double, 5>& want,
                 double tol) {
  const ConditionTable t = enumerate_condition_table(s, pop);
  std::ostringstream line;
  line << t.population << " on " << s.dim(0);
  for (int k = 1; k < s.order(); ++k) line << "x" << s.dim(k);
  line << " (" << t.total << " masks):";
  bool ok = true;
  for (std::size_t c = 0; c < kConditions.size(); ++c) {
    const double got = t.percent(kConditions[c]);
    line << " " << to_string(kConditions[c]) << " " << fmt(got, 2) << "/" << fmt(want[c], 2);
    ok = ok && std::abs(got - want[c]) <= tol + 1e-9;
  }
  o.check(ok, line.str());
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
  table_check(o, Shape({3, 3, 2}), Population::cardinality(6), {48.35, 48.35, 48.29, 47.90, 9.31}, 0.01);
  table_check(o, Shape({2, 2, 2, 2}), Population::cardinality(5), {61.54, 61.54, 61.17, 61.17, 9.16}, 0.01);
}

void criterion2(Outcome& o) {
  table_check(o, Shape({3, 3, 2}), Population::all_subsets(), {86.76, 86.76, 86.76, 86.73, 72.51}, 0.02);
  table_check(o, Shape({2, 2, 2, 2}), Population::all_subsets(), {91.90, 91.90, 91.88, 91.88, 70.60}, 0.02);
}

void criterion3(Outcome& o) {
  struct Row {
    Shape shape;
    std::array<double, 4> want;  // GS, S, SR, A
  };
  const std::vector<Row> rows{{Shape({5, 5, 5}), {100, 96, 23, 0}},
                              {Shape({3, 3, 3, 3}), {100, 95, 51, 0}},
                              {Shape({2, 2, 2, 2, 2}), {100, 96, 93, 1}}};
  for (const Row& r : rows) {
    const ConditionTable t = enumerate_condition_table(r.shape, Population::sampled(1000, true, 2024));
    std::ostringstream line;
    line << t.population << " (" << t.total << " unique masks of " << t.draws << " drawn):";
    bool ok = t.total >= 1000;
    for (std::size_t c = 1; c < kConditions.size(); ++c) {
      const double got = t.percent(kConditions[c]);
      line << " " << to_string(kConditions[c]) << " " << fmt(got, 1) << "/" << fmt(r.want[c - 1], 0);
      ok = ok && std::abs(got - r.want[c - 1]) <= 5.0;
    }
    o.check(ok, line.str());
  }
}

void criterion4(Outcome& o) {
  const Shape s({2, 2, 2});
  std::vector<IndexTuple> cells;
  for (const auto& c : std::vector<std::vector<int>>{{1, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 2}})
    cells.push_back(IndexTuple::from_one_based(c));
  Eigen::VectorXd v(4);
  v << 1, -4, -4, -8;
  const ExactCompletionResult r = complete_exact(ObservedTensor(Mask(s, cells), v));
  o.check(r.status == ExactStatus::unique, std::string("status ") + to_string(r.status));
  if (!r.tensor) return;
  const auto at = [&](std::vector<int> c) { return r.tensor->at(IndexTuple::from_one_based(c)); };
  const double err = std::max({std::abs(at({1, 2, 1}) - 2), std::abs(at({2, 1, 1}) - 2),
                               std::abs(at({2, 2, 1}) - 4), std::abs(at({1, 1, 2}) + 2)});
  o.check(err < 1e-9, "T121=" + fmt(at({1, 2, 1}), 12) + " T211=" + fmt(at({2, 1, 1}), 12) +
                          " T221=" + fmt(at({2, 2, 1}), 12) + " T112=" + fmt(at({1, 1, 2}), 12));
  o.check(r.residual < 1e-9, "residual " + sci(r.residual));
  o.check(verify_rank_one(*r.tensor, 1e-9), "completion is rank one");
}

void criterion5(Outcome& o) {
  const std::vector<Shape> shapes{Shape({3, 3, 3}), Shape({2, 2, 2}), Shape({3, 4, 3})};
  std::mt19937_64 rng(5);
  int tight = 0, accurate = 0, total = 0;
  double worst = 0.0;
  SdpOptions opts;
  opts.tol = 1e-7;
  for (int i = 0; i < 100; ++i) {
    const Shape& s = shapes[i % 3];
    const Mask m = sr_mask(s, 0.4, rng);
    const DenseTensor t = expand(uniform_factors(s, 0.1, rng));
    const ObservedTensor obs = restrict(t, m);
    const SdpSolution sol = solve_sdp(build_sdp_exact(obs), opts);
    ++total;
    if (sol.status != SdpStatus::optimal) continue;
    const RankOneExtraction ex = extract_rank_one(sol, obs);
    const double err = max_rel_error(ex.tensor, t);
    worst = std::max(worst, err);
    tight += ex.tight;
    accurate += err < 1e-3;
  }
  o.check(tight == 100, std::to_string(tight) + "/" + std::to_string(total) + " tight");
  o.check(accurate == 100, std::to_string(accurate) + "/" + std::to_string(total) +
                               " within 1e-3 entrywise (worst " + fmt(worst, 8) + ")");
}

void criterion6(Outcome& o) {
  const Shape s({3, 4, 3});
  RankOneFactors f;
  f.factors = {Eigen::Vector3d(1, 1, 10), Eigen::Vector4d(1, 1, 1, 10), Eigen::Vector3d(10, 1, 1)};
  const DenseTensor t = expand(f);
  std::vector<IndexTuple> cells;
  for (const auto& c : std::vector<std::vector<int>>{
           {1, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 2}, {3, 3, 2}, {3, 1, 3}, {3, 3, 3}, {2, 4, 3}})
    cells.push_back(IndexTuple::from_one_based(c));
  const Mask m(s, cells);
  const ObservedTensor obs = restrict(t, m);
  o.check(propagate_s(m).full() && !propagate_sr(m).full(), "mask is S- but not SR-propagating");

  // The loose optimum lies on a degenerate face; a coarse tolerance settles it.
  SdpOptions coarse;
  coarse.tol = 1e-2;
  const SdpSolution plain = solve_sdp(build_sdp_exact(obs), coarse);
  const double r_plain = eigen_ratio(plain.moment);
  o.check(plain.status == SdpStatus::optimal && r_plain > 1e-3,
          "plain: status " + std::string(to_string(plain.status)) + ", lambda2/lambda1 " + fmt(r_plain, 4));

  const SdpSolution weighted = solve_sdp(build_sdp_exact(obs, generate_weights(m, 0.01)));
  if (weighted.status != SdpStatus::optimal) {
    o.check(false, "weighted solve did not converge");
    return;
  }
  const RankOneExtraction ex = extract_rank_one(weighted, obs);
  const double err = max_rel_error(ex.tensor, t);
  o.check(ex.tight && err < 1e-3, "weighted: lambda2/lambda1 " + fmt(ex.eigen_ratio, 8) +
                                      ", max relative error " + fmt(err, 8));
}

bool bipartite_connected(const Mask& m) {
  // Union-find over 3 rows + 3 columns.
  std::array<int, 6> parent;
  std::iota(parent.begin(), parent.end(), 0);
  const std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (Index i = 0; i < m.size(); ++i) {
    const IndexTuple t = m.tuple(i);
    parent[find(t.coords[0])] = find(3 + t.coords[1]);
  }
  for (int x = 1; x < 6; ++x)
    if (find(x) != find(0)) return false;
  return true;
}

void criterion7(Outcome& o) {
  const Shape s({3, 3});
  std::mt19937_64 rng(7);
  int masks = 0, agree = 0, connected = 0;
  for (unsigned bits = 1; bits < 512; ++bits) {
    const int k = std::popcount(bits);
    if (k < 5) continue;
    std::vector<Index> cells;
    for (int c = 0; c < 9; ++c)
      if (bits >> c & 1u) cells.push_back(c);
    const Mask m(s, cells);
    const DenseTensor t = expand(uniform_factors(s, 0.1, rng));
    const ObservedTensor obs = restrict(t, m);
    const SdpSolution sol = solve_sdp(build_sdp_exact(obs));
    // Tight: the optimum is the lifted truth. A rank-one optimum that zeroes
    // an unobserved row is exact for the relaxation but not for the tensor.
    bool tight = false;
    if (sol.status == SdpStatus::optimal) {
      const RankOneExtraction ex = extract_rank_one(sol, obs);
      tight = ex.tight && relative_distance(ex.tensor, t) < 1e-3;
    }
    const bool conn = bipartite_connected(m);
    ++masks;
    connected += conn;
    agree += tight == conn;
    if (tight != conn) {
      o.log << "  mismatch: mask bits " << bits << " connected " << conn << " tight " << tight
            << " status " << to_string(sol.status);
      if (sol.status == SdpStatus::optimal) {
        const RankOneExtraction ex = extract_rank_one(sol, obs);
        o.log << " ratio " << sci(ex.eigen_ratio) << " error " << sci(max_rel_error(ex.tensor, t))
              << " iterations " << sol.iterations;
      }
      o.log << "\n";
    }
  }
  o.check(masks == 256, std::to_string(masks) + " masks enumerated");
  o.check(agree == masks, std::to_string(agree) + "/" + std::to_string(masks) + " agree (" +
                              std::to_string(connected) + " connected)");
}

void criterion8(Outcome& o) {
  const Shape s({4, 4, 4});
  std::mt19937_64 mask_rng(8);
  const Mask m = sr_mask(s, 0.4, mask_rng);
  o.log << "  mask: " << m.size() << " of " << s.numel() << " cells, SR-propagating\n";
  SdpOptions opts;
  opts.tol = 1e-6;
  opts.max_iters = 20000;
  std::vector<double> medians;
  for (double delta : {0.2, 0.1, 0.05, 0.025}) {
    std::vector<double> d;
    for (int trial = 0; trial < 20; ++trial) {
      std::mt19937_64 rng(stream_seed(99, trial));
      const DenseTensor t = expand(uniform_factors(s, 0.5, rng));
      ObservedTensor obs = restrict(t, m);
      std::normal_distribution<double> noise(0.0, delta);
      for (auto& v : obs.values) v += noise(rng);
      const SdpSolution sol = solve_sdp(build_sdp_noisy(obs, 100.0), opts);
      d.push_back(relative_distance(readout(sol, s), t));
    }
    medians.push_back(quantile(d, 0.5));
    o.log << "  delta " << fmt(delta, 3) << ": median relative distance " << fmt(medians.back(), 5) << "\n";
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) decreasing = decreasing && medians[i] < medians[i - 1];
  o.check(decreasing, "medians strictly decrease");
  o.check(medians.back() < 0.5 * medians.front(),
          "median at 0.025 is " + fmt(medians.back() / medians.front(), 3) + "x the median at 0.2");
}

const CurveSummary* find_summary(const CurveTable& t, CurveMethod m, Index omega, double delta) {
  for (const auto& s : t.summary)
    if (s.method == m && s.omega == omega && s.delta == delta) return &s;
  return nullptr;
}

void criterion9(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  CurveDescriptor exact;
  exact.protocol = CurveDescriptor::Protocol::exact;
  exact.shape = Shape({5, 5, 5});
  exact.omega = {13, 16, 20, 30, 40};
  exact.trials = 100;
  exact.methods = {CurveMethod::sdp_e, CurveMethod::alt_min};
  exact.seed = 9;
  exact.sdp.tol = 1e-6;
  exact.sdp.max_iters = 5000;
  const CurveTable te = recovery_curve(exact);
  for (Index w : exact.omega) {
    const CurveSummary* a = find_summary(te, CurveMethod::sdp_e, w, 0.0);
    const CurveSummary* b = find_summary(te, CurveMethod::alt_min, w, 0.0);
    o.check(a && b && a->success_rate >= b->success_rate,
            "exact |Omega|=" + std::to_string(w) + ": SDP-E " + fmt(a->success_rate, 2) + " vs alt-min " +
                fmt(b->success_rate, 2));
  }

  CurveDescriptor noisy = exact;
  noisy.protocol = CurveDescriptor::Protocol::noisy;
  noisy.omega = {20, 30, 40, 60, 90};
  noisy.deltas = {0.05, 0.1};
  noisy.methods = {CurveMethod::sdp_n, CurveMethod::alt_min};
  const CurveTable tn = recovery_curve(noisy);
  for (double delta : noisy.deltas)
    for (Index w : noisy.omega) {
      const CurveSummary* a = find_summary(tn, CurveMethod::sdp_n, w, delta);
      const CurveSummary* b = find_summary(tn, CurveMethod::alt_min, w, delta);
      o.check(a && b && a->median <= b->median,
              "noisy |Omega|=" + std::to_string(w) + " delta=" + fmt(delta, 2) + ": SDP-N median " +
                  fmt(a->median, 4) + " vs alt-min " + fmt(b->median, 4));
    }
  o.log << "  " << fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 0)
        << " s\n";
}

void criterion10(Outcome& o) {
  // Gradients against central differences.
  {
    std::mt19937_64 rng(10);
    const std::vector<Shape> shapes{Shape({2, 2, 2}), Shape({3, 4, 2}), Shape({5, 5, 5})};
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const Shape& sh = shapes[trial % 3];
      Mask m;
      do m = sample_mask(MaskDistribution::bernoulli(sh, 0.6), rng);
      while (m.empty());
      const ObservedTensor obs = restrict(expand(uniform_factors(sh, 0.1, rng)), m);
      AlmParams p;
      p.batch1 = 20;
      p.batch2 = 40;
      p.anchor = trial % 2 == 0;
      AlmState s = random_alm_state(sh, 1 + trial % 3, 1 + (trial / 3) % 2, rng);
      resample_batches(s, obs, p, rng);
      std::normal_distribution<double> nd;
      for (auto& l : s.lambda) l = nd(rng);
      Eigen::VectorXd grad, fd(s.num_params());
      modified_lagrangian(s, obs, p, &grad);
      const double h = 1e-6;
      for (Index i = 0; i < s.num_params(); ++i) {
        AlmState plus = s, minus = s;
        plus.theta[i] += h;
        minus.theta[i] -= h;
        fd[i] = (modified_lagrangian(plus, obs, p) - modified_lagrangian(minus, obs, p)) / (2 * h);
      }
      worst = std::max(worst, (grad - fd).norm() / grad.norm());
    }
    o.check(worst < 1e-5, "50 gradient checks, worst relative error " + sci(worst));
  }
  // PSD samples of the implied moment matrix.
  {
    std::mt19937_64 rng(11);
    int bad = 0, samples = 0;
    for (const Shape sh : {Shape({2, 2, 2}), Shape({5, 5, 5}), Shape({15, 15, 15})}) {
      const AlmState s = random_alm_state(sh, 2, 2, rng);
      std::uniform_int_distribution<Index> pick(0, sh.numel());
      for (int i = 0; i < 500; ++i, ++samples) {
        const Index a = pick(rng), b = pick(rng);
        const double xaa = s.moment_entry(a, a), xbb = s.moment_entry(b, b), xab = s.moment_entry(a, b);
        if (xaa < 0 || xaa * xbb - xab * xab < -1e-10 * std::max(1.0, xaa * xbb)) ++bad;
        // v^T X v >= 0 for a random 2-sparse v.
        const double c = std::normal_distribution<double>()(rng);
        if (xaa + 2 * c * xab + c * c * xbb < -1e-10 * std::max(1.0, xaa + c * c * xbb)) ++bad;
      }
    }
    o.check(bad == 0, std::to_string(samples) + " sampled 2x2 minors and quadratic forms nonnegative");
  }
  // Noisy [5]^3 benchmarks against SDP-N.
  {
    const Shape s({5, 5, 5});
    for (Index w : {40, 60, 90})
      for (int trial = 0; trial < 3; ++trial) {
        std::mt19937_64 rng(stream_seed(1000 + w, trial));
        const DenseTensor t = expand(uniform_factors(s, 0.5, rng));
        ObservedTensor obs = restrict(t, Mask(s, sample_subset(s.numel(), w, rng)));
        std::normal_distribution<double> noise(0.0, 0.1);
        for (auto& v : obs.values) v += noise(rng);
        SdpOptions so;
        so.tol = 1e-6;
        so.max_iters = 20000;
        const double convex = relative_distance(readout(solve_sdp(build_sdp_noisy(obs, 100.0), so), s), t);
        AlmParams ap;
        ap.seed = trial;
        const double alm = relative_distance(alm_solve(obs, ap).tensor, t);
        o.check(alm <= 2.0 * convex, "|Omega|=" + std::to_string(w) + " trial " + std::to_string(trial) +
                                         ": ALM " + fmt(alm, 4) + " vs SDP-N " + fmt(convex, 4));
      }
  }
  // Medium scale.
  {
    const Shape s({15, 15, 15});
    std::mt19937_64 rng(15);
    const DenseTensor t = expand(uniform_factors(s, 0.5, rng));
    ObservedTensor obs = restrict(t, Mask(s, sample_subset(s.numel(), 1000, rng)));
    std::normal_distribution<double> noise(0.0, 0.1);
    for (auto& v : obs.values) v += noise(rng);
    const auto start = std::chrono::steady_clock::now();
    const AlmResult r = alm_solve(obs, AlmParams{});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    const double peak_mb = ru.ru_maxrss / 1024.0;
    const double dense_mb = 8.0 * (s.numel() + 1.0) * (s.numel() + 1.0) / (1024.0 * 1024.0);
    o.check(secs < 1800, "[15]^3 default run, 1000 observations: " + fmt(secs, 1) + " s, relative distance " +
                             fmt(relative_distance(r.tensor, t), 4));
    o.check(peak_mb < dense_mb, "peak memory " + fmt(peak_mb, 1) + " MB below one dense moment matrix (" +
                                    fmt(dense_mb, 1) + " MB)");
  }
}

double eps_duplicate(const std::vector<int>& n, double C, std::size_t i) {
  // i is the 1-based axis index, 2 <= i <= d.
  using std::log, std::pow, std::sqrt;
  if (i == 2) {
    const double n1 = n[0], n2 = n[1];
    return 2.0 * std::max(pow(n2, -C * C * log(n2) / 4.0), pow(n2, -(C - 1.0) * sqrt(n2 / n1)));
  }
  const double ni = n[i - 1], prev = n[i - 2];
  return 2.0 * std::max((i - 1.0) * pow(ni, 1.0 - log(ni)), pow(ni, 1.0 - (i - 1.0) * prev / sqrt(ni)));
}

void criterion11(Outcome& o) {
  const std::vector<std::vector<int>> shapes{{3, 3},      {10, 10},    {50, 60},     {200, 200},  {4, 5, 6},
                                             {9, 16, 25}, {5, 5, 5},   {3, 4, 5, 6}, {6, 7, 8, 9}, {10, 20}};
  const std::vector<double> Cs{1.2, 2.0, 3.5, 6.0, 10.0};
  int points = 0;
  double worst = 0.0;
  for (const auto& n : shapes)
    for (double C : Cs) {
      const BoundResult r = a_propagation_bound({Shape(n), C});
      for (std::size_t i = 2; i <= n.size(); ++i)
        worst = std::max(worst, std::abs(r.eps[i - 2] - eps_duplicate(n, C, i)));
      double p = C / std::sqrt(static_cast<double>(Shape(n).numel()));
      for (std::size_t i = 1; i < n.size(); ++i) p *= std::log(n[i]);
      worst = std::max(worst, std::abs(r.p - p));
      ++points;
    }
  o.check(points == 50 && worst <= 1e-12,
          std::to_string(points) + " grid points, largest deviation " + sci(worst));

  const Shape s({20, 20});
  const BoundResult b = a_propagation_bound({s, 2.0});
  const RateEstimate rate = empirical_a_propagation_rate(s, b.p, 500, 11);
  o.check(b.applicable && rate.rate >= 1.0 - b.eps[0],
          "[20]x[20] at p=" + fmt(b.p, 4) + ": empirical rate " + fmt(rate.rate, 3) + " >= 1 - eps_2 = " +
              fmt(1.0 - b.eps[0], 3));
}

void criterion12(Outcome& o) {
  {
    std::mt19937_64 rng(12);
    const Shape s({4, 4, 4});
    const DenseTensor t = expand(uniform_factors(s, 0.5, rng));
    GreedyOptions g;
    // The trace term shrinks the first component by about 1/C.
    g.C = 1e4;
    const GreedyResult r = greedy_lowrank(restrict(t, Mask::full(s)), 2, g);
    const double ratio = r.components.size() == 2 ? r.components[1].norm() / t.norm() : 1.0;
    o.check(ratio < 1e-3, "rank-one input, C=1e4: second component " + sci(ratio) + " of the norm");
  }
  {
    const auto half = [](double a, double b, double c, double d) -> Eigen::VectorXd {
      return Eigen::Vector4d(a, b, c, d) / 2;
    };
    RankOneFactors f, h;
    f.factors = {half(1, 1, 1, 1), half(1, 1, 1, 1), half(1, 1, 1, 1)};
    h.factors = {half(1, -1, 1, -1), half(1, 1, -1, -1), half(1, -1, -1, 1)};
    DenseTensor t = expand(f);
    t.values() += 0.5 * expand(h).values();
    const GreedyResult r = greedy_lowrank(restrict(t, Mask::full(t.shape())), 2);
    const double d = relative_distance(r.tensor, t);
    o.check(d < 0.05, "separable rank-two input at r=2: relative distance " + fmt(d, 5));
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, void (*)(Outcome&)>> criteria{
      {1, {"condition tables, fixed cardinality", criterion1}},
      {2, {"condition tables, all subsets", criterion2}},
      {3, {"condition tables, sampled unique masks", criterion3}},
      {4, {"linear-system example", criterion4}},
      {5, {"tightness on SR masks", criterion5}},
      {6, {"plain versus weighted relaxation", criterion6}},
      {7, {"matrix tightness equals connectivity", criterion7}},
      {8, {"noisy stability trend", criterion8}},
      {9, {"dominance over alternating minimization", criterion9}},
      {10, {"ALM solver suite", criterion10}},
      {11, {"A-propagation bound", criterion11}},
      {12, {"greedy low-rank sanity", criterion12}},
  };
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::stoi(argv[i]));
  if (which.empty())
    for (const auto& [k, v] : criteria) which.push_back(k);

  bool all = true;
  for (int k : which) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      it->second.second(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << o.log.str();
    std::cout << "criterion " << k << " (" << it->second.first << "): " << (o.pass ? "PASS" : "FAIL") << " ["
              << fmt(secs, 1) << " s]" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
