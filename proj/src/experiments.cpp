#include "r1tc/experiments.hpp"

#include "r1tc/exact.hpp"
#include "r1tc/gf2.hpp"
#include "r1tc/small_mask.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace r1tc {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ index);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Runs fn(begin, end) over contiguous chunks of [0, n) on `threads` workers.
// The first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_chunks(std::uint64_t n, int threads, Fn&& fn) {
  const std::uint64_t workers = std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(n, 1));
  if (workers <= 1) {
    fn(std::uint64_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t b = n * w / workers, e = n * (w + 1) / workers;
    pool.emplace_back([&, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

// The m-subset of colexicographic rank r, as a bit set.
std::uint64_t unrank_colex(std::uint64_t r, int m) {
  std::uint64_t bits = 0;
  for (int i = m; i >= 1; --i) {
    int c = i - 1;
    while (binomial(c + 1, i) <= r) ++c;
    bits |= std::uint64_t{1} << c;
    r -= binomial(c, i);
  }
  return bits;
}

// Next set with the same popcount in increasing numeric order.
std::uint64_t next_combination(std::uint64_t v) {
  const std::uint64_t t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

void tally(std::array<std::uint64_t, 5>& c, const ConditionProfile& p) {
  c[0] += p.unique;
  c[1] += p.gs;
  c[2] += p.s;
  c[3] += p.sr;
  c[4] += p.a;
}

}  // namespace

// ---------------------------------------------------------------------------

MaskDistribution MaskDistribution::bernoulli(Shape s, double p, std::uint64_t seed) {
  MaskDistribution d;
  d.kind = Kind::bernoulli;
  d.shape = std::move(s);
  d.p = p;
  d.seed = seed;
  return d;
}

MaskDistribution MaskDistribution::fixed_cardinality(Shape s, Index m, std::uint64_t seed) {
  MaskDistribution d;
  d.kind = Kind::fixed_cardinality;
  d.shape = std::move(s);
  d.m = m;
  d.seed = seed;
  return d;
}

MaskDistribution MaskDistribution::slices(Shape s, int axis, std::vector<int> kept) {
  MaskDistribution d;
  d.kind = Kind::slice;
  d.shape = std::move(s);
  d.axis = axis;
  d.kept_slices = std::move(kept);
  return d;
}

MaskDistribution MaskDistribution::rectangle_hole(Shape s, std::vector<int> origin,
                                                  std::vector<int> extents) {
  MaskDistribution d;
  d.kind = Kind::rectangle_hole;
  d.shape = std::move(s);
  d.origin = std::move(origin);
  d.extents = std::move(extents);
  return d;
}

void MaskDistribution::validate() const {
  if (shape.order() == 0) throw std::invalid_argument("mask distribution: empty shape");
  switch (kind) {
    case Kind::bernoulli:
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mask distribution: p must lie in [0, 1]");
      break;
    case Kind::fixed_cardinality:
      if (m < 0 || m > shape.numel())
        throw std::invalid_argument("mask distribution: cardinality must lie in [0, N]");
      break;
    case Kind::slice:
      if (axis < 0 || axis >= shape.order()) throw std::invalid_argument("mask distribution: bad slice axis");
      for (int v : kept_slices)
        if (v < 0 || v >= shape.dim(axis)) throw std::invalid_argument("mask distribution: slice out of range");
      break;
    case Kind::rectangle_hole:
      if (static_cast<int>(origin.size()) != shape.order() ||
          static_cast<int>(extents.size()) != shape.order())
        throw std::invalid_argument("mask distribution: rectangle needs one origin and extent per axis");
      for (int k = 0; k < shape.order(); ++k)
        if (origin[k] < 0 || extents[k] < 0 || origin[k] + extents[k] > shape.dim(k))
          throw std::invalid_argument("mask distribution: rectangle outside the grid");
      break;
  }
}

std::vector<Index> sample_subset(Index n, Index m, std::mt19937_64& rng) {
  if (m < 0 || m > n) throw std::invalid_argument("sample_subset: need 0 <= m <= n");
  std::unordered_set<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(m) * 2);
  for (Index j = n - m; j < n; ++j) {
    const Index t = std::uniform_int_distribution<Index>(0, j)(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<Index> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

Mask sample_mask(const MaskDistribution& dist) {
  std::mt19937_64 rng(dist.seed);
  return sample_mask(dist, rng);
}

Mask sample_mask(const MaskDistribution& dist, std::mt19937_64& rng) {
  dist.validate();
  const Shape& s = dist.shape;
  std::vector<Index> cells;
  switch (dist.kind) {
    case MaskDistribution::Kind::bernoulli: {
      std::bernoulli_distribution b(dist.p);
      for (Index c = 0; c < s.numel(); ++c)
        if (b(rng)) cells.push_back(c);
      break;
    }
    case MaskDistribution::Kind::fixed_cardinality:
      cells = sample_subset(s.numel(), dist.m, rng);
      break;
    case MaskDistribution::Kind::slice: {
      std::vector<char> keep(s.dim(dist.axis), 0);
      for (int v : dist.kept_slices) keep[v] = 1;
      for (Index c = 0; c < s.numel(); ++c)
        if (keep[s.coord(c, dist.axis)]) cells.push_back(c);
      break;
    }
    case MaskDistribution::Kind::rectangle_hole:
      for (Index c = 0; c < s.numel(); ++c) {
        bool inside = true;
        for (int k = 0; k < s.order() && inside; ++k) {
          const int v = s.coord(c, k);
          inside = v >= dist.origin[k] && v < dist.origin[k] + dist.extents[k];
        }
        if (!inside) cells.push_back(c);
      }
      break;
  }
  return Mask(s, std::move(cells));
}

// ---------------------------------------------------------------------------

Population Population::cardinality(Index m) {
  Population p;
  p.kind = Kind::cardinality;
  p.m = m;
  return p;
}

Population Population::all_subsets() {
  Population p;
  p.kind = Kind::all_subsets;
  return p;
}

Population Population::sampled(Index count, bool filter_unique, std::uint64_t seed, Index m) {
  Population p;
  p.kind = Kind::sampled;
  p.count = count;
  p.filter_unique = filter_unique;
  p.seed = seed;
  p.m = m;
  return p;
}

namespace {

Index minimal_cardinality(const Shape& s) { return s.dim_sum() - s.order() + 1; }

}  // namespace

std::string Population::describe(const Shape& s) const {
  switch (kind) {
    case Kind::cardinality: return "cardinality=" + std::to_string(m);
    case Kind::all_subsets: return "all-subsets";
    case Kind::sampled: {
      const Index card = m > 0 ? m : minimal_cardinality(s);
      return "sampled:cardinality=" + std::to_string(card) + (filter_unique ? ":unique" : "");
    }
  }
  return "?";
}

const char* to_string(Condition c) {
  switch (c) {
    case Condition::unique: return "unique";
    case Condition::gs: return "GS";
    case Condition::s: return "S";
    case Condition::sr: return "SR";
    case Condition::a: return "A";
  }
  return "?";
}

double ConditionTable::percent(Condition c) const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(counts[static_cast<int>(c)]) / static_cast<double>(total);
}

double ConditionTable::std_error(Condition c) const {
  if (!sampled || total == 0) return 0.0;
  const double f = percent(c) / 100.0;
  return 100.0 * std::sqrt(f * (1.0 - f) / static_cast<double>(total));
}

bool ConditionTable::chain_monotone() const {
  for (int i = 1; i < 5; ++i)
    if (counts[i] > counts[i - 1]) return false;
  return true;
}

void write_csv(std::ostream& out, const ConditionTable& t, bool header) {
  if (header) out << "shape,population,condition,count,total,percent\n";
  for (Condition c : kConditions) {
    std::ostringstream pct;
    pct << std::fixed << std::setprecision(2) << t.percent(c);
    out << t.shape.to_string() << ',' << t.population << ',' << to_string(c) << ','
        << t.counts[static_cast<int>(c)] << ',' << t.total << ',' << pct.str() << '\n';
  }
}

ConditionTable enumerate_condition_table(const Shape& shape, const Population& pop, int threads) {
  const Index n_cells = shape.numel();
  ConditionTable table;
  table.shape = shape;
  table.population = pop.describe(shape);
  std::mutex merge;
  auto merge_counts = [&](const std::array<std::uint64_t, 5>& local) {
    std::lock_guard<std::mutex> lock(merge);
    for (int i = 0; i < 5; ++i) table.counts[i] += local[i];
  };

  if (pop.kind != Population::Kind::sampled) {
    if (n_cells > 63) throw std::invalid_argument("enumerate_condition_table: exhaustive tables need at most 63 cells");
    const SmallMaskAnalyzer analyzer(shape);
    if (pop.kind == Population::Kind::cardinality) {
      if (pop.m < 1 || pop.m > n_cells)
        throw std::invalid_argument("enumerate_condition_table: cardinality must lie in [1, N]");
      table.total = binomial(n_cells, pop.m);
    } else {
      table.total = (std::uint64_t{1} << n_cells) - 1;
    }
    if (table.total > pop.budget)
      throw std::invalid_argument("enumerate_condition_table: population of " + std::to_string(table.total) +
                                  " masks exceeds the budget of " + std::to_string(pop.budget));
    const int m = static_cast<int>(pop.m);
    const bool by_card = pop.kind == Population::Kind::cardinality;
    parallel_chunks(table.total, threads, [&](std::uint64_t b, std::uint64_t e) {
      std::array<std::uint64_t, 5> local{};
      std::uint64_t bits = by_card ? unrank_colex(b, m) : b + 1;
      for (std::uint64_t r = b; r < e; ++r) {
        tally(local, analyzer.profile(bits));
        bits = by_card ? (r + 1 < e ? next_combination(bits) : 0) : bits + 1;
      }
      merge_counts(local);
    });
    return table;
  }

  // Sampled population: task i owns stream (seed, i) and draws until it keeps a mask.
  const Index card = pop.m > 0 ? pop.m : minimal_cardinality(shape);
  if (pop.count < 0) throw std::invalid_argument("enumerate_condition_table: negative sample count");
  if (card > n_cells) throw std::invalid_argument("enumerate_condition_table: cardinality exceeds N");
  table.sampled = true;
  table.total = static_cast<std::uint64_t>(pop.count);
  const bool small = n_cells <= 64;
  std::optional<SmallMaskAnalyzer> analyzer;
  if (small) analyzer.emplace(shape);
  std::atomic<std::uint64_t> draws{0};
  parallel_chunks(table.total, threads, [&](std::uint64_t b, std::uint64_t e) {
    std::array<std::uint64_t, 5> local{};
    std::uint64_t local_draws = 0;
    for (std::uint64_t i = b; i < e; ++i) {
      std::mt19937_64 rng(stream_seed(pop.seed, i));
      for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt >= pop.max_draw_factor)
          throw std::invalid_argument("enumerate_condition_table: no unique-recovery mask after " +
                                      std::to_string(attempt) + " draws");
        ++local_draws;
        const std::vector<Index> cells = sample_subset(n_cells, card, rng);
        if (small) {
          const auto bits = SmallMaskAnalyzer::encode(Mask(shape, cells));
          if (pop.filter_unique && !analyzer->unique(bits)) continue;
          tally(local, analyzer->profile(bits));
        } else {
          const Mask mask(shape, cells);
          if (pop.filter_unique && !unique_recovery(mask)) continue;
          tally(local, condition_profile(mask));
        }
        break;
      }
    }
    draws += local_draws;
    merge_counts(local);
  });
  table.draws = draws;
  return table;
}

// ---------------------------------------------------------------------------

BoundResult a_propagation_bound(const BoundParams& params) {
  BoundResult r;
  const Shape& s = params.shape;
  const int d = s.order();
  const double C = params.C;
  auto n = [&](int i) { return static_cast<double>(s.dim(i - 1)); };  // 1-based axis

  r.c_min = 2.0;
  for (int i = 3; i <= d; ++i) r.c_min /= 1.0 - std::pow(n(i), -std::sqrt(n(i)));
  double logs = 1.0;
  for (int i = 2; i <= d; ++i) logs *= std::log(n(i));
  r.p = d >= 2 ? C / std::sqrt(static_cast<double>(s.numel())) * logs : 0.0;

  if (d >= 2) {
    const double n1 = n(1), n2 = n(2);
    r.eps.push_back(2.0 * std::max(std::pow(n2, -C * C * std::log(n2) / 4.0),
                                   std::pow(n2, -(C - 1.0) * std::sqrt(n2 / n1))));
  }
  for (int i = 3; i <= d; ++i) {
    const double ni = n(i), prev = n(i - 1);
    r.eps.push_back(2.0 * std::max((i - 1) * std::pow(ni, 1.0 - std::log(ni)),
                                   std::pow(ni, 1.0 - (i - 1) * (prev / std::sqrt(ni)))));
  }
  double sum = 0.0;
  for (double e : r.eps) sum += e;
  r.success = std::clamp(1.0 - sum, 0.0, 1.0);

  auto fail = [&](std::string why) {
    if (r.violated.empty()) r.violated = std::move(why);
  };
  if (d < 2) fail("order d >= 2");
  for (int i = 1; i <= d; ++i)
    if (i > 1 && n(i) < n(i - 1)) fail("dimensions sorted ascending");
  if (d >= 1 && n(1) < 3) fail("n_1 >= 3");
  for (int i = 3; i <= d; ++i)
    if (n(i - 1) / std::sqrt(n(i)) < 2.0 / (i - 1))
      fail("n_" + std::to_string(i - 1) + " / sqrt(n_" + std::to_string(i) + ") >= 2/" + std::to_string(i - 1));
  if (!(C >= r.c_min)) fail("C >= " + std::to_string(r.c_min));
  if (r.p > 1.0) fail("p <= 1");
  r.applicable = r.violated.empty();
  return r;
}

RateEstimate empirical_a_propagation_rate(const Shape& shape, double p, int trials, std::uint64_t seed,
                                          int threads) {
  if (trials < 1) throw std::invalid_argument("empirical_a_propagation_rate: trials must be at least 1");
  const MaskDistribution dist = MaskDistribution::bernoulli(shape, p);
  dist.validate();
  std::atomic<int> hits{0};
  parallel_chunks(static_cast<std::uint64_t>(trials), threads, [&](std::uint64_t b, std::uint64_t e) {
    int local = 0;
    for (std::uint64_t i = b; i < e; ++i) {
      std::mt19937_64 rng(stream_seed(seed, i));
      local += a_propagation(sample_mask(dist, rng)).holds;
    }
    hits += local;
  });
  RateEstimate r;
  r.trials = trials;
  r.rate = static_cast<double>(hits) / trials;
  r.std_error = std::sqrt(r.rate * (1.0 - r.rate) / trials);
  return r;
}

// ---------------------------------------------------------------------------

const char* to_string(CurveMethod m) {
  switch (m) {
    case CurveMethod::sdp_e: return "sdp-e";
    case CurveMethod::sdp_ew: return "sdp-ew";
    case CurveMethod::sdp_n: return "sdp-n";
    case CurveMethod::alm: return "alm";
    case CurveMethod::alt_min: return "alt-min";
    case CurveMethod::exact_la: return "exact-la";
  }
  return "?";
}

CurveMethod parse_curve_method(const std::string& s) {
  for (CurveMethod m : {CurveMethod::sdp_e, CurveMethod::sdp_ew, CurveMethod::sdp_n, CurveMethod::alm,
                        CurveMethod::alt_min, CurveMethod::exact_la})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown curve method '" + s + "'");
}

void CurveDescriptor::validate() const {
  if (shape.order() < 2) throw std::invalid_argument("curve: shape needs at least two axes");
  if (trials < 0) throw std::invalid_argument("curve: trials must be nonnegative");
  if (methods.empty()) throw std::invalid_argument("curve: no methods");
  if (omega.empty()) throw std::invalid_argument("curve: empty |Omega| grid");
  for (Index m : omega)
    if (m < 1 || m > shape.numel()) throw std::invalid_argument("curve: |Omega| must lie in [1, N]");
  if (deltas.empty()) throw std::invalid_argument("curve: empty noise grid");
  for (double d : deltas)
    if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("curve: noise levels must be finite and >= 0");
  if (!(C > 0.0)) throw std::invalid_argument("curve: C must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("curve: theta must lie in (0, 1)");
  for (CurveMethod m : methods) {
    const bool exact_only = m == CurveMethod::sdp_e || m == CurveMethod::sdp_ew || m == CurveMethod::exact_la;
    if (protocol == Protocol::noisy && exact_only)
      throw std::invalid_argument(std::string("curve: method ") + to_string(m) + " needs the exact protocol");
  }
  if (protocol == Protocol::exact)
    for (double d : deltas)
      if (d != 0.0) throw std::invalid_argument("curve: the exact protocol is noiseless");
  alm.validate();
}

CurveDescriptor curve_descriptor_from_json(const nlohmann::json& j) {
  CurveDescriptor d;
  try {
    const std::string protocol = j.value("protocol", "exact");
    if (protocol == "exact") {
      d.protocol = CurveDescriptor::Protocol::exact;
    } else if (protocol == "noisy") {
      d.protocol = CurveDescriptor::Protocol::noisy;
    } else {
      throw std::invalid_argument("curve: unknown protocol '" + protocol + "'");
    }
    if (!j.contains("shape")) throw std::invalid_argument("curve: missing shape");
    d.shape = j.at("shape").is_string() ? parse_shape(j.at("shape").get<std::string>())
                                        : Shape(j.at("shape").get<std::vector<int>>());
    d.omega = j.at("omega").get<std::vector<Index>>();
    if (j.contains("deltas")) d.deltas = j.at("deltas").get<std::vector<double>>();
    d.trials = j.value("trials", d.trials);
    for (const auto& m : j.at("methods")) d.methods.push_back(parse_curve_method(m.get<std::string>()));
    d.seed = j.value("seed", d.seed);
    d.C = j.value("C", d.C);
    d.theta = j.value("theta", d.theta);
    d.solved_threshold = j.value("solved_threshold", d.solved_threshold);
    d.sdp.tol = j.value("sdp_tol", d.sdp.tol);
    d.sdp.max_iters = j.value("sdp_max_iters", d.sdp.max_iters);
    d.alt_min.restarts = j.value("alt_min_restarts", d.alt_min.restarts);
    d.alm.num_batches = j.value("alm_num_batches", d.alm.num_batches);
    d.alm.batch1 = j.value("alm_batch1", d.alm.batch1);
    d.alm.batch2 = j.value("alm_batch2", d.alm.batch2);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("curve descriptor: ") + e.what());
  }
  d.validate();
  return d;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || v[lo] == v[hi]) return v[lo];
  return v[lo] + frac * (v[hi] - v[lo]);
}

namespace {

constexpr double kFailed = std::numeric_limits<double>::infinity();

// x = M(0, 1:) / M(0, 0). Unconverged iterates are read the same way; only
// the distance decides whether they count.
DenseTensor sdp_readout(const SdpSolution& sol, const Shape& s) {
  Eigen::VectorXd x = sol.moment.row(0).tail(sol.moment.rows() - 1).transpose();
  if (sol.moment(0, 0) > 0.0) x /= sol.moment(0, 0);
  return DenseTensor(s, x);
}

double run_method(CurveMethod m, const CurveDescriptor& desc, const ObservedTensor& obs,
                  const DenseTensor& truth, std::uint64_t seed) {
  try {
    DenseTensor out;
    switch (m) {
      case CurveMethod::exact_la: {
        ExactCompletionResult r = complete_exact(obs);
        if (!r.tensor) return kFailed;
        out = std::move(*r.tensor);
        break;
      }
      case CurveMethod::sdp_e:
      case CurveMethod::sdp_ew: {
        std::optional<WeightVector> w;
        if (m == CurveMethod::sdp_ew && propagate_s(obs.mask).full()) w = generate_weights(obs.mask, desc.theta);
        const SdpSolution sol = solve_sdp(build_sdp_exact(obs, w), desc.sdp);
        if (sol.status == SdpStatus::infeasible) return kFailed;
        out = sdp_readout(sol, obs.shape());
        break;
      }
      case CurveMethod::sdp_n: {
        const SdpSolution sol = solve_sdp(build_sdp_noisy(obs, desc.C), desc.sdp);
        if (sol.status == SdpStatus::infeasible) return kFailed;
        out = sdp_readout(sol, obs.shape());
        break;
      }
      case CurveMethod::alm: {
        AlmParams p = desc.alm;
        p.seed = seed;
        out = alm_solve(obs, p).tensor;
        break;
      }
      case CurveMethod::alt_min: {
        AltMinOptions o = desc.alt_min;
        o.seed = seed;
        AltMinResult r = alternating_min(obs, 1, o);
        if (r.diverged) return kFailed;
        out = std::move(r.tensor);
        break;
      }
    }
    const double dist = relative_distance(out, truth);
    return std::isfinite(dist) ? dist : kFailed;
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    return kFailed;
  }
}

}  // namespace

CurveTable recovery_curve(const CurveDescriptor& desc, int threads) {
  desc.validate();
  CurveTable table;
  const Shape& s = desc.shape;
  const bool noisy = desc.protocol == CurveDescriptor::Protocol::noisy;
  const std::size_t n_methods = desc.methods.size();
  const std::size_t per_point = static_cast<std::size_t>(desc.trials);
  const std::size_t tasks = desc.omega.size() * desc.deltas.size() * per_point;
  // metric[task * n_methods + method]
  std::vector<double> metric(tasks * n_methods, kFailed);

  parallel_chunks(tasks, threads, [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t task = b; task < e; ++task) {
      const std::size_t oi = task / (desc.deltas.size() * per_point);
      const std::size_t di = task / per_point % desc.deltas.size();
      std::mt19937_64 rng(stream_seed(desc.seed, task));
      std::uniform_real_distribution<double> factor(desc.factor_low(), 1.0);
      RankOneFactors f;
      for (int k = 0; k < s.order(); ++k) {
        Eigen::VectorXd v(s.dim(k));
        for (auto& x : v) x = factor(rng);
        f.factors.push_back(std::move(v));
      }
      const DenseTensor truth = expand(f, s);
      ObservedTensor obs = restrict(truth, Mask(s, sample_subset(s.numel(), desc.omega[oi], rng)));
      if (noisy) {
        std::normal_distribution<double> noise(0.0, desc.deltas[di]);
        for (auto& v : obs.values) v += noise(rng);
      }
      const std::uint64_t method_seed = rng();
      for (std::size_t mi = 0; mi < n_methods; ++mi)
        metric[task * n_methods + mi] = run_method(desc.methods[mi], desc, obs, truth, method_seed);
    }
  });

  for (std::size_t oi = 0; oi < desc.omega.size(); ++oi)
    for (std::size_t di = 0; di < desc.deltas.size(); ++di)
      for (std::size_t mi = 0; mi < n_methods; ++mi) {
        CurveSummary sum{desc.methods[mi], desc.omega[oi], desc.deltas[di]};
        std::vector<double> vals;
        for (std::size_t t = 0; t < per_point; ++t) {
          const std::size_t task = (oi * desc.deltas.size() + di) * per_point + t;
          const double v = metric[task * n_methods + mi];
          table.rows.push_back({desc.methods[mi], desc.omega[oi], desc.deltas[di], static_cast<int>(t), v});
          vals.push_back(v);
          sum.solved += v < desc.solved_threshold;
        }
        sum.trials = static_cast<int>(per_point);
        if (per_point == 0) continue;
        sum.success_rate = static_cast<double>(sum.solved) / sum.trials;
        sum.median = quantile(vals, 0.5);
        sum.q45 = quantile(vals, 0.45);
        sum.q55 = quantile(vals, 0.55);
        table.summary.push_back(sum);
      }
  return table;
}

void write_csv(std::ostream& out, const CurveTable& t) {
  out << "method,omega,delta,trial,metric\n";
  for (const auto& r : t.rows)
    out << to_string(r.method) << ',' << r.omega << ',' << r.delta << ',' << r.trial << ',' << r.metric << '\n';
}

void write_summary_csv(std::ostream& out, const CurveTable& t) {
  out << "method,omega,delta,trials,solved,success_rate,median,q45,q55\n";
  for (const auto& s : t.summary)
    out << to_string(s.method) << ',' << s.omega << ',' << s.delta << ',' << s.trials << ',' << s.solved << ','
        << s.success_rate << ',' << s.median << ',' << s.q45 << ',' << s.q55 << '\n';
}

// ---------------------------------------------------------------------------

namespace {

// Skips whitespace and '#' comments between PPM header tokens.
int read_header_int(std::istream& in, const std::string& path) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v = -1;
  if (!(in >> v)) throw std::runtime_error(path + ": malformed PPM header");
  return v;
}

}  // namespace

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image '" + path + "'");
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (!in || magic != "P6") throw std::runtime_error(path + ": not a binary PPM (P6) file");
  Image img;
  img.width = read_header_int(in, path);
  img.height = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (img.width <= 0 || img.height <= 0) throw std::runtime_error(path + ": bad image size");
  if (maxval != 255) throw std::runtime_error(path + ": only 8-bit PPM (maxval 255) is supported");
  if (!std::isspace(in.get())) throw std::runtime_error(path + ": malformed PPM header");
  img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.rgb.size()))
    throw std::runtime_error(path + ": truncated pixel data");
  return img;
}

void write_ppm(const std::string& path, const Image& img) {
  if (img.rgb.size() != static_cast<std::size_t>(img.width) * img.height * 3)
    throw std::invalid_argument("write_ppm: pixel buffer does not match the size");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image '" + path + "'");
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!out) throw std::runtime_error("failed writing image '" + path + "'");
}

DenseTensor image_to_tensor(const Image& img) {
  DenseTensor t(Shape({img.height, img.width, 3}));
  for (std::size_t i = 0; i < img.rgb.size(); ++i) t(static_cast<Index>(i)) = img.rgb[i] / 255.0;
  return t;
}

Image tensor_to_image(const DenseTensor& t) {
  const Shape& s = t.shape();
  if (s.order() != 3 || s.dim(2) != 3) throw std::invalid_argument("tensor_to_image: shape must be h x w x 3");
  Image img;
  img.height = s.dim(0);
  img.width = s.dim(1);
  img.rgb.resize(static_cast<std::size_t>(s.numel()));
  for (Index i = 0; i < s.numel(); ++i)
    img.rgb[i] = static_cast<std::uint8_t>(std::lround(std::clamp(t(i), 0.0, 1.0) * 255.0));
  return img;
}

PixelMaskSpec PixelMaskSpec::parse(const std::string& text, std::uint64_t seed) {
  PixelMaskSpec spec;
  spec.seed = seed;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto bad = [&] { return std::invalid_argument("bad mask spec '" + text + "'"); };
  if (kind == "none") {
    if (!args.empty()) throw bad();
  } else if (kind == "uniform") {
    spec.kind = Kind::uniform;
    try {
      std::size_t used = 0;
      spec.missing_fraction = std::stod(args, &used);
      if (used != args.size()) throw bad();
    } catch (const std::logic_error&) {
      throw bad();
    }
    if (!(spec.missing_fraction >= 0.0 && spec.missing_fraction < 1.0)) throw bad();
  } else if (kind == "rect") {
    spec.kind = Kind::rectangle;
    std::istringstream in(args);
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(in >> spec.row >> c1 >> spec.col >> c2 >> spec.height >> c3 >> spec.width) || c1 != ',' ||
        c2 != ',' || c3 != ',' || !(in >> std::ws).eof())
      throw bad();
  } else {
    throw bad();
  }
  return spec;
}

Mask pixel_mask(int height, int width, const PixelMaskSpec& spec) {
  const Shape s({height, width, 3});
  switch (spec.kind) {
    case PixelMaskSpec::Kind::none: return Mask::full(s);
    case PixelMaskSpec::Kind::rectangle:
      if (spec.row < 0 || spec.col < 0 || spec.height < 0 || spec.width < 0 || spec.row + spec.height > height ||
          spec.col + spec.width > width)
        throw std::invalid_argument("pixel_mask: rectangle outside the image");
      return sample_mask(MaskDistribution::rectangle_hole(s, {spec.row, spec.col, 0}, {spec.height, spec.width, 3}));
    case PixelMaskSpec::Kind::uniform: {
      const Index pixels = static_cast<Index>(height) * width;
      const Index missing = std::llround(spec.missing_fraction * static_cast<double>(pixels));
      std::mt19937_64 rng(spec.seed);
      std::vector<Index> cells;
      for (Index p : sample_subset(pixels, pixels - missing, rng))
        for (Index c = 0; c < 3; ++c) cells.push_back(3 * p + c);
      return Mask(s, std::move(cells));
    }
  }
  return Mask(s);
}

InpaintResult inpaint_tensor(const DenseTensor& original, const PixelMaskSpec& spec, int r,
                             const GreedyOptions& opts) {
  if (r < 1) throw std::invalid_argument("inpaint: rank must be at least 1");
  const Shape& s = original.shape();
  if (s.order() != 3 || s.dim(2) != 3) throw std::invalid_argument("inpaint: tensor shape must be h x w x 3");
  InpaintResult res;
  res.mask = pixel_mask(s.dim(0), s.dim(1), spec);
  if (res.mask.empty()) throw std::invalid_argument("inpaint: every pixel is missing");
  res.greedy = greedy_lowrank(restrict(original, res.mask), r, opts);
  res.completed = res.greedy.tensor;
  res.completed.values() = res.completed.values().cwiseMax(0.0).cwiseMin(1.0);
  res.image = tensor_to_image(res.completed);
  res.relative_distance = relative_distance(res.completed, original);
  return res;
}

InpaintResult inpaint_image(const std::string& path, const PixelMaskSpec& spec, int r, const GreedyOptions& opts,
                            const std::string& out_path) {
  if (r < 1) throw std::invalid_argument("inpaint: rank must be at least 1");
  InpaintResult res = inpaint_tensor(image_to_tensor(read_ppm(path)), spec, r, opts);
  if (!out_path.empty()) write_ppm(out_path, res.image);
  return res;
}

}  // namespace r1tc
