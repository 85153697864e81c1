#include "cli.hpp"

#include "r1tc/completion.hpp"
#include "r1tc/exact.hpp"
#include "r1tc/experiments.hpp"
#include "r1tc/io.hpp"
#include "r1tc/sdp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace r1tc {
namespace {

using nlohmann::json;

// Numerical failure that should end with exit code 2.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out;
  std::string format = "json";
};

void emit_json(std::ostream& out, const json& j, const std::string& format) {
  if (format == "human") {
    for (const auto& [k, v] : j.items()) out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
}

// Writes to the --out file when given, else to the stream.
template <class Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  fn(f);
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

json profile_json(const ConditionProfile& p) {
  return {{"unique", p.unique}, {"gs", p.gs}, {"s", p.s}, {"sr", p.sr}, {"a", p.a}};
}

json report_json(const CompletionReport& r) {
  json j;
  j["conditions"] = profile_json(r.conditions);
  if (r.tight) j["tight"] = *r.tight;
  if (r.relative_distance) j["relative_distance"] = *r.relative_distance;
  j["weighted_retry"] = r.weighted_retry;
  j["diagnostics"] = r.diagnostics;
  j["seconds"] = r.seconds;
  return j;
}

ObservedTensor load_observed(const std::string& path) {
  const MaskFile f = read_mask_file(path);
  if (!f.has_values) throw std::invalid_argument(path + ": every tuple line needs an observed value");
  return f.observed();
}

Shape shape_option(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("--shape is required");
  return parse_shape(text);
}

void add_common(CLI::App* app, Common& c, bool seed, bool threads, std::vector<std::string> formats) {
  if (seed) app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  if (threads) app->add_option("--threads", c.threads, "Worker threads, 0 for all cores")->capture_default_str();
  app->add_option("--out", c.out, "Output file (default: standard output)");
  c.format = formats.front();
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-one tensor completion: mask analysis, exact and noisy solvers, experiments."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "r1tc 1.0");

  // analyze ------------------------------------------------------------------
  Common an;
  std::string an_mask;
  auto* analyze = app.add_subcommand("analyze", "Condition profile of a mask file as JSON");
  analyze->add_option("mask", an_mask, "Mask file")->required();
  add_common(analyze, an, false, false, {"json", "human"});

  // complete-exact / complete-noisy -------------------------------------------
  struct CompleteArgs {
    Common c;
    std::string input, backend, truth, weights = "none";
    double C = 100.0, theta = 0.01, tol = 1e-7;
    long max_iters = 200000;
    int rank = 1, num_batches = 20, rounds = 25;
    Index batch1 = 150, batch2 = 300;
  };
  CompleteArgs ce, cn;
  ce.backend = "linear-algebra";
  cn.backend = "sdp";
  auto* cexact = app.add_subcommand("complete-exact", "Exact rank-one completion of an observed-tensor file");
  auto* cnoisy = app.add_subcommand("complete-noisy", "Noisy completion of an observed-tensor file");
  for (auto [cmd, a] : {std::pair{cexact, &ce}, std::pair{cnoisy, &cn}}) {
    cmd->add_option("observed", a->input, "Mask file with observed values")->required();
    add_common(cmd, a->c, true, false, {"json", "human"});
    cmd->add_option("--truth", a->truth, "Tensor file; reports the relative distance to it");
    cmd->add_option("--tol", a->tol, "SDP tolerance")->capture_default_str();
    cmd->add_option("--max-iters", a->max_iters, "SDP iteration limit")->capture_default_str();
  }
  cexact->add_option("--backend", ce.backend, "Solver")
      ->check(CLI::IsMember({"linear-algebra", "sdp", "alt-min"}))
      ->capture_default_str();
  cexact->add_option("--weights", ce.weights, "Weighted retry policy for the sdp backend")
      ->check(CLI::IsMember({"none", "auto"}))
      ->capture_default_str();
  cexact->add_option("--theta", ce.theta, "Layer weight base")->capture_default_str();
  cnoisy->add_option("--backend", cn.backend, "Solver")->check(CLI::IsMember({"sdp", "alm", "alt-min"}))->capture_default_str();
  cnoisy->add_option("--C", cn.C, "Penalty constant")->capture_default_str();
  cnoisy->add_option("--rank", cn.rank, "Rank (greedy sum of rank-one terms above 1)")->capture_default_str();
  cnoisy->add_option("--num-batches", cn.num_batches, "ALM batch draws")->capture_default_str();
  cnoisy->add_option("--rounds", cn.rounds, "ALM rounds per batch")->capture_default_str();
  cnoisy->add_option("--batch1", cn.batch1, "ALM observations per batch")->capture_default_str();
  cnoisy->add_option("--batch2", cn.batch2, "ALM symmetry constraints per batch")->capture_default_str();

  // solve-sdp ----------------------------------------------------------------
  Common ss;
  std::string ss_problem, ss_observed, ss_kind = "exact", ss_dump;
  double ss_tol = 1e-7, ss_C = 100.0, ss_theta = 0.01;
  long ss_iters = 200000;
  auto* solve = app.add_subcommand("solve-sdp", "Solve a problem dump, or build one from an observed-tensor file");
  solve->add_option("problem", ss_problem, "Problem JSON dump");
  solve->add_option("--observed", ss_observed, "Build the problem from this file instead");
  solve->add_option("--kind", ss_kind, "Problem built from --observed")
      ->check(CLI::IsMember({"exact", "weighted", "noisy"}))
      ->capture_default_str();
  solve->add_option("--C", ss_C, "Penalty constant (noisy)")->capture_default_str();
  solve->add_option("--theta", ss_theta, "Layer weight base (weighted)")->capture_default_str();
  solve->add_option("--dump-problem", ss_dump, "Also write the problem JSON here");
  solve->add_option("--tol", ss_tol, "Tolerance")->capture_default_str();
  solve->add_option("--max-iters", ss_iters, "Iteration limit")->capture_default_str();
  add_common(solve, ss, false, false, {"json"});

  // enumerate ----------------------------------------------------------------
  Common en;
  en.seed = 1;
  std::string en_shape;
  Index en_card = 0, en_sampled = 0, en_sample_card = 0;
  bool en_all = false, en_filter = false;
  std::uint64_t en_budget = std::uint64_t{1} << 20;
  auto* enumerate = app.add_subcommand("enumerate", "Condition table of a mask population as CSV");
  enumerate->add_option("--shape", en_shape, "Grid, e.g. 3,3,2")->required();
  auto* o_card = enumerate->add_option("--cardinality", en_card, "Every mask with this many cells");
  auto* o_all = enumerate->add_flag("--all-subsets", en_all, "Every nonempty mask");
  auto* o_samp = enumerate->add_option("--sampled", en_sampled, "Monte Carlo over this many masks");
  o_card->excludes(o_all)->excludes(o_samp);
  o_all->excludes(o_samp);
  enumerate->add_flag("--filter-unique", en_filter, "Sampled: keep unique-recovery masks only");
  enumerate->add_option("--sample-cardinality", en_sample_card, "Sampled: mask size (default n - d + 1)");
  enumerate->add_option("--budget", en_budget, "Largest exhaustive population")->capture_default_str();
  add_common(enumerate, en, true, true, {"csv", "json"});

  // bound --------------------------------------------------------------------
  Common bo;
  std::string bo_shape;
  double bo_C = 2.0;
  int bo_trials = 0;
  auto* bound = app.add_subcommand("bound", "High-probability A-propagation bound");
  bound->add_option("--shape", bo_shape, "Grid, sorted ascending")->required();
  bound->add_option("--C", bo_C, "Constant C")->capture_default_str();
  bound->add_option("--empirical", bo_trials, "Also estimate the rate at p from this many masks");
  add_common(bound, bo, true, true, {"json", "human"});

  // curve --------------------------------------------------------------------
  Common cu;
  std::string cu_desc, cu_summary;
  bool cu_seed_given = false;
  auto* curve = app.add_subcommand("curve", "Recovery curve from a JSON descriptor as CSV");
  curve->add_option("descriptor", cu_desc, "Descriptor JSON file")->required();
  curve->add_option("--summary", cu_summary, "Also write per-point summaries here");
  add_common(curve, cu, true, true, {"csv"});

  // inpaint ------------------------------------------------------------------
  Common ip;
  std::string ip_in, ip_mask = "uniform:0.4", ip_backend = "alm";
  int ip_rank = 3, ip_batches = 4, ip_rounds = 10;
  Index ip_b1 = 1500, ip_b2 = 3000;
  double ip_C = 100.0, ip_tol = 1e-7;
  auto* inpaint = app.add_subcommand("inpaint", "Low-rank completion of a PPM image");
  inpaint->add_option("image", ip_in, "Binary PPM (P6)")->required();
  inpaint->add_option("--mask", ip_mask, "none | uniform:FRACTION | rect:ROW,COL,HEIGHT,WIDTH")->capture_default_str();
  inpaint->add_option("--rank", ip_rank, "Greedy rank")->capture_default_str();
  inpaint->add_option("--backend", ip_backend, "Rank-one solver")->check(CLI::IsMember({"alm", "sdp"}))->capture_default_str();
  inpaint->add_option("--C", ip_C, "Penalty constant")->capture_default_str();
  inpaint->add_option("--tol", ip_tol, "SDP tolerance")->capture_default_str();
  inpaint->add_option("--num-batches", ip_batches, "ALM batch draws")->capture_default_str();
  inpaint->add_option("--rounds", ip_rounds, "ALM rounds per batch")->capture_default_str();
  inpaint->add_option("--batch1", ip_b1, "ALM observations per batch")->capture_default_str();
  inpaint->add_option("--batch2", ip_b2, "ALM symmetry constraints per batch")->capture_default_str();
  std::string ip_report;
  inpaint->add_option("--report", ip_report, "Write the JSON report here instead of standard output");
  add_common(inpaint, ip, true, false, {"json", "human"});
  inpaint->get_option("--out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*analyze) {
      const MaskFile f = read_mask_file(an_mask);
      json j = profile_json(condition_profile(f.mask));
      j["shape"] = f.mask.shape().to_string();
      j["observed"] = f.mask.size();
      with_output(an.out, out, [&](std::ostream& o) { emit_json(o, j, an.format); });
    } else if (*cexact || *cnoisy) {
      const bool exact = static_cast<bool>(*cexact);
      CompleteArgs& a = exact ? ce : cn;
      CompletionRequest req;
      req.obs = load_observed(a.input);
      req.mode = exact ? CompletionMode::exact : CompletionMode::noisy;
      req.backend = parse_backend(a.backend);
      req.C = a.C;
      req.theta = a.theta;
      req.weights = a.weights == "auto" ? WeightsPolicy::auto_layered : WeightsPolicy::none;
      req.rank = a.rank;
      req.sdp.tol = a.tol;
      req.sdp.max_iters = a.max_iters;
      req.alm.seed = a.c.seed;
      req.alm.num_batches = a.num_batches;
      req.alm.rounds_per_batch = a.rounds;
      req.alm.batch1 = a.batch1;
      req.alm.batch2 = a.batch2;
      req.alt_min.seed = a.c.seed;
      std::optional<DenseTensor> truth;
      if (!a.truth.empty()) truth = read_tensor_file(a.truth);
      CompletionReport rep;
      try {
        rep = complete(req, truth);
      } catch (const CompletionFailure& e) {
        throw NumericFailure(e.what());
      }
      json j = report_json(rep);
      j["options"] = {{"backend", a.backend}, {"seed", a.c.seed}, {"tol", a.tol}, {"max_iters", a.max_iters}};
      if (exact) {
        j["options"]["weights"] = a.weights;
        j["options"]["theta"] = a.theta;
      } else {
        j["options"]["C"] = a.C;
        j["options"]["rank"] = a.rank;
        if (req.backend == Backend::alm)
          j["options"]["alm"] = {{"num_batches", a.num_batches}, {"rounds", a.rounds}, {"batch1", a.batch1},
                                 {"batch2", a.batch2}};
      }
      if (a.c.out.empty()) {
        std::ostringstream t;
        write_tensor(t, rep.tensor);
        j["tensor"] = t.str();
      } else {
        write_tensor_file(a.c.out, rep.tensor);
        j["output"] = a.c.out;
      }
      emit_json(out, j, a.c.format);
    } else if (*solve) {
      if (ss_problem.empty() == ss_observed.empty())
        throw std::invalid_argument("solve-sdp: give either a problem file or --observed");
      SdpProblem p;
      if (!ss_problem.empty()) {
        std::ifstream f(ss_problem);
        if (!f) throw std::runtime_error("cannot open '" + ss_problem + "'");
        json j;
        try {
          j = json::parse(f);
        } catch (const json::parse_error& e) {
          throw ParseError(ss_problem, 0, e.what());
        }
        p = sdp_problem_from_json(j);
      } else {
        const ObservedTensor obs = load_observed(ss_observed);
        if (ss_kind == "noisy") {
          p = build_sdp_noisy(obs, ss_C);
        } else if (ss_kind == "weighted") {
          try {
            p = build_sdp_exact(obs, generate_weights(obs.mask, ss_theta));
          } catch (const PropagationFailure& e) {
            throw NumericFailure(e.what());
          }
        } else {
          p = build_sdp_exact(obs);
        }
      }
      if (!ss_dump.empty()) with_output(ss_dump, out, [&](std::ostream& o) { o << to_json(p).dump() << '\n'; });
      SdpOptions o;
      o.tol = ss_tol;
      o.max_iters = ss_iters;
      const SdpSolution sol = solve_sdp(p, o);
      json j = to_json(sol);
      j["options"] = {{"tol", ss_tol}, {"max_iters", ss_iters}};
      with_output(ss.out, out, [&](std::ostream& s) { s << j.dump() << '\n'; });
      err << "status " << to_string(sol.status) << ", " << sol.iterations << " iterations, objective "
          << format_double(sol.objective) << '\n';
      if (sol.status != SdpStatus::optimal) return 2;
    } else if (*enumerate) {
      const Shape s = shape_option(en_shape);
      Population pop;
      if (*o_card) {
        pop = Population::cardinality(en_card);
      } else if (en_all) {
        pop = Population::all_subsets();
      } else if (*o_samp) {
        pop = Population::sampled(en_sampled, en_filter, en.seed, en_sample_card);
      } else {
        throw std::invalid_argument("enumerate: give --cardinality, --all-subsets or --sampled");
      }
      pop.budget = en_budget;
      const ConditionTable t = enumerate_condition_table(s, pop, en.threads);
      err << "# shape=" << s.to_string() << " population=" << t.population << " seed=" << en.seed
          << " threads=" << resolve_threads(en.threads) << '\n';
      with_output(en.out, out, [&](std::ostream& o) {
        if (en.format == "csv") {
          write_csv(o, t);
          return;
        }
        json j = {{"shape", s.to_string()}, {"population", t.population}, {"total", t.total}};
        for (Condition c : kConditions) {
          json row = {{"count", t.counts[static_cast<int>(c)]}, {"percent", t.percent(c)}};
          if (t.sampled) row["std_error"] = t.std_error(c);
          j["conditions"][to_string(c)] = row;
        }
        if (t.sampled) j["draws"] = t.draws;
        o << j.dump(2) << '\n';
      });
    } else if (*bound) {
      const BoundResult r = a_propagation_bound({shape_option(bo_shape), bo_C});
      json j = {{"shape", bo_shape}, {"C", bo_C}, {"c_min", r.c_min}, {"p", r.p}, {"applicable", r.applicable}};
      json eps = json::object();
      for (std::size_t i = 0; i < r.eps.size(); ++i) eps["eps_" + std::to_string(i + 2)] = r.eps[i];
      j["eps"] = eps;
      j["success_probability"] = r.success;
      if (!r.applicable) j["violated"] = r.violated;
      if (bo_trials > 0) {
        if (r.p > 1.0) throw std::invalid_argument("bound: p exceeds 1, nothing to simulate");
        const RateEstimate e = empirical_a_propagation_rate(shape_option(bo_shape), r.p, bo_trials, bo.seed, bo.threads);
        j["empirical"] = {{"trials", e.trials}, {"rate", e.rate}, {"std_error", e.std_error}, {"seed", bo.seed}};
      }
      with_output(bo.out, out, [&](std::ostream& o) { emit_json(o, j, bo.format); });
    } else if (*curve) {
      std::ifstream f(cu_desc);
      if (!f) throw std::runtime_error("cannot open '" + cu_desc + "'");
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ParseError(cu_desc, 0, e.what());
      }
      cu_seed_given = curve->count("--seed") > 0;
      if (cu_seed_given) j["seed"] = cu.seed;
      const CurveDescriptor d = curve_descriptor_from_json(j);
      err << "# descriptor " << j.dump() << " threads=" << resolve_threads(cu.threads) << '\n';
      const CurveTable t = recovery_curve(d, cu.threads);
      with_output(cu.out, out, [&](std::ostream& o) { write_csv(o, t); });
      if (!cu_summary.empty()) with_output(cu_summary, out, [&](std::ostream& o) { write_summary_csv(o, t); });
    } else if (*inpaint) {
      GreedyOptions g;
      g.backend = ip_backend == "sdp" ? Backend::sdp : Backend::alm;
      g.C = ip_C;
      g.sdp.tol = ip_tol;
      g.alm.seed = ip.seed;
      g.alm.num_batches = ip_batches;
      g.alm.rounds_per_batch = ip_rounds;
      g.alm.batch1 = ip_b1;
      g.alm.batch2 = ip_b2;
      InpaintResult r;
      try {
        r = inpaint_image(ip_in, PixelMaskSpec::parse(ip_mask, ip.seed), ip_rank, g, ip.out);
      } catch (const CompletionFailure& e) {
        throw NumericFailure(e.what());
      }
      json j = {{"input", ip_in},
                {"output", ip.out},
                {"relative_distance", r.relative_distance},
                {"observed_cells", r.mask.size()},
                {"residual_norms", r.greedy.residual_norms},
                {"options",
                 {{"mask", ip_mask}, {"rank", ip_rank}, {"backend", ip_backend}, {"C", ip_C}, {"seed", ip.seed},
                  {"num_batches", ip_batches}, {"rounds", ip_rounds}, {"batch1", ip_b1}, {"batch2", ip_b2}}}};
      with_output(ip_report, out, [&](std::ostream& o) { emit_json(o, j, ip.format); });
    }
  } catch (const NumericFailure& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const PropagationFailure& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace r1tc
