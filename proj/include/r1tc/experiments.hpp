#pragma once

#include "r1tc/completion.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace r1tc {

/// Seed of the independent random stream for task `index` of a run seeded
/// with `seed` (splitmix64 of both).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

/// Worker count: `requested` if positive, else the hardware concurrency.
int resolve_threads(int requested);

struct MaskDistribution {
  enum class Kind { bernoulli, fixed_cardinality, slice, rectangle_hole };

  Kind kind = Kind::bernoulli;
  Shape shape;
  std::uint64_t seed = 0;
  double p = 0.0;                 // bernoulli
  Index m = 0;                    // fixed_cardinality
  int axis = 0;                   // slice: cells whose `axis` coordinate
  std::vector<int> kept_slices;   //   lies in kept_slices (0-based)
  std::vector<int> origin;        // rectangle_hole: every cell except the box
  std::vector<int> extents;       //   origin + [0, extents) (0-based)

  static MaskDistribution bernoulli(Shape s, double p, std::uint64_t seed = 0);
  static MaskDistribution fixed_cardinality(Shape s, Index m, std::uint64_t seed = 0);
  static MaskDistribution slices(Shape s, int axis, std::vector<int> kept);
  static MaskDistribution rectangle_hole(Shape s, std::vector<int> origin, std::vector<int> extents);

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
};

/// Draws from the distribution with a generator seeded by dist.seed.
Mask sample_mask(const MaskDistribution& dist);
/// Draws with the caller's generator; dist.seed is ignored.
Mask sample_mask(const MaskDistribution& dist, std::mt19937_64& rng);

/// Uniform m-subset of {0, ..., n-1} in ascending order (Floyd).
std::vector<Index> sample_subset(Index n, Index m, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Condition tables

struct Population {
  enum class Kind { cardinality, all_subsets, sampled };

  Kind kind = Kind::cardinality;
  Index m = 0;             // cardinality; for sampled, 0 means n - d + 1
  Index count = 0;         // sampled: masks kept
  bool filter_unique = false;
  std::uint64_t seed = 0;
  /// Exhaustive populations larger than this are refused.
  std::uint64_t budget = std::uint64_t{1} << 20;
  /// Sampled: give up after count * max_draw_factor draws.
  std::uint64_t max_draw_factor = 100000;

  static Population cardinality(Index m);
  static Population all_subsets();
  static Population sampled(Index count, bool filter_unique, std::uint64_t seed = 0, Index m = 0);

  std::string describe(const Shape& s) const;  // "cardinality=6", "all-subsets", ...
};

enum class Condition { unique, gs, s, sr, a };
inline constexpr std::array<Condition, 5> kConditions{Condition::unique, Condition::gs, Condition::s,
                                                      Condition::sr, Condition::a};
const char* to_string(Condition c);

struct ConditionTable {
  Shape shape;
  std::string population;
  std::array<std::uint64_t, 5> counts{};  // in kConditions order
  std::uint64_t total = 0;
  bool sampled = false;
  std::uint64_t draws = 0;  // sampled: masks drawn before filtering

  double percent(Condition c) const;
  /// Binomial standard error of percent(c), in percentage points; 0 when exhaustive.
  double std_error(Condition c) const;
  /// count_A <= count_SR <= count_S <= count_GS <= count_unique.
  bool chain_monotone() const;
};

/// Header "shape,population,condition,count,total,percent", then one row per
/// condition; percentages have two decimals.
void write_csv(std::ostream& out, const ConditionTable& t, bool header = true);

/// Exact counts for exhaustive populations (shapes up to 64 cells), Monte
/// Carlo for sampled ones. Throws std::invalid_argument when an exhaustive
/// population exceeds its budget or the sampler exhausts its draw limit.
ConditionTable enumerate_condition_table(const Shape& shape, const Population& pop, int threads = 0);

// ---------------------------------------------------------------------------
// High-probability A-propagation bound

struct BoundParams {
  Shape shape;
  double C = 2.0;
};

struct BoundResult {
  bool applicable = false;
  std::string violated;      // first failed hypothesis when not applicable
  double c_min = 0.0;        // 2 prod_{i>=3} (1 - n_i^{-sqrt(n_i)})^{-1}
  double p = 0.0;            // (C / sqrt(N)) prod_{i>=2} log n_i
  std::vector<double> eps;   // eps_2, ..., eps_d
  double success = 0.0;      // 1 - sum eps clamped to [0, 1]
};

/// Evaluates the bound with natural logarithms. The epsilon list and p are
/// filled even when a hypothesis fails; `applicable` says whether the
/// guarantee holds.
BoundResult a_propagation_bound(const BoundParams& params);

struct RateEstimate {
  double rate = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

/// Fraction of Bernoulli(p) masks satisfying anchored A-propagation.
RateEstimate empirical_a_propagation_rate(const Shape& shape, double p, int trials,
                                          std::uint64_t seed, int threads = 0);

// ---------------------------------------------------------------------------
// Recovery curves

enum class CurveMethod { sdp_e, sdp_ew, sdp_n, alm, alt_min, exact_la };
const char* to_string(CurveMethod m);  // "sdp-e", "sdp-ew", ...
CurveMethod parse_curve_method(const std::string& s);

struct CurveDescriptor {
  enum class Protocol { exact, noisy };

  Protocol protocol = Protocol::exact;
  Shape shape;
  std::vector<Index> omega;             // |Omega| grid
  std::vector<double> deltas{0.0};      // noise levels (noisy protocol)
  int trials = 10;
  std::vector<CurveMethod> methods;
  std::uint64_t seed = 0;
  double C = 100.0;
  double theta = 0.01;
  double solved_threshold = 1e-4;
  SdpOptions sdp;
  AlmParams alm;
  AltMinOptions alt_min;

  /// Factors are drawn from U(factor_low, 1): 0.1 exact, 0.5 noisy.
  double factor_low() const { return protocol == Protocol::exact ? 0.1 : 0.5; }
  void validate() const;
};

/// Parses {"protocol", "shape", "omega", "deltas", "trials", "methods",
/// "seed", "C", "theta", "sdp_tol", "sdp_max_iters", ...}.
CurveDescriptor curve_descriptor_from_json(const nlohmann::json& j);

struct CurveRow {
  CurveMethod method;
  Index omega;
  double delta;
  int trial;
  double metric;  // relative distance; +inf when the method failed
};

struct CurveSummary {
  CurveMethod method;
  Index omega;
  double delta;
  int trials = 0;
  int solved = 0;  // metric < solved_threshold
  double success_rate = 0.0;
  double median = 0.0;
  double q45 = 0.0;
  double q55 = 0.0;
};

struct CurveTable {
  std::vector<CurveRow> rows;
  std::vector<CurveSummary> summary;
};

/// One random instance per (|Omega|, delta, trial), shared by all methods.
CurveTable recovery_curve(const CurveDescriptor& desc, int threads = 0);

/// Header "method,omega,delta,trial,metric".
void write_csv(std::ostream& out, const CurveTable& t);
void write_summary_csv(std::ostream& out, const CurveTable& t);

/// Linear-interpolation quantile, q in [0, 1]; NaN for an empty sample.
double quantile(std::vector<double> v, double q);

// ---------------------------------------------------------------------------
// Image inpainting

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

/// Binary PPM (P6, maxval 255). Throws std::runtime_error on unreadable or
/// malformed files.
Image read_ppm(const std::string& path);
void write_ppm(const std::string& path, const Image& img);

/// height x width x 3 tensor with entries in [0, 1].
DenseTensor image_to_tensor(const Image& img);
/// Clamps to [0, 1] and rounds to 8 bits.
Image tensor_to_image(const DenseTensor& t);

struct PixelMaskSpec {
  enum class Kind { none, uniform, rectangle };

  Kind kind = Kind::none;
  double missing_fraction = 0.0;  // uniform: exactly round(f * pixels) missing
  int row = 0, col = 0, height = 0, width = 0;  // rectangle hole, 0-based
  std::uint64_t seed = 0;

  /// Parses "none", "uniform:0.4" or "rect:row,col,height,width".
  static PixelMaskSpec parse(const std::string& text, std::uint64_t seed = 0);
};

/// Observed cells: every channel of every present pixel.
Mask pixel_mask(int height, int width, const PixelMaskSpec& spec);

struct InpaintResult {
  DenseTensor completed;  // clamped to [0, 1]
  Image image;
  Mask mask;
  double relative_distance = 0.0;
  GreedyResult greedy;
};

/// Rank-r greedy completion of a height x width x 3 tensor under the mask.
InpaintResult inpaint_tensor(const DenseTensor& original, const PixelMaskSpec& spec, int r,
                             const GreedyOptions& opts);

/// Reads the PPM, completes it and writes the result to out_path when non-empty.
InpaintResult inpaint_image(const std::string& path, const PixelMaskSpec& spec, int r,
                            const GreedyOptions& opts, const std::string& out_path = "");

}  // namespace r1tc
