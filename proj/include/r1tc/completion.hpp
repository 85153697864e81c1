#pragma once

#include "r1tc/alm.hpp"
#include "r1tc/propagation.hpp"
#include "r1tc/sdp.hpp"
#include "r1tc/tensor.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace r1tc {

/// A solver ran but produced no usable answer (non-unique or inconsistent
/// linear system, SDP not converged, every restart diverged, ...).
class CompletionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CompletionMode { exact, noisy };
enum class Backend { linear_algebra, sdp, alm, alt_min };
enum class WeightsPolicy { none, auto_layered };

const char* to_string(CompletionMode m);
const char* to_string(Backend b);
CompletionMode parse_mode(const std::string& s);
Backend parse_backend(const std::string& s);  // "linear-algebra", "sdp", "alm", "alt-min"

struct AltMinOptions {
  int restarts = 3;
  int max_sweeps = 500;
  double grad_tol = 1e-10;
  std::uint64_t seed = 0;
};

struct AltMinResult {
  RankOneFactors factors;  // rank 1 only
  DenseTensor tensor;
  double objective = 0.0;  // sum of squared residuals on the mask
  int sweeps = 0;          // of the returned restart
  bool diverged = false;   // every restart went non-finite
};

/// Least squares on the mask over CP factors of the given rank, by cyclic
/// exact updates of each factor row. Best of `restarts` starts with U(0,1)
/// entries. Rows of a factor that no observation touches stay at their
/// initial values.
AltMinResult alternating_min(const ObservedTensor& obs, int rank, const AltMinOptions& opts = {});

struct GreedyOptions {
  Backend backend = Backend::sdp;  // sdp or alm
  double C = 100.0;
  SdpOptions sdp;
  AlmParams alm;
};

struct GreedyResult {
  DenseTensor tensor;
  std::vector<DenseTensor> components;
  std::vector<double> residual_norms;  // ||R_Omega|| before step 1 and after each step
  /// Steps after which the residual norm on the mask grew.
  int monotonicity_violations = 0;
};

/// Sum of r rank-one noisy completions, each fitted to the residual of the
/// previous ones on the mask. Throws CompletionFailure, naming the step and the
/// residual reached so far, if a backend solve fails.
GreedyResult greedy_lowrank(const ObservedTensor& obs, int r, const GreedyOptions& opts = {});

struct CompletionRequest {
  ObservedTensor obs;
  CompletionMode mode = CompletionMode::exact;
  Backend backend = Backend::linear_algebra;
  double C = 100.0;
  WeightsPolicy weights = WeightsPolicy::none;
  double theta = 0.01;
  int rank = 1;  // > 1 only in noisy mode (greedy, or alt-min at that rank)
  SdpOptions sdp;
  AlmParams alm;
  AltMinOptions alt_min;
};

struct CompletionReport {
  DenseTensor tensor;
  std::optional<bool> tight;  // SDP backends only
  ConditionProfile conditions;
  std::optional<double> relative_distance;
  double seconds = 0.0;
  bool weighted_retry = false;
  /// Backend-specific numbers (iterations, objective, eigen ratio, ...).
  nlohmann::json diagnostics = nlohmann::json::object();
};

/// Validates the request and routes it. In exact mode with the SDP backend and
/// the auto policy, a non-tight (or unconverged) plain solve is retried with
/// layered weights when S-propagation holds. Throws std::invalid_argument for
/// unsupported combinations and CompletionFailure when the backend fails.
CompletionReport complete(const CompletionRequest& req,
                          const std::optional<DenseTensor>& truth = std::nullopt);

/// ||t - truth||_F / ||truth||_F. Throws on shape mismatch or zero truth.
double relative_distance(const DenseTensor& t, const DenseTensor& truth);

}  // namespace r1tc
