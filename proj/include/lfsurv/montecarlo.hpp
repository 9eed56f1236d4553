#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lfsurv/censored_sample.hpp"
#include "lfsurv/distribution.hpp"
#include "lfsurv/numerics.hpp"

namespace lfsurv {

/// One simulation cell family: a true parameter set, the sample sizes to run,
/// and the censoring level to reach with Uniform(0, tau) censoring.
struct Scenario {
  LfParams truth{1.0, 1.0, 0.0};
  std::vector<std::size_t> sample_sizes;
  std::size_t replications = 2000;
  double target_censoring = 0.5;
  double ci_level = 0.95;
  std::uint64_t base_seed = 1;
  OptimizerConfig optimizer{};
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

struct ParamStats {
  double mre = 0.0;       // mean of estimate / truth
  double mse = 0.0;       // mean of (estimate - truth)^2
  double coverage = 0.0;  // fraction of intervals containing the truth
};

struct SimReport {
  std::size_t n = 0;
  ParamStats alpha;
  ParamStats lambda;
  ParamStats p;
  double realized_censoring = 0.0;  // mean censored fraction over all replicates
  std::size_t replications_used = 0;  // converged fits with standard errors
  std::size_t replications_requested = 0;
};

/// P(censored) for a LF failure time against independent Uniform(0, tau) censoring:
/// p + (1 - p) P(T > C | susceptible).
double censoring_probability(const LfParams& truth, double tau);

/// tau with censoring_probability(truth, tau) == target. Throws
/// CalibrationInfeasible when the target is not strictly between p (plus a
/// 1e-3 margin) and the censoring level reachable at the smallest admissible tau.
double calibrate_censoring(const LfParams& truth, double target);

/// Cured subjects are always censored at their censoring time.
CensoredSample generate_replicate(const LfParams& truth, std::size_t n, double tau, std::uint64_t seed);

/// Seed of replicate `index` at sample size `n`.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t n, std::size_t index) noexcept;

/// One report per sample size. Per-replicate fit failures are counted, not thrown.
std::vector<SimReport> run_scenario(const Scenario& scenario);

}  // namespace lfsurv
