#pragma once

#include <cstddef>
#include <optional>

#include "lfsurv/censored_sample.hpp"
#include "lfsurv/distribution.hpp"
#include "lfsurv/numerics.hpp"

namespace lfsurv {

/// Susceptible-group law of a long-term (cure) mixture model.
enum class Baseline { frechet, weibull };

/// Maximum-likelihood fit of a three-parameter cure mixture.
/// Parameter vectors are ordered (scale, shape, p); for the Frechet baseline
/// that is (lambda, alpha, p).
struct FitResult {
  Baseline baseline = Baseline::frechet;
  Vec3 estimates{};
  double loglik = 0.0;
  /// Negative Hessian of the log-likelihood at the estimates, original scale.
  /// Absent when the finite-difference stencil leaves the parameter domain.
  std::optional<SymMatrix3> observed_info;
  /// Absent when the observed information is not positive definite.
  std::optional<Vec3> std_errors;
  std::optional<Vec3> ci_lower;
  std::optional<Vec3> ci_upper;
  double level = 0.95;
  bool converged = false;
  std::size_t n_events = 0;
  std::size_t n_censored = 0;
  int evaluations = 0;

  std::size_t n() const noexcept { return n_events + n_censored; }
  bool has_intervals() const noexcept { return ci_lower.has_value(); }
  /// Throws DomainError for a non-Frechet fit.
  LfParams lf_params() const;
};

/// Censored log-likelihood in closed form:
///   d log a + d log(1-p) + d a log l - (a+1) sum d_i log t_i
///   - sum d_i (l/t_i)^a + sum (1-d_i) log S(t_i).
/// Requires 0 < p < 1 (DomainError); a non-finite value raises NonFiniteObjective.
double log_likelihood(const LfParams& params, const CensoredSample& data);

/// Dispatches on the baseline; theta ordered (scale, shape, p).
double log_likelihood(Baseline baseline, const Vec3& theta, const CensoredSample& data);

/// (log scale, log shape, logit p) and back.
Vec3 to_unconstrained(const Vec3& theta);
Vec3 from_unconstrained(const Vec3& u);

/// Data-driven starting point: Kaplan-Meier plateau for p, then a
/// least-squares fit of the linearized baseline cdf at the event times.
Vec3 initial_guess(Baseline baseline, const CensoredSample& data);

/// Maximizes the log-likelihood over the unconstrained parameterization and
/// attaches observed-information standard errors and Wald intervals at `level`,
/// clamped to the parameter domain. Throws NoEvents when no failure was observed.
FitResult fit_model(Baseline baseline, const CensoredSample& data, const OptimizerConfig& config = {},
                    double level = 0.95);

/// Long-term Frechet fit.
FitResult fit(const CensoredSample& data, const OptimizerConfig& config = {}, double level = 0.95);

/// Finite-difference gradient of the log-likelihood at the estimates, taken in
/// the unconstrained parameterization. Near zero at an interior optimum.
Vec3 score_check(const FitResult& result, const CensoredSample& data);

}  // namespace lfsurv
