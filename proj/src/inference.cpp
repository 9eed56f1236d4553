#include "lfsurv/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lfsurv/errors.hpp"
#include "lfsurv/model_eval.hpp"

namespace lfsurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCureFloor = 1e-6;

}  // namespace

LfParams FitResult::lf_params() const {
  if (baseline != Baseline::frechet) throw DomainError("fit does not hold long-term Frechet parameters");
  return LfParams(estimates[0], estimates[1], estimates[2]);
}

double log_likelihood(const LfParams& params, const CensoredSample& data) {
  const double lambda = params.lambda();
  const double alpha = params.alpha();
  const double p = params.p();
  if (!(p > 0.0 && p < 1.0)) throw DomainError("log-likelihood requires 0 < p < 1");

  const double log_lambda = std::log(lambda);
  double d = 0.0;
  double sum_log_t = 0.0;
  double sum_ratio = 0.0;
  double sum_log_surv = 0.0;
  for (const auto& obs : data.observations()) {
    const double log_t = std::log(obs.time);
    // (lambda/t)^alpha == (t/lambda)^-alpha
    const double ratio = std::exp(alpha * (log_lambda - log_t));
    if (obs.event) {
      d += 1.0;
      sum_log_t += log_t;
      sum_ratio += ratio;
    } else {
      sum_log_surv += std::log(p - (1.0 - p) * std::expm1(-ratio));
    }
  }
  const double ll = d * std::log(alpha) + d * std::log1p(-p) + d * alpha * log_lambda -
                    (alpha + 1.0) * sum_log_t - sum_ratio + sum_log_surv;
  if (!std::isfinite(ll)) throw NonFiniteObjective("log-likelihood is not finite");
  return ll;
}

double log_likelihood(Baseline baseline, const Vec3& theta, const CensoredSample& data) {
  switch (baseline) {
    case Baseline::frechet:
      return log_likelihood(LfParams(theta[0], theta[1], theta[2]), data);
    case Baseline::weibull:
      return lt_weibull_log_likelihood(LtWeibullParams(theta[0], theta[1], theta[2]), data);
  }
  throw DomainError("unknown baseline");
}

Vec3 to_unconstrained(const Vec3& theta) {
  return {std::log(theta[0]), std::log(theta[1]), std::log(theta[2]) - std::log1p(-theta[2])};
}

Vec3 from_unconstrained(const Vec3& u) {
  return {std::exp(u[0]), std::exp(u[1]), 1.0 / (1.0 + std::exp(-u[2]))};
}

Vec3 initial_guess(Baseline baseline, const CensoredSample& data) {
  if (data.event_count() == 0) throw NoEvents();
  const KmCurve curve = kaplan_meier(data);
  const double p0 = std::clamp(km_cure_fraction(curve), 0.01, 0.95);

  // Plotting positions: midpoint of the KM step at each event time.
  std::vector<double> xs, ys;
  double previous = 1.0;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double s_mid = 0.5 * (previous + curve.survival[i]);
    previous = curve.survival[i];
    const double r = (1.0 - s_mid) / (1.0 - p0);  // susceptible-group cdf
    if (!(r > 0.0 && r < 1.0)) continue;
    const double y = baseline == Baseline::frechet ? std::log(-std::log(r)) : std::log(-std::log1p(-r));
    xs.push_back(std::log(curve.times[i]));
    ys.push_back(y);
  }

  std::vector<double> sorted;
  for (const auto& obs : data.observations()) sorted.push_back(obs.time);
  std::sort(sorted.begin(), sorted.end());
  const Vec3 fallback{sorted[sorted.size() / 2], 1.0, p0};
  if (xs.size() < 2) return fallback;

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) return fallback;
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  // Frechet: y = -alpha log t + alpha log lambda.  Weibull: y = k log t - k log s.
  const double shape = baseline == Baseline::frechet ? -slope : slope;
  if (!(shape > 0.0) || !std::isfinite(shape)) return fallback;
  const double scale = baseline == Baseline::frechet ? std::exp(intercept / shape) : std::exp(-intercept / shape);
  if (!(scale > 0.0) || !std::isfinite(scale)) return fallback;
  return {scale, shape, p0};
}

FitResult fit_model(Baseline baseline, const CensoredSample& data, const OptimizerConfig& config, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  if (data.event_count() == 0) throw NoEvents();

  const Objective neg_loglik_u = [&](const Vec3& u) {
    const Vec3 theta = from_unconstrained(u);
    if (!(theta[2] > kCureFloor && theta[2] < 1.0 - kCureFloor)) return kInf;
    try {
      return -log_likelihood(baseline, theta, data);
    } catch (const DomainError&) {
      return kInf;
    } catch (const NonFiniteObjective&) {
      return kInf;
    }
  };

  const Vec3 start = initial_guess(baseline, data);
  const MinimizeResult opt = minimize(neg_loglik_u, to_unconstrained(start), config);

  FitResult result;
  result.baseline = baseline;
  result.estimates = from_unconstrained(opt.x);
  result.loglik = -opt.value;
  result.level = level;
  result.converged = opt.converged;
  result.n_events = data.event_count();
  result.n_censored = data.censored_count();
  result.evaluations = opt.evaluations;

  const Objective neg_loglik = [&](const Vec3& theta) {
    try {
      return -log_likelihood(baseline, theta, data);
    } catch (const DomainError&) {
      return kNaN;
    } catch (const NonFiniteObjective&) {
      return kNaN;
    }
  };
  try {
    result.observed_info = fd_hessian(neg_loglik, result.estimates);
  } catch (const NonFiniteObjective&) {
    return result;
  }

  SymMatrix3 covariance;
  try {
    covariance = invert_spd(*result.observed_info);
  } catch (const NotPositiveDefinite&) {
    return result;
  }

  const double z = normal_quantile(0.5 * (1.0 + level));
  Vec3 se, lo, hi;
  for (int i = 0; i < 3; ++i) {
    se[i] = std::sqrt(covariance(i, i));
    lo[i] = std::max(0.0, result.estimates[i] - z * se[i]);
    hi[i] = result.estimates[i] + z * se[i];
  }
  hi[2] = std::min(1.0, hi[2]);
  result.std_errors = se;
  result.ci_lower = lo;
  result.ci_upper = hi;
  return result;
}

FitResult fit(const CensoredSample& data, const OptimizerConfig& config, double level) {
  return fit_model(Baseline::frechet, data, config, level);
}

Vec3 score_check(const FitResult& result, const CensoredSample& data) {
  const Objective loglik_u = [&](const Vec3& u) {
    try {
      return log_likelihood(result.baseline, from_unconstrained(u), data);
    } catch (const DomainError&) {
      return kNaN;
    } catch (const NonFiniteObjective&) {
      return kNaN;
    }
  };
  return fd_gradient(loglik_u, to_unconstrained(result.estimates));
}

}  // namespace lfsurv
