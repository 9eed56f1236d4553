#pragma once

#include <string>
#include <vector>

#include "lfsurv/censored_sample.hpp"
#include "lfsurv/inference.hpp"

namespace lfsurv {

/// Product-limit estimate. Entry i holds the survival just after times[i];
/// the curve is 1 before the first event time and constant between events.
struct KmCurve {
  std::vector<double> times;  // distinct event times, increasing
  std::vector<double> survival;
  std::vector<int> at_risk;
  std::vector<int> events;

  bool empty() const noexcept { return times.empty(); }
  /// Right-continuous step value at t.
  double at(double t) const;
};

/// Ties between events and censorings at one time: events first, i.e. the
/// censored subjects still count as at risk.
KmCurve kaplan_meier(const CensoredSample& data);

/// Terminal plateau of the curve; 1 for a curve without events.
double km_cure_fraction(const KmCurve& curve);

struct ModelScore {
  double neg_loglik = 0.0;
  double aic = 0.0;
  double aicc = 0.0;
  int k = 0;
  int n = 0;
};

/// AIC = -2 loglik + 2k, AICc = AIC + 2k(k+1)/(n-k-1). Requires n > k + 1.
ModelScore information_criteria(double loglik, int k, int n);

/// Cure mixture with Weibull baseline survival exp(-(t/scale)^shape).
class LtWeibullParams {
 public:
  LtWeibullParams(double scale, double shape, double p);

  double scale() const noexcept { return scale_; }
  double shape() const noexcept { return shape_; }
  double p() const noexcept { return p_; }

 private:
  double scale_;
  double shape_;
  double p_;
};

/// Requires 0 < p < 1 (DomainError); a non-finite value raises NonFiniteObjective.
double lt_weibull_log_likelihood(const LtWeibullParams& params, const CensoredSample& data);

/// Same estimation machinery as fit(); estimates ordered (scale, shape, p).
FitResult fit_lt_weibull(const CensoredSample& data, const OptimizerConfig& config = {}, double level = 0.95);

struct RankedModel {
  std::string name;
  ModelScore score;
  int rank = 0;  // 1 = best
};

/// Ascending by AICc, then AIC, then -log L; exact ties keep input order.
std::vector<RankedModel> compare(const std::vector<std::pair<std::string, ModelScore>>& models);

}  // namespace lfsurv
