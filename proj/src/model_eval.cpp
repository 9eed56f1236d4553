#include "lfsurv/model_eval.hpp"

#include <algorithm>
#include <cmath>

#include "lfsurv/errors.hpp"

namespace lfsurv {

double KmCurve::at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 1.0;
  return survival[static_cast<std::size_t>(it - times.begin()) - 1];
}

KmCurve kaplan_meier(const CensoredSample& data) {
  std::vector<Observation> obs(data.observations().begin(), data.observations().end());
  std::sort(obs.begin(), obs.end(), [](const Observation& a, const Observation& b) { return a.time < b.time; });

  KmCurve curve;
  int at_risk = static_cast<int>(obs.size());
  double s = 1.0;
  std::size_t i = 0;
  while (i < obs.size()) {
    const double t = obs[i].time;
    int events = 0;
    int censored = 0;
    for (; i < obs.size() && obs[i].time == t; ++i) (obs[i].event ? events : censored)++;
    if (events > 0) {
      s *= 1.0 - static_cast<double>(events) / at_risk;
      curve.times.push_back(t);
      curve.survival.push_back(s);
      curve.at_risk.push_back(at_risk);
      curve.events.push_back(events);
    }
    at_risk -= events + censored;
  }
  return curve;
}

double km_cure_fraction(const KmCurve& curve) { return curve.empty() ? 1.0 : curve.survival.back(); }

ModelScore information_criteria(double loglik, int k, int n) {
  if (k < 0) throw DomainError("parameter count must be non-negative");
  if (n <= k + 1) throw DomainError("AICc requires n > k + 1");
  ModelScore score;
  score.neg_loglik = -loglik;
  score.aic = -2.0 * loglik + 2.0 * k;
  score.aicc = score.aic + 2.0 * k * (k + 1) / static_cast<double>(n - k - 1);
  score.k = k;
  score.n = n;
  return score;
}

LtWeibullParams::LtWeibullParams(double scale, double shape, double p) : scale_(scale), shape_(shape), p_(p) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("scale must be positive and finite");
  if (!(shape > 0.0) || !std::isfinite(shape)) throw DomainError("shape must be positive and finite");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
}

double lt_weibull_log_likelihood(const LtWeibullParams& params, const CensoredSample& data) {
  const double p = params.p();
  if (!(p > 0.0 && p < 1.0)) throw DomainError("log-likelihood requires 0 < p < 1");
  const double k = params.shape();
  const double log_scale = std::log(params.scale());
  const double log_k = std::log(k);
  const double log_q = std::log1p(-p);

  double ll = 0.0;
  for (const auto& obs : data.observations()) {
    const double log_ratio = std::log(obs.time) - log_scale;
    const double h = std::exp(k * log_ratio);  // cumulative hazard (t/scale)^k
    if (obs.event)
      ll += log_q + log_k - log_scale + (k - 1.0) * log_ratio - h;
    else
      ll += std::log(p + (1.0 - p) * std::exp(-h));
  }
  if (!std::isfinite(ll)) throw NonFiniteObjective("log-likelihood is not finite");
  return ll;
}

FitResult fit_lt_weibull(const CensoredSample& data, const OptimizerConfig& config, double level) {
  return fit_model(Baseline::weibull, data, config, level);
}

std::vector<RankedModel> compare(const std::vector<std::pair<std::string, ModelScore>>& models) {
  std::vector<RankedModel> ranked;
  ranked.reserve(models.size());
  for (const auto& [name, score] : models) ranked.push_back({name, score, 0});
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedModel& a, const RankedModel& b) {
    if (a.score.aicc != b.score.aicc) return a.score.aicc < b.score.aicc;
    if (a.score.aic != b.score.aic) return a.score.aic < b.score.aic;
    return a.score.neg_loglik < b.score.neg_loglik;
  });
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = static_cast<int>(i) + 1;
  return ranked;
}

}  // namespace lfsurv
