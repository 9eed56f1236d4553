#include "lfsurv/distribution.hpp"

#include <cmath>
#include <string>

#include "lfsurv/errors.hpp"
#include "lfsurv/numerics.hpp"

namespace lfsurv {

LfParams::LfParams(double lambda, double alpha, double p) : lambda_(lambda), alpha_(alpha), p_(p) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive and finite");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
}

MomentOrder::MomentOrder(int r) : r_(r) {
  if (r < 1) throw DomainError("moment order must be >= 1");
}

namespace {

void require_positive_time(double t) {
  if (!(t > 0.0)) throw DomainError("time must be positive");
}

// log of (t/lambda)^-alpha
double log_z(const LfParams& params, double t) {
  return -params.alpha() * (std::log(t) - std::log(params.lambda()));
}

}  // namespace

double log_pdf(const LfParams& params, double t) {
  require_positive_time(t);
  if (params.p() >= 1.0) throw DomainError("log_pdf undefined for p = 1");
  const double lz = log_z(params, t);
  // log f = log alpha + log(1-p) - log t + log z - z, with z = (t/lambda)^-alpha
  return std::log(params.alpha()) + std::log1p(-params.p()) - std::log(t) + lz - std::exp(lz);
}

double pdf(const LfParams& params, double t) {
  require_positive_time(t);
  if (params.p() >= 1.0) return 0.0;
  return std::exp(log_pdf(params, t));
}

double cdf(const LfParams& params, double t) {
  require_positive_time(t);
  return (1.0 - params.p()) * std::exp(-std::exp(log_z(params, t)));
}

double survival(const LfParams& params, double t) {
  require_positive_time(t);
  const double p = params.p();
  return p - (1.0 - p) * std::expm1(-std::exp(log_z(params, t)));
}

double log_survival(const LfParams& params, double t) {
  require_positive_time(t);
  const double p = params.p();
  const double z = std::exp(log_z(params, t));
  // 1 - exp(-z) loses everything for z below ~1e-16
  if (p == 0.0) return std::log(-std::expm1(-z));
  return std::log(p - (1.0 - p) * std::expm1(-z));
}

double hazard(const LfParams& params, double t) {
  require_positive_time(t);
  if (params.p() >= 1.0) return 0.0;
  return std::exp(log_pdf(params, t) - log_survival(params, t));
}

double quantile(const LfParams& params, double u) {
  const double mass = 1.0 - params.p();
  if (!(u > 0.0 && u < mass)) throw DomainError("quantile: u must lie in (0, 1 - p)");
  return params.lambda() * std::pow(std::log(mass / u), -1.0 / params.alpha());
}

double raw_moment(const LfParams& params, MomentOrder r) {
  const double order = r.value();
  if (!(params.alpha() > order))
    throw MomentUndefined("moment of order " + std::to_string(r.value()) + " requires alpha > " +
                          std::to_string(r.value()));
  return (1.0 - params.p()) *
         std::exp(order * std::log(params.lambda()) + log_gamma(1.0 - order / params.alpha()));
}

double mean(const LfParams& params) { return raw_moment(params, MomentOrder(1)); }

double variance(const LfParams& params) {
  if (!(params.alpha() > 2.0)) throw MomentUndefined("variance requires alpha > 2");
  const double q = 1.0 - params.p();
  const double g1 = std::exp(log_gamma(1.0 - 1.0 / params.alpha()));
  const double g2 = std::exp(log_gamma(1.0 - 2.0 / params.alpha()));
  return q * params.lambda() * params.lambda() * (g2 - q * g1 * g1);
}

LatentTime draw(const LfParams& params, Rng& rng) {
  // Both uniforms are always consumed so the stream layout does not depend on p.
  const double cure_u = rng.uniform();
  const double time_u = rng.uniform();
  if (cure_u < params.p()) return LatentTime::cured();
  return LatentTime::at(params.lambda() * std::pow(-std::log(time_u), -1.0 / params.alpha()));
}

std::vector<LatentTime> sample(const LfParams& params, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("sample size must be >= 1");
  Rng rng(seed);
  std::vector<LatentTime> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw(params, rng));
  return out;
}

}  // namespace lfsurv
