#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lfsurv/rng.hpp"

namespace lfsurv {

/// Parameters of the long-term Frechet law: scale lambda > 0, shape alpha > 0,
/// cure fraction p in [0, 1]. The endpoints of p are accepted here; fitting
/// requires the open interval.
class LfParams {
 public:
  /// Throws DomainError when a parameter is out of range.
  LfParams(double lambda, double alpha, double p);

  double lambda() const noexcept { return lambda_; }
  double alpha() const noexcept { return alpha_; }
  double p() const noexcept { return p_; }

  friend bool operator==(const LfParams&, const LfParams&) = default;

 private:
  double lambda_;
  double alpha_;
  double p_;
};

/// Order r >= 1 of a raw moment.
class MomentOrder {
 public:
  explicit MomentOrder(int r);
  int value() const noexcept { return r_; }

 private:
  int r_;
};

// Density, distribution and related functions. All of them require t > 0 and
// throw DomainError otherwise. (t/lambda)^-alpha is always formed in log space.

double pdf(const LfParams& params, double t);
/// Requires p < 1.
double log_pdf(const LfParams& params, double t);
/// (1 - p) exp(-(t/lambda)^-alpha); tends to 1 - p as t grows.
double cdf(const LfParams& params, double t);
/// p + (1 - p)(1 - exp(-(t/lambda)^-alpha)).
double survival(const LfParams& params, double t);
/// log of survival(), accurate when survival is tiny.
double log_survival(const LfParams& params, double t);
double hazard(const LfParams& params, double t);

/// Inverse of cdf() on 0 < u < 1 - p.
double quantile(const LfParams& params, double u);

/// E[T^r 1{susceptible}] = (1 - p) lambda^r Gamma(1 - r/alpha). Throws
/// MomentUndefined unless alpha > r.
double raw_moment(const LfParams& params, MomentOrder r);
double mean(const LfParams& params);
double variance(const LfParams& params);

/// A latent failure time: either a finite time or the cured marker.
class LatentTime {
 public:
  static LatentTime cured() noexcept { return LatentTime(0.0, true); }
  static LatentTime at(double t) noexcept { return LatentTime(t, false); }

  bool is_cured() const noexcept { return cured_; }
  /// Only meaningful when !is_cured().
  double time() const noexcept { return time_; }

 private:
  LatentTime(double t, bool cured) : time_(t), cured_(cured) {}
  double time_;
  bool cured_;
};

LatentTime draw(const LfParams& params, Rng& rng);
std::vector<LatentTime> sample(const LfParams& params, std::size_t n, std::uint64_t seed);

}  // namespace lfsurv
