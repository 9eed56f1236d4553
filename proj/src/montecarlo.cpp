#include "lfsurv/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lfsurv/errors.hpp"
#include "lfsurv/inference.hpp"
#include "lfsurv/rng.hpp"

namespace lfsurv {

namespace {

constexpr double kCalibrationMargin = 1e-3;
constexpr double kMinTauRatio = 1e-8;  // relative to lambda
constexpr double kMaxTauRatio = 1e12;

}  // namespace

double censoring_probability(const LfParams& truth, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("tau must be positive and finite");
  // mean of the susceptible cdf over (0, tau), substituting c = tau v
  const double log_ratio = std::log(tau) - std::log(truth.lambda());
  auto cdf0 = [&](double v) {
    if (v <= 0.0) return 0.0;
    return std::exp(-std::exp(-truth.alpha() * (log_ratio + std::log(v))));
  };
  const double mean_cdf0 =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(cdf0, 0.0, 1.0, 20, 1e-13);
  return truth.p() + (1.0 - truth.p()) * (1.0 - mean_cdf0);
}

double calibrate_censoring(const LfParams& truth, double target) {
  if (!(target > truth.p() + kCalibrationMargin))
    throw CalibrationInfeasible("target censoring must exceed the cure fraction p (every cured subject is censored)");
  double lo = std::log(truth.lambda() * kMinTauRatio);
  double hi = std::log(truth.lambda() * kMaxTauRatio);
  if (!(target < censoring_probability(truth, std::exp(lo))))
    throw CalibrationInfeasible("target censoring is not reachable with a positive censoring bound");
  if (!(target > censoring_probability(truth, std::exp(hi))))
    throw CalibrationInfeasible("target censoring is too close to the cure fraction");

  // censoring probability decreases in tau
  for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (censoring_probability(truth, std::exp(mid)) > target)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

CensoredSample generate_replicate(const LfParams& truth, std::size_t n, double tau, std::uint64_t seed) {
  if (n == 0) throw DomainError("replicate size must be >= 1");
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  Rng rng(seed);
  std::vector<Observation> obs;
  obs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const LatentTime latent = draw(truth, rng);
    const double c = tau * rng.uniform();
    if (latent.is_cured() || latent.time() > c)
      obs.push_back({c, false});
    else
      obs.push_back({latent.time(), true});
  }
  return CensoredSample(std::move(obs));
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t n, std::size_t index) noexcept {
  return mix_seed({base_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index)});
}

namespace {

struct ReplicateOutcome {
  bool usable = false;
  double censored_fraction = 0.0;
  Vec3 estimate{};  // (lambda, alpha, p)
  std::array<bool, 3> covered{};
};

ReplicateOutcome run_replicate(const Scenario& s, std::size_t n, double tau, std::size_t index) {
  ReplicateOutcome out;
  const CensoredSample data = generate_replicate(s.truth, n, tau, replicate_seed(s.base_seed, n, index));
  out.censored_fraction = static_cast<double>(data.censored_count()) / static_cast<double>(n);
  try {
    const FitResult fit_result = fit(data, s.optimizer, s.ci_level);
    if (!fit_result.converged || !fit_result.has_intervals()) return out;
    const Vec3 truth{s.truth.lambda(), s.truth.alpha(), s.truth.p()};
    out.usable = true;
    out.estimate = fit_result.estimates;
    for (int i = 0; i < 3; ++i)
      out.covered[i] = (*fit_result.ci_lower)[i] <= truth[i] && truth[i] <= (*fit_result.ci_upper)[i];
  } catch (const NoEvents&) {
  } catch (const NonFiniteObjective&) {
  }
  return out;
}

std::vector<ReplicateOutcome> run_cell(const Scenario& s, std::size_t n, double tau) {
  std::vector<ReplicateOutcome> outcomes(s.replications);
  unsigned workers = s.threads != 0 ? s.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, s.replications));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < s.replications; i = next++) outcomes[i] = run_replicate(s, n, tau, i);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return outcomes;
}

SimReport summarize(const Scenario& s, std::size_t n, const std::vector<ReplicateOutcome>& outcomes) {
  const Vec3 truth{s.truth.lambda(), s.truth.alpha(), s.truth.p()};
  Vec3 rel{}, sq{};
  std::array<std::size_t, 3> hits{};
  double censored = 0.0;
  std::size_t used = 0;
  // Summation in replicate order keeps the result independent of scheduling.
  for (const auto& o : outcomes) {
    censored += o.censored_fraction;
    if (!o.usable) continue;
    ++used;
    for (int i = 0; i < 3; ++i) {
      rel[i] += o.estimate[i] / truth[i];
      sq[i] += (o.estimate[i] - truth[i]) * (o.estimate[i] - truth[i]);
      hits[i] += o.covered[i] ? 1 : 0;
    }
  }
  auto stats = [&](int i) {
    if (used == 0) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return ParamStats{nan, nan, nan};
    }
    const double m = static_cast<double>(used);
    return ParamStats{rel[i] / m, sq[i] / m, static_cast<double>(hits[i]) / m};
  };

  SimReport report;
  report.n = n;
  report.lambda = stats(0);
  report.alpha = stats(1);
  report.p = stats(2);
  report.realized_censoring = censored / static_cast<double>(outcomes.size());
  report.replications_used = used;
  report.replications_requested = outcomes.size();
  return report;
}

}  // namespace

std::vector<SimReport> run_scenario(const Scenario& s) {
  if (s.sample_sizes.empty()) throw DomainError("scenario needs at least one sample size");
  if (s.replications == 0) throw DomainError("scenario needs at least one replication");
  if (!(s.ci_level > 0.0 && s.ci_level < 1.0)) throw DomainError("ci_level must lie in (0, 1)");
  for (auto n : s.sample_sizes)
    if (n == 0) throw DomainError("sample sizes must be positive");

  const double tau = calibrate_censoring(s.truth, s.target_censoring);
  std::vector<SimReport> reports;
  reports.reserve(s.sample_sizes.size());
  for (auto n : s.sample_sizes) reports.push_back(summarize(s, n, run_cell(s, n, tau)));
  return reports;
}

}  // namespace lfsurv
