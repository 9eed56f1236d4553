// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lfsurv/cli.hpp"
#include "lfsurv/dataset.hpp"
#include "lfsurv/distribution.hpp"
#include "lfsurv/errors.hpp"
#include "lfsurv/inference.hpp"
#include "lfsurv/model_eval.hpp"
#include "lfsurv/montecarlo.hpp"
#include "lfsurv/rng.hpp"

using namespace lfsurv;

namespace {

// Reference values for the embedded leukemia data.
constexpr double kAlpha = 0.65682, kLambda = 0.31358, kP = 0.12476;
constexpr double kNegLogLik = 45.33, kAic = 96.66, kAicc = 97.23;
constexpr double kWeibullNegLogLik = 46.15;
constexpr double kAlphaCi[2] = {0.38140, 0.93225};
constexpr double kLambdaCi[2] = {0.07106, 0.55609};
constexpr double kPCi[2] = {0.00000, 0.37245};
constexpr double kKersey[2] = {0.08, 0.32};

constexpr double kEstimateTol = 0.01;
constexpr double kLogLikTol = 0.05;
constexpr double kCriterionTol = 0.1;
constexpr double kCiTol = 0.02;
constexpr double kFitSeconds = 1.0;

constexpr std::size_t kReplications = 2000;
constexpr std::uint64_t kSimSeed = 20240611;
constexpr double kMreTol = 0.03;
constexpr double kCoverageTol = 0.02;
constexpr double kCensoringTol = 0.01;
constexpr double kSmallSampleCoverage = 0.810;
constexpr double kSmallSampleCoverageTol = 0.04;
constexpr double kSimSeconds = 600.0;

// Expected rows of the 35% censoring scenario at n = 25, 100, 300.
struct ExpectedRow {
  std::size_t n;
  double mre[3];  // alpha, lambda, p
  double coverage[3];
};
constexpr ExpectedRow kBaseline35[] = {
    {25, {1.103, 1.022, 0.997}, {0.951, 0.921, 0.927}},
    {100, {1.023, 1.005, 1.000}, {0.950, 0.945, 0.945}},
    {300, {1.008, 1.002, 0.999}, {0.951, 0.947, 0.947}},
};
constexpr double kBaseline35Censoring = 0.35;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string cli_output(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return std::to_string(code) + "\n" + out.str() + err.str();
}

/// Text of every report behind criteria 1 to 4.
std::string application_reports() {
  return cli_output({"fit", "--data", "kersey1987", "--no-timestamp"}) +
         cli_output({"fit", "--data", "kersey1987", "--model", "lt-weibull", "--no-timestamp"}) +
         cli_output({"compare", "--data", "kersey1987", "--no-timestamp"}) +
         cli_output({"curves", "--lambda", "0.31358", "--alpha", "0.65682", "--p", "0.12476", "--data",
                     "kersey1987", "--no-timestamp"});
}

std::string sim_report_text(const std::vector<SimReport>& reports) {
  std::string text;
  for (const auto& r : reports) {
    for (const ParamStats* s : {&r.alpha, &r.lambda, &r.p})
      text += fmt("%zu %.17g %.17g %.17g\n", r.n, s->mre, s->mse, s->coverage);
    text += fmt("%zu %.17g %zu\n", r.n, r.realized_censoring, r.replications_used);
  }
  return text;
}

Scenario make_scenario(double alpha, double lambda, double p, double censoring, unsigned threads) {
  Scenario s;
  s.truth = LfParams(lambda, alpha, p);
  s.sample_sizes = {25, 100, 300};
  s.replications = kReplications;
  s.target_censoring = censoring;
  s.base_seed = kSimSeed;
  s.threads = threads;
  return s;
}

struct SimRun {
  std::vector<SimReport> baseline35, moderate, heavy;
  std::string text() const { return sim_report_text(baseline35) + sim_report_text(moderate) + sim_report_text(heavy); }
};

SimRun run_simulations(unsigned threads) {
  return {run_scenario(make_scenario(2.0, 4.0, 0.3, 0.35, threads)),
          run_scenario(make_scenario(0.5, 2.0, 0.3, 0.457, threads)),
          run_scenario(make_scenario(0.5, 2.0, 0.5, 0.61, threads))};
}

const ParamStats& stats(const SimReport& r, int k) { return k == 0 ? r.alpha : k == 1 ? r.lambda : r.p; }

/// MSE falls, alpha and lambda MRE approach 1, lambda coverage rises toward 0.95
/// and starts clearly below it.
bool qualitative_pattern(const std::vector<SimReport>& rows, std::string& detail) {
  bool ok = true;
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 1; i < rows.size(); ++i) ok &= stats(rows[i], k).mse < stats(rows[i - 1], k).mse;
  }
  for (int k = 0; k < 2; ++k)
    ok &= std::abs(stats(rows.back(), k).mre - 1.0) < std::abs(stats(rows.front(), k).mre - 1.0);
  ok &= std::abs(rows.back().lambda.coverage - 0.95) < std::abs(rows.front().lambda.coverage - 0.95);
  ok &= rows.front().lambda.coverage < 0.90;
  for (const auto& r : rows)
    detail += fmt("n=%zu mre(%.3f,%.3f,%.3f) mse(%.4f,%.4f,%.4f) cov(%.3f,%.3f,%.3f) used=%zu; ", r.n, r.alpha.mre,
                  r.lambda.mre, r.p.mre, r.alpha.mse, r.lambda.mse, r.p.mse, r.alpha.coverage, r.lambda.coverage,
                  r.p.coverage, r.replications_used);
  return ok;
}

// Property checks over randomly drawn parameter sets.

LfParams random_params(Rng& rng) {
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
  };
  const double lambda = log_uniform(0.1, 10.0);
  const double alpha = log_uniform(0.3, 6.0);
  return LfParams(lambda, alpha, 0.9 * rng.uniform());
}

double pdf_mass(const LfParams& params) {
  using boost::math::quadrature::gauss_kronrod;
  // t = lambda * exp(x), integrated over the real line in two halves.
  auto f = [&](double x) {
    const double t = params.lambda() * std::exp(x);
    return pdf(params, t) * t;
  };
  const double span = 60.0 / std::min(params.alpha(), 1.0);
  return gauss_kronrod<double, 61>::integrate(f, -span, 0.0, 15, 1e-14) +
         gauss_kronrod<double, 61>::integrate(f, 0.0, span, 15, 1e-14);
}

bool property_suite(std::string& detail, const std::vector<std::pair<FitResult, CensoredSample>>& mles) {
  Rng rng(977);
  double worst_mass = 0, worst_roundtrip = 0, worst_survival = 0, worst_hazard = 0, worst_closed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const LfParams params = random_params(rng);
    worst_mass = std::max(worst_mass, std::abs(pdf_mass(params) - (1.0 - params.p())));
    for (int i = 0; i < 20; ++i) {
      const double u = (1.0 - params.p()) * (0.001 + 0.998 * rng.uniform());
      worst_roundtrip = std::max(worst_roundtrip, std::abs(cdf(params, quantile(params, u)) - u));
      const double t = params.lambda() * std::exp(4.0 * (2.0 * rng.uniform() - 1.0));
      worst_survival = std::max(worst_survival, std::abs(survival(params, t) - (1.0 - cdf(params, t))));
      const double f = pdf(params, t);
      if (f > 0) worst_hazard = std::max(worst_hazard, std::abs(hazard(params, t) * survival(params, t) - f) / f);
    }
    if (params.p() > 0) {
      std::vector<Observation> obs;
      for (int i = 0; i < 40; ++i)
        obs.push_back({params.lambda() * std::exp(std::log(5.0) * (2.0 * rng.uniform() - 1.0)), rng.uniform() < 0.6});
      const CensoredSample data(obs);
      double sum = 0;
      for (const auto& o : data.observations())
        sum += o.event ? log_pdf(params, o.time) : log_survival(params, o.time);
      worst_closed = std::max(worst_closed, std::abs(log_likelihood(params, data) - sum));
    }
  }

  double worst_score = 0;
  for (const auto& [result, data] : mles) {
    const Vec3 g = score_check(result, data);
    for (double v : g) worst_score = std::max(worst_score, std::abs(v));
  }
  const bool spd = mles.front().first.observed_info && mles.front().first.observed_info->positive_definite();

  // Kolmogorov-Smirnov against the mixture cdf, cured draws placed at +inf.
  const LfParams ks_params(1.7, 1.3, 0.25);
  const std::size_t draws = 100000;
  std::vector<double> times;
  std::size_t cured = 0;
  for (const auto& latent : sample(ks_params, draws, 4242)) {
    if (latent.is_cured())
      ++cured;
    else
      times.push_back(latent.time());
  }
  std::sort(times.begin(), times.end());
  double ks = std::abs(static_cast<double>(draws - cured) / draws - (1.0 - ks_params.p()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double F = cdf(ks_params, times[i]);
    ks = std::max({ks, std::abs(F - static_cast<double>(i) / draws), std::abs(F - static_cast<double>(i + 1) / draws)});
  }
  const double ks_critical = 1.6276 / std::sqrt(static_cast<double>(draws));

  // Moment Monte Carlo on the latent time with cured draws contributing zero.
  const LfParams m_params(2.0, 5.0, 0.3);
  double s1 = 0, s2 = 0;
  for (const auto& latent : sample(m_params, draws, 777)) {
    const double x = latent.is_cured() ? 0.0 : latent.time();
    s1 += x;
    s2 += x * x;
  }
  const double mc_mean = s1 / draws;
  const double mc_se = std::sqrt((s2 / draws - mc_mean * mc_mean) / draws);
  const double mean_gap = std::abs(mc_mean - mean(m_params));

  bool boundary = true;
  for (int r = 1; r <= 4; ++r) {
    for (double alpha : {r - 0.5, double(r), std::nextafter(double(r), 10.0), r + 0.5}) {
      bool threw = false;
      try {
        raw_moment(LfParams(1.0, alpha, 0.2), MomentOrder(r));
      } catch (const MomentUndefined&) {
        threw = true;
      }
      boundary &= threw == (alpha <= r);
    }
  }

  detail = fmt(
      "mass %.2e, roundtrip %.2e, S=1-F %.2e, h*S=f %.2e, closed form %.2e, score %.2e, info SPD %s, "
      "KS %.5f < %.5f, moment gap %.4f < %.4f, MomentUndefined boundary %s",
      worst_mass, worst_roundtrip, worst_survival, worst_hazard, worst_closed, worst_score, spd ? "yes" : "no", ks,
      ks_critical, mean_gap, 3 * mc_se, boundary ? "ok" : "wrong");
  return worst_mass <= 1e-6 && worst_roundtrip <= 1e-10 && worst_survival <= 1e-14 && worst_hazard <= 1e-12 &&
         worst_closed <= 1e-10 && worst_score < 1e-4 && spd && ks < ks_critical && mean_gap < 3 * mc_se && boundary;
}

}  // namespace

int main() {
  const CensoredSample data = kersey1987();

  // 1. Application fit.
  const auto fit_start = std::chrono::steady_clock::now();
  const FitResult lf = fit(data);
  const double fit_seconds = seconds_since(fit_start);
  const ModelScore lf_score = information_criteria(lf.loglik, 3, static_cast<int>(data.size()));
  const double alpha = lf.estimates[1], lambda = lf.estimates[0], p = lf.estimates[2];
  report(1, "application fit",
         near(alpha, kAlpha, kEstimateTol) && near(lambda, kLambda, kEstimateTol) && near(p, kP, kEstimateTol) &&
             near(lf_score.neg_loglik, kNegLogLik, kLogLikTol) && near(lf_score.aic, kAic, kCriterionTol) &&
             near(lf_score.aicc, kAicc, kCriterionTol) && fit_seconds < kFitSeconds,
         fmt("alpha %.5f (want %.5f), lambda %.5f (want %.5f), p %.5f (want %.5f), -logL %.4f (want %.2f), "
             "AIC %.3f (want %.2f), AICc %.3f (want %.2f), %.3f s",
             alpha, kAlpha, lambda, kLambda, p, kP, lf_score.neg_loglik, kNegLogLik, lf_score.aic, kAic, lf_score.aicc,
             kAicc, fit_seconds));

  // 2. Confidence intervals.
  if (lf.has_intervals()) {
    const Vec3& lo = *lf.ci_lower;
    const Vec3& hi = *lf.ci_upper;
    report(2, "confidence intervals",
           near(lo[1], kAlphaCi[0], kCiTol) && near(hi[1], kAlphaCi[1], kCiTol) && near(lo[0], kLambdaCi[0], kCiTol) &&
               near(hi[0], kLambdaCi[1], kCiTol) && near(lo[2], kPCi[0], kCiTol) && near(hi[2], kPCi[1], kCiTol),
           fmt("alpha (%.5f, %.5f) want (%.5f, %.5f); lambda (%.5f, %.5f) want (%.5f, %.5f); "
               "p (%.5f, %.5f) want (%.5f, %.5f)",
               lo[1], hi[1], kAlphaCi[0], kAlphaCi[1], lo[0], hi[0], kLambdaCi[0], kLambdaCi[1], lo[2], hi[2], kPCi[0],
               kPCi[1]));
  } else {
    report(2, "confidence intervals", false, "no intervals at the LF estimate");
  }

  // 3. Model ranking.
  const FitResult weibull = fit_lt_weibull(data);
  const ModelScore weibull_score = information_criteria(weibull.loglik, 3, static_cast<int>(data.size()));
  const auto ranked = compare({{"lf", lf_score}, {"lt-weibull", weibull_score}});
  const bool lf_first = ranked.front().name == "lf" && lf_score.aicc < weibull_score.aicc;
  report(3, "model ranking", near(weibull_score.neg_loglik, kWeibullNegLogLik, kLogLikTol) && lf_first,
         fmt("LT Weibull -logL %.4f (want %.2f); AICc LF %.3f vs LT Weibull %.3f, LF ranked %s", weibull_score.neg_loglik,
             kWeibullNegLogLik, lf_score.aicc, weibull_score.aicc, lf_first ? "first" : "not first"));

  // 4. Nonparametric cross-check.
  const double plateau = km_cure_fraction(kaplan_meier(data));
  const bool in_kersey = plateau > kKersey[0] && plateau < kKersey[1];
  const bool in_ci = lf.has_intervals() && plateau >= (*lf.ci_lower)[2] && plateau <= (*lf.ci_upper)[2];
  report(4, "Kaplan-Meier plateau", in_kersey && in_ci,
         fmt("plateau %.4f, inside (%.2f, %.2f): %s, inside LF p interval: %s", plateau, kKersey[0], kKersey[1],
             in_kersey ? "yes" : "no", in_ci ? "yes" : "no"));

  // 5. Simulation study.
  const auto sim_start = std::chrono::steady_clock::now();
  const SimRun sims = run_simulations(0);
  const double sim_seconds = seconds_since(sim_start);
  {
    bool ok = sim_seconds < kSimSeconds;
    std::string detail;
    for (std::size_t i = 0; i < std::size(kBaseline35); ++i) {
      const SimReport& r = sims.baseline35[i];
      const ExpectedRow& e = kBaseline35[i];
      ok &= r.n == e.n;
      for (int k = 0; k < 3; ++k) {
        ok &= near(stats(r, k).mre, e.mre[k], kMreTol);
        ok &= near(stats(r, k).coverage, e.coverage[k], kCoverageTol);
      }
      ok &= near(r.realized_censoring, kBaseline35Censoring, kCensoringTol);
      detail += fmt("n=%zu mre(%.3f,%.3f,%.3f) cov(%.3f,%.3f,%.3f) M_p %.4f used %zu; ", r.n, r.alpha.mre,
                    r.lambda.mre, r.p.mre, r.alpha.coverage, r.lambda.coverage, r.p.coverage, r.realized_censoring,
                    r.replications_used);
    }
    std::string moderate, heavy;
    const bool moderate_ok = qualitative_pattern(sims.moderate, moderate);
    const bool heavy_ok = qualitative_pattern(sims.heavy, heavy);
    const double small_cov = sims.moderate.front().lambda.coverage;
    const bool small_ok = near(small_cov, kSmallSampleCoverage, kSmallSampleCoverageTol);
    ok &= moderate_ok && heavy_ok && small_ok;
    report(5, "simulation study", ok,
           fmt("%.1f s. 35%% censoring: ", sim_seconds) + detail + "45.7% censoring (" +
               (moderate_ok ? "pattern ok" : "pattern broken") + "): " + moderate +
               fmt("lambda coverage at n=25 %.3f (want %.3f); ", small_cov, kSmallSampleCoverage) + "61% censoring (" +
               (heavy_ok ? "pattern ok" : "pattern broken") + "): " + heavy);
  }

  // 6. Property suite.
  {
    std::string detail;
    const bool ok = property_suite(detail, {{lf, data}, {weibull, data}});
    report(6, "property suite", ok, detail);
  }

  // 7. Determinism: rerun everything, the simulations on a different thread count.
  {
    const std::string first = application_reports();
    const std::string second = application_reports();
    const SimRun again = run_simulations(3);
    const bool app_same = first == second;
    const bool sim_same = sims.text() == again.text();
    report(7, "determinism", app_same && sim_same,
           fmt("application reports %s, simulation reports %s", app_same ? "identical" : "differ",
               sim_same ? "identical" : "differ"));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
