#include "lfsurv/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "lfsurv/errors.hpp"
#include "lfsurv/rng.hpp"

namespace lfsurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_log_gamma(double x) {
  // x >= 0.5
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (z + i);
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: argument must be positive and finite");
  // Exact zeros at 1 and 2.
  if (x == 1.0 || x == 2.0) return 0.0;
  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_log_gamma(1.0 - x);
  }
  return lanczos_log_gamma(x);
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw DomainError("normal_quantile: probability must be in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), prob);
}

std::optional<std::array<double, 9>> SymMatrix3::cholesky() const {
  std::array<double, 9> l{};
  for (int j = 0; j < 3; ++j) {
    double d = (*this)(j, j);
    for (int k = 0; k < j; ++k) d -= l[j * 3 + k] * l[j * 3 + k];
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    l[j * 3 + j] = std::sqrt(d);
    for (int i = j + 1; i < 3; ++i) {
      double s = (*this)(i, j);
      for (int k = 0; k < j; ++k) s -= l[i * 3 + k] * l[j * 3 + k];
      l[i * 3 + j] = s / l[j * 3 + j];
    }
  }
  return l;
}

SymMatrix3 invert_spd(const SymMatrix3& m) {
  const auto factor = m.cholesky();
  if (!factor) throw NotPositiveDefinite("matrix is not positive definite");
  const auto& l = *factor;

  // inverse of L by forward substitution, then M^-1 = L^-T L^-1
  std::array<double, 9> li{};
  for (int col = 0; col < 3; ++col) {
    for (int i = 0; i < 3; ++i) {
      double s = (i == col) ? 1.0 : 0.0;
      for (int k = 0; k < i; ++k) s -= l[i * 3 + k] * li[k * 3 + col];
      li[i * 3 + col] = s / l[i * 3 + i];
    }
  }
  SymMatrix3 inv;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double s = 0.0;
      for (int k = std::max(i, j); k < 3; ++k) s += li[k * 3 + i] * li[k * 3 + j];
      inv.set(i, j, s);
    }
  }
  return inv;
}

void OptimizerConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(simplex_tolerance > 0.0)) throw std::invalid_argument("simplex_tolerance must be > 0");
  if (!(x_tolerance > 0.0)) throw std::invalid_argument("x_tolerance must be > 0");
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial_step must be > 0");
  if (restarts < 0) throw std::invalid_argument("restarts must be >= 0");
  if (annealing_enabled) {
    if (annealing_steps < 1) throw std::invalid_argument("annealing_steps must be >= 1");
    if (!(annealing_initial_temp > 0.0)) throw std::invalid_argument("annealing_initial_temp must be > 0");
    if (!(annealing_scale > 0.0)) throw std::invalid_argument("annealing_scale must be > 0");
  }
}

namespace {

class CountingObjective {
 public:
  explicit CountingObjective(const Objective& f) : f_(f) {}

  double operator()(const Vec3& x) {
    ++evaluations;
    double v;
    try {
      v = f_(x);
    } catch (const NonFiniteObjective&) {
      return kInf;
    }
    return std::isfinite(v) ? v : kInf;
  }

  int evaluations = 0;

 private:
  const Objective& f_;
};

struct Vertex {
  Vec3 x;
  double f;
};

Vec3 lerp(const Vec3& from, const Vec3& to, double t) {
  Vec3 r;
  for (int i = 0; i < 3; ++i) r[i] = from[i] + t * (to[i] - from[i]);
  return r;
}

// One Nelder-Mead run with standard coefficients (1, 2, 1/2, 1/2).
MinimizeResult nelder_mead(CountingObjective& f, const Vec3& start, double start_value,
                           const OptimizerConfig& cfg) {
  std::array<Vertex, 4> s;
  s[0] = {start, start_value};
  for (int i = 0; i < 3; ++i) {
    const double h = cfg.initial_step * std::max(std::abs(start[i]), 1.0);
    Vertex v{start, kInf};
    // Fall back to the opposite direction, then shorter steps, if rejected.
    for (double scale : {1.0, -1.0, 0.5, -0.5, 0.1, -0.1, 0.01, -0.01}) {
      v.x = start;
      v.x[i] += scale * h;
      v.f = f(v.x);
      if (std::isfinite(v.f)) break;
    }
    s[i + 1] = v;
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  bool converged = false;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    std::stable_sort(s.begin(), s.end(), by_value);
    const double fspread = s[3].f - s[0].f;
    double diameter = 0.0;
    double scale = 1.0;
    for (int k = 1; k < 4; ++k)
      for (int i = 0; i < 3; ++i) diameter = std::max(diameter, std::abs(s[k].x[i] - s[0].x[i]));
    for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(s[0].x[i]));
    if (std::isfinite(fspread) && fspread <= cfg.simplex_tolerance * (std::abs(s[0].f) + 1.0) &&
        diameter <= cfg.x_tolerance * scale) {
      converged = true;
      break;
    }

    Vec3 centroid{};
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) centroid[i] += s[k].x[i] / 3.0;

    const Vertex reflected{lerp(centroid, s[3].x, -1.0), 0.0};
    const double fr = f(reflected.x);
    if (fr < s[0].f) {
      const Vec3 expanded = lerp(centroid, s[3].x, -2.0);
      const double fe = f(expanded);
      s[3] = fe < fr ? Vertex{expanded, fe} : Vertex{reflected.x, fr};
      continue;
    }
    if (fr < s[2].f) {
      s[3] = {reflected.x, fr};
      continue;
    }
    // contraction: outside if the reflection beat the worst point, else inside
    const bool outside = fr < s[3].f;
    const Vec3 contracted = lerp(centroid, outside ? reflected.x : s[3].x, 0.5);
    const double fc = f(contracted);
    if (fc < (outside ? fr : s[3].f)) {
      s[3] = {contracted, fc};
      continue;
    }
    for (int k = 1; k < 4; ++k) {
      s[k].x = lerp(s[0].x, s[k].x, 0.5);
      s[k].f = f(s[k].x);
    }
  }
  std::stable_sort(s.begin(), s.end(), by_value);
  return {s[0].x, s[0].f, converged, 0};
}

// Nelder-Mead, restarted from its own optimum until the restart stops paying.
MinimizeResult polished_nelder_mead(CountingObjective& f, const Vec3& start, double start_value,
                                    const OptimizerConfig& cfg) {
  MinimizeResult best = nelder_mead(f, start, start_value, cfg);
  for (int round = 0; round < 6; ++round) {
    MinimizeResult next = nelder_mead(f, best.x, best.value, cfg);
    const bool improved = next.value < best.value - cfg.simplex_tolerance * (std::abs(best.value) + 1.0);
    if (next.value <= best.value) best = next;
    if (!improved) break;
  }
  return best;
}

// Simulated annealing with a logarithmic cooling schedule and Gaussian proposals
// whose scale shrinks with the temperature. Returns the best point visited.
Vertex anneal(CountingObjective& f, const Vec3& start, double start_value, const OptimizerConfig& cfg) {
  Rng rng(mix_seed({cfg.seed, 0xa11ea1ULL}));
  Vertex current{start, start_value};
  Vertex best = current;
  constexpr int kStepsPerTemp = 10;
  for (int k = 0; k < cfg.annealing_steps; ++k) {
    const double temp = cfg.annealing_initial_temp /
                        std::log(static_cast<double>(k / kStepsPerTemp) * kStepsPerTemp + std::numbers::e);
    const double sd = cfg.annealing_scale * temp / cfg.annealing_initial_temp;
    Vertex cand = current;
    for (int i = 0; i < 3; ++i) cand.x[i] += sd * std::max(std::abs(start[i]), 1.0) * rng.normal();
    cand.f = f(cand.x);
    const double u = rng.uniform();
    if (!std::isfinite(cand.f)) continue;
    if (cand.f <= current.f || u < std::exp(-(cand.f - current.f) / temp)) current = cand;
    if (current.f < best.f) best = current;
  }
  return best;
}

}  // namespace

MinimizeResult minimize(const Objective& f, const Vec3& x0, const OptimizerConfig& config) {
  config.validate();
  CountingObjective counted(f);

  const double f0 = counted(x0);
  Vertex start{x0, f0};
  if (config.annealing_enabled && std::isfinite(f0)) start = anneal(counted, x0, f0, config);

  MinimizeResult best{x0, f0, false, 0};
  bool have_best = false;
  if (std::isfinite(start.f)) {
    best = polished_nelder_mead(counted, start.x, start.f, config);
    have_best = true;
  }

  Rng rng(mix_seed({config.seed, 0x5eedULL}));
  for (int r = 0; r < config.restarts; ++r) {
    Vec3 x = x0;
    for (int i = 0; i < 3; ++i) x[i] += config.restart_spread * std::max(std::abs(x0[i]), 1.0) * rng.normal();
    const double fx = counted(x);
    if (!std::isfinite(fx)) continue;
    MinimizeResult candidate = polished_nelder_mead(counted, x, fx, config);
    if (!have_best || candidate.value < best.value) {
      best = candidate;
      have_best = true;
    }
  }

  if (!have_best || !std::isfinite(best.value))
    throw NonFiniteObjective("objective is non-finite at every probed point");
  best.evaluations = counted.evaluations;
  return best;
}

namespace {

double checked(const Objective& f, const Vec3& x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw NonFiniteObjective("non-finite objective inside finite-difference stencil");
  return v;
}

Vec3 steps_for(const Vec3& x, double step) {
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  Vec3 h;
  for (int i = 0; i < 3; ++i) h[i] = step * std::max(std::abs(x[i]), 1.0);
  return h;
}

}  // namespace

Vec3 fd_gradient(const Objective& f, const Vec3& x, double step) {
  const Vec3 h = steps_for(x, step);
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 up = x, down = x;
    up[i] += h[i];
    down[i] -= h[i];
    g[i] = (checked(f, up) - checked(f, down)) / (up[i] - down[i]);
  }
  return g;
}

SymMatrix3 fd_hessian(const Objective& f, const Vec3& x, double step) {
  const Vec3 h = steps_for(x, step);
  const double f0 = checked(f, x);
  SymMatrix3 out;
  for (int i = 0; i < 3; ++i) {
    Vec3 up = x, down = x;
    up[i] += h[i];
    down[i] -= h[i];
    out.set(i, i, (checked(f, up) - 2.0 * f0 + checked(f, down)) / (h[i] * h[i]));
    for (int j = i + 1; j < 3; ++j) {
      auto at = [&](double si, double sj) {
        Vec3 p = x;
        p[i] += si * h[i];
        p[j] += sj * h[j];
        return checked(f, p);
      };
      const double a = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h[i] * h[j]);
      out.set(i, j, a);
    }
  }
  return out;
}

}  // namespace lfsurv
