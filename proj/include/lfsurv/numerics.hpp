#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

namespace lfsurv {

using Vec3 = std::array<double, 3>;
using Objective = std::function<double(const Vec3&)>;

/// log Gamma(x) for x > 0 (Lanczos, g = 7, nine terms; reflection below 1/2).
double log_gamma(double x);

/// Quantile of the standard normal distribution, 0 < prob < 1.
double normal_quantile(double prob);

/// Symmetric 3x3 matrix stored as its upper triangle.
class SymMatrix3 {
 public:
  SymMatrix3() = default;
  /// Entries in the order (00, 01, 02, 11, 12, 22).
  explicit SymMatrix3(const std::array<double, 6>& upper) : a_(upper) {}

  static SymMatrix3 identity() { return SymMatrix3({1, 0, 0, 1, 0, 1}); }
  static SymMatrix3 diagonal(const Vec3& d) { return SymMatrix3({d[0], 0, 0, d[1], 0, d[2]}); }

  double operator()(int i, int j) const noexcept { return a_[index(i, j)]; }
  void set(int i, int j, double v) noexcept { a_[index(i, j)] = v; }

  Vec3 diag() const noexcept { return {a_[0], a_[3], a_[5]}; }

  /// Lower Cholesky factor, row-major 3x3; empty if not positive definite.
  std::optional<std::array<double, 9>> cholesky() const;
  bool positive_definite() const { return cholesky().has_value(); }

  friend bool operator==(const SymMatrix3&, const SymMatrix3&) = default;

 private:
  static constexpr int index(int i, int j) noexcept {
    if (i > j) std::swap(i, j);
    return i == 0 ? j : (i == 1 ? 2 + j : 5);
  }
  std::array<double, 6> a_{};
};

/// Throws NotPositiveDefinite when the Cholesky factorization fails.
SymMatrix3 invert_spd(const SymMatrix3& m);

struct OptimizerConfig {
  int max_iterations = 5000;          // per Nelder-Mead run
  double simplex_tolerance = 1e-12;   // relative spread of function values
  double x_tolerance = 1e-7;          // simplex diameter, relative to max(|x|, 1)
  double initial_step = 0.25;         // initial simplex edge, relative to max(|x|, 1)
  int restarts = 4;                   // extra perturbed starts; 0 means single start
  double restart_spread = 0.5;        // sd of the perturbation of x0 for restarts
  bool annealing_enabled = false;
  int annealing_steps = 2000;
  double annealing_initial_temp = 1.0;
  double annealing_scale = 0.2;       // proposal sd at the initial temperature
  std::uint64_t seed = 20170101;

  /// Throws std::invalid_argument on nonsensical settings.
  void validate() const;
};

struct MinimizeResult {
  Vec3 x{};
  double value = 0.0;
  bool converged = false;
  int evaluations = 0;
};

/// Minimizes f starting at x0: optional simulated-annealing prelude, then
/// Nelder-Mead, restarted from perturbed copies of x0. Non-finite values and
/// NonFiniteObjective exceptions reject the point. Deterministic given config.
MinimizeResult minimize(const Objective& f, const Vec3& x0, const OptimizerConfig& config);

/// Central differences with per-coordinate step `step * max(|x_i|, 1)`.
Vec3 fd_gradient(const Objective& f, const Vec3& x, double step = 1e-4);
SymMatrix3 fd_hessian(const Objective& f, const Vec3& x, double step = 1e-4);

}  // namespace lfsurv
