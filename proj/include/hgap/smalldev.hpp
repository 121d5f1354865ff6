#pragma once

// Monte Carlo estimation of the Dirichlet spectral gap lambda_1 of
// -1/2 sub-Laplacian on the unit homogeneous ball.
//
// Two routes, linked by the dilation identity
//   P(max_{[0,1]} |g_t| < eps) = P(exit time from the unit ball > eps^-2):
//  * exit tail:    log P(exit > t) ~ -lambda_1 t + const
//  * small ball:  -eps^2 log P(max_{[0,1]} |g_t| < eps) -> lambda_1 as eps -> 0
//
// Exits are monitored on the simulation grid only, which overestimates
// survival; fitted rates are therefore biased low by O(sqrt(dt)).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgap/bounds.hpp"
#include "hgap/clifford.hpp"
#include "hgap/parallel.hpp"

namespace hgap {

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

/// 95% (z = 1.96 by default) Wilson score interval for k successes in n trials.
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

// ---------------------------------------------------------------------------
// Exit-time ensemble

/// Per-path first monitored exit step on the fine grid (every step) and on a
/// coarse grid (every `ladder` steps). kCensored when the path survives t_max.
struct ExitEnsemble {
  static constexpr std::int64_t kCensored = -1;

  int m = 0;
  int n = 0;
  double dt = 0.0;
  int ladder = 1;
  double t_max = 0.0;
  std::int64_t max_steps = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> fine_exit;
  std::vector<std::int64_t> coarse_exit;

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(fine_exit.size()); }
};

struct ExitOptions {
  int ladder = 2;
  std::int64_t step_budget = 2'000'000'000;
  Execution execution;
};

/// Requires t_max >= 1 and n_paths >= 1000.
ExitEnsemble simulate_exit_times(const HTypeStructure& s, double dt, std::int64_t n_paths, double t_max,
                                 std::uint64_t seed, const ExitOptions& options = {});

struct SurvivalCurve {
  std::vector<double> t_grid;
  std::vector<std::int64_t> alive;
  std::vector<double> survival;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::int64_t n_paths = 0;
  double dt = 0.0;          // simulation step
  double monitor_dt = 0.0;  // exit monitoring interval
  std::uint64_t seed = 0;
};

/// Survival on a uniform grid of spacing `grid_dt` (rounded to a multiple of the
/// monitoring interval) from 0 to t_max. `coarse` selects the ladder grid.
SurvivalCurve survival_from_exits(const ExitEnsemble& e, double grid_dt = 0.02, bool coarse = false);

/// Fraction of paths alive at an arbitrary time t (fine monitoring), with counts.
struct SurvivalPoint {
  double t = 0.0;
  std::int64_t alive = 0;
  std::int64_t n_paths = 0;
  double survival = 0.0;
  WilsonInterval ci;
};
SurvivalPoint survival_at(const ExitEnsemble& e, double t);

/// simulate_exit_times + survival_from_exits.
SurvivalCurve survival_curve(const HTypeStructure& s, double dt, std::int64_t n_paths, double t_max,
                             std::uint64_t seed, const ExitOptions& options = {}, double grid_dt = 0.02);

struct ExitTimeStats {
  std::int64_t n_paths = 0;
  std::int64_t censored = 0;  // coarse-grid censoring; stats are of min(exit, t_max)
  double mean_fine = 0.0;
  double se_fine = 0.0;
  double mean_coarse = 0.0;
  double se_coarse = 0.0;
  // Per-path extrapolation assuming bias proportional to sqrt(monitor dt):
  // (sqrt(L) E_fine - E_coarse) / (sqrt(L) - 1) for ladder L.
  double mean_extrapolated = 0.0;
  double se_extrapolated = 0.0;
};
ExitTimeStats exit_time_stats(const ExitEnsemble& e);

// ---------------------------------------------------------------------------
// Small-ball ensemble

struct SmallBallEnsemble {
  int m = 0;
  int n = 0;
  double dt = 0.0;
  double T = 1.0;
  double stop_level = 0.0;  // paths stop once max |g| reaches this level
  std::uint64_t seed = 0;
  std::vector<double> max_norm;        // running max of |g_t| (capped by stopping)
  std::vector<double> max_horizontal;  // running max of |B_t| over the same steps
};

SmallBallEnsemble simulate_small_ball(const HTypeStructure& s, double dt, std::int64_t n_paths,
                                      double stop_level, std::uint64_t seed, const Execution& ex = {},
                                      double T = 1.0);

struct SmallDevCurve {
  std::vector<double> eps_grid;
  std::vector<std::int64_t> inside;  // paths with max |g| < eps
  std::vector<double> prob;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::vector<std::optional<double>> rate;  // -eps^2 log prob, empty when prob = 0
  std::int64_t n_paths = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
};

/// Curve from a shared ensemble; eps_grid must be increasing and positive.
/// Throws AllPathsExited if prob = 0 for every eps.
SmallDevCurve small_dev_from_ensemble(const SmallBallEnsemble& e, const std::vector<double>& eps_grid);

/// Requires n_paths >= 1000.
SmallDevCurve small_dev_prob(const HTypeStructure& s, const std::vector<double>& eps_grid, double dt,
                             std::int64_t n_paths, std::uint64_t seed, const Execution& ex = {});

// ---------------------------------------------------------------------------
// Estimators

enum class EstimateMethod { ExitTail, SmallDevExtrapolation };
std::string to_string(EstimateMethod method);

struct GapEstimate {
  double lambda_hat = 0.0;
  double std_error = 0.0;
  EstimateMethod method = EstimateMethod::ExitTail;
  double window_lo = 0.0;  // t or eps
  double window_hi = 0.0;
  int points = 0;
  double r_squared = 0.0;
  double intercept = 0.0;  // exit: log-survival intercept; small-dev: lambda_hat
  double slope = 0.0;      // exit: -lambda_hat; small-dev: correction coefficient
  std::string model;       // fit model description
  std::int64_t n_paths = 0;
  double dt = 0.0;
};

struct WindowPolicy {
  bool automatic = true;
  double t_lo = 0.0;  // fixed window bounds (automatic = false)
  double t_hi = 0.0;
  int min_points = 8;
  double min_r_squared = 0.995;
  std::int64_t min_count = 25;      // points with fewer survivors are excluded
  double max_start_survival = 0.5;  // automatic windows start once S(t) <= this
};

/// Weighted least squares of log S(t) on t with binomial weights
/// N S / (1 - S). The standard error uses the exact covariance of the
/// cumulative survival estimates, Cov(log S_a, log S_b) = (1 - S_a)/(N S_a)
/// for t_a <= t_b. Throws NoStableWindow.
GapEstimate estimate_gap_exit(const SurvivalCurve& curve, const WindowPolicy& policy = {});

enum class ExtrapolationModel {
  AffineEps,         // rate = lambda + a eps
  AffineEpsSquared,  // rate = lambda + a eps^2
};
std::string to_string(ExtrapolationModel model);

struct ExtrapolationPolicy {
  ExtrapolationModel model = ExtrapolationModel::AffineEpsSquared;
  std::int64_t min_count = 25;
  int min_points = 4;
};

/// Weighted fit of rate(eps) over grid points with at least min_count paths
/// inside; lambda_hat is the intercept. Throws InsufficientDefinedRates.
GapEstimate estimate_gap_smalldev(const SmallDevCurve& curve, const ExtrapolationPolicy& policy = {});

enum class Violation { None, BelowLower, AboveUpper };
std::string to_string(Violation v);

struct SandwichVerdict {
  bool pass = false;
  Violation violation = Violation::None;
  double interval_lo = 0.0;  // lambda_hat - k se
  double interval_hi = 0.0;  // lambda_hat + k se
  double lower = 0.0;
  double upper = 0.0;
  double margin_lower = 0.0;  // interval_hi - lower (negative: below the sandwich)
  double margin_upper = 0.0;  // upper - interval_lo (negative: above the sandwich)
  double k_sigma = 0.0;
};

/// PASS iff [lambda_hat - k se, lambda_hat + k se] meets [lower, upper]
/// (closed intervals).
SandwichVerdict sandwich_check(const GapEstimate& est, double lower, double upper, double k_sigma);
SandwichVerdict sandwich_check(const GapEstimate& est, const GapBoundResult& bounds, double k_sigma);

struct AgreementResult {
  double difference = 0.0;
  double combined_se = 0.0;
  double z = 0.0;
  bool agree = false;
};
/// |a - b| <= k sqrt(se_a^2 + se_b^2), for independent estimates.
AgreementResult compare_estimates(const GapEstimate& a, const GapEstimate& b, double k_sigma = 3.0);

/// Two-proportion comparison of P(max_[0,1] |g| < eps) and P(exit > eps^-2)
/// from independent ensembles.
struct ScalingRow {
  double eps = 0.0;
  double p_small_ball = 0.0;
  WilsonInterval ci_small_ball;
  double p_exit = 0.0;
  WilsonInterval ci_exit;
  double z = 0.0;  // difference over pooled standard error
  bool agree = false;       // |z| <= z_crit
  bool ci_overlap = false;  // the two Wilson intervals intersect
};
std::vector<ScalingRow> scaling_identity(const SmallBallEnsemble& small, const ExitEnsemble& exits,
                                         const std::vector<double>& eps_values, double z_crit = 1.959963984540054);

}  // namespace hgap
