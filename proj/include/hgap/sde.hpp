#pragma once

// Simulation of the hypoelliptic Brownian motion on an H-type group and the
// diagnostics for its time-change representation A_t = W_{tau(t)}, with
// tau(t) = 1/4 int_0^t |B_s|^2 ds and W an n-dimensional Brownian motion.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "hgap/clifford.hpp"
#include "hgap/parallel.hpp"
#include "hgap/walker.hpp"

namespace hgap {

inline constexpr std::int64_t kDefaultStepBudget = 200'000'000;

/// Full trajectory. B is (steps+1) x m, A is (steps+1) x n, row-major.
struct PathSample {
  int m = 0;
  int n = 0;
  double dt = 0.0;
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::vector<double> B;
  std::vector<double> A;
  std::vector<double> tau;

  double B_at(std::int64_t k, int j) const { return B[static_cast<std::size_t>(k * m + j)]; }
  double A_at(std::int64_t k, int i) const { return A[static_cast<std::size_t>(k * n + i)]; }
};

/// Number of Euler steps for horizon T; throws InvalidArgument for dt > T or
/// non-positive inputs and StepBudgetExceeded above the budget.
std::int64_t step_count(double T, double dt, std::int64_t budget = kDefaultStepBudget);

/// Path number `path_index` of the ensemble with master seed `seed`.
PathSample simulate_path(const HTypeStructure& s, double T, double dt, std::uint64_t seed,
                         std::uint64_t path_index = 0, IntegralRule rule = IntegralRule::Ito);

/// sum_k dA_i(k) dA_j(k), zero-based indices; throws IndexOutOfRange.
double empirical_quadratic_covariation(const PathSample& p, int i, int j);

struct TerminalSample {
  std::vector<double> A;           // A(T)
  double tau = 0.0;                // tau(T)
  double b_squared = 0.0;          // |B_T|^2
  double max_norm = 0.0;           // max over the time grid of |g_t|
  std::vector<double> covariation; // n x n, sum dA_i dA_j (empty unless requested)
};

struct SimulationOptions {
  IntegralRule rule = IntegralRule::Ito;
  bool track_covariation = true;
  std::int64_t step_budget = kDefaultStepBudget;
  Execution execution;
};

/// Terminal values of `count` independent paths; path k uses stream (seed, k).
/// Output order is path order regardless of parallelism.
std::vector<TerminalSample> time_change_samples(const HTypeStructure& s, double T, double dt,
                                                std::uint64_t seed, std::int64_t count,
                                                const SimulationOptions& options = {});

struct LemmaDiagnostics {
  std::int64_t sample_count = 0;
  int m = 0;
  int n = 0;
  double T = 0.0;
  double alpha = 0.01;
  // Kolmogorov-Smirnov distance of A_i(T)/sqrt(tau(T)) to N(0, 1).
  std::vector<double> ks_statistics;
  double ks_critical = 0.0;  // c(alpha) / sqrt(N)
  // corr(A_i(T)^2 / tau(T), tau(T)).
  std::vector<double> independence_corr;
  double corr_threshold = 0.0;  // 3 / sqrt(N)
  // Median over paths of |<A_i, A_j>_T| / <A_i>_T; diagonal is 1.
  std::vector<double> cross_covariations;
  // Sample mean and standard error of A_i(T)^2 against E = m T^2 / 8.
  std::vector<double> mean_a_squared;
  std::vector<double> se_a_squared;
  double expected_a_squared = 0.0;
  double mean_tau = 0.0;
  double se_tau = 0.0;
  // Sample variance of A_i(T)/sqrt(tau(T)) (should be 1).
  std::vector<double> normalized_variance;

  bool ks_pass(int i) const { return ks_statistics[static_cast<std::size_t>(i)] < ks_critical; }
  bool independence_pass(int i) const {
    return std::abs(independence_corr[static_cast<std::size_t>(i)]) < corr_threshold;
  }
  bool covariation_pass(double threshold = 0.05) const;
  bool moment_pass(int i, double k_sigma = 3.0) const {
    const auto k = static_cast<std::size_t>(i);
    return std::abs(mean_a_squared[k] - expected_a_squared) <= k_sigma * se_a_squared[k];
  }
  bool passed() const;
};

/// Asymptotic two-sided KS critical value c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_critical_coefficient(double alpha);

/// sup_x |F_N(x) - Phi(x)| for the empirical CDF of `values`.
double ks_statistic_normal(std::vector<double> values);

double standard_normal_cdf(double x);

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Requires >= 1000 samples (InsufficientSamples) with covariation tracked.
LemmaDiagnostics lemma_diagnostics(const std::vector<TerminalSample>& samples, int m, double T,
                                   double alpha = 0.01);

// Binary full-path format, little-endian:
//   "HGAP" | u32 version | u32 m | u32 n | u64 steps | f64 dt |
//   per path: f64 B[(steps+1) * m], f64 A[(steps+1) * n], f64 tau[steps+1]
inline constexpr std::uint32_t kPathFormatVersion = 1;

void write_paths_binary(const std::filesystem::path& file, const std::vector<PathSample>& paths);
std::vector<PathSample> read_paths_binary(const std::filesystem::path& file);

}  // namespace hgap
