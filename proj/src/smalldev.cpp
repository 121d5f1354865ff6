#include "hgap/smalldev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hgap/error.hpp"
#include "hgap/rng.hpp"
#include "hgap/sde.hpp"
#include "hgap/walker.hpp"

namespace hgap {

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// ---------------------------------------------------------------------------
// Exit times

ExitEnsemble simulate_exit_times(const HTypeStructure& s, double dt, std::int64_t n_paths, double t_max,
                                 std::uint64_t seed, const ExitOptions& options) {
  if (!(t_max >= 1.0)) throw Error(ErrorCode::InvalidArgument, "t_max must be at least 1");
  if (n_paths < 1000) throw Error(ErrorCode::InvalidArgument, "n_paths must be at least 1000");
  if (options.ladder < 1) throw Error(ErrorCode::InvalidArgument, "ladder must be positive");
  const auto max_steps = step_count(t_max, dt, options.step_budget);
  const HorizontalWalker prototype(s);
  const double sqrt_dt = std::sqrt(dt);
  const std::int64_t ladder = options.ladder;

  ExitEnsemble e;
  e.m = s.m();
  e.n = s.n();
  e.dt = dt;
  e.ladder = options.ladder;
  e.t_max = t_max;
  e.max_steps = max_steps;
  e.seed = seed;
  e.fine_exit.assign(static_cast<std::size_t>(n_paths), ExitEnsemble::kCensored);
  e.coarse_exit.assign(static_cast<std::size_t>(n_paths), ExitEnsemble::kCensored);

  for_each_path(n_paths, options.execution, [&](std::int64_t path) {
    HorizontalWalker walker = prototype;
    PathStream rng(seed, static_cast<std::uint64_t>(path));
    std::int64_t fine = ExitEnsemble::kCensored;
    std::int64_t coarse = ExitEnsemble::kCensored;
    for (std::int64_t k = 1; k <= max_steps; ++k) {
      walker.step(rng, dt, sqrt_dt);
      if (walker.norm4() >= 1.0) {
        if (fine == ExitEnsemble::kCensored) fine = k;
        if (k % ladder == 0) {
          coarse = k;
          break;
        }
      }
    }
    e.fine_exit[static_cast<std::size_t>(path)] = fine;
    e.coarse_exit[static_cast<std::size_t>(path)] = coarse;
  });
  return e;
}

SurvivalCurve survival_from_exits(const ExitEnsemble& e, double grid_dt, bool coarse) {
  if (!(grid_dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid_dt must be positive");
  const std::int64_t monitor = coarse ? e.ladder : 1;
  const std::int64_t stride =
      monitor * std::max<std::int64_t>(1, std::llround(grid_dt / (e.dt * static_cast<double>(monitor))));
  const std::int64_t points = e.max_steps / stride + 1;
  const auto& exits = coarse ? e.coarse_exit : e.fine_exit;

  std::vector<std::int64_t> deaths(static_cast<std::size_t>(points), 0);
  for (auto step : exits) {
    if (step == ExitEnsemble::kCensored) continue;
    const std::int64_t bin = (step + stride - 1) / stride;  // first grid index with exit <= t
    if (bin < points) ++deaths[static_cast<std::size_t>(bin)];
  }

  SurvivalCurve c;
  c.n_paths = e.size();
  c.dt = e.dt;
  c.monitor_dt = e.dt * static_cast<double>(monitor);
  c.seed = e.seed;
  std::int64_t alive = c.n_paths;
  for (std::int64_t k = 0; k < points; ++k) {
    alive -= deaths[static_cast<std::size_t>(k)];
    c.t_grid.push_back(static_cast<double>(k * stride) * e.dt);
    c.alive.push_back(alive);
    c.survival.push_back(static_cast<double>(alive) / static_cast<double>(c.n_paths));
    const auto ci = wilson_interval(alive, c.n_paths);
    c.ci_low.push_back(std::min(ci.low, c.survival.back()));
    c.ci_high.push_back(std::max(ci.high, c.survival.back()));
  }
  return c;
}

SurvivalPoint survival_at(const ExitEnsemble& e, double t) {
  if (t < 0.0 || t > e.t_max) throw Error(ErrorCode::InvalidArgument, "time outside the simulated horizon");
  SurvivalPoint p;
  p.t = t;
  p.n_paths = e.size();
  for (auto step : e.fine_exit) {
    if (step == ExitEnsemble::kCensored || static_cast<double>(step) * e.dt > t) ++p.alive;
  }
  p.survival = static_cast<double>(p.alive) / static_cast<double>(p.n_paths);
  p.ci = wilson_interval(p.alive, p.n_paths);
  return p;
}

SurvivalCurve survival_curve(const HTypeStructure& s, double dt, std::int64_t n_paths, double t_max,
                             std::uint64_t seed, const ExitOptions& options, double grid_dt) {
  return survival_from_exits(simulate_exit_times(s, dt, n_paths, t_max, seed, options), grid_dt);
}

ExitTimeStats exit_time_stats(const ExitEnsemble& e) {
  ExitTimeStats st;
  st.n_paths = e.size();
  const double n = static_cast<double>(st.n_paths);
  const double root = std::sqrt(static_cast<double>(e.ladder));
  const bool extrapolate = e.ladder > 1;
  double sf = 0.0, sff = 0.0, sc = 0.0, scc = 0.0, sx = 0.0, sxx = 0.0;
  for (std::int64_t k = 0; k < st.n_paths; ++k) {
    const auto fs = e.fine_exit[static_cast<std::size_t>(k)];
    const auto cs = e.coarse_exit[static_cast<std::size_t>(k)];
    if (cs == ExitEnsemble::kCensored) ++st.censored;
    const double tf = fs == ExitEnsemble::kCensored ? e.t_max : static_cast<double>(fs) * e.dt;
    const double tc = cs == ExitEnsemble::kCensored ? e.t_max : static_cast<double>(cs) * e.dt;
    const double tx = extrapolate ? (root * tf - tc) / (root - 1.0) : tf;
    sf += tf;
    sff += tf * tf;
    sc += tc;
    scc += tc * tc;
    sx += tx;
    sxx += tx * tx;
  }
  auto finish = [n](double s1, double s2, double& mean, double& se) {
    mean = s1 / n;
    const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
    se = std::sqrt(var / n);
  };
  finish(sf, sff, st.mean_fine, st.se_fine);
  finish(sc, scc, st.mean_coarse, st.se_coarse);
  finish(sx, sxx, st.mean_extrapolated, st.se_extrapolated);
  return st;
}

// ---------------------------------------------------------------------------
// Small ball

SmallBallEnsemble simulate_small_ball(const HTypeStructure& s, double dt, std::int64_t n_paths,
                                      double stop_level, std::uint64_t seed, const Execution& ex, double T) {
  if (n_paths < 1000) throw Error(ErrorCode::InvalidArgument, "n_paths must be at least 1000");
  if (!(stop_level > 0.0)) throw Error(ErrorCode::InvalidArgument, "stop level must be positive");
  const auto steps = step_count(T, dt);
  const HorizontalWalker prototype(s);
  const double sqrt_dt = std::sqrt(dt);
  const double stop4 = stop_level * stop_level * stop_level * stop_level;

  SmallBallEnsemble e;
  e.m = s.m();
  e.n = s.n();
  e.dt = dt;
  e.T = T;
  e.stop_level = stop_level;
  e.seed = seed;
  e.max_norm.assign(static_cast<std::size_t>(n_paths), 0.0);
  e.max_horizontal.assign(static_cast<std::size_t>(n_paths), 0.0);

  for_each_path(n_paths, ex, [&](std::int64_t path) {
    HorizontalWalker walker = prototype;
    PathStream rng(seed, static_cast<std::uint64_t>(path));
    double max4 = 0.0;
    double max_b2 = 0.0;
    for (std::int64_t k = 0; k < steps; ++k) {
      walker.step(rng, dt, sqrt_dt);
      max4 = std::max(max4, walker.norm4());
      max_b2 = std::max(max_b2, walker.b_squared());
      if (max4 >= stop4) break;
    }
    e.max_norm[static_cast<std::size_t>(path)] = std::sqrt(std::sqrt(max4));
    e.max_horizontal[static_cast<std::size_t>(path)] = std::sqrt(std::sqrt(max_b2 * max_b2));
  });
  return e;
}

SmallDevCurve small_dev_from_ensemble(const SmallBallEnsemble& e, const std::vector<double>& eps_grid) {
  if (eps_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty eps grid");
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] > 0.0) || (k > 0 && !(eps_grid[k] > eps_grid[k - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "eps grid must be positive and increasing");
    }
  }
  if (eps_grid.back() > e.stop_level) {
    throw Error(ErrorCode::InvalidArgument, "eps grid exceeds the ensemble stop level");
  }
  std::vector<double> sorted = e.max_norm;
  std::sort(sorted.begin(), sorted.end());

  SmallDevCurve c;
  c.eps_grid = eps_grid;
  c.n_paths = static_cast<std::int64_t>(sorted.size());
  c.dt = e.dt;
  c.seed = e.seed;
  const double n = static_cast<double>(c.n_paths);
  bool any = false;
  for (double eps : eps_grid) {
    const auto inside = static_cast<std::int64_t>(std::lower_bound(sorted.begin(), sorted.end(), eps) - sorted.begin());
    const double p = static_cast<double>(inside) / n;
    const auto ci = wilson_interval(inside, c.n_paths);
    c.inside.push_back(inside);
    c.prob.push_back(p);
    c.ci_low.push_back(std::min(ci.low, p));
    c.ci_high.push_back(std::max(ci.high, p));
    if (inside > 0) {
      any = true;
      c.rate.emplace_back(-eps * eps * std::log(p));
    } else {
      c.rate.emplace_back(std::nullopt);
    }
  }
  if (!any) throw Error(ErrorCode::AllPathsExited, "no path stayed inside any eps ball; grid too small");
  return c;
}

SmallDevCurve small_dev_prob(const HTypeStructure& s, const std::vector<double>& eps_grid, double dt,
                             std::int64_t n_paths, std::uint64_t seed, const Execution& ex) {
  if (eps_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty eps grid");
  const double stop = *std::max_element(eps_grid.begin(), eps_grid.end());
  return small_dev_from_ensemble(simulate_small_ball(s, dt, n_paths, stop, seed, ex), eps_grid);
}

// ---------------------------------------------------------------------------
// Estimators

std::string to_string(EstimateMethod method) {
  return method == EstimateMethod::ExitTail ? "exit_tail" : "smalldev_extrapolation";
}

std::string to_string(ExtrapolationModel model) {
  return model == ExtrapolationModel::AffineEps ? "affine_eps" : "affine_eps2";
}

std::string to_string(Violation v) {
  switch (v) {
    case Violation::None: return "none";
    case Violation::BelowLower: return "below-lower";
    case Violation::AboveUpper: return "above-upper";
  }
  return "none";
}

namespace {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  std::vector<double> slope_coef;      // slope = sum slope_coef[k] y[k]
  std::vector<double> intercept_coef;  // intercept = sum intercept_coef[k] y[k]
};

LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  LineFit fit;
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sw += w[k];
    sx += w[k] * x[k];
    sy += w[k] * y[k];
  }
  const double xbar = sx / sw;
  const double ybar = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += w[k] * (x[k] - xbar) * (x[k] - xbar);
    sxy += w[k] * (x[k] - xbar) * (y[k] - ybar);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = ybar - fit.slope * xbar;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - fit.intercept - fit.slope * x[k];
    ss_res += w[k] * r * r;
    ss_tot += w[k] * (y[k] - ybar) * (y[k] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.slope_coef.resize(x.size());
  fit.intercept_coef.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    fit.slope_coef[k] = sxx > 0.0 ? w[k] * (x[k] - xbar) / sxx : 0.0;
    fit.intercept_coef[k] = w[k] / sw - xbar * fit.slope_coef[k];
  }
  return fit;
}

// Var(sum c_k y_k) when Cov(y_k, y_l) = v[min(k, l)] * s_k s_l, points ordered so
// that the shared variance term is indexed by the earlier point.
double nested_variance(const std::vector<double>& c, const std::vector<double>& v, const std::vector<double>& scale,
                       bool shared_is_later) {
  const std::size_t n = c.size();
  std::vector<double> a(n);
  for (std::size_t k = 0; k < n; ++k) a[k] = c[k] * scale[k];
  double total = 0.0;
  if (!shared_is_later) {
    // Cov indexed by min(k, l): sum_k v_k (a_k^2 + 2 a_k sum_{l>k} a_l).
    double tail = 0.0;
    for (std::size_t k = n; k-- > 0;) {
      total += v[k] * (a[k] * a[k] + 2.0 * a[k] * tail);
      tail += a[k];
    }
  } else {
    double head = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      total += v[k] * (a[k] * a[k] + 2.0 * a[k] * head);
      head += a[k];
    }
  }
  return std::max(0.0, total);
}

struct ExitFit {
  GapEstimate est;
  bool ok = false;
};

ExitFit fit_exit_window(const SurvivalCurve& curve, const std::vector<std::size_t>& idx) {
  const double n = static_cast<double>(curve.n_paths);
  std::vector<double> t, y, w, v, ones;
  for (auto k : idx) {
    const double s = curve.survival[k];
    t.push_back(curve.t_grid[k]);
    y.push_back(std::log(s));
    const double var = (1.0 - s) / (n * s);
    v.push_back(var);
    w.push_back(1.0 / std::max(var, 1.0 / (n * n)));
    ones.push_back(1.0);
  }
  const auto line = weighted_line(t, y, w);
  ExitFit out;
  out.est.method = EstimateMethod::ExitTail;
  out.est.lambda_hat = -line.slope;
  out.est.std_error = std::sqrt(nested_variance(line.slope_coef, v, ones, false));
  out.est.window_lo = t.front();
  out.est.window_hi = t.back();
  out.est.points = static_cast<int>(idx.size());
  out.est.r_squared = line.r_squared;
  out.est.intercept = line.intercept;
  out.est.slope = line.slope;
  out.est.model = "log S(t) = a - lambda t";
  out.est.n_paths = curve.n_paths;
  out.est.dt = curve.dt;
  out.ok = out.est.std_error > 0.0 && std::isfinite(out.est.lambda_hat);
  return out;
}

}  // namespace

GapEstimate estimate_gap_exit(const SurvivalCurve& curve, const WindowPolicy& policy) {
  const std::size_t size = curve.t_grid.size();
  auto usable = [&](std::size_t k) {
    return curve.alive[k] >= policy.min_count && curve.alive[k] < curve.n_paths;
  };
  if (!policy.automatic) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < size; ++k)
      if (curve.t_grid[k] >= policy.t_lo && curve.t_grid[k] <= policy.t_hi && usable(k)) idx.push_back(k);
    if (static_cast<int>(idx.size()) < std::max(2, policy.min_points)) {
      throw Error(ErrorCode::NoStableWindow, "fixed window holds too few usable points");
    }
    auto fit = fit_exit_window(curve, idx);
    if (!fit.ok) throw Error(ErrorCode::NoStableWindow, "degenerate fit in fixed window");
    return fit.est;
  }

  std::size_t last = size;
  for (std::size_t k = 0; k < size; ++k)
    if (usable(k)) last = k;
  if (last == size) throw Error(ErrorCode::NoStableWindow, "no usable survival points");

  for (std::size_t start = 0; start <= last; ++start) {
    if (!usable(start) || curve.survival[start] > policy.max_start_survival) continue;
    std::vector<std::size_t> idx;
    for (std::size_t k = start; k <= last; ++k)
      if (usable(k)) idx.push_back(k);
    if (static_cast<int>(idx.size()) < policy.min_points) break;
    auto fit = fit_exit_window(curve, idx);
    if (fit.ok && fit.est.r_squared >= policy.min_r_squared) return fit.est;
  }
  throw Error(ErrorCode::NoStableWindow, "no window with enough points and R^2 above threshold");
}

GapEstimate estimate_gap_smalldev(const SmallDevCurve& curve, const ExtrapolationPolicy& policy) {
  const double n = static_cast<double>(curve.n_paths);
  std::vector<double> g, y, w, v, scale;
  std::vector<double> eps_used;
  for (std::size_t k = 0; k < curve.eps_grid.size(); ++k) {
    if (!curve.rate[k] || curve.inside[k] < policy.min_count || !(curve.prob[k] < 1.0)) continue;
    const double eps = curve.eps_grid[k];
    const double p = curve.prob[k];
    const double e2 = eps * eps;
    eps_used.push_back(eps);
    g.push_back(policy.model == ExtrapolationModel::AffineEps ? eps : e2);
    y.push_back(*curve.rate[k]);
    const double var_log = (1.0 - p) / (n * p);
    v.push_back(var_log);
    scale.push_back(e2);
    const double var_rate = e2 * e2 * var_log;
    w.push_back(1.0 / std::max(var_rate, 1e-300));
  }
  if (static_cast<int>(g.size()) < policy.min_points) {
    throw Error(ErrorCode::InsufficientDefinedRates,
                "need at least " + std::to_string(policy.min_points) + " grid points with defined rates");
  }
  const auto line = weighted_line(g, y, w);
  GapEstimate est;
  est.method = EstimateMethod::SmallDevExtrapolation;
  est.lambda_hat = line.intercept;
  // Cov(log P_a, log P_b) = (1 - P_b)/(N P_b) for eps_a <= eps_b: shared term is the later point.
  est.std_error = std::sqrt(nested_variance(line.intercept_coef, v, scale, true));
  est.window_lo = eps_used.front();
  est.window_hi = eps_used.back();
  est.points = static_cast<int>(g.size());
  est.r_squared = line.r_squared;
  est.intercept = line.intercept;
  est.slope = line.slope;
  est.model = to_string(policy.model);
  est.n_paths = curve.n_paths;
  est.dt = curve.dt;
  if (!(est.std_error > 0.0)) est.std_error = std::numeric_limits<double>::min();
  return est;
}

SandwichVerdict sandwich_check(const GapEstimate& est, double lower, double upper, double k_sigma) {
  SandwichVerdict v;
  v.k_sigma = k_sigma;
  v.lower = lower;
  v.upper = upper;
  v.interval_lo = est.lambda_hat - k_sigma * est.std_error;
  v.interval_hi = est.lambda_hat + k_sigma * est.std_error;
  v.margin_lower = v.interval_hi - lower;
  v.margin_upper = upper - v.interval_lo;
  if (v.margin_lower < 0.0) {
    v.violation = Violation::BelowLower;
  } else if (v.margin_upper < 0.0) {
    v.violation = Violation::AboveUpper;
  }
  v.pass = v.violation == Violation::None;
  return v;
}

SandwichVerdict sandwich_check(const GapEstimate& est, const GapBoundResult& bounds, double k_sigma) {
  return sandwich_check(est, bounds.lower, bounds.upper, k_sigma);
}

AgreementResult compare_estimates(const GapEstimate& a, const GapEstimate& b, double k_sigma) {
  AgreementResult r;
  r.difference = a.lambda_hat - b.lambda_hat;
  r.combined_se = std::hypot(a.std_error, b.std_error);
  r.z = r.combined_se > 0.0 ? r.difference / r.combined_se : 0.0;
  r.agree = std::abs(r.difference) <= k_sigma * r.combined_se;
  return r;
}

std::vector<ScalingRow> scaling_identity(const SmallBallEnsemble& small, const ExitEnsemble& exits,
                                         const std::vector<double>& eps_values, double z_crit) {
  std::vector<ScalingRow> rows;
  const auto n1 = static_cast<std::int64_t>(small.max_norm.size());
  for (double eps : eps_values) {
    if (eps > small.stop_level) throw Error(ErrorCode::InvalidArgument, "eps above the small-ball stop level");
    ScalingRow row;
    row.eps = eps;
    std::int64_t inside = 0;
    for (double mx : small.max_norm)
      if (mx < eps) ++inside;
    row.p_small_ball = static_cast<double>(inside) / static_cast<double>(n1);
    row.ci_small_ball = wilson_interval(inside, n1);
    const auto sp = survival_at(exits, 1.0 / (eps * eps));
    row.p_exit = sp.survival;
    row.ci_exit = sp.ci;
    const double pooled = static_cast<double>(inside + sp.alive) / static_cast<double>(n1 + sp.n_paths);
    const double se = std::sqrt(pooled * (1.0 - pooled) *
                                (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(sp.n_paths)));
    const double diff = row.p_small_ball - row.p_exit;
    row.z = se > 0.0 ? diff / se : 0.0;
    row.agree = std::abs(row.z) <= z_crit;
    row.ci_overlap = row.ci_small_ball.low <= row.ci_exit.high && row.ci_exit.low <= row.ci_small_ball.high;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hgap
