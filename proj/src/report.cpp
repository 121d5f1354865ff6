#include "hgap/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

#include <openssl/evp.h>

#include "hgap/error.hpp"

namespace hgap {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

json to_json(const EigenvalueResult& r) {
  return {{"d", r.d}, {"nu", r.nu}, {"j_first_zero", r.j_first_zero}, {"lambda", r.lambda}};
}

json to_json(const GapBoundResult& r) {
  return {{"m", r.m},         {"n", r.n},         {"lambda_m", r.lambda_m}, {"lambda_n", r.lambda_n},
          {"c", r.c},         {"x_star", r.x_star}, {"lower", r.lower},     {"upper", r.upper}};
}

json to_json(const GapEstimate& e) {
  const bool exit = e.method == EstimateMethod::ExitTail;
  return {{"lambda_hat", e.lambda_hat},
          {"std_error", e.std_error},
          {"method", to_string(e.method)},
          {"window", {{exit ? "t_lo" : "eps_lo", e.window_lo}, {exit ? "t_hi" : "eps_hi", e.window_hi}}},
          {"diagnostics",
           {{"r_squared", e.r_squared},
            {"points", e.points},
            {"intercept", e.intercept},
            {"slope", e.slope},
            {"model", e.model},
            {"n_paths", e.n_paths},
            {"dt", e.dt}}}};
}

json to_json(const SandwichVerdict& v) {
  return {{"verdict", v.pass ? "PASS" : "FAIL"}, {"violation", to_string(v.violation)},
          {"k_sigma", v.k_sigma},                {"interval", {v.interval_lo, v.interval_hi}},
          {"lower", v.lower},                    {"upper", v.upper},
          {"margin_lower", v.margin_lower},      {"margin_upper", v.margin_upper}};
}

json to_json(const AgreementResult& a) {
  return {{"difference", a.difference}, {"combined_std_error", a.combined_se}, {"z", a.z}, {"agree", a.agree}};
}

json to_json(const ExitTimeStats& s) {
  return {{"n_paths", s.n_paths},
          {"censored", s.censored},
          {"mean_fine", s.mean_fine},
          {"se_fine", s.se_fine},
          {"mean_coarse", s.mean_coarse},
          {"se_coarse", s.se_coarse},
          {"mean_extrapolated", s.mean_extrapolated},
          {"se_extrapolated", s.se_extrapolated}};
}

json to_json(const ScalingRow& r) {
  return {{"eps", r.eps},
          {"p_small_ball", r.p_small_ball},
          {"ci_small_ball", {r.ci_small_ball.low, r.ci_small_ball.high}},
          {"t", 1.0 / (r.eps * r.eps)},
          {"p_exit", r.p_exit},
          {"ci_exit", {r.ci_exit.low, r.ci_exit.high}},
          {"z", r.z},
          {"agree", r.agree},
          {"ci_overlap", r.ci_overlap}};
}

json to_json(const SurvivalCurve& c) {
  return {{"t", c.t_grid},          {"alive", c.alive},   {"survival", c.survival}, {"ci_low", c.ci_low},
          {"ci_high", c.ci_high},   {"n_paths", c.n_paths}, {"dt", c.dt},          {"monitor_dt", c.monitor_dt},
          {"seed", c.seed}};
}

json to_json(const SmallDevCurve& c) {
  json rate = json::array();
  for (const auto& r : c.rate) rate.push_back(r ? json(*r) : json(nullptr));
  return {{"eps", c.eps_grid}, {"inside", c.inside}, {"prob", c.prob},       {"ci_low", c.ci_low},
          {"ci_high", c.ci_high}, {"rate", rate},    {"n_paths", c.n_paths}, {"dt", c.dt},
          {"seed", c.seed}};
}

json to_json(const LemmaDiagnostics& d) {
  json ks_pass = json::array(), ind_pass = json::array(), moment_pass = json::array();
  for (int i = 0; i < d.n; ++i) {
    ks_pass.push_back(d.ks_pass(i));
    ind_pass.push_back(d.independence_pass(i));
    moment_pass.push_back(d.moment_pass(i));
  }
  return {{"sample_count", d.sample_count},
          {"m", d.m},
          {"n", d.n},
          {"T", d.T},
          {"alpha", d.alpha},
          {"ks_statistics", d.ks_statistics},
          {"ks_critical", d.ks_critical},
          {"ks_pass", ks_pass},
          {"independence_corr", d.independence_corr},
          {"corr_threshold", d.corr_threshold},
          {"independence_pass", ind_pass},
          {"cross_covariations", d.cross_covariations},
          {"covariation_pass", d.covariation_pass()},
          {"mean_a_squared", d.mean_a_squared},
          {"se_a_squared", d.se_a_squared},
          {"expected_a_squared", d.expected_a_squared},
          {"moment_pass", moment_pass},
          {"mean_tau", d.mean_tau},
          {"se_tau", d.se_tau},
          {"normalized_variance", d.normalized_variance},
          {"passed", d.passed()}};
}

GapMethod parse_gap_method(const std::string& s) {
  if (s == "exit") return GapMethod::Exit;
  if (s == "smalldev") return GapMethod::SmallDev;
  if (s == "both") return GapMethod::Both;
  throw Error(ErrorCode::InvalidArgument, "method must be exit, smalldev or both");
}

std::string to_string(GapMethod m) {
  switch (m) {
    case GapMethod::Exit: return "exit";
    case GapMethod::SmallDev: return "smalldev";
    case GapMethod::Both: return "both";
  }
  return "both";
}

ExtrapolationModel parse_extrapolation_model(const std::string& s) {
  if (s == "eps" || s == "affine_eps") return ExtrapolationModel::AffineEps;
  if (s == "eps2" || s == "affine_eps2") return ExtrapolationModel::AffineEpsSquared;
  throw Error(ErrorCode::InvalidArgument, "model must be eps or eps2");
}

std::vector<double> default_eps_grid(double lambda_lower, int points) {
  if (!(lambda_lower > 0.0) || points < 2) throw Error(ErrorCode::InvalidArgument, "bad eps grid request");
  const double lo = std::sqrt(lambda_lower / 8.0);
  const double hi = std::sqrt(lambda_lower / 2.0);
  std::vector<double> grid;
  for (int k = 0; k < points; ++k) grid.push_back(lo + (hi - lo) * k / (points - 1));
  return grid;
}

json config_to_json(const GapRunConfig& c) {
  json window = {{"automatic", c.window.automatic},
                 {"min_points", c.window.min_points},
                 {"min_r_squared", c.window.min_r_squared},
                 {"min_count", c.window.min_count},
                 {"max_start_survival", c.window.max_start_survival}};
  if (!c.window.automatic) {
    window["t_lo"] = c.window.t_lo;
    window["t_hi"] = c.window.t_hi;
  }
  return {{"method", to_string(c.method)},
          {"paths", c.paths},
          {"dt", c.dt},
          {"seed", c.seed},
          {"t_max", c.t_max},
          {"eps_grid", c.eps_grid},
          {"model", to_string(c.model)},
          {"window", window},
          {"ladder", c.ladder},
          {"grid_dt", c.grid_dt},
          {"k_sigma", c.k_sigma},
          {"scaling_eps", c.scaling_eps}};
}

json estimate_gap_report(const HTypeStructure& s, const GapRunConfig& config) {
  if (config.paths < 1000) throw Error(ErrorCode::InvalidArgument, "paths must be at least 1000");
  if (!(config.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const bool euclidean = s.n() == 0;
  GapBoundResult bounds;
  if (euclidean) {
    const double lam = lambda1_euclidean(s.m());
    bounds.m = s.m();
    bounds.lambda_m = lam;
    bounds.lower = lam;
    bounds.upper = lam;
  } else {
    bounds = gap_bounds(s.m(), s.n());
  }

  GapRunConfig cfg = config;
  if (cfg.eps_grid.empty()) cfg.eps_grid = default_eps_grid(bounds.lower);

  json report;
  report["format_version"] = kFormatVersion;
  report["kind"] = "estimate-gap";
  report["structure"] = {{"m", s.m()}, {"n", s.n()}, {"euclidean", euclidean}};
  report["config"] = config_to_json(cfg);
  if (euclidean) {
    report["bounds"] = {{"m", s.m()}, {"n", 0}, {"lambda_exact", bounds.lower},
                        {"lower", bounds.lower}, {"upper", bounds.upper}};
  } else {
    report["bounds"] = to_json(bounds);
  }

  const bool run_exit = cfg.method != GapMethod::SmallDev;
  const bool run_small = cfg.method != GapMethod::Exit;

  std::optional<ExitEnsemble> exits;
  std::optional<SmallBallEnsemble> balls;
  std::optional<GapEstimate> est_exit, est_small;

  if (run_exit) {
    ExitOptions opt;
    opt.ladder = cfg.ladder;
    opt.execution = cfg.execution;
    exits = simulate_exit_times(s, cfg.dt, cfg.paths, cfg.t_max, mix_seed(cfg.seed, 1), opt);
    const auto curve = survival_from_exits(*exits, cfg.grid_dt);
    est_exit = estimate_gap_exit(curve, cfg.window);
    report["estimates"]["exit"] = to_json(*est_exit);
    report["sandwich"]["exit"] = to_json(sandwich_check(*est_exit, bounds.lower, bounds.upper, cfg.k_sigma));
    report["curves"]["survival"] = to_json(curve);

    json ladder;
    ladder["ladder"] = cfg.ladder;
    ladder["monitor_dt"] = {cfg.dt, cfg.dt * cfg.ladder};
    if (cfg.ladder > 1) {
      const auto coarse = survival_from_exits(*exits, cfg.grid_dt, true);
      try {
        const auto est_coarse = estimate_gap_exit(coarse, cfg.window);
        ladder["exit_coarse"] = to_json(est_coarse);
        ladder["rate_nondecreasing_in_resolution"] =
            est_exit->lambda_hat >= est_coarse.lambda_hat - cfg.k_sigma * est_coarse.std_error;
      } catch (const Error& e) {
        ladder["exit_coarse"] = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
      }
    }
    ladder["mean_exit_time"] = to_json(exit_time_stats(*exits));
    report["ladder"] = ladder;
  }

  if (run_small) {
    double stop = cfg.eps_grid.back();
    if (run_exit) {
      for (double e : cfg.scaling_eps) stop = std::max(stop, e);
    }
    balls = simulate_small_ball(s, cfg.dt, cfg.paths, stop, mix_seed(cfg.seed, 2), cfg.execution);
    const auto curve = small_dev_from_ensemble(*balls, cfg.eps_grid);
    ExtrapolationPolicy pol;
    pol.model = cfg.model;
    pol.min_count = cfg.window.min_count;
    est_small = estimate_gap_smalldev(curve, pol);
    report["estimates"]["smalldev"] = to_json(*est_small);
    report["sandwich"]["smalldev"] = to_json(sandwich_check(*est_small, bounds.lower, bounds.upper, cfg.k_sigma));
    report["curves"]["smalldev"] = to_json(curve);

    // Lower-bound domination: max |g| < eps forces max |B| < eps on every path.
    std::int64_t violations = 0;
    for (std::size_t k = 0; k < balls->max_norm.size(); ++k) {
      if (balls->max_horizontal[k] > balls->max_norm[k]) ++violations;
    }
    report["domination_violations"] = violations;
  }

  if (est_exit && est_small) {
    report["agreement"] = to_json(compare_estimates(*est_exit, *est_small, cfg.k_sigma));
    std::vector<double> eps;
    for (double e : cfg.scaling_eps)
      if (1.0 / (e * e) <= cfg.t_max) eps.push_back(e);
    json rows = json::array();
    for (const auto& r : scaling_identity(*balls, *exits, eps)) rows.push_back(to_json(r));
    report["scaling"] = rows;
  }
  return report;
}

std::string curves_csv(const json& report) {
  std::ostringstream out;
  out << "kind,abscissa,estimate,ci_low,ci_high\n";
  auto row = [&out](const char* kind, double x, double y, double lo, double hi) {
    out << kind << ',' << format_double(x) << ',' << format_double(y) << ',' << format_double(lo) << ','
        << format_double(hi) << '\n';
  };
  if (report.contains("curves") && report["curves"].contains("survival")) {
    const auto& c = report["curves"]["survival"];
    for (std::size_t k = 0; k < c["t"].size(); ++k) {
      row("survival", c["t"][k].get<double>(), c["survival"][k].get<double>(), c["ci_low"][k].get<double>(),
          c["ci_high"][k].get<double>());
    }
  }
  if (report.contains("curves") && report["curves"].contains("smalldev")) {
    const auto& c = report["curves"]["smalldev"];
    for (std::size_t k = 0; k < c["eps"].size(); ++k) {
      const double eps = c["eps"][k].get<double>();
      row("smalldev_prob", eps, c["prob"][k].get<double>(), c["ci_low"][k].get<double>(),
          c["ci_high"][k].get<double>());
    }
    for (std::size_t k = 0; k < c["eps"].size(); ++k) {
      if (c["rate"][k].is_null()) continue;
      const double eps = c["eps"][k].get<double>();
      const double lo = c["ci_low"][k].get<double>();
      const double hi = c["ci_high"][k].get<double>();
      // rate = -eps^2 log p is decreasing in p.
      const double r_hi = lo > 0.0 ? -eps * eps * std::log(lo) : std::numeric_limits<double>::infinity();
      const double r_lo = -eps * eps * std::log(hi);
      row("smalldev_rate", eps, c["rate"][k].get<double>(), r_lo, r_hi);
    }
  }
  return out.str();
}

}  // namespace hgap
