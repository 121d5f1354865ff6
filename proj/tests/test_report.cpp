#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hgap/error.hpp"
#include "hgap/report.hpp"

using namespace hgap;

TEST_CASE("format_double round-trips with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  for (double x : {3.141592653589793, 1.0 / 3.0, 4.296243146273041, 1e-300, -7.25e12}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("sha256_hex") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("parsers") {
  CHECK(parse_gap_method("exit") == GapMethod::Exit);
  CHECK(parse_gap_method("smalldev") == GapMethod::SmallDev);
  CHECK(parse_gap_method("both") == GapMethod::Both);
  CHECK_THROWS_AS(parse_gap_method("all"), Error);
  CHECK(to_string(GapMethod::SmallDev) == "smalldev");
  CHECK(parse_extrapolation_model("eps") == ExtrapolationModel::AffineEps);
  CHECK(parse_extrapolation_model("eps2") == ExtrapolationModel::AffineEpsSquared);
  CHECK(parse_extrapolation_model("affine_eps2") == ExtrapolationModel::AffineEpsSquared);
  CHECK_THROWS_AS(parse_extrapolation_model("cubic"), Error);
}

TEST_CASE("default eps grid") {
  const auto g = default_eps_grid(2.891592981);
  REQUIRE(g.size() == 13);
  CHECK(g.front() == doctest::Approx(std::sqrt(2.891592981 / 8)));
  CHECK(g.back() == doctest::Approx(std::sqrt(2.891592981 / 2)));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);
  CHECK_THROWS_AS(default_eps_grid(-1.0), Error);
}

TEST_CASE("to_json field sets") {
  const auto b = to_json(gap_bounds(2, 1));
  for (const char* key : {"m", "n", "lambda_m", "lambda_n", "c", "x_star", "lower", "upper"}) CHECK(b.contains(key));
  CHECK(b["upper"].get<double>() == gap_bounds(2, 1).upper);

  GapEstimate e;
  e.method = EstimateMethod::SmallDevExtrapolation;
  e.window_lo = 0.6;
  e.window_hi = 1.2;
  const auto j = to_json(e);
  CHECK(j["method"] == "smalldev_extrapolation");
  CHECK(j["window"]["eps_lo"] == 0.6);
  CHECK(j["diagnostics"].contains("r_squared"));
  e.method = EstimateMethod::ExitTail;
  CHECK(to_json(e)["window"].contains("t_lo"));

  const auto ev = to_json(dirichlet_eigen(3));
  CHECK(ev["nu"] == 0.5);
}

TEST_CASE("Euclidean calibration report end to end") {
  GapRunConfig cfg;
  cfg.paths = 4000;
  cfg.dt = 2e-3;
  cfg.t_max = 4.0;
  cfg.seed = 11;
  const auto report = estimate_gap_report(HTypeStructure::euclidean(2), cfg);
  CHECK(report["format_version"] == kFormatVersion);
  CHECK(report["kind"] == "estimate-gap");
  CHECK(report["structure"]["euclidean"] == true);
  CHECK(report["bounds"]["lambda_exact"].get<double>() == lambda1_euclidean(2));
  CHECK(report["config"]["eps_grid"].size() == 13);
  CHECK(report["estimates"].contains("exit"));
  CHECK(report["estimates"].contains("smalldev"));
  CHECK(report["sandwich"]["exit"].contains("verdict"));
  CHECK(report["ladder"]["mean_exit_time"]["n_paths"] == 4000);
  CHECK(report["domination_violations"] == 0);
  CHECK(report.contains("agreement"));
  CHECK(report["scaling"].size() == 3);
  const double lam = report["estimates"]["exit"]["lambda_hat"].get<double>();
  CHECK(std::abs(lam - lambda1_euclidean(2)) < 0.2 * lambda1_euclidean(2));

  const auto csv = curves_csv(report);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "kind,abscissa,estimate,ci_low,ci_high");
  int survival = 0, prob = 0, rate = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("survival,", 0) == 0) ++survival;
    if (line.rfind("smalldev_prob,", 0) == 0) ++prob;
    if (line.rfind("smalldev_rate,", 0) == 0) ++rate;
  }
  CHECK(survival == static_cast<int>(report["curves"]["survival"]["t"].size()));
  CHECK(prob == 13);
  CHECK(rate >= 4);

  // Same configuration, different worker count: identical document.
  cfg.execution.threads = 3;
  CHECK(estimate_gap_report(HTypeStructure::euclidean(2), cfg).dump() == report.dump());
}

TEST_CASE("report method selection and validation") {
  GapRunConfig cfg;
  cfg.paths = 2000;
  cfg.dt = 5e-3;
  cfg.t_max = 3.0;
  cfg.method = GapMethod::SmallDev;
  const auto small = estimate_gap_report(build_generators(2, 1), cfg);
  CHECK_FALSE(small["estimates"].contains("exit"));
  CHECK(small["estimates"].contains("smalldev"));
  CHECK_FALSE(small.contains("agreement"));
  cfg.paths = 10;
  CHECK_THROWS_AS(estimate_gap_report(build_generators(2, 1), cfg), Error);
}
