#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "hgap/error.hpp"
#include "hgap/group.hpp"
#include "hgap/sde.hpp"

using namespace hgap;

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("step_count") {
  CHECK(step_count(1.0, 1e-4) == 10000);
  CHECK(step_count(1.0, 1.0) == 1);
  CHECK(step_count(6.0, 0.02) == 300);
  CHECK(code_of([] { step_count(1.0, 2.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { step_count(0.0, 0.1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { step_count(1.0, -0.1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { step_count(1e6, 1e-6); }) == ErrorCode::StepBudgetExceeded);
  CHECK(code_of([] { step_count(1.0, 1e-3, 999); }) == ErrorCode::StepBudgetExceeded);
}

TEST_CASE("simulate_path invariants") {
  const auto s = build_generators(4, 3);
  const auto p = simulate_path(s, 1.0, 1e-3, 99, 5);
  CHECK(p.steps == 1000);
  CHECK(p.B.size() == 1001 * 4);
  CHECK(p.A.size() == 1001 * 3);
  CHECK(p.tau.size() == 1001);
  for (int j = 0; j < 4; ++j) CHECK(p.B_at(0, j) == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(p.A_at(0, i) == 0.0);
  CHECK(p.tau[0] == 0.0);
  for (std::size_t k = 1; k < p.tau.size(); ++k) CHECK(p.tau[k] >= p.tau[k - 1]);

  // Each step is left multiplication by (dB, 0).
  for (std::int64_t k = 0; k < p.steps; ++k) {
    GroupElement g = GroupElement::identity(4, 3), inc = GroupElement::identity(4, 3), next = GroupElement::identity(4, 3);
    for (int j = 0; j < 4; ++j) {
      g.horizontal[static_cast<std::size_t>(j)] = p.B_at(k, j);
      inc.horizontal[static_cast<std::size_t>(j)] = p.B_at(k + 1, j) - p.B_at(k, j);
      next.horizontal[static_cast<std::size_t>(j)] = p.B_at(k + 1, j);
    }
    for (int i = 0; i < 3; ++i) {
      g.central[static_cast<std::size_t>(i)] = p.A_at(k, i);
      next.central[static_cast<std::size_t>(i)] = p.A_at(k + 1, i);
    }
    const auto prod = multiply(s, g, inc);
    for (int i = 0; i < 3; ++i)
      CHECK(prod.central[static_cast<std::size_t>(i)] == doctest::Approx(next.central[static_cast<std::size_t>(i)]).epsilon(1e-12).scale(1e-9));
  }

  const auto again = simulate_path(s, 1.0, 1e-3, 99, 5);
  CHECK(again.B == p.B);
  CHECK(again.A == p.A);
  CHECK(again.tau == p.tau);
  const auto other = simulate_path(s, 1.0, 1e-3, 99, 6);
  CHECK(other.B != p.B);

  const HTypeStructure bad(2, 1, {IntMatrix::identity(2)});
  CHECK(code_of([&] { simulate_path(bad, 1.0, 0.1, 1); }) == ErrorCode::InvalidStructure);
  CHECK(code_of([&] { simulate_path(s, 1.0, 2.0, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("increments of B have variance dt") {
  const auto s = build_generators(2, 1);
  std::vector<double> sq;
  for (std::uint64_t path = 0; path < 20; ++path) {
    const auto p = simulate_path(s, 1.0, 1e-3, 3, path);
    for (std::int64_t k = 0; k < p.steps; ++k)
      for (int j = 0; j < 2; ++j) {
        const double d = p.B_at(k + 1, j) - p.B_at(k, j);
        sq.push_back(d * d / 1e-3);
      }
  }
  const auto mo = moments(sq);
  CHECK(std::abs(mo.mean - 1.0) < 3.0 * mo.se);
}

TEST_CASE("Heisenberg batch moments at T = 1") {
  const auto s = build_generators(2, 1);
  const auto samples = time_change_samples(s, 1.0, 1e-3, 2024, 10000);
  std::vector<double> a, a2, tau, b2, z;
  for (const auto& r : samples) {
    a.push_back(r.A[0]);
    a2.push_back(r.A[0] * r.A[0]);
    tau.push_back(r.tau);
    b2.push_back(r.b_squared);
    z.push_back(r.A[0] / std::sqrt(r.tau));
  }
  const auto ma = moments(a), ma2 = moments(a2), mt = moments(tau), mb = moments(b2);
  CHECK(std::abs(ma.mean) < 3.0 * ma.se);
  CHECK(std::abs(ma2.mean - 0.25) < 3.0 * ma2.se);
  CHECK(std::abs(mt.mean - 0.25) < 3.0 * mt.se);
  // Dynkin: E |B_T|^2 = 1/2 * (sub-Laplacian of |xbar|^2 = 2m) * T.
  CHECK(std::abs(mb.mean - 2.0) < 3.0 * mb.se);
  std::vector<double> z2;
  for (double v : z) z2.push_back(v * v);
  const auto mz2 = moments(z2);
  CHECK(std::abs(mz2.mean - 1.0) < 3.0 * mz2.se);
}

TEST_CASE("quadratic variation of A_i approximates tau") {
  const auto s2 = build_generators(2, 1);
  std::vector<double> rel;
  for (std::uint64_t path = 0; path < 1000; ++path) {
    const auto p = simulate_path(s2, 1.0, 1e-4, 17, path);
    const double qv = empirical_quadratic_covariation(p, 0, 0);
    CHECK(qv >= 0.0);
    rel.push_back(std::abs(qv - p.tau.back()) / p.tau.back());
  }
  CHECK(median(rel) < 0.05);

  const auto s43 = build_generators(4, 3);
  const auto p = simulate_path(s43, 1.0, 1e-3, 17, 0);
  CHECK(code_of([&] { empirical_quadratic_covariation(p, 0, 3); }) == ErrorCode::IndexOutOfRange);
  CHECK(empirical_quadratic_covariation(p, 0, 1) == empirical_quadratic_covariation(p, 1, 0));
}

TEST_CASE("cross covariations vanish on (4, 3)") {
  const auto s = build_generators(4, 3);
  const auto samples = time_change_samples(s, 1.0, 1e-4, 5, 1000);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      std::vector<double> r;
      for (const auto& t : samples) {
        r.push_back(std::abs(t.covariation[static_cast<std::size_t>(i * 3 + j)]) /
                    t.covariation[static_cast<std::size_t>(i * 3 + i)]);
      }
      CHECK(median(r) < 0.05);
    }
  // The terminal covariation matches the path-level estimate.
  const auto p = simulate_path(s, 1.0, 1e-4, 5, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(samples[0].covariation[static_cast<std::size_t>(i * 3 + j)] ==
            doctest::Approx(empirical_quadratic_covariation(p, i, j)).epsilon(1e-9).scale(1e-12));
}

TEST_CASE("time_change_samples reproduces simulate_path and is deterministic") {
  const auto s = build_generators(4, 3);
  const auto one = time_change_samples(s, 1.0, 1e-3, 123, 1);
  const auto p = simulate_path(s, 1.0, 1e-3, 123, 0);
  REQUIRE(one.size() == 1);
  for (int i = 0; i < 3; ++i) CHECK(one[0].A[static_cast<std::size_t>(i)] == p.A_at(p.steps, i));
  CHECK(one[0].tau == p.tau.back());
  double max_norm = 0.0;
  for (std::int64_t k = 0; k <= p.steps; ++k) {
    GroupElement g = GroupElement::identity(4, 3);
    for (int j = 0; j < 4; ++j) g.horizontal[static_cast<std::size_t>(j)] = p.B_at(k, j);
    for (int i = 0; i < 3; ++i) g.central[static_cast<std::size_t>(i)] = p.A_at(k, i);
    max_norm = std::max(max_norm, homogeneous_norm(g));
  }
  CHECK(one[0].max_norm == doctest::Approx(max_norm).epsilon(1e-14));

  const auto a = time_change_samples(s, 1.0, 1e-3, 9, 500);
  const auto b = time_change_samples(s, 1.0, 1e-3, 9, 500);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].A == b[k].A);
    CHECK(a[k].tau == b[k].tau);
    CHECK(a[k].covariation == b[k].covariation);
  }
  CHECK(code_of([&] { time_change_samples(s, 1.0, 1e-3, 9, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Ito and midpoint increments agree because U has zero diagonal") {
  for (auto [m, n] : {std::pair{2, 1}, std::pair{4, 3}, std::pair{8, 7}}) {
    const auto s = build_generators(m, n);
    const auto ito = simulate_path(s, 1.0, 1e-4, 77, 0, IntegralRule::Ito);
    const auto mid = simulate_path(s, 1.0, 1e-4, 77, 0, IntegralRule::Midpoint);
    double worst = 0.0;
    for (std::size_t k = 0; k < ito.A.size(); ++k) worst = std::max(worst, std::abs(ito.A[k] - mid.A[k]));
    CHECK(worst < 1e-12);
    CHECK(ito.B == mid.B);
  }
  const auto s = build_generators(2, 1);
  SimulationOptions ito_opt, mid_opt;
  mid_opt.rule = IntegralRule::Midpoint;
  const auto a = time_change_samples(s, 1.0, 1e-4, 8, 2000, ito_opt);
  const auto b = time_change_samples(s, 1.0, 1e-4, 8, 2000, mid_opt);
  std::vector<double> diff;
  for (std::size_t k = 0; k < a.size(); ++k) diff.push_back(a[k].A[0] - b[k].A[0]);
  const auto md = moments(diff);
  CHECK(std::abs(md.mean) <= 5.0 * md.se + 1e-13);
}

TEST_CASE("weak order one: bias of E A_1(1)^2 halves with dt") {
  const auto s = build_generators(2, 1);
  SimulationOptions opt;
  opt.track_covariation = false;
  std::vector<Moments> bias;
  for (double dt : {0.1, 0.05, 0.025}) {
    const auto samples = time_change_samples(s, 1.0, dt, 31, 400000, opt);
    std::vector<double> a2;
    for (const auto& t : samples) a2.push_back(t.A[0] * t.A[0]);
    auto mo = moments(a2);
    mo.mean -= 0.25;
    bias.push_back(mo);
  }
  // Exact discrete value: E A^2 = E tau = m T^2 / 8 (1 - dt / T), bias = -dt / 4.
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(bias[k].mean + 0.1 / std::pow(2.0, k) / 4.0) < 3.0 * bias[k].se);
  CHECK(bias[0].mean < -3.0 * bias[0].se);
  for (std::size_t k = 0; k + 1 < 3; ++k) {
    const double combined = std::hypot(bias[k].se, 2.0 * bias[k + 1].se);
    CHECK(std::abs(bias[k].mean - 2.0 * bias[k + 1].mean) < 3.0 * combined);
  }
}

TEST_CASE("KS, correlation and normal CDF helpers") {
  CHECK(standard_normal_cdf(0.0) == 0.5);
  CHECK(standard_normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(ks_critical_coefficient(0.01) == doctest::Approx(1.6276).epsilon(1e-4));
  CHECK(ks_critical_coefficient(0.05) == doctest::Approx(1.3581).epsilon(1e-4));
  CHECK(ks_statistic_normal({0.0}) == doctest::Approx(0.5));
  std::vector<double> quantiles;
  for (int k = 1; k <= 999; ++k) {
    // Inverse CDF by bisection.
    double lo = -10, hi = 10;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (standard_normal_cdf(mid) < k / 1000.0 ? lo : hi) = mid;
    }
    quantiles.push_back(0.5 * (lo + hi));
  }
  CHECK(ks_statistic_normal(quantiles) <= 0.001 + 1e-9);
  std::vector<double> shifted = quantiles;
  for (auto& v : shifted) v += 1.0;
  CHECK(ks_statistic_normal(shifted) == doctest::Approx(2 * standard_normal_cdf(0.5) - 1).epsilon(5e-3));
  CHECK(pearson_correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
  CHECK(pearson_correlation({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(code_of([] { ks_statistic_normal({}); }) == ErrorCode::InsufficientSamples);
  CHECK(code_of([] { ks_critical_coefficient(0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("lemma diagnostics on Heisenberg and (4, 3)") {
  for (auto [m, n] : {std::pair{2, 1}, std::pair{4, 3}}) {
    const auto s = build_generators(m, n);
    const auto samples = time_change_samples(s, 1.0, 1e-3, 20240601, 10000);
    const auto d = lemma_diagnostics(samples, m, 1.0, 0.01);
    CAPTURE(m);
    CHECK(d.sample_count == 10000);
    CHECK(d.n == n);
    CHECK(d.ks_critical == doctest::Approx(1.6276 / 100).epsilon(1e-3));
    CHECK(d.expected_a_squared == m / 8.0);
    for (int i = 0; i < n; ++i) {
      CHECK(d.ks_pass(i));
      CHECK(d.independence_pass(i));
      CHECK(d.moment_pass(i));
      CHECK(std::abs(d.normalized_variance[static_cast<std::size_t>(i)] - 1.0) < 0.05);
    }
    CHECK(d.covariation_pass());
    CHECK(d.passed());
  }
  const auto s = build_generators(2, 1);
  CHECK(code_of([&] { lemma_diagnostics(time_change_samples(s, 1.0, 0.01, 1, 999), 2, 1.0); }) ==
        ErrorCode::InsufficientSamples);
  SimulationOptions no_cov;
  no_cov.track_covariation = false;
  const auto s43 = build_generators(4, 3);
  CHECK(code_of([&] { lemma_diagnostics(time_change_samples(s43, 1.0, 0.01, 1, 1000, no_cov), 4, 1.0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("lemma diagnostics detect a broken time change") {
  const auto s = build_generators(2, 1);
  auto samples = time_change_samples(s, 1.0, 1e-2, 4, 5000);
  for (auto& t : samples) t.A[0] *= std::sqrt(2.0);
  const auto d = lemma_diagnostics(samples, 2, 1.0);
  CHECK_FALSE(d.ks_pass(0));
  CHECK_FALSE(d.moment_pass(0));
  CHECK_FALSE(d.passed());
}

TEST_CASE("Euclidean walker has no central part") {
  const auto e = HTypeStructure::euclidean(3);
  const auto p = simulate_path(e, 1.0, 0.01, 1, 0);
  CHECK(p.n == 0);
  CHECK(p.A.empty());
  const auto t = time_change_samples(e, 1.0, 0.01, 1, 10);
  CHECK(t[3].A.empty());
  CHECK(t[3].max_norm > 0.0);
}

TEST_CASE("binary path format round trip") {
  const auto s = build_generators(4, 3);
  std::vector<PathSample> paths{simulate_path(s, 0.1, 0.01, 1, 0), simulate_path(s, 0.1, 0.01, 1, 1)};
  const auto file = std::filesystem::temp_directory_path() / "hgap_test_paths.bin";
  write_paths_binary(file, paths);
  CHECK(std::filesystem::file_size(file) == 4 + 4 + 4 + 4 + 8 + 8 + 2 * 11 * 8 * (4 + 3 + 1));
  {
    std::ifstream in(file, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "HGAP");
    unsigned char version[4];
    in.read(reinterpret_cast<char*>(version), 4);
    CHECK(version[0] == 1);
    CHECK(version[3] == 0);
  }
  const auto back = read_paths_binary(file);
  REQUIRE(back.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(back[k].B == paths[k].B);
    CHECK(back[k].A == paths[k].A);
    CHECK(back[k].tau == paths[k].tau);
    CHECK(back[k].dt == 0.01);
    CHECK(back[k].steps == 10);
  }
  {
    std::ofstream out(file, std::ios::binary);
    out << "NOPE";
  }
  CHECK(code_of([&] { read_paths_binary(file); }) == ErrorCode::IoError);
  std::filesystem::remove(file);
}
