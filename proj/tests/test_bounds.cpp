#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "hgap/bounds.hpp"
#include "hgap/clifford.hpp"
#include "hgap/dirichlet.hpp"
#include "hgap/error.hpp"
#include "oracles.hpp"

using namespace hgap;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("f_objective") {
  CHECK(f_objective(1.0, 0.0, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(f_objective(1.0, 1e-14, 0.5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(f_objective(2.891593, 1.233701, 0.341357) == doctest::Approx(4.2962434365).epsilon(1e-10));
  double prev = 0.0;
  for (double x : {0.9, 0.99, 0.999, 0.99999, 0.9999999}) {
    const double v = f_objective(1.0, 1.0, x);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev > 3000.0);
  CHECK(code_of([] { f_objective(1.0, 1.0, 0.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { f_objective(1.0, 1.0, 1.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { f_objective(-1.0, 1.0, 0.5); }) == ErrorCode::DomainError);
}

TEST_CASE("x_star reference points") {
  const double lm2 = lambda1_euclidean(2), l1 = lambda1_euclidean(1);
  CHECK(std::abs(x_star(lm2, l1) - 0.341357) < 1e-6);
  CHECK(x_star(lm2, l1) == doctest::Approx(0.3413564170559911).epsilon(1e-13));
  CHECK(std::abs(x_star(7.340985, 4.934802) - 0.401139) < 1e-6);
  CHECK(std::abs(oracle::grid_argmin([&](double x) { return f_objective(lm2, l1, x); }, 1'000'000) -
                 x_star(lm2, l1)) < 2e-6);
}

TEST_CASE("x_star small lambda_n behaves like sqrt(lambda_n / 2)") {
  for (double ln : {1e-4, 1e-6, 1e-8}) {
    CHECK(x_star(1.0, ln) == doctest::Approx(std::sqrt(ln / 2.0)).epsilon(5.0 * std::sqrt(ln)));
  }
}

TEST_CASE("x_star quotient form and the degenerate denominator") {
  CHECK(x_star_quotient(2.0, 1.0) == doctest::Approx(x_star(2.0, 1.0)).epsilon(1e-14));
  CHECK(code_of([] { x_star_quotient(1.0, 4.0); }) == ErrorCode::DegenerateDenominator);
  // At 4 lambda_m = lambda_n the stationarity condition is linear: 3 x - 2 = 0.
  CHECK(x_star(1.0, 4.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const double h = 1e-7;
  const double deriv = (f_objective(1.0, 4.0, 2.0 / 3.0 + h) - f_objective(1.0, 4.0, 2.0 / 3.0 - h)) / (2 * h);
  CHECK(std::abs(deriv) < 1e-6);
  CHECK(code_of([] { x_star(1.0, 0.0); }) == ErrorCode::DomainError);
}

TEST_CASE("upper_bound reference values") {
  const auto b21 = gap_bounds(2, 1);
  CHECK(b21.lower == doctest::Approx(2.891592981).epsilon(1e-9));
  CHECK(std::abs(b21.upper - 4.296218) < 1e-4);
  CHECK(b21.upper == doctest::Approx(4.296243146273041).epsilon(1e-13));
  CHECK(std::abs(b21.x_star - 0.341357) < 1e-6);
  CHECK(b21.c == doctest::Approx(0.4266508315798808).epsilon(1e-13));

  const auto b43 = gap_bounds(4, 3);
  CHECK(b43.lower == doctest::Approx(7.340985).epsilon(1e-7));
  CHECK(std::abs(b43.upper - 11.86629) < 1e-3);
  CHECK(b43.upper == doctest::Approx(11.86618463365514).epsilon(1e-13));
  CHECK(b43.x_star == doctest::Approx(0.4011397488784958).epsilon(1e-13));

  CHECK(upper_bound(3.0, 0.0) == 3.0);
  CHECK(upper_bound(3.0, 1e-12) == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(code_of([] { gap_bounds(2, 2); }) == ErrorCode::NotAdmissible);
}

TEST_CASE("upper bound equals the grid minimum") {
  const auto b = gap_bounds(4, 3);
  double best = INFINITY;
  for (int k = 1; k < 1'000'000; ++k) best = std::min(best, f_objective(b.lambda_m, b.lambda_n, k * 1e-6));
  CHECK(b.upper <= best);
  CHECK(best - b.upper < 1e-9);
}

TEST_CASE("random pairs: stationarity, grid argmin, window and corollary") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> lm_dist(0.5, 50.0), c_dist(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double lm = lm_dist(gen);
    double c = c_dist(gen);
    if (c == 0.0) c = 0.5;
    const double ln = c * lm;
    const double xs = x_star(lm, ln);
    const double fx = f_objective(lm, ln, xs);
    const double h = 1e-7;
    const double deriv = (f_objective(lm, ln, xs + h) - f_objective(lm, ln, xs - h)) / (2 * h);
    CHECK(std::abs(deriv) < 1e-5 * fx);
    CHECK(xs >= c / 4.0);
    CHECK(xs <= (3.0 * std::sqrt(c) - c) / (4.0 - c));
    CHECK(upper_bound(lm, ln) <= 2.0 * lm);
    CHECK(upper_bound(lm, ln) >= lm);
  }
}

TEST_CASE("grid argmin within two grid steps on 1000 random pairs") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> lm_dist(0.5, 50.0), c_dist(0.0, 1.0);
  constexpr int N = 1'000'000;
  for (int k = 0; k < 1000; ++k) {
    const double lm = lm_dist(gen);
    const double ln = c_dist(gen) * lm;
    if (ln == 0.0) continue;
    const double grid = oracle::grid_argmin([&](double x) { return f_objective(lm, ln, x); }, N);
    CHECK(std::abs(grid - x_star(lm, ln)) < 2.0 / N);
  }
}

TEST_CASE("c >= 1 is accepted without the corollary") {
  const double xs = x_star(1.0, 10.0);
  CHECK(xs > 0.0);
  CHECK(xs < 1.0);
  CHECK(upper_bound(1.0, 10.0) > 1.0);
}

TEST_CASE("corollary holds for every admissible (m, n) with m <= 64") {
  for (int m = 1; m <= 64; ++m)
    for (int n = 1; n < hurwitz_radon(m); ++n) {
      const auto b = gap_bounds(m, n);
      CAPTURE(m);
      CAPTURE(n);
      CHECK(b.lower <= b.upper);
      CHECK(b.upper <= 2.0 * b.lower);
      CHECK(b.c < 1.0);
      CHECK(b.x_star > 0.0);
      CHECK(b.x_star < 1.0);
    }
}

TEST_CASE("ratio asymptotics") {
  const auto rows = ratio_asymptotics({2, 4, 8, 16, 32, 64}, 1);
  REQUIRE(rows.size() == 6);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].ratio < rows[k - 1].ratio);
  CHECK(rows.back().ratio < 1.1);
  for (const auto& r : rows) {
    const double x = r.bounds.x_star, c = r.bounds.c;
    CHECK(r.ratio >= 1.0);
    CHECK(r.ratio == doctest::Approx(1.0 / std::sqrt(1.0 - x) + c * std::sqrt(1.0 - x) / (4.0 * x)).epsilon(1e-13));
  }
  CHECK(code_of([] { ratio_asymptotics({2, 3}, 1); }) == ErrorCode::NotAdmissible);
}
