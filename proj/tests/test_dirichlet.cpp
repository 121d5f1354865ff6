#include <doctest.h>

#include <cmath>
#include <numbers>

#include "data/bessel_reference.hpp"
#include "data/zeros_reference.hpp"
#include "hgap/dirichlet.hpp"
#include "hgap/error.hpp"
#include "oracles.hpp"

using namespace hgap;
using std::numbers::pi;

TEST_CASE("bessel_j closed forms") {
  CHECK(std::abs(bessel_j(0.5, pi)) < 1e-12);
  CHECK(std::abs(bessel_j(-0.5, pi / 2)) < 1e-12);
  CHECK(std::abs(bessel_j(0.0, 2.404825557695773)) < 1e-10);
  for (double x : {0.1, 0.9, 1.7, 3.0, 6.5, 12.0, 29.0, 47.5}) {
    const double pref = std::sqrt(2.0 / (pi * x));
    CHECK(bessel_j(0.5, x) == doctest::Approx(pref * std::sin(x)).epsilon(1e-12));
    CHECK(bessel_j(-0.5, x) == doctest::Approx(pref * std::cos(x)).epsilon(1e-12));
    CHECK(bessel_j(1.5, x) == doctest::Approx(pref * (std::sin(x) / x - std::cos(x))).epsilon(1e-11));
  }
}

TEST_CASE("bessel_j against the reference table") {
  double worst = 0.0;
  for (const auto& r : kBesselRef) {
    const double v = bessel_j(r.nu, r.x);
    const double err = std::abs(v - r.value);
    CAPTURE(r.nu);
    CAPTURE(r.x);
    CHECK(err <= 1e-12 * std::abs(r.value) + 1e-300);
    worst = std::max(worst, err / std::abs(r.value));
  }
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("bessel_j derivative matches the recurrence J' = J_{nu-1} - nu/x J") {
  for (double nu : {0.5, 1.0, 2.5, 7.0, 20.0}) {
    for (double x : {0.3, 1.5, 4.0, 11.0, 35.0}) {
      const auto bv = bessel_j_with_derivative(nu, x);
      const double expected = bessel_j(nu - 1.0, x) - nu / x * bv.value;
      CHECK(bv.derivative == doctest::Approx(expected).epsilon(1e-10).scale(1e-3));
    }
  }
}

TEST_CASE("bessel_j domain") {
  CHECK_THROWS_AS(bessel_j(-0.6, 1.0), Error);
  CHECK_THROWS_AS(bessel_j(0.0, 0.0), Error);
  CHECK_THROWS_AS(bessel_j(0.0, -1.0), Error);
  CHECK_THROWS_AS(bessel_j(101.0, 1.0), Error);
  try {
    bessel_j(1.0, NAN);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainError);
  }
}

TEST_CASE("first_bessel_zero") {
  CHECK(first_bessel_zero(-0.5) == doctest::Approx(pi / 2).epsilon(1e-14));
  CHECK(first_bessel_zero(0.5) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(std::abs(first_bessel_zero(0.0) - 2.404825557695773) < 1e-11);
  for (const auto& z : kZeroRef) {
    CAPTURE(z.nu);
    CHECK(std::abs(first_bessel_zero(z.nu) - z.zero) < 1e-11);
  }
}

TEST_CASE("first_bessel_zero is increasing and a root") {
  double prev = 0.0;
  for (int k = -1; k <= 30; ++k) {
    const double nu = 0.5 * k;
    const double j = first_bessel_zero(nu);
    CHECK(j > prev);
    CHECK(std::abs(bessel_j(nu, j)) < 1e-10);
    if (nu >= 0) {
      CHECK(j > nu);
      CHECK(j < nu + 1.87 * std::cbrt(nu + 1.0) + 2.0);
    }
    prev = j;
  }
}

TEST_CASE("lambda1_euclidean anchors") {
  CHECK(std::abs(lambda1_euclidean(1) - pi * pi / 8) < 1e-9);
  CHECK(std::abs(lambda1_euclidean(2) - 2.891592981) < 1e-9);
  CHECK(std::abs(lambda1_euclidean(3) - pi * pi / 2) < 1e-9);
  CHECK(lambda1_euclidean(1) == doctest::Approx(1.2337005501).epsilon(1e-10));
  CHECK(lambda1_euclidean(3) == doctest::Approx(4.9348022005).epsilon(1e-10));
  CHECK(lambda1_euclidean(4) == doctest::Approx(0.5 * 3.831705970207512315614 * 3.831705970207512315614).epsilon(1e-13));
  CHECK(lambda1_euclidean(100) == doctest::Approx(1572.085228291764).epsilon(1e-11));
  CHECK_THROWS_AS(lambda1_euclidean(0), Error);
}

TEST_CASE("lambda1_euclidean agrees with radial shooting for d = 1..20") {
  for (int d = 1; d <= 20; ++d) {
    CAPTURE(d);
    const double shot = oracle::shooting_eigenvalue(d);
    CHECK(std::abs(lambda1_euclidean(d) - shot) < 1e-9);
  }
}

TEST_CASE("eigen result invariants") {
  double prev = 0.0;
  for (int d = 1; d <= 64; ++d) {
    const auto r = dirichlet_eigen(d);
    CHECK(r.d == d);
    CHECK(r.nu == 0.5 * d - 1.0);
    CHECK(r.lambda == 0.5 * r.j_first_zero * r.j_first_zero);
    CHECK(r.lambda > prev);
    prev = r.lambda;
  }
  double prev_ratio = 3.0;
  for (int d : {10, 20, 30}) {
    const double ratio = lambda1_euclidean(d) / (d * d / 8.0);
    CHECK(ratio > 1.0);
    CHECK(ratio < 2.5);
    CHECK(ratio < prev_ratio);
    prev_ratio = ratio;
  }
}

TEST_CASE("lambda1_asymptotic") {
  CHECK(lambda1_asymptotic(1) == doctest::Approx(pi * pi).epsilon(1e-14));
  CHECK(lambda1_asymptotic(2) == doctest::Approx(std::pow(2 * pi, 1.5)).epsilon(1e-14));
  CHECK(lambda1_asymptotic(3) == doctest::Approx(std::pow(2 * pi, 4.0 / 3.0) * std::pow(2.0, -2.0 / 3.0) *
                                                 std::pow(3.0, 2.0 / 3.0))
                                     .epsilon(1e-14));
  // (2 pi)^(5/4) 2^(-1/2) (4!!)^(1/2) = 2 (2 pi)^(5/4).
  CHECK(lambda1_asymptotic(4) == doctest::Approx(2.0 * std::pow(2 * pi, 1.25)).epsilon(1e-14));
  CHECK(lambda1_asymptotic(4) == doctest::Approx(19.8955).epsilon(1e-5));
  CHECK(std::isfinite(lambda1_asymptotic(2000)));
  const auto cmp = asymptotic_comparison(30);
  REQUIRE(cmp.size() == 30);
  CHECK(cmp[1].ratio == doctest::Approx(15.7496 / 2.891593).epsilon(1e-4));
  CHECK(cmp[29].ratio < 1.0);
}
