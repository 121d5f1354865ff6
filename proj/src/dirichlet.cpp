#include "hgap/dirichlet.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hgap/error.hpp"

namespace hgap {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 100000;

void check_domain(double nu, double x) {
  if (!(nu >= -0.5 && nu <= 100.0) || !(x > 0.0 && x <= 1000.0)) {
    throw Error(ErrorCode::DomainError, "bessel_j: need nu in [-1/2, 100] and x in (0, 1000]");
  }
}

// J_nu(x) = (x/2)^nu sum_k (-x^2/4)^k / (k! Gamma(nu + k + 1)).
BesselValue series(double nu, double x) {
  const double q = -0.25 * x * x;
  double term = std::pow(0.5 * x, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  // Derivative: sum_k (nu + 2k)/x * term_k.
  double dsum = nu * term;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    dsum += (nu + 2.0 * k) * term;
    if (std::abs(term) <= kEps * std::abs(sum) && k > 2) break;
  }
  return {sum, dsum / x};
}

// Steed's method (Barnett's CF1 + CF2 with Wronskian normalisation), x >= 2.
BesselValue steed(double nu, double x) {
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  const double w = xi2 / std::numbers::pi;

  // CF1: f_nu = J'_nu / J_nu by modified Lentz.
  int isign = 1;
  double h = nu * xi;
  if (std::abs(h) < kTiny) h = kTiny;
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int i = 1;
  for (; i <= kMaxIterations; ++i) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b - 1.0 / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::abs(del - 1.0) < kEps) break;
  }
  if (i > kMaxIterations) throw Error(ErrorCode::ConvergenceFailure, "bessel_j: CF1 did not converge");

  // Downward recurrence from nu to mu on unnormalised values.
  double rjl = isign * 1e-30;
  double rjpl = h * rjl;
  const double rjl1 = rjl;
  const double rjp1 = rjpl;
  double fact = nu * xi;
  for (int l = nl; l >= 1; --l) {
    const double rjtemp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * rjtemp - rjl;
    rjl = rjtemp;
  }
  if (rjl == 0.0) rjl = kEps;
  const double f = rjpl / rjl;

  // CF2: p + iq = (J'_mu + i Y'_mu) / (J_mu + i Y_mu) by Steed's algorithm.
  double a = 0.25 - mu * mu;
  double p = -0.5 * xi;
  double q = 1.0;
  const double br = 2.0 * x;
  double bi = 2.0;
  fact = a * xi / (p * p + q * q);
  double cr = br + q * fact;
  double ci = bi + p * fact;
  double den = br * br + bi * bi;
  double dr = br / den;
  double di = -bi / den;
  double dlr = cr * dr - ci * di;
  double dli = cr * di + ci * dr;
  double temp = p * dlr - q * dli;
  q = p * dli + q * dlr;
  p = temp;
  for (i = 2; i <= kMaxIterations; ++i) {
    a += 2 * (i - 1);
    bi += 2.0;
    dr = a * dr + br;
    di = a * di + bi;
    if (std::abs(dr) + std::abs(di) < kTiny) dr = kTiny;
    fact = a / (cr * cr + ci * ci);
    cr = br + cr * fact;
    ci = bi - ci * fact;
    if (std::abs(cr) + std::abs(ci) < kTiny) cr = kTiny;
    den = dr * dr + di * di;
    dr /= den;
    di /= -den;
    dlr = cr * dr - ci * di;
    dli = cr * di + ci * dr;
    temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    if (std::abs(dlr - 1.0) + std::abs(dli) < kEps) break;
  }
  if (i > kMaxIterations) throw Error(ErrorCode::ConvergenceFailure, "bessel_j: CF2 did not converge");

  const double gam = (p - f) / q;
  double rjmu = std::sqrt(w / ((p - f) * gam + q));
  rjmu = std::copysign(rjmu, rjl);
  const double scale = rjmu / rjl;
  return {rjl1 * scale, rjp1 * scale};
}

bool use_series(double nu, double x) {
  // Terms of the ascending series decrease from the first one on when
  // x^2 / 4 < nu + 1, so no cancellation occurs.
  return x < 2.0 || 0.25 * x * x < nu + 1.0;
}

}  // namespace

BesselValue bessel_j_with_derivative(double nu, double x) {
  check_domain(nu, x);
  return use_series(nu, x) ? series(nu, x) : steed(nu, x);
}

double bessel_j(double nu, double x) { return bessel_j_with_derivative(nu, x).value; }

double first_bessel_zero(double nu) {
  if (!(nu >= -0.5 && nu <= 100.0)) {
    throw Error(ErrorCode::DomainError, "first_bessel_zero: need nu in [-1/2, 100]");
  }
  double lo = std::max(nu, 0.1);
  double hi = nu + 1.87 * std::cbrt(nu + 1.0) + 2.0;
  double f_lo = bessel_j(nu, lo);
  const double f_hi = bessel_j(nu, hi);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw Error(ErrorCode::ConvergenceFailure, "first_bessel_zero: bracket does not isolate a sign change");
  }
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    const double fm = bessel_j(nu, mid);
    if (fm > 0.0) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const auto [v, dv] = bessel_j_with_derivative(nu, x);
    if (v == 0.0) return x;
    if (v > 0.0) lo = x; else hi = x;
    double next = x - v / dv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) return next;
    x = next;
  }
  const double residual = std::abs(bessel_j(nu, x));
  if (residual < 1e-13) return x;
  throw Error(ErrorCode::ConvergenceFailure, "first_bessel_zero: Newton polish did not converge");
}

namespace {

EigenvalueResult compute_eigen(int d) {
  EigenvalueResult r;
  r.d = d;
  r.nu = 0.5 * d - 1.0;
  r.j_first_zero = first_bessel_zero(r.nu);
  r.lambda = 0.5 * r.j_first_zero * r.j_first_zero;
  return r;
}

constexpr int kTableSize = 64;

const std::array<EigenvalueResult, kTableSize>& eigen_table() {
  static const auto table = [] {
    std::array<EigenvalueResult, kTableSize> t{};
    for (int d = 1; d <= kTableSize; ++d) t[static_cast<std::size_t>(d - 1)] = compute_eigen(d);
    return t;
  }();
  return table;
}

}  // namespace

EigenvalueResult dirichlet_eigen(int d) {
  if (d < 1) throw Error(ErrorCode::DomainError, "dimension must be positive");
  if (d <= kTableSize) return eigen_table()[static_cast<std::size_t>(d - 1)];
  return compute_eigen(d);
}

double lambda1_euclidean(int d) { return dirichlet_eigen(d).lambda; }

double lambda1_asymptotic(int d) {
  if (d < 1) throw Error(ErrorCode::DomainError, "dimension must be positive");
  double log_double_factorial = 0.0;
  for (int k = d; k > 1; k -= 2) log_double_factorial += std::log(static_cast<double>(k));
  const double dd = d;
  const double log_value = (dd + 1.0) / dd * std::log(2.0 * std::numbers::pi) -
                           2.0 / dd * std::numbers::ln2 + 2.0 / dd * log_double_factorial;
  return std::exp(log_value);
}

std::vector<AsymptoticComparison> asymptotic_comparison(int d_max) {
  std::vector<AsymptoticComparison> out;
  for (int d = 1; d <= d_max; ++d) {
    AsymptoticComparison row;
    row.d = d;
    row.lambda = lambda1_euclidean(d);
    row.asymptotic = lambda1_asymptotic(d);
    row.ratio = row.asymptotic / row.lambda;
    out.push_back(row);
  }
  return out;
}

}  // namespace hgap
