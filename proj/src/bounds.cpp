#include "hgap/bounds.hpp"

#include <cmath>
#include <string>

#include "hgap/clifford.hpp"
#include "hgap/dirichlet.hpp"
#include "hgap/error.hpp"

namespace hgap {

namespace {
void check_eigenvalues(double lambda_m, double lambda_n) {
  if (!(lambda_m > 0.0) || !(lambda_n >= 0.0) || !std::isfinite(lambda_m) || !std::isfinite(lambda_n)) {
    throw Error(ErrorCode::DomainError, "eigenvalues must be finite with lambda_m > 0, lambda_n >= 0");
  }
}
}  // namespace

double f_objective(double lambda_m, double lambda_n, double x) {
  check_eigenvalues(lambda_m, lambda_n);
  if (!(x > 0.0 && x < 1.0)) throw Error(ErrorCode::DomainError, "f_objective: x must lie in (0, 1)");
  const double s = std::sqrt(1.0 - x);
  return lambda_m / s + lambda_n * s / (4.0 * x);
}

double x_star(double lambda_m, double lambda_n) {
  check_eigenvalues(lambda_m, lambda_n);
  if (lambda_n == 0.0) {
    throw Error(ErrorCode::DomainError, "x_star: infimum is not attained for lambda_n = 0");
  }
  const double root = std::sqrt(lambda_n * lambda_n + 32.0 * lambda_n * lambda_m);
  return 4.0 * lambda_n / (3.0 * lambda_n + root);
}

double x_star_quotient(double lambda_m, double lambda_n) {
  check_eigenvalues(lambda_m, lambda_n);
  const double denom = 2.0 * (4.0 * lambda_m - lambda_n);
  if (std::abs(4.0 * lambda_m - lambda_n) < 1e-12) {
    throw Error(ErrorCode::DegenerateDenominator, "x_star: 4 lambda_m == lambda_n");
  }
  return (std::sqrt(lambda_n * lambda_n + 32.0 * lambda_n * lambda_m) - 3.0 * lambda_n) / denom;
}

double upper_bound(double lambda_m, double lambda_n) {
  if (lambda_n == 0.0) {
    check_eigenvalues(lambda_m, lambda_n);
    return lambda_m;
  }
  return f_objective(lambda_m, lambda_n, x_star(lambda_m, lambda_n));
}

GapBoundResult gap_bounds(int m, int n) {
  if (m < 1 || n < 1 || !admissible(m, n)) {
    throw Error(ErrorCode::NotAdmissible,
                "(m, n) = (" + std::to_string(m) + ", " + std::to_string(n) + ") is not admissible");
  }
  GapBoundResult r;
  r.m = m;
  r.n = n;
  r.lambda_m = lambda1_euclidean(m);
  r.lambda_n = lambda1_euclidean(n);
  r.c = r.lambda_n / r.lambda_m;
  r.x_star = x_star(r.lambda_m, r.lambda_n);
  r.lower = r.lambda_m;
  r.upper = f_objective(r.lambda_m, r.lambda_n, r.x_star);
  return r;
}

std::vector<RatioRow> ratio_asymptotics(const std::vector<int>& m_list, int n) {
  std::vector<RatioRow> rows;
  rows.reserve(m_list.size());
  for (int m : m_list) {
    RatioRow row;
    row.bounds = gap_bounds(m, n);
    row.ratio = row.bounds.upper / row.bounds.lower;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hgap
