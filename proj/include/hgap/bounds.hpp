#pragma once

// Closed-form sandwich for the Dirichlet spectral gap of -1/2 sub-Laplacian
// on the unit homogeneous ball of an H-type group with dimensions (m, n):
//
//   lambda_m <= lambda_1(m, n) <= inf_{0<x<1} f(x),
//   f(x) = lambda_m / sqrt(1 - x) + lambda_n sqrt(1 - x) / (4x),
//
// where lambda_d is the Euclidean Dirichlet eigenvalue on the unit ball of R^d.

#include <vector>

namespace hgap {

struct GapBoundResult {
  int m = 0;
  int n = 0;
  double lambda_m = 0.0;
  double lambda_n = 0.0;
  double c = 0.0;       // lambda_n / lambda_m
  double x_star = 0.0;  // minimiser of f on (0, 1)
  double lower = 0.0;   // lambda_m
  double upper = 0.0;   // f(x_star)
};

/// Throws DomainError unless 0 < x < 1 and both eigenvalues are positive
/// (lambda_n = 0 is accepted as the degenerate limit).
double f_objective(double lambda_m, double lambda_n, double x);

/// Unique stationary point of f on (0, 1), the positive root of
///   (4 lambda_m - lambda_n) x^2 + 3 lambda_n x - 2 lambda_n = 0.
/// Evaluated in the rationalised form 4 lambda_n / (3 lambda_n + sqrt(lambda_n^2 + 32 lambda_m lambda_n)),
/// which is also valid when 4 lambda_m = lambda_n (root 2/3).
double x_star(double lambda_m, double lambda_n);

/// The textbook quotient form of the same root; undefined at 4 lambda_m = lambda_n.
/// Throws DegenerateDenominator when |4 lambda_m - lambda_n| < 1e-12.
double x_star_quotient(double lambda_m, double lambda_n);

double upper_bound(double lambda_m, double lambda_n);

/// Requires admissible(m, n); throws NotAdmissible otherwise.
GapBoundResult gap_bounds(int m, int n);

struct RatioRow {
  GapBoundResult bounds;
  double ratio = 0.0;  // upper / lower
};

std::vector<RatioRow> ratio_asymptotics(const std::vector<int>& m_list, int n);

}  // namespace hgap
