#pragma once

// Lowest Dirichlet eigenvalue of -1/2 Laplacian on the unit ball of R^d:
//   lambda_1^(d) = j_{d/2 - 1, 1}^2 / 2,
// with j_{nu,1} the first positive zero of the Bessel function J_nu.

#include <vector>

namespace hgap {

/// Bessel function of the first kind J_nu(x) for nu in [-1/2, 100], x in (0, 1000].
/// Ascending series while its terms decrease monotonically, Steed's
/// continued-fraction method otherwise. Throws DomainError outside the range.
double bessel_j(double nu, double x);

struct BesselValue {
  double value;
  double derivative;
};

/// J_nu(x) together with J'_nu(x).
BesselValue bessel_j_with_derivative(double nu, double x);

/// Smallest positive zero of J_nu, nu >= -1/2. Bisection inside
/// (max(nu, 0.1), nu + 1.87 (nu + 1)^(1/3) + 2) followed by Newton polish.
/// Throws ConvergenceFailure if the bracket or residual checks fail.
double first_bessel_zero(double nu);

struct EigenvalueResult {
  int d = 0;
  double nu = 0.0;
  double j_first_zero = 0.0;
  double lambda = 0.0;
};

/// Full result for dimension d; d <= 64 is served from a table built once.
EigenvalueResult dirichlet_eigen(int d);

double lambda1_euclidean(int d);

/// (2 pi)^((d+1)/d) 2^(-2/d) (d!!)^(2/d), evaluated in log space. This
/// closed form grows linearly in d while lambda1_euclidean grows like d^2/8;
/// it is reported for comparison only and never feeds the bounds.
double lambda1_asymptotic(int d);

struct AsymptoticComparison {
  int d = 0;
  double lambda = 0.0;
  double asymptotic = 0.0;
  double ratio = 0.0;  // asymptotic / lambda
};

std::vector<AsymptoticComparison> asymptotic_comparison(int d_max);

}  // namespace hgap
