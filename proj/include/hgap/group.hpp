#pragma once

// Group operations of an H-type group in exponential coordinates
// x = (xbar, xhat) in R^m x R^n:
//
//   x . y = (xbar + ybar, xhat_i + yhat_i + 1/2 <U^(i) xbar, ybar>)
//   |x|   = (|xbar|^4 + |xhat|^2)^(1/4)
//
// Left-invariant horizontal fields are X_j f(x) = d/dt f(x . (t e_j, 0)) at
// t = 0, which in coordinates reads
//
//   X_j = d/dxbar_j + 1/2 sum_s (U^(s) xbar)_j d/dxhat_s .

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hgap/clifford.hpp"

namespace hgap {

struct GroupElement {
  std::vector<double> horizontal;  // xbar, length m
  std::vector<double> central;     // xhat, length n

  static GroupElement identity(int m, int n) {
    return {std::vector<double>(static_cast<std::size_t>(m), 0.0),
            std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Flat [xbar..., xhat...] layout used for JSON and tangent vectors.
std::vector<double> flatten(const GroupElement& x);
GroupElement unflatten(const HTypeStructure& s, std::span<const double> flat);

/// Throws DimensionMismatch if x does not match (m, n) of s, DomainError if
/// any coordinate is not finite.
void check_element(const HTypeStructure& s, const GroupElement& x);

GroupElement multiply(const HTypeStructure& s, const GroupElement& x, const GroupElement& y);
GroupElement inverse(const HTypeStructure& s, const GroupElement& x);

/// D_a(xbar, xhat) = (a xbar, a^2 xhat); throws NonpositiveScale for a <= 0.
GroupElement dilate(const GroupElement& x, double a);

double homogeneous_norm(const GroupElement& x);

/// Left Maurer-Cartan form at k applied to the tangent vector v (length m+n):
/// (vbar, vhat_i - 1/2 <U^(i) kbar, vbar>).
std::vector<double> maurer_cartan(const HTypeStructure& s, const GroupElement& k,
                                  std::span<const double> v);

/// Coefficients of X_j at x, j in [0, m). Throws IndexOutOfRange.
std::vector<double> vector_field(const HTypeStructure& s, int j, const GroupElement& x);

/// Derivative oracle for a smooth function on the group. Any member may be
/// left empty; operations that need it throw MissingDerivative.
struct TestFunction {
  using Scalar = std::function<double(const GroupElement&)>;
  using Vector = std::function<std::vector<double>(const GroupElement&)>;
  // Row-major matrices.
  using Matrix = std::function<std::vector<double>(const GroupElement&)>;

  Scalar value;
  Vector gradient_h;  // length m
  Vector gradient_z;  // length n
  Matrix hessian_h;   // m x m
  Matrix hessian_z;   // n x n
  Matrix mixed;       // m x n, entry (j, s) = d^2 f / dxbar_j dxhat_s
};

/// Sub-Laplacian sum_j X_j^2 f evaluated from the derivative oracle:
///   tr(H_h) + sum_s <U^(s) xbar, mixed column s> + 1/4 |xbar|^2 tr(H_z).
double apply_sublaplacian(const HTypeStructure& s, const TestFunction& f, const GroupElement& x);

/// Independent finite-difference value of sum_j X_j^2 f: centered second
/// differences of t -> f(x . (t e_j, 0)), which is the flow of X_j.
double sublaplacian_fd_check(const HTypeStructure& s, const std::function<double(const GroupElement&)>& f,
                             const GroupElement& x, double h = 1e-3);

/// Richardson-extrapolated variant: (4 D(h/2) - D(h)) / 3.
double sublaplacian_fd_richardson(const HTypeStructure& s,
                                  const std::function<double(const GroupElement&)>& f,
                                  const GroupElement& x, double h = 1e-3);

}  // namespace hgap
