#include "hgap/group.hpp"

#include <cmath>
#include <string>

#include "hgap/error.hpp"

namespace hgap {

namespace {

// <U x, y> for dense integer U.
double bilinear(const IntMatrix& u, std::span<const double> x, std::span<const double> y) {
  const int m = u.dim();
  double acc = 0.0;
  for (int r = 0; r < m; ++r) {
    double ux = 0.0;
    for (int c = 0; c < m; ++c) {
      const int v = u(r, c);
      if (v != 0) ux += v * x[static_cast<std::size_t>(c)];
    }
    acc += ux * y[static_cast<std::size_t>(r)];
  }
  return acc;
}

std::vector<double> mat_vec(const IntMatrix& u, std::span<const double> x) {
  const int m = u.dim();
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      const int v = u(r, c);
      if (v != 0) out[static_cast<std::size_t>(r)] += v * x[static_cast<std::size_t>(c)];
    }
  return out;
}

double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

}  // namespace

std::vector<double> flatten(const GroupElement& x) {
  std::vector<double> out(x.horizontal);
  out.insert(out.end(), x.central.begin(), x.central.end());
  return out;
}

GroupElement unflatten(const HTypeStructure& s, std::span<const double> flat) {
  const auto m = static_cast<std::size_t>(s.m());
  const auto n = static_cast<std::size_t>(s.n());
  if (flat.size() != m + n) {
    throw Error(ErrorCode::DimensionMismatch,
                "group element needs " + std::to_string(m + n) + " coordinates");
  }
  GroupElement x{{flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(m)},
                 {flat.begin() + static_cast<std::ptrdiff_t>(m), flat.end()}};
  check_element(s, x);
  return x;
}

void check_element(const HTypeStructure& s, const GroupElement& x) {
  if (static_cast<int>(x.horizontal.size()) != s.m() || static_cast<int>(x.central.size()) != s.n()) {
    throw Error(ErrorCode::DimensionMismatch, "group element does not match structure dimensions");
  }
  for (double v : x.horizontal)
    if (!std::isfinite(v)) throw Error(ErrorCode::DomainError, "non-finite coordinate");
  for (double v : x.central)
    if (!std::isfinite(v)) throw Error(ErrorCode::DomainError, "non-finite coordinate");
}

GroupElement multiply(const HTypeStructure& s, const GroupElement& x, const GroupElement& y) {
  check_element(s, x);
  check_element(s, y);
  GroupElement out = x;
  for (std::size_t j = 0; j < out.horizontal.size(); ++j) out.horizontal[j] += y.horizontal[j];
  for (int i = 0; i < s.n(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.central[k] += y.central[k] + 0.5 * bilinear(s.generator(i), x.horizontal, y.horizontal);
  }
  return out;
}

GroupElement inverse(const HTypeStructure& s, const GroupElement& x) {
  check_element(s, x);
  GroupElement out = x;
  for (auto& v : out.horizontal) v = -v;
  for (auto& v : out.central) v = -v;
  return out;
}

GroupElement dilate(const GroupElement& x, double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::NonpositiveScale, "dilation factor must be positive");
  GroupElement out = x;
  for (auto& v : out.horizontal) v *= a;
  for (auto& v : out.central) v *= a * a;
  return out;
}

double homogeneous_norm(const GroupElement& x) {
  const double h2 = squared_norm(x.horizontal);
  const double z2 = squared_norm(x.central);
  return std::sqrt(std::sqrt(h2 * h2 + z2));
}

std::vector<double> maurer_cartan(const HTypeStructure& s, const GroupElement& k,
                                  std::span<const double> v) {
  check_element(s, k);
  const auto m = static_cast<std::size_t>(s.m());
  if (v.size() != m + static_cast<std::size_t>(s.n())) {
    throw Error(ErrorCode::DimensionMismatch, "tangent vector length must be m + n");
  }
  std::vector<double> out(v.begin(), v.end());
  const auto vbar = v.first(m);
  for (int i = 0; i < s.n(); ++i) {
    out[m + static_cast<std::size_t>(i)] -= 0.5 * bilinear(s.generator(i), k.horizontal, vbar);
  }
  return out;
}

std::vector<double> vector_field(const HTypeStructure& s, int j, const GroupElement& x) {
  check_element(s, x);
  if (j < 0 || j >= s.m()) throw Error(ErrorCode::IndexOutOfRange, "vector field index out of range");
  const auto m = static_cast<std::size_t>(s.m());
  std::vector<double> out(m + static_cast<std::size_t>(s.n()), 0.0);
  out[static_cast<std::size_t>(j)] = 1.0;
  for (int i = 0; i < s.n(); ++i) {
    const IntMatrix& u = s.generator(i);
    double row = 0.0;
    for (int c = 0; c < s.m(); ++c) row += u(j, c) * x.horizontal[static_cast<std::size_t>(c)];
    out[m + static_cast<std::size_t>(i)] = 0.5 * row;
  }
  return out;
}

double apply_sublaplacian(const HTypeStructure& s, const TestFunction& f, const GroupElement& x) {
  check_element(s, x);
  if (!f.hessian_h) throw Error(ErrorCode::MissingDerivative, "hessian_h oracle missing");
  const int m = s.m();
  const int n = s.n();
  const auto hh = f.hessian_h(x);
  double result = 0.0;
  for (int j = 0; j < m; ++j) result += hh[static_cast<std::size_t>(j * m + j)];
  if (n == 0) return result;

  if (!f.mixed) throw Error(ErrorCode::MissingDerivative, "mixed oracle missing");
  if (!f.hessian_z) throw Error(ErrorCode::MissingDerivative, "hessian_z oracle missing");
  const auto mixed = f.mixed(x);
  const auto hz = f.hessian_z(x);
  for (int i = 0; i < n; ++i) {
    const auto ux = mat_vec(s.generator(i), x.horizontal);
    for (int j = 0; j < m; ++j) {
      result += ux[static_cast<std::size_t>(j)] * mixed[static_cast<std::size_t>(j * n + i)];
    }
  }
  double trace_z = 0.0;
  for (int i = 0; i < n; ++i) trace_z += hz[static_cast<std::size_t>(i * n + i)];
  result += 0.25 * squared_norm(x.horizontal) * trace_z;
  return result;
}

double sublaplacian_fd_check(const HTypeStructure& s, const std::function<double(const GroupElement&)>& f,
                             const GroupElement& x, double h) {
  check_element(s, x);
  if (!(h > 0.0)) throw Error(ErrorCode::DomainError, "finite-difference step must be positive");
  const double f0 = f(x);
  double acc = 0.0;
  GroupElement step = GroupElement::identity(s.m(), s.n());
  for (int j = 0; j < s.m(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    step.horizontal[k] = h;
    const double fp = f(multiply(s, x, step));
    step.horizontal[k] = -h;
    const double fm = f(multiply(s, x, step));
    step.horizontal[k] = 0.0;
    acc += (fp - 2.0 * f0 + fm) / (h * h);
  }
  return acc;
}

double sublaplacian_fd_richardson(const HTypeStructure& s,
                                  const std::function<double(const GroupElement&)>& f,
                                  const GroupElement& x, double h) {
  const double coarse = sublaplacian_fd_check(s, f, x, h);
  const double fine = sublaplacian_fd_check(s, f, x, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace hgap
