#pragma once

// Single-path Euler step for the horizontal Brownian motion g_t = (B_t, A_t):
//   B_{k+1}   = B_k + dB_k,                 dB_k ~ N(0, dt I_m)
//   A_i(k+1)  = A_i(k) + 1/2 <U^(i) B_k, dB_k>
//   tau_{k+1} = tau_k + 1/4 |B_k|^2 dt
// This is left multiplication g_{k+1} = g_k . (dB_k, 0).

#include <cstdint>
#include <span>
#include <vector>

#include "hgap/clifford.hpp"
#include "hgap/rng.hpp"

namespace hgap {

enum class IntegralRule {
  Ito,       // left point B_k
  Midpoint,  // (B_k + B_{k+1}) / 2
};

class HorizontalWalker {
 public:
  /// Throws InvalidStructure unless the structure verifies (n = 0 allowed).
  explicit HorizontalWalker(const HTypeStructure& s, IntegralRule rule = IntegralRule::Ito,
                            bool track_covariation = false);

  void reset() noexcept;

  void step(PathStream& rng, double dt, double sqrt_dt) noexcept {
    double b_sq_old = 0.0;
    for (int r = 0; r < m_; ++r) {
      dB_[r] = sqrt_dt * rng.normal();
      b_sq_old += B_[r] * B_[r];
    }
    if (n_ > 0) {
      const double* base = B_.data();
      if (rule_ == IntegralRule::Midpoint) {
        for (int r = 0; r < m_; ++r) mid_[r] = B_[r] + 0.5 * dB_[r];
        base = mid_.data();
      }
      for (int i = 0; i < n_; ++i) {
        const int* col = &cols_[static_cast<std::size_t>(i) * m_];
        const double* sgn = &signs_[static_cast<std::size_t>(i) * m_];
        double acc = 0.0;
        for (int r = 0; r < m_; ++r) acc += sgn[r] * base[col[r]] * dB_[r];
        dA_[i] = 0.5 * acc;
      }
      for (int i = 0; i < n_; ++i) A_[i] += dA_[i];
      if (track_covariation_) {
        for (int i = 0; i < n_; ++i)
          for (int j = 0; j < n_; ++j) covariation_[static_cast<std::size_t>(i) * n_ + j] += dA_[i] * dA_[j];
      }
    }
    tau_ += 0.25 * b_sq_old * dt;
    b_sq_ = 0.0;
    for (int r = 0; r < m_; ++r) {
      B_[r] += dB_[r];
      b_sq_ += B_[r] * B_[r];
    }
  }

  int m() const noexcept { return m_; }
  int n() const noexcept { return n_; }
  std::span<const double> B() const noexcept { return B_; }
  std::span<const double> A() const noexcept { return A_; }
  std::span<const double> last_dA() const noexcept { return dA_; }
  double tau() const noexcept { return tau_; }
  double b_squared() const noexcept { return b_sq_; }
  double a_squared() const noexcept {
    double acc = 0.0;
    for (double a : A_) acc += a * a;
    return acc;
  }
  /// |g|^4 = |B|^4 + |A|^2.
  double norm4() const noexcept { return b_sq_ * b_sq_ + a_squared(); }
  /// Row-major n x n running sum of dA_i dA_j (only if tracking was requested).
  std::span<const double> covariation() const noexcept { return covariation_; }

 private:
  int m_;
  int n_;
  IntegralRule rule_;
  bool track_covariation_;
  std::vector<int> cols_;
  std::vector<double> signs_;
  std::vector<double> B_, A_, dB_, dA_, mid_, covariation_;
  double tau_ = 0.0;
  double b_sq_ = 0.0;
};

}  // namespace hgap
