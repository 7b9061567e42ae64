#include "dwell/spline.hpp"

#include <cmath>

namespace dwell {

UniformCubicSpline::UniformCubicSpline(double x0, double h,
                                       const std::vector<double>& y)
    : x0_(x0), h_(h), n_(static_cast<int>(y.size())) {
  if (n_ < 3) throw NumericError("spline: need at least 3 points");
  if (!(h > 0.0)) throw NumericError("spline: spacing must be positive");

  // second derivatives m_i from the natural-spline tridiagonal system
  std::vector<double> m(n_, 0.0), cp(n_, 0.0), dp(n_, 0.0);
  // interior equations: m[i-1] + 4 m[i] + m[i+1] = 6 (y[i-1] - 2 y[i] + y[i+1]) / h^2
  const double inv_h2 = 1.0 / (h * h);
  cp[1] = 1.0 / 4.0;
  dp[1] = 6.0 * (y[0] - 2.0 * y[1] + y[2]) * inv_h2 / 4.0;
  for (int i = 2; i < n_ - 1; ++i) {
    const double denom = 4.0 - cp[i - 1];
    cp[i] = 1.0 / denom;
    const double rhs = 6.0 * (y[i - 1] - 2.0 * y[i] + y[i + 1]) * inv_h2;
    dp[i] = (rhs - dp[i - 1]) / denom;
  }
  for (int i = n_ - 2; i >= 1; --i) m[i] = dp[i] - cp[i] * m[i + 1];

  a_.resize(n_ - 1);
  b_.resize(n_ - 1);
  c_.resize(n_ - 1);
  d_.resize(n_ - 1);
  for (int i = 0; i < n_ - 1; ++i) {
    a_[i] = y[i];
    b_[i] = (y[i + 1] - y[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
    c_[i] = m[i] / 2.0;
    d_[i] = (m[i + 1] - m[i]) / (6.0 * h);
  }
}

double UniformCubicSpline::operator()(double x) const {
  if (x < x_min() || x > x_max())
    throw OutOfDomainError("spline: evaluation outside grid extent");
  int i = static_cast<int>((x - x0_) / h_);
  if (i < 0) i = 0;
  if (i > n_ - 2) i = n_ - 2;
  const double s = x - (x0_ + h_ * static_cast<double>(i));
  return a_[i] + s * (b_[i] + s * (c_[i] + s * d_[i]));
}

}  // namespace dwell
