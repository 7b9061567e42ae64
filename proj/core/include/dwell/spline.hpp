#pragma once

#include <vector>

#include "dwell/errors.hpp"

namespace dwell {

/// Natural cubic spline on a uniform grid.  C2 interpolant; evaluation is
/// O(1) from precomputed per-interval coefficients.
class UniformCubicSpline {
 public:
  UniformCubicSpline() = default;
  UniformCubicSpline(double x0, double h, const std::vector<double>& values);

  double operator()(double x) const;
  double x_min() const { return x0_; }
  double x_max() const { return x0_ + h_ * static_cast<double>(n_ - 1); }

 private:
  double x0_ = 0.0, h_ = 1.0;
  int n_ = 0;
  std::vector<double> a_, b_, c_, d_;  // per-interval cubic coefficients
};

}  // namespace dwell
