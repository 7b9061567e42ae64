#pragma once

#include <cmath>
#include <vector>

#include "dwell/errors.hpp"

namespace dwell {

/// Uniform grid on [-y_max, y_max], symmetric about y = 0 so parity is well
/// defined.  n_points is odd, which puts y = 0 exactly on the grid; the
/// mirror of node i is node n-1-i and the coordinates are constructed so the
/// mirrored values are bit-identical.
class Grid1D {
 public:
  static Grid1D symmetric(int n_points, double y_max) {
    if (n_points < 3) throw ConfigError("grid: n_points must be >= 3");
    if (n_points % 2 == 0)
      throw ConfigError("grid: n_points must be odd so the grid contains y = 0");
    if (!(y_max > 0.0) || !std::isfinite(y_max))
      throw ConfigError("grid: y_max must be positive and finite");
    return Grid1D(n_points, y_max);
  }

  /// Validates y_min = -y_max before constructing.
  static Grid1D checked(int n_points, double y_min, double y_max) {
    if (y_min != -y_max)
      throw ConfigError(
          "grid: must be symmetric about y = 0 (y_min = -y_max), got y_min != -y_max");
    return symmetric(n_points, y_max);
  }

  int size() const { return n_; }
  int mid() const { return (n_ - 1) / 2; }
  double y_min() const { return -y_max_; }
  double y_max() const { return y_max_; }
  double h() const { return y_max_ / mid(); }

  double y(int i) const {
    const int m = mid();
    return i < m ? -(double(m - i) * h()) : double(i - m) * h();
  }

  std::vector<double> points() const {
    std::vector<double> p(n_);
    for (int i = 0; i < n_; ++i) p[i] = y(i);
    return p;
  }

  /// Trapezoid inner product of two grid functions.
  template <typename Va, typename Vb>
  double inner(const Va& a, const Vb& b) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += double(a[i]) * double(b[i]);
    s -= 0.5 * (double(a[0]) * double(b[0]) + double(a[n_ - 1]) * double(b[n_ - 1]));
    return s * h();
  }

  template <typename V>
  double integrate(const V& f) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += double(f[i]);
    s -= 0.5 * (double(f[0]) + double(f[n_ - 1]));
    return s * h();
  }

 private:
  Grid1D(int n, double ymax) : n_(n), y_max_(ymax) {}
  int n_;
  double y_max_;
};

}  // namespace dwell
