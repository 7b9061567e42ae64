#include "dwell/calibrate.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace dwell {
namespace {

PotentialSpec with_parameter(const PotentialSpec& pot, FreeParameter fp, double value) {
  PotentialSpec p = pot;
  if (fp == FreeParameter::mass)
    p.mass = value;
  else
    p.well_frequency = value;
  return p;
}

}  // namespace

CalibrationResult calibrate(double target_period, FreeParameter fp,
                            const PotentialSpec& pot, const Grid1D& grid,
                            const CalibrationOptions& opts) {
  if (!(target_period > 0.0))
    throw ConfigError("calibrate: target period must be positive");
  if (!(opts.bracket_lo > 0.0) || !(opts.bracket_hi > opts.bracket_lo))
    throw ConfigError("calibrate: need a positive bracket with lo < hi");

  int evals = 0;
  auto period_at = [&](double value) {
    ++evals;
    const ModePair mp = solve_modes(grid, with_parameter(pot, fp, value));
    if (mp.degenerate()) return std::numeric_limits<double>::infinity();
    return mp.period();
  };

  // idempotence: already on target -> return the input unchanged
  {
    const ModePair mp = solve_modes(grid, pot);
    ++evals;
    if (!mp.degenerate() &&
        std::abs(mp.period() - target_period) <= opts.rel_tol * target_period)
      return {pot, mp.period(), evals};
  }

  // The splitting is not monotone over wide brackets: it grows with the
  // parameter while the wells merge and falls exponentially once the barrier
  // deepens, so a target period can be crossed from either side.  Bisection
  // runs inside the first log-grid interval with a sign change, in whichever
  // orientation it appears (the deep branch has f(lo) < 0 < f(hi), the
  // shallow branch the reverse).
  double lo = opts.bracket_lo, hi = opts.bracket_hi;
  double flo = period_at(lo) - target_period;
  double fhi = period_at(hi) - target_period;
  double scanned_min = std::min(flo, fhi) + target_period;
  double scanned_max = std::max(flo, fhi) + target_period;

  if (flo == 0.0) return {with_parameter(pot, fp, lo), target_period, evals};
  if (fhi == 0.0) return {with_parameter(pot, fp, hi), target_period, evals};

  if (flo * fhi > 0.0 || std::isinf(flo)) {
    // same-signed endpoints (or an unusable degenerate end): scan
    double prev = lo, fprev = flo;
    bool found = false;
    for (int i = 1; i <= opts.scan_points; ++i) {
      const double x = lo * std::pow(hi / lo, double(i) / opts.scan_points);
      const double fx = period_at(x) - target_period;
      scanned_min = std::min(scanned_min, fx + target_period);
      scanned_max = std::max(scanned_max, fx + target_period);
      if (std::isfinite(fprev) && fprev * fx <= 0.0) {
        lo = prev;
        hi = x;
        flo = fprev;
        fhi = fx;
        found = true;
        break;
      }
      prev = x;
      fprev = fx;
    }
    if (!found) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "calibrate: target period %.6g ps unreachable in bracket; "
                    "achieved range [%.6g, %.6g] ps",
                    target_period, scanned_min, scanned_max);
      throw CalibrationError(buf);
    }
  }

  double best = hi, fbest = fhi;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double fm = period_at(mid) - target_period;
    if (std::isfinite(fm) && std::abs(fm) <= 0.3 * opts.rel_tol * target_period) {
      best = mid;
      fbest = fm;
      break;
    }
    const bool same_side_as_lo = std::isinf(fm) ? fhi * fm > 0.0 ? false : true
                                                : fm * flo > 0.0;
    if (same_side_as_lo) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
      best = mid;
      fbest = fm;
    }
    if (hi / lo - 1.0 < 1e-14) break;
  }

  if (!(std::abs(fbest) <= opts.rel_tol * target_period)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "calibrate: bisection stalled at period %.8g ps for target %.8g ps",
                  fbest + target_period, target_period);
    throw CalibrationError(buf);
  }
  return {with_parameter(pot, fp, best), fbest + target_period, evals};
}

}  // namespace dwell
