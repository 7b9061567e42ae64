#pragma once

#include "dwell/eigensolver.hpp"

namespace dwell {

enum class FreeParameter { mass, well_frequency };

struct CalibrationOptions {
  double bracket_lo = 0.0;  // in the free parameter's internal unit
  double bracket_hi = 0.0;
  double rel_tol = 1e-3;    // |achieved - target| / target
  int max_iterations = 200;
  int scan_points = 24;     // log-grid fallback when the bracket does not sign-change
};

struct CalibrationResult {
  PotentialSpec pot;
  double achieved_period = 0.0;  // ps
  int evaluations = 0;
};

/// Finds the free parameter value whose solved tunnel splitting gives the
/// target beat period, by bisection on the monotone splitting-vs-parameter
/// dependence.  Degenerate evaluations (splitting below the floor) count as
/// infinite period so deep-barrier bracket ends stay ordered.  If the bracket
/// does not straddle the target, falls back to a log-grid scan for a
/// sign-change interval.  Idempotent: a potential already within tolerance is
/// returned unchanged.
CalibrationResult calibrate(double target_period, FreeParameter free_parameter,
                            const PotentialSpec& pot, const Grid1D& grid,
                            const CalibrationOptions& opts);

}  // namespace dwell
