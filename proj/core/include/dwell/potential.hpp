#pragma once

#include <cmath>

#include "dwell/errors.hpp"

namespace dwell {

/// Double-well potential V(y) = 1/2 m w0^2 (|y| - a)^2 plus the longitudinal
/// step V0 and beam energy E.  All members are in internal units (hbar = 1,
/// um, ps).  a = 0 degenerates to a single harmonic well, which is allowed
/// (used by validation configs); a < 0 is not.
struct PotentialSpec {
  double mass = 0.0;             // internal mass units
  double well_separation = 0.0;  // a, um (half-distance between minima)
  double well_frequency = 0.0;   // w0, rad/ps
  double step_height = 0.0;      // V0, internal energy
  double beam_energy = 0.0;      // E, internal energy

  double v(double y) const {
    const double d = std::abs(y) - well_separation;
    return 0.5 * mass * well_frequency * well_frequency * d * d;
  }

  double barrier_height() const {
    return 0.5 * mass * well_frequency * well_frequency * well_separation *
           well_separation;
  }

  /// Gaussian width of a single-well ground state, sqrt(hbar/(m w0)).
  double ground_width() const { return 1.0 / std::sqrt(mass * well_frequency); }

  void validate() const {
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw ConfigError("potential: mass must be positive and finite");
    if (!(well_separation >= 0.0) || !std::isfinite(well_separation))
      throw ConfigError("potential: well_separation must be >= 0 and finite");
    if (!(well_frequency > 0.0) || !std::isfinite(well_frequency))
      throw ConfigError("potential: well_frequency must be positive and finite");
    if (!std::isfinite(step_height) || !std::isfinite(beam_energy))
      throw ConfigError("potential: step_height and beam_energy must be finite");
  }
};

}  // namespace dwell
