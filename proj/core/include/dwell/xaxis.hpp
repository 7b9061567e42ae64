#pragma once

#include <complex>
#include <vector>

#include "dwell/dynamics.hpp"

namespace dwell {

/// Longitudinal configuration: total beam energy E, step height V0 and mass,
/// all internal units.  Detuning and the incident wavenumber k0 are derived,
/// so the encodings stay consistent by construction.
struct LongitudinalConfig {
  double beam_energy = 0.0;  // E
  double step_height = 0.0;  // V0
  double mass = 0.0;

  double detuning() const { return beam_energy - step_height; }
  double k0() const;  // sqrt(2 m E), requires E > 0

  void validate() const;
};

/// k2 = sqrt(2 m (E - V0)) / hbar.  Positive real for E > V0, positive
/// imaginary (decaying branch) for E < V0, zero at threshold.
std::complex<double> k2(const LongitudinalConfig& cfg);

/// Kinematic map t = x m / (hbar Re k2); only defined in the propagating
/// regime (throws RegimeError for E <= V0).
double x_to_t(double x, const LongitudinalConfig& cfg);

struct RhoAPoint {
  double x = 0.0;
  double rho_a = 0.0;  // p_minus(x / v_x)
};

/// Waveguide-a density profile along x: the transverse transfer law mapped
/// through t = x/v_x.  Small-x behavior is quadratic with curvature
/// omega_s^2 / (4 v_x^2).
std::vector<RhoAPoint> rho_a_profile(const std::vector<double>& xs,
                                     const LongitudinalConfig& cfg,
                                     const ModePair& modes);

struct DampedPoint {
  double x = 0.0;
  double psi_m_sq = 0.0;  // e^{-2|k2|x} cos^2(|k2|x/4)
  double psi_a_sq = 0.0;  // e^{-2|k2|x} sin^2(|k2|x/4)
};

struct DampedProfiles {
  std::vector<DampedPoint> points;
  double k2_abs = 0.0;
  double v_x_abs = 0.0;
  /// (J0 m / (hbar |k2|)) / (|k2|/4) at the special detuning Delta = -hbar J0.
  /// The profiles use the conventional |k2|x/4 oscillation argument, while
  /// the kinematic mapping t = x/|v_x| of the two-level beat gives a rate of
  /// J0/|v_x| = |k2|/2 exactly; this ratio (algebraically 2) is reported in
  /// the output metadata rather than enforced.
  double consistency_ratio = 0.0;
};

/// Evanescent-regime profiles at the special detuning Delta = -hbar J0.
/// Preconditions: E < V0 (RegimeError otherwise; at E = V0, k2 = 0 and the
/// regime is undefined) and |Delta + hbar J0| <= detuning_rel_tol * hbar J0.
DampedProfiles damped_profiles(const std::vector<double>& xs,
                               const LongitudinalConfig& cfg, const ModePair& modes,
                               double detuning_rel_tol = 1e-6);

}  // namespace dwell
