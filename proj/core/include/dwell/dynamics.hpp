#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "dwell/eigensolver.hpp"

namespace dwell {

/// Rotating-frame two-mode state at time t:
///   chi(y,t) = cos(w_s t/2) (chi_e+chi_o)/sqrt(2) + i sin(w_s t/2) (chi_e-chi_o)/sqrt(2)
/// The common phase exp(-i E_bar t) is dropped; every phase-sensitive output
/// records this gauge.
std::vector<std::complex<double>> evolve(const ModePair& modes, double t);

/// evolve at t = 0: the right-localized superposition (chi_e+chi_o)/sqrt(2).
std::vector<std::complex<double>> initial_state(const ModePair& modes);

std::vector<double> density(const std::vector<std::complex<double>>& chi);

/// Mask of points where rho exceeds eps_rho_rel * max(rho); phase and
/// velocity are undefined (NaN), not extrapolated, elsewhere.
std::vector<std::uint8_t> density_mask(const std::vector<double>& rho,
                                       double eps_rho_rel);

struct PhaseResult {
  std::vector<double> s;  // unwrapped phase, NaN off-mask
  int components = 0;
  // half-open index ranges of the unwrapped components: connected mask runs,
  // further split where a near-pi step marks an unresolved sign change
  std::vector<std::pair<int, int>> spans;
};

/// Complex argument of chi, unwrapped along y within each connected mask
/// component.  Each component is anchored so its most-nearly-real point
/// carries the principal arctan value; the whole component then agrees with
/// the arctan closed form modulo pi, and any fixed anchoring is equivalent
/// for gradients.  Throws InvariantError when no point is masked.
PhaseResult phase(const std::vector<std::complex<double>>& chi,
                  const std::vector<std::uint8_t>& mask);

struct PhaseGradientResult {
  std::vector<double> ds_dy;  // NaN off-mask
  int skipped_fragments = 0;  // mask components with < 3 points
};

/// Central differences of the unwrapped phase on component interiors,
/// second-order one-sided at component edges.
PhaseGradientResult phase_gradient(const PhaseResult& ph,
                                   const std::vector<std::uint8_t>& mask,
                                   const Grid1D& grid);

/// Independent analytic route: differentiating the arctan closed form gives
///   dS/dy = sin(w_s t)/2 * (u w' - w u') / rho,
/// with u, w the symmetric/antisymmetric combinations and u', w' central
/// differences.  Used as the dual-route check against phase_gradient.
std::vector<double> phase_gradient_analytic(const ModePair& modes, double t);

/// Probability current j_y = (hbar/m) Im(chi* d_y chi), central differences
/// (one-sided at the grid ends).
std::vector<double> current(const std::vector<std::complex<double>>& chi,
                            double mass, const Grid1D& grid);

struct SnapshotOptions {
  double eps_rho_rel = 1e-12;
  double tol_identity = 1e-4;  // relative to max |dS/dy| over the snapshot
};

/// Field arrays at one time, with the phase-gradient identity
/// dS/dy = m j / (hbar rho) verified on the mask between two independent
/// code paths at construction.
struct FieldSnapshot {
  double t = 0.0;
  std::vector<double> rho;
  std::vector<double> s;      // NaN off-mask
  std::vector<double> ds_dy;  // NaN off-mask
  std::vector<double> j_y;
  std::vector<double> v_y;    // (hbar/m) dS/dy, NaN off-mask
  std::vector<std::uint8_t> mask;
  double eps_rho_abs = 0.0;
  double identity_deviation = 0.0;  // measured max-relative deviation
  int skipped_fragments = 0;
};

FieldSnapshot snapshot(const ModePair& modes, double t,
                       const SnapshotOptions& opts = {});

struct WellPopulations {
  double t = 0.0;
  double p_plus = 0.0;   // mass at y > 0
  double p_minus = 0.0;  // mass at y < 0
};

/// Trapezoid split of a normalized density at y = 0 (the origin's weight is
/// shared evenly between the two sides).
WellPopulations well_populations(const std::vector<double>& rho, const Grid1D& grid,
                                 double t = 0.0);

/// Max over the masked interior of |(rho(t+dt)-rho(t-dt))/(2dt) + d_y j(t)|,
/// normalized by max(rho) * omega_s.  Second order in both h and dt.
double continuity_residual(const ModePair& modes, double t, double dt,
                           double eps_rho_rel = 1e-12);

struct TwoLevelPoint {
  double p_up = 0.0;    // cos^2(J0 t)
  double p_down = 0.0;  // sin^2(J0 t)
};

/// Binary-degree-of-freedom baseline: carries no y-phase information by
/// construction.
TwoLevelPoint two_level_oracle(double j0, double t);

}  // namespace dwell
