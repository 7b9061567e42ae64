#pragma once

#include <cstdint>
#include <string>

#include "dwell/calibrate.hpp"
#include "dwell/grid.hpp"
#include "dwell/potential.hpp"
#include "dwell/xaxis.hpp"

namespace dwell {

/// Flat key = value run configuration with dotted section prefixes and
/// unit-suffixed keys (_um, _ps, _J, _kg, _rad_per_s).  Physical entries
/// without a recognized unit-suffixed key are rejected, as are unknown keys.
/// Values are stored in the file's units and converted to internal units by
/// the accessors.
struct RunConfig {
  // grid
  int grid_n_points = 0;
  double grid_y_min_um = 0.0;
  double grid_y_max_um = 0.0;
  // potential
  double mass_kg = 0.0;
  double well_separation_um = 0.0;
  double well_frequency_rad_per_s = 0.0;
  double step_height_j = 0.0;
  double beam_energy_j = 0.0;
  // calibrate
  bool has_calibration_target = false;
  double target_period_ps = 0.0;
  std::string free_parameter = "well_frequency";  // or "mass"
  double bracket_lo = 0.0;  // unit of the free parameter (kg or rad/s)
  double bracket_hi = 0.0;
  // numerics
  double eps_rho_rel = 1e-12;
  double tol_identity = 1e-4;
  double dt_ps = 0.0;
  int n_traj = 10000;
  std::uint64_t seed = 1;
  int t_samples = 50;
  int population_samples = 801;
  int trajectory_store_every = 25;
  double continuity_dt_ps = 0.1;
  double continuity_tol = 1e-4;
  // xprofile
  int xprofile_n_samples = 241;
  double xprofile_max_phase = 0.25;     // omega_s x / v_x upper end (oscillating)
  double xprofile_decay_lengths = 5.0;  // x_max = N / (2|k2|) (evanescent)
  double xprofile_detuning_tol_rel = 1e-6;
  // output
  std::string output_directory = "out";
  std::string output_format = "csv";

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  /// Canonical serialization (fixed key order); parse(serialize()) is the
  /// identity.
  std::string serialize() const;

  // internal-unit views
  Grid1D grid() const;
  PotentialSpec potential() const;
  LongitudinalConfig longitudinal() const;
  CalibrationOptions calibration_options() const;
  FreeParameter calibration_parameter() const;

  void validate() const;
};

}  // namespace dwell
