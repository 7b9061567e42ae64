#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dwell/dynamics.hpp"
#include "dwell/spline.hpp"

namespace dwell {

/// Guidance field v(y,t) = (hbar/m) dS/dy from the analytic derivative of the
/// arctan closed form: v = sin(w_s t)/2 * (u w' - w u') / (m rho), with u, w
/// and their grid derivatives interpolated by cubic splines in y (the time
/// dependence is exact).  Below the density floor the velocity is defined as
/// 0 and flagged; trajectories carry no measure there.
class VelocityField {
 public:
  explicit VelocityField(const ModePair& modes, double eps_rho_rel = 1e-12);

  struct Eval {
    double v = 0.0;
    bool below_floor = false;
  };

  /// Throws OutOfDomainError outside the grid extent.
  Eval eval(double y, double t) const;
  double operator()(double y, double t) const { return eval(y, t).v; }

  double y_min() const { return u_.x_min(); }
  double y_max() const { return u_.x_max(); }
  double omega_s() const { return omega_s_; }

 private:
  UniformCubicSpline u_, w_, du_, dw_;
  double mass_ = 0.0;
  double omega_s_ = 0.0;
  double floor_scale_ = 0.0;  // eps_rho_rel * max(u^2 and w^2 scale)
};

struct TrajectoryEnsemble {
  std::uint64_t seed = 0;
  double dt = 0.0;
  int n_traj = 0;
  std::vector<double> times;                   // stored sample times
  std::vector<std::vector<double>> positions;  // [time][trajectory]
  std::vector<std::uint8_t> exited;            // per-trajectory clamp flag
  int exit_clamped_count = 0;
};

/// Stratified inverse-CDF sample of the initial density rho(.,0) on the grid
/// (piecewise-linear density per cell, exact quadratic inversion).
/// Deterministic given the seed; positions come out sorted.
std::vector<double> sample_initial_positions(const ModePair& modes, int n_traj,
                                             std::uint64_t seed);

/// Classic fixed-step RK4 on dy/dt = v(y,t).  Stage positions that leave the
/// grid are clamped to the boundary and the trajectory is flagged.  Positions
/// are stored every store_every steps (and at the final time).
TrajectoryEnsemble integrate_trajectories(
    const std::function<double(double, double)>& v, std::vector<double> y0,
    double t_final, double dt, int store_every, std::uint64_t seed,
    double y_lo, double y_hi);

/// Convenience: sample from rho(.,0) and integrate the mode pair's own field.
TrajectoryEnsemble run_trajectories(const ModePair& modes, int n_traj,
                                    double t_final, double dt, int store_every,
                                    std::uint64_t seed);

/// L1 distance between the binned trajectory histogram (bin width = grid h)
/// and the exact rho(.,t) binned the same way.  t must be one of the stored
/// sample times.
double equivariance_distance(const TrajectoryEnsemble& ens, const ModePair& modes,
                             double t);

/// Order preservation of the (initially sorted) ensemble at every stored time.
bool non_crossing(const TrajectoryEnsemble& ens);

struct SpeedStatistics {
  double mean_abs_v_uniform = 0.0;       // m/s
  double mean_abs_v_rho_weighted = 0.0;  // m/s
  double peak_abs_v = 0.0;               // m/s
  int samples = 0;
};

/// Three candidate averages of |v| = (hbar/m)|dS/dy| over a (y,t) window,
/// restricted to the density mask: uniform over samples, rho-weighted, and
/// the peak.  The averaging measure behind the published number is not
/// determined, so all three are reported.
SpeedStatistics speed_statistics(const ModePair& modes, double y_lo, double y_hi,
                                 double t0, double t1, int n_t_samples,
                                 const SnapshotOptions& opts = {});

}  // namespace dwell
