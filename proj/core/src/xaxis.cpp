#include "dwell/xaxis.hpp"

#include <cmath>
#include <cstdio>

namespace dwell {

double LongitudinalConfig::k0() const {
  if (!(beam_energy > 0.0))
    throw ConfigError("longitudinal: beam energy must be positive for k0");
  return std::sqrt(2.0 * mass * beam_energy);
}

void LongitudinalConfig::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw ConfigError("longitudinal: mass must be positive and finite");
  if (!std::isfinite(beam_energy) || !std::isfinite(step_height))
    throw ConfigError("longitudinal: E and V0 must be finite");
}

std::complex<double> k2(const LongitudinalConfig& cfg) {
  cfg.validate();
  const double d = cfg.detuning();
  if (d > 0.0) return {std::sqrt(2.0 * cfg.mass * d), 0.0};
  if (d < 0.0) return {0.0, std::sqrt(-2.0 * cfg.mass * d)};
  return {0.0, 0.0};
}

double x_to_t(double x, const LongitudinalConfig& cfg) {
  cfg.validate();
  if (!(cfg.detuning() > 0.0))
    throw RegimeError(
        "x_to_t: the kinematic map t = x/v_x is defined only in the "
        "propagating regime E > V0");
  const double re_k2 = k2(cfg).real();
  return x * cfg.mass / re_k2;
}

std::vector<RhoAPoint> rho_a_profile(const std::vector<double>& xs,
                                     const LongitudinalConfig& cfg,
                                     const ModePair& modes) {
  std::vector<RhoAPoint> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const double t = x_to_t(x, cfg);
    const auto rho = density(evolve(modes, t));
    out.push_back({x, well_populations(rho, modes.grid, t).p_minus});
  }
  return out;
}

DampedProfiles damped_profiles(const std::vector<double>& xs,
                               const LongitudinalConfig& cfg, const ModePair& modes,
                               double detuning_rel_tol) {
  cfg.validate();
  modes.require_resolved();
  if (!(cfg.detuning() < 0.0))
    throw RegimeError(
        "damped_profiles: evanescent regime requires E < V0 (at E = V0, "
        "k2 = 0 and the profiles are undefined)");
  const double j0 = modes.j0();
  const double want = -j0;  // Delta = -hbar J0, hbar = 1 internally
  if (std::abs(cfg.detuning() - want) > detuning_rel_tol * j0) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "damped_profiles: detuning %.9e is not the special point "
                  "-hbar*J0 = %.9e (rel tol %.1e)",
                  cfg.detuning(), want, detuning_rel_tol);
    throw RegimeError(buf);
  }

  DampedProfiles out;
  out.k2_abs = k2(cfg).imag();
  out.v_x_abs = out.k2_abs / cfg.mass;
  out.consistency_ratio = (j0 * cfg.mass / out.k2_abs) / (out.k2_abs / 4.0);
  out.points.reserve(xs.size());
  for (double x : xs) {
    const double damp = std::exp(-2.0 * out.k2_abs * x);
    const double ph = out.k2_abs * x / 4.0;
    const double c = std::cos(ph), s = std::sin(ph);
    out.points.push_back({x, damp * c * c, damp * s * s});
  }
  return out;
}

}  // namespace dwell
