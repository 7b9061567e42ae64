#include "dwell/bohmian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace dwell {
namespace {

std::vector<double> central_derivative(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  std::vector<double> d(n);
  for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

}  // namespace

VelocityField::VelocityField(const ModePair& modes, double eps_rho_rel) {
  modes.require_resolved();
  const Grid1D& g = modes.grid;
  const int n = g.size();
  const double h = g.h();
  std::vector<double> u(n), w(n);
  double peak = 0.0;
  for (int i = 0; i < n; ++i) {
    u[i] = (modes.chi_e[i] + modes.chi_o[i]) / std::numbers::sqrt2;
    w[i] = (modes.chi_e[i] - modes.chi_o[i]) / std::numbers::sqrt2;
    peak = std::max(peak, std::max(u[i] * u[i], w[i] * w[i]));
  }
  const auto du = central_derivative(u, h);
  const auto dw = central_derivative(w, h);
  u_ = UniformCubicSpline(g.y_min(), h, u);
  w_ = UniformCubicSpline(g.y_min(), h, w);
  du_ = UniformCubicSpline(g.y_min(), h, du);
  dw_ = UniformCubicSpline(g.y_min(), h, dw);
  mass_ = modes.mass;
  omega_s_ = modes.omega_s();
  floor_scale_ = eps_rho_rel * peak;
}

VelocityField::Eval VelocityField::eval(double y, double t) const {
  const double half = 0.5 * omega_s_ * t;
  const double c = std::cos(half), s = std::sin(half);
  const double uu = u_(y), ww = w_(y);
  const double rho = c * c * uu * uu + s * s * ww * ww;
  // floor_scale_ bounds eps_rel * max_y rho(.,t) from above for every t
  if (!(rho > floor_scale_)) return {0.0, true};
  const double v = c * s * (uu * dw_(y) - ww * du_(y)) / (mass_ * rho);
  return {v, false};
}

std::vector<double> sample_initial_positions(const ModePair& modes, int n_traj,
                                             std::uint64_t seed) {
  if (n_traj < 1) throw ConfigError("sample_initial_positions: n_traj must be >= 1");
  const Grid1D& g = modes.grid;
  const int n = g.size();
  const double h = g.h();
  const auto rho = density(initial_state(modes));

  // cell masses and cumulative CDF (piecewise-linear density)
  std::vector<double> cdf(n, 0.0);
  for (int i = 1; i < n; ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (rho[i - 1] + rho[i]) * h;
  const double total = cdf[n - 1];

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> ys(n_traj);
  for (int k = 0; k < n_traj; ++k) {
    const double q = (static_cast<double>(k) + unif(rng)) /
                     static_cast<double>(n_traj) * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), q);
    int i = static_cast<int>(it - cdf.begin()) - 1;
    i = std::clamp(i, 0, n - 2);
    // invert F(s) = F_i + rho_i s + (rho_{i+1}-rho_i) s^2 / (2h) on s in [0,h]
    const double target = q - cdf[i];
    const double slope = (rho[i + 1] - rho[i]) / h;
    double s;
    if (std::abs(slope) * h < 1e-14 * std::max(rho[i], 1e-300)) {
      s = rho[i] > 0.0 ? target / rho[i] : 0.0;
    } else {
      const double disc = std::max(rho[i] * rho[i] + 2.0 * slope * target, 0.0);
      s = (std::sqrt(disc) - rho[i]) / slope;
    }
    ys[k] = g.y(i) + std::clamp(s, 0.0, h);
  }
  return ys;  // stratified quantiles are already sorted
}

TrajectoryEnsemble integrate_trajectories(
    const std::function<double(double, double)>& v, std::vector<double> y0,
    double t_final, double dt, int store_every, std::uint64_t seed, double y_lo,
    double y_hi) {
  if (!(dt > 0.0) || !(t_final > 0.0))
    throw ConfigError("integrate_trajectories: dt and t_final must be positive");
  if (store_every < 1) store_every = 1;
  const int n_steps = static_cast<int>(std::llround(t_final / dt));
  if (n_steps < 1) throw ConfigError("integrate_trajectories: t_final < dt");

  TrajectoryEnsemble ens;
  ens.seed = seed;
  ens.dt = dt;
  ens.n_traj = static_cast<int>(y0.size());
  ens.exited.assign(y0.size(), 0);

  auto clamped = [&](double y, bool& hit) {
    if (y < y_lo) {
      hit = true;
      return y_lo;
    }
    if (y > y_hi) {
      hit = true;
      return y_hi;
    }
    return y;
  };

  ens.times.push_back(0.0);
  ens.positions.push_back(y0);
  std::vector<double> y = std::move(y0);
  for (int step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    for (size_t k = 0; k < y.size(); ++k) {
      bool hit = false;
      const double k1 = v(clamped(y[k], hit), t);
      const double k2 = v(clamped(y[k] + 0.5 * dt * k1, hit), t + 0.5 * dt);
      const double k3 = v(clamped(y[k] + 0.5 * dt * k2, hit), t + 0.5 * dt);
      const double k4 = v(clamped(y[k] + dt * k3, hit), t + dt);
      double ynew = y[k] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ynew = clamped(ynew, hit);
      if (hit) ens.exited[k] = 1;
      y[k] = ynew;
    }
    if ((step + 1) % store_every == 0 || step + 1 == n_steps) {
      ens.times.push_back(static_cast<double>(step + 1) * dt);
      ens.positions.push_back(y);
    }
  }
  for (auto f : ens.exited) ens.exit_clamped_count += f;
  return ens;
}

TrajectoryEnsemble run_trajectories(const ModePair& modes, int n_traj, double t_final,
                                    double dt, int store_every, std::uint64_t seed) {
  const VelocityField field(modes);
  auto y0 = sample_initial_positions(modes, n_traj, seed);
  return integrate_trajectories(
      [&field](double y, double t) { return field(y, t); }, std::move(y0), t_final,
      dt, store_every, seed, field.y_min(), field.y_max());
}

double equivariance_distance(const TrajectoryEnsemble& ens, const ModePair& modes,
                             double t) {
  int idx = -1;
  for (size_t i = 0; i < ens.times.size(); ++i)
    if (std::abs(ens.times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) {
      idx = static_cast<int>(i);
      break;
    }
  if (idx < 0)
    throw ConfigError("equivariance_distance: t is not a stored sample time");

  const Grid1D& g = modes.grid;
  const int n = g.size();
  const double h = g.h();
  const auto rho = density(evolve(modes, t));

  // exact cell masses, normalized
  std::vector<double> p(n - 1);
  double total = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    p[i] = 0.5 * (rho[i] + rho[i + 1]) * h;
    total += p[i];
  }
  for (auto& x : p) x /= total;

  std::vector<double> hist(n - 1, 0.0);
  const auto& pos = ens.positions[idx];
  for (double y : pos) {
    int i = static_cast<int>((y - g.y_min()) / h);
    i = std::clamp(i, 0, n - 2);
    hist[i] += 1.0;
  }
  double l1 = 0.0;
  for (int i = 0; i < n - 1; ++i)
    l1 += std::abs(hist[i] / static_cast<double>(pos.size()) - p[i]);
  return l1;
}

bool non_crossing(const TrajectoryEnsemble& ens) {
  for (const auto& pos : ens.positions)
    if (!std::is_sorted(pos.begin(), pos.end())) return false;
  return true;
}

SpeedStatistics speed_statistics(const ModePair& modes, double y_lo, double y_hi,
                                 double t0, double t1, int n_t_samples,
                                 const SnapshotOptions& opts) {
  if (!(y_hi > y_lo)) throw ConfigError("speed_statistics: empty y window");
  if (!(t1 > t0) || n_t_samples < 2)
    throw ConfigError("speed_statistics: need t1 > t0 and >= 2 time samples");
  const Grid1D& g = modes.grid;

  SpeedStatistics st;
  double sum_u = 0.0, sum_rv = 0.0, sum_r = 0.0;
  for (int kt = 0; kt < n_t_samples; ++kt) {
    const double t = t0 + (t1 - t0) * static_cast<double>(kt) /
                              static_cast<double>(n_t_samples - 1);
    const auto snap = snapshot(modes, t, opts);
    for (int i = 0; i < g.size(); ++i) {
      const double y = g.y(i);
      if (y < y_lo || y > y_hi || !snap.mask[i] || std::isnan(snap.v_y[i])) continue;
      const double av = std::abs(snap.v_y[i]);
      sum_u += av;
      sum_rv += snap.rho[i] * av;
      sum_r += snap.rho[i];
      st.peak_abs_v = std::max(st.peak_abs_v, av);
      ++st.samples;
    }
  }
  if (st.samples == 0)
    throw InvariantError("speed_statistics: empty mask in the requested window");
  st.mean_abs_v_uniform = sum_u / static_cast<double>(st.samples) * 1e6;
  st.mean_abs_v_rho_weighted = sum_rv / sum_r * 1e6;
  st.peak_abs_v *= 1e6;
  return st;
}

}  // namespace dwell
