#include "dwell/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace dwell {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Combinations {
  std::vector<double> u, w;  // (chi_e +/- chi_o)/sqrt(2)
};

Combinations combinations(const ModePair& m) {
  const int n = m.grid.size();
  Combinations c;
  c.u.resize(n);
  c.w.resize(n);
  for (int i = 0; i < n; ++i) {
    c.u[i] = (m.chi_e[i] + m.chi_o[i]) / std::numbers::sqrt2;
    c.w[i] = (m.chi_e[i] - m.chi_o[i]) / std::numbers::sqrt2;
  }
  return c;
}

std::vector<double> central_derivative(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  std::vector<double> d(n);
  for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

// nearest-period wrap, result in [-pi, pi]
double wrap_angle(double d) {
  return std::remainder(d, 2.0 * std::numbers::pi);
}

}  // namespace

std::vector<std::complex<double>> evolve(const ModePair& modes, double t) {
  modes.require_resolved();
  if (!std::isfinite(t)) throw ConfigError("evolve: t must be finite");
  const auto c = combinations(modes);
  const double half = 0.5 * modes.omega_s() * t;
  const double cs = std::cos(half), sn = std::sin(half);
  const int n = modes.grid.size();
  std::vector<std::complex<double>> chi(n);
  for (int i = 0; i < n; ++i) chi[i] = {cs * c.u[i], sn * c.w[i]};
  return chi;
}

std::vector<std::complex<double>> initial_state(const ModePair& modes) {
  return evolve(modes, 0.0);
}

std::vector<double> density(const std::vector<std::complex<double>>& chi) {
  std::vector<double> rho(chi.size());
  for (size_t i = 0; i < chi.size(); ++i) rho[i] = std::norm(chi[i]);
  return rho;
}

std::vector<std::uint8_t> density_mask(const std::vector<double>& rho,
                                       double eps_rho_rel) {
  double mx = 0.0;
  for (double r : rho) mx = std::max(mx, r);
  const double floor = eps_rho_rel * mx;
  std::vector<std::uint8_t> mask(rho.size());
  for (size_t i = 0; i < rho.size(); ++i) mask[i] = rho[i] > floor ? 1 : 0;
  return mask;
}

PhaseResult phase(const std::vector<std::complex<double>>& chi,
                  const std::vector<std::uint8_t>& mask) {
  const int n = static_cast<int>(chi.size());
  PhaseResult out;
  out.s.assign(n, kNaN);
  // fold into the principal arctan branch [-pi/2, pi/2)
  auto principal = [](double a) {
    return a - std::numbers::pi *
                   std::floor((a + std::numbers::pi / 2) / std::numbers::pi);
  };
  // A step of nearly +-pi between adjacent masked points is an unresolved
  // sign change (a real node passing between grid points): +pi and -pi are
  // indistinguishable there, so the component is split rather than bridged.
  constexpr double kUnresolvedJump = std::numbers::pi - 0.2;

  auto emit_component = [&](int b, int e) {
    ++out.components;
    out.spans.emplace_back(b, e);
    double prev_raw = std::arg(chi[b]);
    double s = prev_raw;
    out.s[b] = s;
    int anchor = b;
    double anchor_realness = std::abs(chi[b].real()) / std::abs(chi[b]);
    for (int k = b + 1; k < e; ++k) {
      const double raw = std::arg(chi[k]);
      s += wrap_angle(raw - prev_raw);
      prev_raw = raw;
      out.s[k] = s;
      // the branch is unambiguous where the state is most nearly real; in the
      // far tails the symmetric combination changes sign and the principal
      // fold of the first point can sit a whole branch off
      const double realness = std::abs(chi[k].real()) / std::abs(chi[k]);
      if (realness > anchor_realness) {
        anchor_realness = realness;
        anchor = k;
      }
    }
    const double shift =
        std::numbers::pi *
        std::round((out.s[anchor] - principal(std::arg(chi[anchor]))) / std::numbers::pi);
    for (int k = b; k < e; ++k) out.s[k] -= shift;
  };

  int i = 0;
  while (i < n) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    int b = i;
    while (i < n && mask[i]) ++i;
    const int e = i;  // masked run [b, e)
    int sub = b;
    for (int k = b + 1; k < e; ++k) {
      if (std::abs(wrap_angle(std::arg(chi[k]) - std::arg(chi[k - 1]))) >
          kUnresolvedJump) {
        emit_component(sub, k);
        sub = k;
      }
    }
    emit_component(sub, e);
  }
  if (out.components == 0)
    throw InvariantError("phase: all points below the density floor");
  return out;
}

PhaseGradientResult phase_gradient(const PhaseResult& ph,
                                   const std::vector<std::uint8_t>& mask,
                                   const Grid1D& grid) {
  (void)mask;  // component structure lives in ph.spans
  const int n = grid.size();
  const double h = grid.h();
  PhaseGradientResult out;
  out.ds_dy.assign(n, kNaN);
  const auto& s = ph.s;
  for (const auto& [b, e] : ph.spans) {
    if (e - b < 3) {
      ++out.skipped_fragments;
      continue;
    }
    for (int k = b + 1; k < e - 1; ++k)
      out.ds_dy[k] = (s[k + 1] - s[k - 1]) / (2.0 * h);
    out.ds_dy[b] = (-3.0 * s[b] + 4.0 * s[b + 1] - s[b + 2]) / (2.0 * h);
    out.ds_dy[e - 1] = (3.0 * s[e - 1] - 4.0 * s[e - 2] + s[e - 3]) / (2.0 * h);
  }
  return out;
}

std::vector<double> phase_gradient_analytic(const ModePair& modes, double t) {
  modes.require_resolved();
  const auto c = combinations(modes);
  const double h = modes.grid.h();
  const auto du = central_derivative(c.u, h);
  const auto dw = central_derivative(c.w, h);
  const double half = 0.5 * modes.omega_s() * t;
  const double cs = std::cos(half), sn = std::sin(half);
  const int n = modes.grid.size();
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const double rho = cs * cs * c.u[i] * c.u[i] + sn * sn * c.w[i] * c.w[i];
    g[i] = rho > 0.0
               ? cs * sn * (c.u[i] * dw[i] - c.w[i] * du[i]) / rho
               : 0.0;
  }
  return g;
}

std::vector<double> current(const std::vector<std::complex<double>>& chi, double mass,
                            const Grid1D& grid) {
  const int n = grid.size();
  const double h = grid.h();
  std::vector<double> j(n);
  for (int i = 1; i < n - 1; ++i)
    j[i] = std::imag(std::conj(chi[i]) * (chi[i + 1] - chi[i - 1])) / (2.0 * h * mass);
  j[0] = std::imag(std::conj(chi[0]) * (-3.0 * chi[0] + 4.0 * chi[1] - chi[2])) /
         (2.0 * h * mass);
  j[n - 1] = std::imag(std::conj(chi[n - 1]) *
                       (3.0 * chi[n - 1] - 4.0 * chi[n - 2] + chi[n - 3])) /
             (2.0 * h * mass);
  return j;
}

FieldSnapshot snapshot(const ModePair& modes, double t, const SnapshotOptions& opts) {
  const Grid1D& grid = modes.grid;
  const int n = grid.size();

  FieldSnapshot snap;
  snap.t = t;
  const auto chi = evolve(modes, t);
  snap.rho = density(chi);

  const double norm = grid.integrate(snap.rho);
  if (std::abs(norm - 1.0) > 1e-8) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "snapshot: norm drifted to %.12g at t=%.6g", norm, t);
    throw InvariantError(buf);
  }
  for (double r : snap.rho)
    if (r < 0.0) throw InvariantError("snapshot: negative density");

  double mx = 0.0;
  for (double r : snap.rho) mx = std::max(mx, r);
  snap.eps_rho_abs = opts.eps_rho_rel * mx;
  snap.mask = density_mask(snap.rho, opts.eps_rho_rel);

  const auto ph = phase(chi, snap.mask);
  const auto grad = phase_gradient(ph, snap.mask, grid);
  snap.s = ph.s;
  snap.ds_dy = grad.ds_dy;
  snap.skipped_fragments = grad.skipped_fragments;
  snap.j_y = current(chi, modes.mass, grid);

  snap.v_y.assign(n, kNaN);
  for (int i = 0; i < n; ++i)
    if (snap.mask[i] && !std::isnan(snap.ds_dy[i]))
      snap.v_y[i] = snap.ds_dy[i] / modes.mass;

  // The identity dS/dy = m j / (hbar rho), two independent routes.  Compared
  // on component interiors: at component edges the phase route drops to a
  // one-sided stencil, and the two cells flanking an unresolved sign flip
  // carry sub-grid phase structure neither route can represent.
  double max_grad = 0.0, max_dev = 0.0;
  for (const auto& [b, e] : ph.spans) {
    for (int i = b + 2; i < e - 2; ++i) {
      if (std::isnan(snap.ds_dy[i])) continue;
      max_grad = std::max(max_grad, std::abs(snap.ds_dy[i]));
      const double other = modes.mass * snap.j_y[i] / snap.rho[i];
      max_dev = std::max(max_dev, std::abs(snap.ds_dy[i] - other));
    }
  }
  // At the beat nodes (sin(w_s t) -> 0) the whole phase field collapses to a
  // constant and both routes return quantization-level numbers (ulp(pi)/h
  // from the differenced phase, eps/(h * rho_rel) from the current route);
  // a relative comparison of those is meaningless, so a violation requires
  // the absolute mismatch to clear that floor too.
  const double noise_floor = 1e-11 / grid.h();
  snap.identity_deviation = max_grad > 0.0 ? max_dev / max_grad : 0.0;
  if (max_dev > noise_floor && snap.identity_deviation > opts.tol_identity) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "snapshot: phase-gradient identity violated at t=%.6g "
                  "(deviation %.3e > tol %.3e)",
                  t, snap.identity_deviation, opts.tol_identity);
    throw InvariantError(buf);
  }
  return snap;
}

WellPopulations well_populations(const std::vector<double>& rho, const Grid1D& grid,
                                 double t) {
  const int mid = grid.mid();
  const double h = grid.h();
  double minus = 0.0, plus = 0.0;
  for (int i = 0; i <= mid; ++i) minus += rho[i];
  minus -= 0.5 * (rho[0] + rho[mid]);
  for (int i = mid; i < grid.size(); ++i) plus += rho[i];
  plus -= 0.5 * (rho[mid] + rho[grid.size() - 1]);
  return {t, plus * h, minus * h};
}

double continuity_residual(const ModePair& modes, double t, double dt,
                           double eps_rho_rel) {
  modes.require_resolved();
  if (!(dt > 0.0) || dt > 0.05 * modes.period())
    throw ConfigError("continuity_residual: need 0 < dt << period");
  const Grid1D& grid = modes.grid;
  const double h = grid.h();
  const int n = grid.size();

  const auto rho_m = density(evolve(modes, t - dt));
  const auto rho_p = density(evolve(modes, t + dt));
  const auto chi = evolve(modes, t);
  const auto rho = density(chi);
  const auto j = current(chi, modes.mass, grid);
  const auto mask = density_mask(rho, eps_rho_rel);

  double mx = 0.0;
  for (double r : rho) mx = std::max(mx, r);

  double worst = 0.0;
  for (int i = 1; i < n - 1; ++i) {
    if (!mask[i] || !mask[i - 1] || !mask[i + 1]) continue;
    const double drho_dt = (rho_p[i] - rho_m[i]) / (2.0 * dt);
    const double dj_dy = (j[i + 1] - j[i - 1]) / (2.0 * h);
    worst = std::max(worst, std::abs(drho_dt + dj_dy));
  }
  return worst / (mx * modes.omega_s());
}

TwoLevelPoint two_level_oracle(double j0, double t) {
  const double s = std::sin(j0 * t);
  const double c = std::cos(j0 * t);
  return {c * c, s * s};
}

}  // namespace dwell
