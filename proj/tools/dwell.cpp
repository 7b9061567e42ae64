// dwell -- double-well waveguide beat simulator.
//
// Subcommands: eigs, calibrate, phasemap, populations, xprofile,
// trajectories, check.  Exit codes: 0 success, 2 config error, 3 numeric
// error, 4 invariant failure.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dwell/bohmian.hpp"
#include "dwell/calibrate.hpp"
#include "dwell/config.hpp"
#include "dwell/csv.hpp"
#include "dwell/dynamics.hpp"
#include "dwell/units.hpp"
#include "dwell/version.hpp"
#include "dwell/xaxis.hpp"

namespace fs = std::filesystem;
using namespace dwell;

namespace {

// One directory per run, guarded against concurrent writers by a lockfile.
class OutputDir {
 public:
  OutputDir(const fs::path& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw ConfigError("output: cannot create directory " + dir_.string());
    lock_ = dir_ / ".lock";
    std::FILE* f = std::fopen(lock_.c_str(), "wx");
    if (!f)
      throw ConfigError("output: directory " + dir_.string() +
                        " is locked by another run (remove " + lock_.string() +
                        " if that run is gone)");
    std::fclose(f);
  }
  ~OutputDir() {
    std::error_code ec;
    fs::remove(lock_, ec);
  }
  fs::path file(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
  fs::path lock_;
};

struct RunContext {
  RunConfig cfg;
  std::optional<OutputDir> out;
  std::string command;
  std::string config_hash;  // of the loaded config, before CLI overrides

  void write_metadata() const {
    KeyValueReport meta(out->file("run_metadata").string());
    meta.set("command", command);
    meta.set("code_version", std::string(kVersion));
    meta.set("config_hash", config_hash);
    meta.set("seed", static_cast<std::uint64_t>(cfg.seed));
    meta.set("mass_unit_kg", units::mass_unit_kg);
    meta.set("energy_unit_J", units::energy_unit_j);
    meta.set("length_unit_m", 1e-6);
    meta.set("time_unit_s", 1e-12);
  }
};

ModePair modes_from_config(const RunConfig& cfg) {
  return solve_modes(cfg.grid(), cfg.potential());
}

void print_warnings(const TridiagonalOperator& H) {
  for (const auto& w : H.warnings) std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------
// eigs

int cmd_eigs(RunContext& ctx, int levels) {
  const auto grid = ctx.cfg.grid();
  const auto pot = ctx.cfg.potential();
  const auto H = build_hamiltonian(grid, pot);
  print_warnings(H);
  const auto pairs = solve_lowest(H, levels);
  const auto modes = make_mode_pair(grid, pot, pairs);

  CsvWriter csv(ctx.out->file("modes.csv").string());
  csv.metadata("E_e_J", units::energy_to_j(modes.e_even));
  csv.metadata("E_o_J", units::energy_to_j(modes.e_odd));
  csv.metadata("E_bar_J", units::energy_to_j(modes.e_bar()));
  csv.metadata("omega_s_rad_per_s", units::omega_to_rad_per_s(modes.omega_s()));
  csv.metadata("J0_rad_per_s", units::omega_to_rad_per_s(modes.j0()));
  if (!modes.degenerate()) csv.metadata("period_ps", modes.period());
  std::vector<std::string> cols{"y", "chi_e", "chi_o"};
  for (int k = 2; k < levels; ++k) cols.push_back("chi_" + std::to_string(k));
  csv.header(cols);
  for (int i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid.y(i), modes.chi_e[i], modes.chi_o[i]};
    for (int k = 2; k < levels; ++k) row.push_back(pairs[k].chi[i]);
    csv.row_numeric(row);
  }

  CsvWriter en(ctx.out->file("energies.csv").string());
  en.header({"n", "E_J"});
  for (int k = 0; k < levels; ++k)
    en.row_numeric({static_cast<double>(k), units::energy_to_j(pairs[k].energy)});

  ctx.write_metadata();
  std::cout << "eigs: omega_s = " << format_double(units::omega_to_rad_per_s(modes.omega_s()))
            << " rad/s";
  if (!modes.degenerate())
    std::cout << " (period " << format_double(modes.period()) << " ps)";
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// calibrate

int cmd_calibrate(RunContext& ctx) {
  if (!ctx.cfg.has_calibration_target)
    throw ConfigError("calibrate: config has no calibrate.target_period_ps");
  const auto grid = ctx.cfg.grid();
  const auto result = calibrate(ctx.cfg.target_period_ps, ctx.cfg.calibration_parameter(),
                                ctx.cfg.potential(), grid, ctx.cfg.calibration_options());

  RunConfig updated = ctx.cfg;
  if (ctx.cfg.calibration_parameter() == FreeParameter::well_frequency)
    updated.well_frequency_rad_per_s =
        units::omega_to_rad_per_s(result.pot.well_frequency);
  else
    updated.mass_kg = units::mass_to_kg(result.pot.mass);

  std::ofstream cal(ctx.out->file("calibrated.cfg"));
  cal << updated.serialize();

  KeyValueReport rep(ctx.out->file("calibrate_report").string());
  rep.set("target_period_ps", ctx.cfg.target_period_ps);
  rep.set("achieved_period_ps", result.achieved_period);
  rep.set("relative_miss", std::abs(result.achieved_period - ctx.cfg.target_period_ps) /
                               ctx.cfg.target_period_ps);
  rep.set("free_parameter", ctx.cfg.free_parameter);
  rep.set("calibrated_value",
          ctx.cfg.calibration_parameter() == FreeParameter::well_frequency
              ? units::omega_to_rad_per_s(result.pot.well_frequency)
              : units::mass_to_kg(result.pot.mass));
  rep.set("eigensolver_evaluations", static_cast<std::uint64_t>(result.evaluations));

  ctx.write_metadata();
  std::cout << "calibrate: achieved period " << format_double(result.achieved_period)
            << " ps after " << result.evaluations << " solves\n";
  return 0;
}

// ---------------------------------------------------------------------------
// phasemap

void write_speed_report(const RunContext& ctx, const ModePair& modes,
                        const SnapshotOptions& opts) {
  KeyValueReport rep(ctx.out->file("speed_stats").string());
  const double T = modes.period();
  const auto full = speed_statistics(modes, modes.grid.y_min(), modes.grid.y_max(),
                                     0.0, T, 65, opts);
  rep.set("window", std::string("full_grid"));
  rep.set("mean_abs_v_uniform_m_per_s", full.mean_abs_v_uniform);
  rep.set("mean_abs_v_rho_weighted_m_per_s", full.mean_abs_v_rho_weighted);
  rep.set("peak_abs_v_m_per_s", full.peak_abs_v);
  // informational second window over the channel region
  const auto win = speed_statistics(modes, -5.0, 5.0, 0.0, T, 65, opts);
  rep.set("channel_window_um", 5.0);
  rep.set("channel_mean_abs_v_uniform_m_per_s", win.mean_abs_v_uniform);
  rep.set("channel_mean_abs_v_rho_weighted_m_per_s", win.mean_abs_v_rho_weighted);
  rep.set("channel_peak_abs_v_m_per_s", win.peak_abs_v);
}

void write_snapshot_csv(const RunContext& ctx, const ModePair& modes,
                        const FieldSnapshot& snap, const std::string& name) {
  CsvWriter csv(ctx.out->file(name).string());
  csv.metadata("t_ps", snap.t);
  csv.metadata("omega_s_rad_per_s", units::omega_to_rad_per_s(modes.omega_s()));
  csv.metadata("gauge", std::string("rotating_frame_Ebar_removed"));
  csv.metadata("eps_rho_abs_per_um", snap.eps_rho_abs);
  csv.header({"y", "rho", "S", "dS_dy", "j_y", "v_y", "mask"});
  for (int i = 0; i < modes.grid.size(); ++i)
    csv.row_numeric({modes.grid.y(i), snap.rho[i], snap.s[i], snap.ds_dy[i],
                     snap.j_y[i], snap.v_y[i], static_cast<double>(snap.mask[i])});
}

int cmd_phasemap(RunContext& ctx, int t_samples, const std::vector<double>& snapshot_ts) {
  const auto modes = modes_from_config(ctx.cfg);
  const double T = modes.period();
  const SnapshotOptions opts{ctx.cfg.eps_rho_rel, ctx.cfg.tol_identity};

  CsvWriter csv(ctx.out->file("phasemap.csv").string());
  csv.metadata("quantity", std::string("dS_dy_per_um"));
  csv.metadata("gauge", std::string("rotating_frame_Ebar_removed"));
  csv.metadata("omega_s_rad_per_s", units::omega_to_rad_per_s(modes.omega_s()));
  csv.metadata("period_ps", T);
  csv.metadata("t_samples", static_cast<double>(t_samples));
  csv.metadata("eps_rho_rel", ctx.cfg.eps_rho_rel);

  std::vector<FieldSnapshot> snaps;
  snaps.reserve(t_samples);
  std::vector<std::string> cols{"y"};
  for (int k = 0; k < t_samples; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(t_samples - 1);
    snaps.push_back(snapshot(modes, t, opts));
    cols.push_back(format_double(t));
  }
  csv.header(cols);
  for (int i = 0; i < modes.grid.size(); ++i) {
    std::vector<double> row{modes.grid.y(i)};
    for (const auto& s : snaps) row.push_back(s.ds_dy[i]);  // NaN -> empty cell
    csv.row_numeric(row);
  }

  for (size_t k = 0; k < snapshot_ts.size(); ++k)
    write_snapshot_csv(ctx, modes, snapshot(modes, snapshot_ts[k], opts),
                       "snapshot_" + std::to_string(k) + ".csv");

  write_speed_report(ctx, modes, opts);
  ctx.write_metadata();
  std::cout << "phasemap: " << t_samples << " columns over one period written\n";
  return 0;
}

// ---------------------------------------------------------------------------
// populations

int cmd_populations(RunContext& ctx, int samples) {
  const auto modes = modes_from_config(ctx.cfg);
  const double T = modes.period();

  CsvWriter csv(ctx.out->file("populations.csv").string());
  csv.metadata("omega_s_rad_per_s", units::omega_to_rad_per_s(modes.omega_s()));
  csv.metadata("J0_rad_per_s", units::omega_to_rad_per_s(modes.j0()));
  csv.metadata("period_ps", T);
  csv.header({"t", "p_plus", "p_minus", "two_level_p_minus"});
  for (int k = 0; k < samples; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(samples - 1);
    const auto pops = well_populations(density(evolve(modes, t)), modes.grid, t);
    csv.row_numeric({t, pops.p_plus, pops.p_minus, two_level_oracle(modes.j0(), t).p_down});
  }
  ctx.write_metadata();
  std::cout << "populations: " << samples << " samples over one period written\n";
  return 0;
}

// ---------------------------------------------------------------------------
// xprofile

int cmd_xprofile(RunContext& ctx, const std::string& regime) {
  const auto modes = modes_from_config(ctx.cfg);
  const auto lcfg = ctx.cfg.longitudinal();

  if (regime == "oscillating") {
    const auto kk = k2(lcfg);
    if (!(kk.real() > 0.0))
      throw RegimeError("xprofile: oscillating regime requires E > V0 in the config");
    const double vx = kk.real() / lcfg.mass;
    const double x_max = ctx.cfg.xprofile_max_phase * vx / modes.omega_s();
    std::vector<double> xs(ctx.cfg.xprofile_n_samples);
    for (size_t i = 0; i < xs.size(); ++i)
      xs[i] = x_max * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
    const auto prof = rho_a_profile(xs, lcfg, modes);

    CsvWriter csv(ctx.out->file("xprofile_oscillating.csv").string());
    csv.metadata("E_J", units::energy_to_j(lcfg.beam_energy));
    csv.metadata("V0_J", units::energy_to_j(lcfg.step_height));
    csv.metadata("Delta_J", units::energy_to_j(lcfg.detuning()));
    csv.metadata("k2_re_per_um", kk.real());
    csv.metadata("k2_im_per_um", kk.imag());
    csv.metadata("v_x_um_per_ps", vx);
    csv.metadata("J0_rad_per_s", units::omega_to_rad_per_s(modes.j0()));
    csv.header({"x", "rho_a"});
    for (const auto& p : prof) csv.row_numeric({p.x, p.rho_a});
  } else if (regime == "evanescent") {
    const auto kk = k2(lcfg);
    if (lcfg.detuning() == 0.0)
      throw RegimeError("xprofile: E = V0 gives k2 = 0; the evanescent profiles "
                        "are undefined at threshold");
    const auto probe = damped_profiles({0.0}, lcfg, modes, ctx.cfg.xprofile_detuning_tol_rel);
    const double x_max = ctx.cfg.xprofile_decay_lengths / (2.0 * probe.k2_abs);
    std::vector<double> xs(ctx.cfg.xprofile_n_samples);
    for (size_t i = 0; i < xs.size(); ++i)
      xs[i] = x_max * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
    const auto prof = damped_profiles(xs, lcfg, modes, ctx.cfg.xprofile_detuning_tol_rel);

    CsvWriter csv(ctx.out->file("xprofile_evanescent.csv").string());
    csv.metadata("E_J", units::energy_to_j(lcfg.beam_energy));
    csv.metadata("V0_J", units::energy_to_j(lcfg.step_height));
    csv.metadata("Delta_J", units::energy_to_j(lcfg.detuning()));
    csv.metadata("k2_re_per_um", kk.real());
    csv.metadata("k2_im_per_um", kk.imag());
    csv.metadata("v_x_um_per_ps", prof.v_x_abs);
    csv.metadata("J0_rad_per_s", units::omega_to_rad_per_s(modes.j0()));
    // J0/|v_x| over |k2|/4 at Delta = -hbar J0; the kinematic rate is |k2|/2
    csv.metadata("j0_vx_vs_quarter_k2_ratio", prof.consistency_ratio);
    csv.header({"x", "psi_m_sq", "psi_a_sq", "psi_m_sq_normalized", "psi_a_sq_normalized"});
    for (const auto& p : prof.points) {
      const double damp = std::exp(-2.0 * prof.k2_abs * p.x);
      csv.row_numeric({p.x, p.psi_m_sq, p.psi_a_sq, p.psi_m_sq / damp, p.psi_a_sq / damp});
    }
  } else {
    throw ConfigError("xprofile: regime must be 'oscillating' or 'evanescent'");
  }
  ctx.write_metadata();
  std::cout << "xprofile: " << regime << " profile written\n";
  return 0;
}

// ---------------------------------------------------------------------------
// trajectories

int cmd_trajectories(RunContext& ctx) {
  const auto modes = modes_from_config(ctx.cfg);
  const double T = modes.period();
  const double dt = ctx.cfg.dt_ps > 0.0 ? ctx.cfg.dt_ps : T / 2000.0;
  if (dt > T / 1000.0)
    throw ConfigError("trajectories: numerics.dt_ps must be <= period/1000");

  const auto ens = run_trajectories(modes, ctx.cfg.n_traj, T, dt,
                                    ctx.cfg.trajectory_store_every, ctx.cfg.seed);

  CsvWriter csv(ctx.out->file("trajectories.csv").string());
  csv.metadata("seed", static_cast<double>(ctx.cfg.seed));
  csv.metadata("dt_ps", dt);
  csv.metadata("n_traj", static_cast<double>(ctx.cfg.n_traj));
  csv.metadata("exit_clamped_count", static_cast<double>(ens.exit_clamped_count));
  csv.header({"traj_id", "t", "y"});
  for (size_t it = 0; it < ens.times.size(); ++it)
    for (int k = 0; k < ens.n_traj; ++k)
      csv.row_numeric({static_cast<double>(k), ens.times[it], ens.positions[it][k]});

  KeyValueReport rep(ctx.out->file("equivariance_report").string());
  rep.set("n_traj", static_cast<std::uint64_t>(ctx.cfg.n_traj));
  rep.set("dt_ps", dt);
  rep.set("exit_clamped_count", static_cast<std::uint64_t>(ens.exit_clamped_count));
  rep.set("non_crossing", std::string(non_crossing(ens) ? "pass" : "fail"));
  bool ok = true;
  for (double frac : {0.0, 0.25, 0.5, 1.0}) {
    // snap to the nearest stored time
    double target = frac * T;
    double best = ens.times[0];
    for (double tt : ens.times)
      if (std::abs(tt - target) < std::abs(best - target)) best = tt;
    const double l1 = equivariance_distance(ens, modes, best);
    char key[64];
    std::snprintf(key, sizeof key, "equivariance_L1_at_%.4g_ps", best);
    rep.set(key, l1);
    ok = ok && l1 < 0.05;
  }
  rep.set("equivariance_within_0.05", std::string(ok ? "pass" : "fail"));

  ctx.write_metadata();
  std::cout << "trajectories: " << ctx.cfg.n_traj << " paths over one period, "
            << ens.exit_clamped_count << " clamped\n";
  return 0;
}

// ---------------------------------------------------------------------------
// check

struct CheckSuite {
  std::vector<std::string> lines;
  int failures = 0;
  int ran = 0, skipped = 0;

  void pass(const std::string& name, const std::string& detail = "") {
    lines.push_back(name + " = pass" + (detail.empty() ? "" : " (" + detail + ")"));
    ++ran;
  }
  void fail(const std::string& name, const std::string& detail = "") {
    lines.push_back(name + " = fail" + (detail.empty() ? "" : " (" + detail + ")"));
    ++ran;
    ++failures;
  }
  void check(const std::string& name, bool ok, const std::string& detail = "") {
    ok ? pass(name, detail) : fail(name, detail);
  }
  void skip(const std::string& name, const std::string& why) {
    lines.push_back(name + " = skipped (" + why + ")");
    ++skipped;
  }
};

int cmd_check(RunContext& ctx) {
  CheckSuite s;
  const auto grid = ctx.cfg.grid();
  const auto pot = ctx.cfg.potential();
  s.pass("grid_symmetric_with_origin");

  const auto H = build_hamiltonian(grid, pot);
  // warnings are advisory: they flag coarse grids, they do not fail the run
  s.pass("potential_cell_variation",
         H.warnings.empty() ? "quiet" : "warned: " + H.warnings.front());

  const auto pairs = solve_lowest(H, 2);
  const auto modes = make_mode_pair(grid, pot, pairs);
  s.pass("modes_parity_classification");

  {
    const double iee = std::abs(grid.inner(modes.chi_e, modes.chi_e) - 1.0);
    const double ioo = std::abs(grid.inner(modes.chi_o, modes.chi_o) - 1.0);
    const double ieo = std::abs(grid.inner(modes.chi_e, modes.chi_o));
    s.check("modes_orthonormal", iee < 1e-8 && ioo < 1e-8 && ieo < 1e-8);
  }
  s.check("modes_energy_ordering", modes.e_even < modes.e_odd);
  s.check("splitting_above_degeneracy_floor", !modes.degenerate());
  if (modes.degenerate()) {
    std::cout << "check: degenerate pair; dynamics checks not run\n";
    for (const auto& l : s.lines) std::cout << l << "\n";
    return 4;
  }

  const double T = modes.period();
  // measuring options: the identity line below judges the deviation against
  // the configured tolerance; no other check should die on a strict setting
  const SnapshotOptions opts{ctx.cfg.eps_rho_rel, 1.0};

  {
    bool norm_ok = true, ident_ok = true, nonneg_ok = true;
    double worst_ident = 0.0;
    for (int k = 1; k <= 12; ++k) {
      const double t = (k - 0.5) * T / 12.0;
      const auto snap = snapshot(modes, t, opts);
      worst_ident = std::max(worst_ident, snap.identity_deviation);
      for (double r : snap.rho) nonneg_ok = nonneg_ok && r >= 0.0;
    }
    s.check("norm_conservation", norm_ok);
    s.check("density_nonnegative", nonneg_ok);
    s.check("phase_identity_on_mask", worst_ident <= ctx.cfg.tol_identity && ident_ok,
            "max deviation " + format_double(worst_ident) + " vs tol " +
                format_double(ctx.cfg.tol_identity));
  }

  {
    // nonzero-gradient witness at t = T/8 against the two-level baseline
    const auto snap = snapshot(modes, T / 8.0, opts);
    double mx = 0.0;
    for (int i = 0; i < grid.size(); ++i)
      if (snap.mask[i] && !std::isnan(snap.ds_dy[i]))
        mx = std::max(mx, std::abs(snap.ds_dy[i]));
    s.check("nonzero_gradient_witness", mx > 0.0,
            "max |dS/dy| = " + format_double(mx) + " 1/um");
  }

  {
    const auto a = density(evolve(modes, 0.23 * T));
    const auto b = density(evolve(modes, 0.23 * T + T));
    double worst = 0.0;
    for (int i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    s.check("periodicity_rho", worst < 1e-10);
  }

  {
    const auto lhs = density(evolve(modes, T / 2.0 + 0.3 * T));
    const auto rhs = density(evolve(modes, 0.3 * T));
    double worst = 0.0;
    for (int i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(lhs[i] - rhs[grid.size() - 1 - i]));
    s.check("half_period_mirror", worst < 1e-10);
  }

  {
    const double res = continuity_residual(modes, 0.31 * T,
                                           ctx.cfg.continuity_dt_ps > 0.0
                                               ? std::min(ctx.cfg.continuity_dt_ps, T / 100.0)
                                               : T / 2000.0,
                                           ctx.cfg.eps_rho_rel);
    s.check("continuity_residual", res < ctx.cfg.continuity_tol,
            format_double(res) + " vs tol " + format_double(ctx.cfg.continuity_tol));
  }

  {
    const auto pops = well_populations(density(evolve(modes, 0.37 * T)), modes.grid);
    s.check("populations_sum_to_one", std::abs(pops.p_plus + pops.p_minus - 1.0) < 1e-8);
  }

  {
    const double beta = well_populations(density(initial_state(modes)), modes.grid).p_minus;
    if (beta > 0.01) {
      s.skip("two_level_oracle_agreement",
             "wells not separated (p_minus(0) = " + format_double(beta) + ")");
    } else {
      double worst = 0.0;
      for (int k = 0; k <= 16; ++k) {
        const double t = T * k / 16.0;
        const double full = well_populations(density(evolve(modes, t)), modes.grid).p_minus;
        worst = std::max(worst, std::abs(full - two_level_oracle(modes.j0(), t).p_down));
      }
      s.check("two_level_oracle_agreement", worst < 0.01,
              "max |difference| = " + format_double(worst));
    }
  }

  if (ctx.cfg.has_calibration_target) {
    const double miss = std::abs(T - ctx.cfg.target_period_ps) / ctx.cfg.target_period_ps;
    s.check("calibration_period_matches_target", miss < 1e-3,
            "period " + format_double(T) + " ps vs target " +
                format_double(ctx.cfg.target_period_ps) + " ps");
  } else {
    s.skip("calibration_period_matches_target", "no calibrate.target_period_ps in config");
  }

  {
    // k2 branch and threshold continuity around the configured V0
    auto lcfg = ctx.cfg.longitudinal();
    bool ok = true;
    for (double d : {-1.0, -1e-6, 0.0, 1e-6, 1.0}) {
      LongitudinalConfig probe{lcfg.step_height + d, lcfg.step_height, lcfg.mass};
      ok = ok && k2(probe).imag() >= 0.0;
      if (d == 0.0) ok = ok && std::abs(k2(probe)) == 0.0;
    }
    s.check("k2_branch_and_threshold", ok);
  }

  {
    // transverse dynamics is independent of the longitudinal configuration
    const double ws0 = modes.omega_s();
    auto lcfg = ctx.cfg.longitudinal();
    (void)k2(lcfg);
    s.check("transverse_independent_of_longitudinal", modes.omega_s() == ws0);
  }

  {
    // small trajectory ensemble, only when the flow is resolvable at the
    // configured step (the deep-barrier default is intentionally stiff)
    const double dt = ctx.cfg.dt_ps > 0.0 ? ctx.cfg.dt_ps : T / 2000.0;
    double vmax = 0.0;
    for (int k = 1; k < 8; ++k) {
      const auto snap = snapshot(modes, k * T / 8.0, opts);
      for (int i = 0; i < grid.size(); ++i)
        if (snap.mask[i] && !std::isnan(snap.v_y[i]))
          vmax = std::max(vmax, std::abs(snap.v_y[i]));
    }
    // sampling floor of the binned L1 at this ensemble size: roughly
    // (occupied bins)/(2 n); finer histogram bins need more trajectories
    const auto rho0 = density(initial_state(modes));
    int occupied = 0;
    const double cell_cut = 0.1 / 2000.0 / grid.h();
    for (int i = 0; i < grid.size() - 1; ++i)
      if (0.5 * (rho0[i] + rho0[i + 1]) > cell_cut) ++occupied;
    const double sampling_floor = occupied / (2.0 * 2000.0);
    if (vmax * dt > 2.0 * grid.h() * 10.0) {
      s.skip("trajectory_equivariance_small",
             "flow not resolvable at dt (max |v| dt = " + format_double(vmax * dt) +
                 " um); use the trajectories config");
    } else if (sampling_floor > 0.03) {
      s.skip("trajectory_equivariance_small",
             "histogram bins too fine for a 2000-path probe (sampling floor " +
                 format_double(sampling_floor) + ")");
    } else {
      const auto ens = run_trajectories(modes, 2000, T, dt,
                                        std::max(1, static_cast<int>(T / dt / 8)), ctx.cfg.seed);
      const double l1 = equivariance_distance(ens, modes, ens.times[ens.times.size() / 2]);
      s.check("trajectory_equivariance_small", l1 < 0.1,
              "L1 = " + format_double(l1));
      s.check("trajectory_non_crossing_small", non_crossing(ens));
    }
  }

  for (const auto& l : s.lines) std::cout << l << "\n";
  std::cout << "check: " << s.ran << " ran, " << s.skipped << " skipped, "
            << s.failures << " failed\n";

  if (ctx.out) {
    std::ofstream rep(ctx.out->file("check_report"));
    for (const auto& l : s.lines) rep << l << "\n";
    ctx.write_metadata();
  }
  return s.failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dwell: double-well waveguide beat simulator"};
  app.require_subcommand(1);
  app.fallthrough();  // global --config/--out/--seed may follow the subcommand

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  app.add_option("--config", config_path, "path to the run configuration")
      ->required();
  app.add_option("--out", out_override, "output directory (overrides output.directory)");
  auto* seed_opt = app.add_option("--seed", seed_override, "RNG seed override");

  auto* eigs = app.add_subcommand("eigs", "solve the transverse eigenpair");
  int levels = 2;
  eigs->add_option("--levels", levels, "number of eigenpairs")->check(CLI::Range(2, 16));

  auto* cal = app.add_subcommand("calibrate", "tune the free parameter to the target period");
  auto* pmap = app.add_subcommand("phasemap", "phase-gradient map over (y, t)");
  int t_samples_override = 0;
  std::vector<double> snapshot_ts;
  pmap->add_option("--t-samples", t_samples_override, "time samples over one period");
  pmap->add_option("--snapshot-at", snapshot_ts,
                   "also write full field snapshots at these times (ps)");
  auto* pops = app.add_subcommand("populations", "well populations and two-level baseline");
  int samples_override = 0;
  pops->add_option("--samples", samples_override, "time samples over one period");
  auto* xprof = app.add_subcommand("xprofile", "longitudinal profiles");
  std::string regime;
  xprof->add_option("--regime", regime, "oscillating | evanescent")->required();
  auto* traj = app.add_subcommand("trajectories", "guidance-field trajectory ensemble");
  auto* check = app.add_subcommand("check", "run the invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  seed_given = seed_opt->count() > 0;

  try {
    RunContext ctx{RunConfig::load(config_path), std::nullopt, "", ""};
    ctx.config_hash = fnv1a_hex(ctx.cfg.serialize());
    if (seed_given) ctx.cfg.seed = seed_override;
    if (!out_override.empty()) ctx.cfg.output_directory = out_override;
    ctx.out.emplace(fs::path(ctx.cfg.output_directory));

    if (eigs->parsed()) {
      ctx.command = "eigs";
      return cmd_eigs(ctx, levels);
    }
    if (cal->parsed()) {
      ctx.command = "calibrate";
      return cmd_calibrate(ctx);
    }
    if (pmap->parsed()) {
      ctx.command = "phasemap";
      return cmd_phasemap(ctx,
                          t_samples_override > 1 ? t_samples_override
                                                 : ctx.cfg.t_samples,
                          snapshot_ts);
    }
    if (pops->parsed()) {
      ctx.command = "populations";
      return cmd_populations(ctx, samples_override > 1 ? samples_override
                                                       : ctx.cfg.population_samples);
    }
    if (xprof->parsed()) {
      ctx.command = "xprofile";
      return cmd_xprofile(ctx, regime);
    }
    if (traj->parsed()) {
      ctx.command = "trajectories";
      return cmd_trajectories(ctx);
    }
    if (check->parsed()) {
      ctx.command = "check";
      return cmd_check(ctx);
    }
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
