// End-to-end tests of the command-line tool: exit codes, file formats,
// determinism, lockfile.  Runs the built binary against the shipped configs
// and temporary variants.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dwell/config.hpp"
#include "dwell/csv.hpp"
#include "dwell/units.hpp"

namespace fs = std::filesystem;
using namespace dwell;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(DWELL_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path tmp_root() {
  const auto p = fs::temp_directory_path() / "dwell_cli_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = tmp_root() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

std::string demo_config_text(const std::string& outdir) {
  std::ostringstream o;
  o << "grid.n_points = 193\n"
       "grid.y_min_um = -24.0\n"
       "grid.y_max_um = 24.0\n"
       "potential.mass_kg = 1.5e-35\n"
       "potential.well_separation_um = 6.0\n"
       "potential.well_frequency_rad_per_s = 1.0e12\n"
       "potential.step_height_J = 1.0e-22\n"
       "potential.beam_energy_J = 3.0e-22\n"
       "numerics.tol_identity = 5e-2\n"
       "numerics.continuity_tol = 1e-2\n"
       "numerics.n_traj = 1500\n"
       "numerics.seed = 20260810\n"
       "output.directory = "
    << outdir << "\n";
  return o.str();
}

// metadata lines look like '# key=value'
double metadata_value(const std::string& csv_text, const std::string& key) {
  const std::string needle = "# " + key + "=";
  const auto pos = csv_text.find(needle);
  REQUIRE(pos != std::string::npos);
  const auto eol = csv_text.find('\n', pos);
  return std::stod(csv_text.substr(pos + needle.size(), eol - pos - needle.size()));
}

const std::string kShippedDefault = std::string(DWELL_CONFIG_DIR) + "/default.cfg";
const std::string kShippedHarmonic = std::string(DWELL_CONFIG_DIR) + "/harmonic.cfg";

}  // namespace

TEST_CASE("cli: missing and broken configs exit with code 2") {
  CHECK(run_cli("eigs --config /nonexistent.cfg").exit_code == 2);
  const auto bad = write_config("asym.cfg",
                                "grid.n_points = 11\n"
                                "grid.y_min_um = -3.0\n"
                                "grid.y_max_um = 4.0\n"
                                "potential.mass_kg = 1.5e-35\n"
                                "potential.well_separation_um = 1.0\n"
                                "potential.well_frequency_rad_per_s = 2e12\n"
                                "potential.step_height_J = 1e-22\n"
                                "potential.beam_energy_J = 2e-22\n");
  const auto r = run_cli("eigs --config " + bad.string() + " --out " +
                         (tmp_root() / "asym_out").string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("symmetric") != std::string::npos);  // names the invariant
}

TEST_CASE("cli: eigs is deterministic byte for byte") {
  const auto out1 = tmp_root() / "eigs1";
  const auto out2 = tmp_root() / "eigs2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  const auto cfg = write_config("demo_eigs.cfg", demo_config_text((tmp_root() / "unused").string()));
  CHECK(run_cli("eigs --config " + cfg.string() + " --out " + out1.string()).exit_code == 0);
  CHECK(run_cli("eigs --config " + cfg.string() + " --out " + out2.string()).exit_code == 0);
  CHECK(slurp(out1 / "modes.csv") == slurp(out2 / "modes.csv"));
  CHECK(slurp(out1 / "energies.csv") == slurp(out2 / "energies.csv"));
  CHECK(slurp(out1 / "run_metadata") == slurp(out2 / "run_metadata"));
}

TEST_CASE("cli: eigs --levels 4 on the harmonic config matches hbar w0 (n + 1/2)") {
  const auto out = tmp_root() / "harmonic_eigs";
  fs::remove_all(out);
  const auto r = run_cli("eigs --levels 4 --config " + kShippedHarmonic + " --out " +
                         out.string());
  CHECK(r.exit_code == 0);
  const auto energies = slurp(out / "energies.csv");
  std::istringstream in(energies);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,E_J");
  const RunConfig cfg = RunConfig::load(kShippedHarmonic);
  const double hbar_w0 = units::hbar_si * cfg.well_frequency_rad_per_s;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const int n = std::stoi(line.substr(0, comma));
    const double e = std::stod(line.substr(comma + 1));
    CHECK(e == doctest::Approx((n + 0.5) * hbar_w0).epsilon(1e-4));
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("cli: shipped default config carries the 80 ps calibration") {
  const auto out = tmp_root() / "default_eigs";
  fs::remove_all(out);
  const auto r = run_cli("eigs --config " + kShippedDefault + " --out " + out.string());
  CHECK(r.exit_code == 0);
  const auto modes = slurp(out / "modes.csv");
  const double ws = metadata_value(modes, "omega_s_rad_per_s");
  const double period_ps = 2.0 * 3.14159265358979324 / ws * 1e12;
  CHECK(period_ps == doctest::Approx(80.0).epsilon(1e-3));
}

TEST_CASE("cli: phasemap emits a matrix with masked cells and a speed report") {
  const auto out = tmp_root() / "pmap";
  fs::remove_all(out);
  const auto cfg = write_config("demo_pmap.cfg", demo_config_text("unused"));
  const auto r = run_cli("phasemap --t-samples 9 --snapshot-at 101.4 --config " +
                         cfg.string() + " --out " + out.string());
  CHECK(r.exit_code == 0);

  // full field snapshot: column set, metadata, masked cells empty
  const auto snap = slurp(out / "snapshot_0.csv");
  CHECK(snap.find("# t_ps=101.4") != std::string::npos);
  CHECK(snap.find("# gauge=rotating_frame_Ebar_removed") != std::string::npos);
  CHECK(snap.find("# eps_rho_abs_per_um=") != std::string::npos);
  CHECK(snap.find("y,rho,S,dS_dy,j_y,v_y,mask") != std::string::npos);
  const auto text = slurp(out / "phasemap.csv");
  CHECK(text.find("# gauge=rotating_frame_Ebar_removed") != std::string::npos);
  std::istringstream in(text);
  std::string line;
  int header_cols = 0, rows = 0;
  bool saw_empty_cell = false;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (header_cols == 0) {
      header_cols = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
      CHECK(line.rfind("y,", 0) == 0);
      continue;
    }
    ++rows;
    if (line.find(",,") != std::string::npos) saw_empty_cell = true;
  }
  CHECK(header_cols == 10);  // y + 9 time columns
  CHECK(rows == 193);
  CHECK(saw_empty_cell);  // below-floor tails are emitted as empty fields
  CHECK(slurp(out / "speed_stats").find("mean_abs_v_rho_weighted_m_per_s=") !=
        std::string::npos);
}

TEST_CASE("cli: populations time series matches the two-level baseline closely") {
  const auto out = tmp_root() / "pops";
  fs::remove_all(out);
  const auto cfg = write_config("demo_pops.cfg", demo_config_text("unused"));
  CHECK(run_cli("populations --samples 101 --config " + cfg.string() + " --out " +
                out.string())
            .exit_code == 0);
  const auto text = slurp(out / "populations.csv");
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  double first_p_minus = -1.0, mid_p_minus = -1.0;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!saw_header) {
      CHECK(line == "t,p_plus,p_minus,two_level_p_minus");
      saw_header = true;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double t, pp, pm, oracle;
    fields >> t >> pp >> pm >> oracle;
    CHECK(pp + pm == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(pm - oracle) < 0.01);
    if (row == 0) first_p_minus = pm;
    if (row == 50) mid_p_minus = pm;
    ++row;
  }
  CHECK(row == 101);
  CHECK(first_p_minus <= 0.01);  // starts in the positive-y guide
  CHECK(mid_p_minus >= 0.99);    // fully transferred at T/2
}

TEST_CASE("cli: xprofile regimes and the threshold error") {
  const auto cfgdir = tmp_root();
  // oscillating on the demo config (E > V0 there)
  const auto cfg = write_config("demo_xp.cfg", demo_config_text("unused"));
  const auto out1 = cfgdir / "xp_osc";
  fs::remove_all(out1);
  CHECK(run_cli("xprofile --regime oscillating --config " + cfg.string() + " --out " +
                out1.string())
            .exit_code == 0);
  const auto osc = slurp(out1 / "xprofile_oscillating.csv");
  CHECK(osc.find("x,rho_a") != std::string::npos);

  // E = V0: evanescent command refuses with a regime message
  auto text = demo_config_text("unused");
  const auto pos = text.find("potential.beam_energy_J = 3.0e-22");
  text.replace(pos, 33, "potential.beam_energy_J = 1.0e-22");
  const auto cfg_eq = write_config("demo_xp_eq.cfg", text);
  const auto out2 = cfgdir / "xp_eq";
  fs::remove_all(out2);
  const auto r = run_cli("xprofile --regime evanescent --config " + cfg_eq.string() +
                         " --out " + out2.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("k2") != std::string::npos);

  // bogus regime name
  CHECK(run_cli("xprofile --regime sideways --config " + cfg.string() + " --out " +
                (cfgdir / "xp_bogus").string())
            .exit_code == 2);
}

TEST_CASE("cli: evanescent profile at the special detuning sums to the decay law") {
  // beam energy set to V0 - hbar J0 for the demo pair, with J0 solved via the
  // library so the detuning is exact
  auto base = RunConfig::parse(demo_config_text("unused"));
  const auto modes = solve_modes(base.grid(), base.potential());
  const double e_j = units::energy_to_j(units::energy_from_j(base.step_height_j) - modes.j0());
  std::ostringstream patched;
  patched << "grid.n_points = 193\n"
             "grid.y_min_um = -24.0\n"
             "grid.y_max_um = 24.0\n"
             "potential.mass_kg = 1.5e-35\n"
             "potential.well_separation_um = 6.0\n"
             "potential.well_frequency_rad_per_s = 1.0e12\n"
             "potential.step_height_J = 1.0e-22\n"
          << "potential.beam_energy_J = " << format_double(e_j) << "\n"
          << "numerics.tol_identity = 5e-2\n";
  const auto cfg = write_config("demo_evan.cfg", patched.str());
  const auto out = tmp_root() / "xp_evan";
  fs::remove_all(out);
  const auto r = run_cli("xprofile --regime evanescent --config " + cfg.string() +
                         " --out " + out.string());
  CHECK(r.exit_code == 0);
  const auto text = slurp(out / "xprofile_evanescent.csv");
  CHECK(metadata_value(text, "j0_vx_vs_quarter_k2_ratio") == doctest::Approx(2.0).epsilon(1e-9));
  const double k2im = metadata_value(text, "k2_im_per_um");
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!saw_header) {
      CHECK(line == "x,psi_m_sq,psi_a_sq,psi_m_sq_normalized,psi_a_sq_normalized");
      saw_header = true;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double x, pm, pa, pmn, pan;
    fields >> x >> pm >> pa >> pmn >> pan;
    const double damp = std::exp(-2.0 * k2im * x);
    CHECK(pm + pa == doctest::Approx(damp).epsilon(1e-12));
    CHECK(pmn + pan == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(saw_header);
}

TEST_CASE("cli: trajectories are reproducible and pass their own report") {
  const auto out1 = tmp_root() / "traj1";
  const auto out2 = tmp_root() / "traj2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  const auto cfg = write_config("demo_traj.cfg", demo_config_text("unused"));
  CHECK(run_cli("trajectories --config " + cfg.string() + " --out " + out1.string())
            .exit_code == 0);
  CHECK(run_cli("trajectories --config " + cfg.string() + " --out " + out2.string())
            .exit_code == 0);
  CHECK(slurp(out1 / "trajectories.csv") == slurp(out2 / "trajectories.csv"));
  const auto rep = slurp(out1 / "equivariance_report");
  CHECK(rep.find("non_crossing=pass") != std::string::npos);
  CHECK(rep.find("equivariance_within_0.05=pass") != std::string::npos);

  // a different seed changes the sampled ensemble
  const auto out3 = tmp_root() / "traj3";
  fs::remove_all(out3);
  CHECK(run_cli("trajectories --seed 7 --config " + cfg.string() + " --out " +
                out3.string())
            .exit_code == 0);
  CHECK(slurp(out3 / "trajectories.csv") != slurp(out1 / "trajectories.csv"));
}

TEST_CASE("cli: check passes on the demo config and fails when tampered") {
  const auto cfg = write_config("demo_check.cfg", demo_config_text("unused"));
  const auto out = tmp_root() / "check_ok";
  fs::remove_all(out);
  const auto ok = run_cli("check --config " + cfg.string() + " --out " + out.string());
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("phase_identity_on_mask = pass") != std::string::npos);
  CHECK(ok.output.find("0 failed") != std::string::npos);

  // tampered tolerance below the discretization floor: identity check fails
  auto text = demo_config_text("unused");
  const auto pos = text.find("numerics.tol_identity = 5e-2");
  text.replace(pos, 28, "numerics.tol_identity = 1e-15");
  const auto bad = write_config("demo_check_bad.cfg", text);
  const auto out_bad = tmp_root() / "check_bad";
  fs::remove_all(out_bad);
  const auto r = run_cli("check --config " + bad.string() + " --out " + out_bad.string());
  CHECK(r.exit_code == 4);
  CHECK(r.output.find("phase_identity_on_mask = fail") != std::string::npos);
}

TEST_CASE("cli: check on the single-well config reports the period miss") {
  // a = 0 turns the double well into a single well; parity classification
  // still works but the beat period no longer matches an 80 ps target
  std::string text = demo_config_text("unused");
  auto pos = text.find("potential.well_separation_um = 6.0");
  text.replace(pos, 34, "potential.well_separation_um = 0.0");
  text +=
      "calibrate.target_period_ps = 80.0\n"
      "calibrate.free_parameter = well_frequency\n"
      "calibrate.bracket_lo_rad_per_s = 1e11\n"
      "calibrate.bracket_hi_rad_per_s = 1e14\n";
  const auto cfg = write_config("single_well_check.cfg", text);
  const auto out = tmp_root() / "check_single";
  fs::remove_all(out);
  const auto r = run_cli("check --config " + cfg.string() + " --out " + out.string());
  CHECK(r.exit_code == 4);
  CHECK(r.output.find("modes_parity_classification = pass") != std::string::npos);
  CHECK(r.output.find("calibration_period_matches_target = fail") != std::string::npos);
  CHECK(r.output.find("ran") != std::string::npos);  // summary states what ran
}

TEST_CASE("cli: concurrent writes to one output directory are refused") {
  const auto out = tmp_root() / "locked";
  fs::remove_all(out);
  fs::create_directories(out);
  std::ofstream(out / ".lock") << "";
  const auto cfg = write_config("demo_lock.cfg", demo_config_text("unused"));
  const auto r = run_cli("eigs --config " + cfg.string() + " --out " + out.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("lock") != std::string::npos);
  fs::remove(out / ".lock");
}

TEST_CASE("cli: calibrate writes a loadable calibrated config") {
  std::string text = demo_config_text("unused");
  text +=
      "calibrate.target_period_ps = 100.0\n"
      "calibrate.free_parameter = well_frequency\n"
      "calibrate.bracket_lo_rad_per_s = 5e11\n"
      "calibrate.bracket_hi_rad_per_s = 2e13\n";
  const auto cfg = write_config("demo_cal.cfg", text);
  const auto out = tmp_root() / "cal";
  fs::remove_all(out);
  const auto r = run_cli("calibrate --config " + cfg.string() + " --out " + out.string());
  CHECK(r.exit_code == 0);
  const auto calibrated = RunConfig::load((out / "calibrated.cfg").string());
  const auto modes = solve_modes(calibrated.grid(), calibrated.potential());
  CHECK(modes.period() == doctest::Approx(100.0).epsilon(1e-3));
  const auto rep = slurp(out / "calibrate_report");
  CHECK(rep.find("achieved_period_ps=") != std::string::npos);
}
