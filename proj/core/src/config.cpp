#include "dwell/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "dwell/csv.hpp"
#include "dwell/units.hpp"

namespace dwell {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: value of '" + key + "' is not a number: '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: value of '" + key + "' is not an integer: '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: value of '" + key +
                      "' is not an unsigned integer: '" + v + "'");
  return x;
}

// Unit-suffixed spellings users are likely to try without a unit; the error
// message points at the suffixed key.
const std::map<std::string, std::string> kUnitlessRejects = {
    {"grid.y_min", "grid.y_min_um"},
    {"grid.y_max", "grid.y_max_um"},
    {"potential.mass", "potential.mass_kg"},
    {"potential.well_separation", "potential.well_separation_um"},
    {"potential.well_frequency", "potential.well_frequency_rad_per_s"},
    {"potential.step_height", "potential.step_height_J"},
    {"potential.beam_energy", "potential.beam_energy_J"},
    {"calibrate.target_period", "calibrate.target_period_ps"},
    {"numerics.dt", "numerics.dt_ps"},
    {"numerics.continuity_dt", "numerics.continuity_dt_ps"},
};

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config: empty key or value on line " + std::to_string(lineno));
    if (!kv.emplace(key, val).second)
      throw ConfigError("config: duplicate key '" + key + "'");
  }

  auto take = [&kv](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const std::string& {
    const auto* v = take(key);
    if (!v) throw ConfigError("config: missing required key '" + key + "'");
    return *v;
  };

  c.grid_n_points = static_cast<int>(parse_int("grid.n_points", require("grid.n_points")));
  c.grid_y_min_um = parse_double("grid.y_min_um", require("grid.y_min_um"));
  c.grid_y_max_um = parse_double("grid.y_max_um", require("grid.y_max_um"));
  c.mass_kg = parse_double("potential.mass_kg", require("potential.mass_kg"));
  c.well_separation_um =
      parse_double("potential.well_separation_um", require("potential.well_separation_um"));
  c.well_frequency_rad_per_s = parse_double("potential.well_frequency_rad_per_s",
                                            require("potential.well_frequency_rad_per_s"));
  c.step_height_j = parse_double("potential.step_height_J", require("potential.step_height_J"));
  c.beam_energy_j = parse_double("potential.beam_energy_J", require("potential.beam_energy_J"));

  if (const auto* v = take("calibrate.target_period_ps")) {
    c.has_calibration_target = true;
    c.target_period_ps = parse_double("calibrate.target_period_ps", *v);
    c.free_parameter = require("calibrate.free_parameter");
    if (c.free_parameter == "well_frequency") {
      c.bracket_lo = parse_double("calibrate.bracket_lo_rad_per_s",
                                  require("calibrate.bracket_lo_rad_per_s"));
      c.bracket_hi = parse_double("calibrate.bracket_hi_rad_per_s",
                                  require("calibrate.bracket_hi_rad_per_s"));
    } else if (c.free_parameter == "mass") {
      c.bracket_lo = parse_double("calibrate.bracket_lo_kg", require("calibrate.bracket_lo_kg"));
      c.bracket_hi = parse_double("calibrate.bracket_hi_kg", require("calibrate.bracket_hi_kg"));
    } else {
      throw ConfigError("config: calibrate.free_parameter must be 'mass' or 'well_frequency'");
    }
  }

  if (const auto* v = take("numerics.eps_rho_rel")) c.eps_rho_rel = parse_double("numerics.eps_rho_rel", *v);
  if (const auto* v = take("numerics.tol_identity")) c.tol_identity = parse_double("numerics.tol_identity", *v);
  if (const auto* v = take("numerics.dt_ps")) c.dt_ps = parse_double("numerics.dt_ps", *v);
  if (const auto* v = take("numerics.n_traj")) c.n_traj = static_cast<int>(parse_int("numerics.n_traj", *v));
  if (const auto* v = take("numerics.seed")) c.seed = parse_u64("numerics.seed", *v);
  if (const auto* v = take("numerics.t_samples")) c.t_samples = static_cast<int>(parse_int("numerics.t_samples", *v));
  if (const auto* v = take("numerics.population_samples"))
    c.population_samples = static_cast<int>(parse_int("numerics.population_samples", *v));
  if (const auto* v = take("numerics.trajectory_store_every"))
    c.trajectory_store_every = static_cast<int>(parse_int("numerics.trajectory_store_every", *v));
  if (const auto* v = take("numerics.continuity_dt_ps")) c.continuity_dt_ps = parse_double("numerics.continuity_dt_ps", *v);
  if (const auto* v = take("numerics.continuity_tol")) c.continuity_tol = parse_double("numerics.continuity_tol", *v);
  if (const auto* v = take("xprofile.n_samples")) c.xprofile_n_samples = static_cast<int>(parse_int("xprofile.n_samples", *v));
  if (const auto* v = take("xprofile.max_phase")) c.xprofile_max_phase = parse_double("xprofile.max_phase", *v);
  if (const auto* v = take("xprofile.decay_lengths")) c.xprofile_decay_lengths = parse_double("xprofile.decay_lengths", *v);
  if (const auto* v = take("xprofile.detuning_tol_rel")) c.xprofile_detuning_tol_rel = parse_double("xprofile.detuning_tol_rel", *v);
  if (const auto* v = take("output.directory")) c.output_directory = *v;
  if (const auto* v = take("output.format")) c.output_format = *v;

  // every consumed key gets erased; leftovers are typos or unitless spellings
  static const char* consumed[] = {
      "grid.n_points", "grid.y_min_um", "grid.y_max_um", "potential.mass_kg",
      "potential.well_separation_um", "potential.well_frequency_rad_per_s",
      "potential.step_height_J", "potential.beam_energy_J",
      "calibrate.target_period_ps", "calibrate.free_parameter",
      "calibrate.bracket_lo_rad_per_s", "calibrate.bracket_hi_rad_per_s",
      "calibrate.bracket_lo_kg", "calibrate.bracket_hi_kg",
      "numerics.eps_rho_rel", "numerics.tol_identity", "numerics.dt_ps",
      "numerics.n_traj", "numerics.seed", "numerics.t_samples",
      "numerics.population_samples", "numerics.trajectory_store_every",
      "numerics.continuity_dt_ps", "numerics.continuity_tol",
      "xprofile.n_samples", "xprofile.max_phase", "xprofile.decay_lengths",
      "xprofile.detuning_tol_rel", "output.directory", "output.format"};
  for (const char* k : consumed) kv.erase(k);
  if (!kv.empty()) {
    const auto& bad = kv.begin()->first;
    const auto it = kUnitlessRejects.find(bad);
    if (it != kUnitlessRejects.end())
      throw ConfigError("config: key '" + bad + "' lacks its unit suffix; use '" +
                        it->second + "'");
    throw ConfigError("config: unknown key '" + bad + "'");
  }

  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::serialize() const {
  std::ostringstream o;
  auto d = [](double v) { return format_double(v); };
  o << "grid.n_points = " << grid_n_points << "\n";
  o << "grid.y_min_um = " << d(grid_y_min_um) << "\n";
  o << "grid.y_max_um = " << d(grid_y_max_um) << "\n";
  o << "potential.mass_kg = " << d(mass_kg) << "\n";
  o << "potential.well_separation_um = " << d(well_separation_um) << "\n";
  o << "potential.well_frequency_rad_per_s = " << d(well_frequency_rad_per_s) << "\n";
  o << "potential.step_height_J = " << d(step_height_j) << "\n";
  o << "potential.beam_energy_J = " << d(beam_energy_j) << "\n";
  if (has_calibration_target) {
    o << "calibrate.target_period_ps = " << d(target_period_ps) << "\n";
    o << "calibrate.free_parameter = " << free_parameter << "\n";
    if (free_parameter == "well_frequency") {
      o << "calibrate.bracket_lo_rad_per_s = " << d(bracket_lo) << "\n";
      o << "calibrate.bracket_hi_rad_per_s = " << d(bracket_hi) << "\n";
    } else {
      o << "calibrate.bracket_lo_kg = " << d(bracket_lo) << "\n";
      o << "calibrate.bracket_hi_kg = " << d(bracket_hi) << "\n";
    }
  }
  o << "numerics.eps_rho_rel = " << d(eps_rho_rel) << "\n";
  o << "numerics.tol_identity = " << d(tol_identity) << "\n";
  if (dt_ps > 0.0) o << "numerics.dt_ps = " << d(dt_ps) << "\n";
  o << "numerics.n_traj = " << n_traj << "\n";
  o << "numerics.seed = " << seed << "\n";
  o << "numerics.t_samples = " << t_samples << "\n";
  o << "numerics.population_samples = " << population_samples << "\n";
  o << "numerics.trajectory_store_every = " << trajectory_store_every << "\n";
  o << "numerics.continuity_dt_ps = " << d(continuity_dt_ps) << "\n";
  o << "numerics.continuity_tol = " << d(continuity_tol) << "\n";
  o << "xprofile.n_samples = " << xprofile_n_samples << "\n";
  o << "xprofile.max_phase = " << d(xprofile_max_phase) << "\n";
  o << "xprofile.decay_lengths = " << d(xprofile_decay_lengths) << "\n";
  o << "xprofile.detuning_tol_rel = " << d(xprofile_detuning_tol_rel) << "\n";
  o << "output.directory = " << output_directory << "\n";
  o << "output.format = " << output_format << "\n";
  return o.str();
}

Grid1D RunConfig::grid() const {
  return Grid1D::checked(grid_n_points, grid_y_min_um, grid_y_max_um);
}

PotentialSpec RunConfig::potential() const {
  PotentialSpec p;
  p.mass = units::mass_from_kg(mass_kg);
  p.well_separation = well_separation_um;
  p.well_frequency = units::omega_from_rad_per_s(well_frequency_rad_per_s);
  p.step_height = units::energy_from_j(step_height_j);
  p.beam_energy = units::energy_from_j(beam_energy_j);
  p.validate();
  return p;
}

LongitudinalConfig RunConfig::longitudinal() const {
  LongitudinalConfig l;
  l.beam_energy = units::energy_from_j(beam_energy_j);
  l.step_height = units::energy_from_j(step_height_j);
  l.mass = units::mass_from_kg(mass_kg);
  l.validate();
  return l;
}

CalibrationOptions RunConfig::calibration_options() const {
  CalibrationOptions o;
  if (free_parameter == "well_frequency") {
    o.bracket_lo = units::omega_from_rad_per_s(bracket_lo);
    o.bracket_hi = units::omega_from_rad_per_s(bracket_hi);
  } else {
    o.bracket_lo = units::mass_from_kg(bracket_lo);
    o.bracket_hi = units::mass_from_kg(bracket_hi);
  }
  return o;
}

FreeParameter RunConfig::calibration_parameter() const {
  return free_parameter == "mass" ? FreeParameter::mass
                                  : FreeParameter::well_frequency;
}

void RunConfig::validate() const {
  grid();       // throws with the violated invariant in the message
  potential();  // unit conversion + positivity checks
  if (output_format != "csv")
    throw ConfigError("config: output.format must be 'csv'");
  if (!(eps_rho_rel > 0.0) || eps_rho_rel >= 1.0)
    throw ConfigError("config: numerics.eps_rho_rel must be in (0, 1)");
  if (!(tol_identity > 0.0))
    throw ConfigError("config: numerics.tol_identity must be positive");
  if (n_traj < 1) throw ConfigError("config: numerics.n_traj must be >= 1");
  if (t_samples < 2) throw ConfigError("config: numerics.t_samples must be >= 2");
  if (population_samples < 2)
    throw ConfigError("config: numerics.population_samples must be >= 2");
  if (trajectory_store_every < 1)
    throw ConfigError("config: numerics.trajectory_store_every must be >= 1");
  if (has_calibration_target) {
    if (!(target_period_ps > 0.0))
      throw ConfigError("config: calibrate.target_period_ps must be positive");
    if (!(bracket_lo > 0.0) || !(bracket_hi > bracket_lo))
      throw ConfigError("config: calibration bracket must satisfy 0 < lo < hi");
  }
  if (xprofile_n_samples < 3)
    throw ConfigError("config: xprofile.n_samples must be >= 3");
}

}  // namespace dwell
