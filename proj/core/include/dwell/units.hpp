#pragma once

namespace dwell::units {

// Internal unit system: hbar = 1, lengths in um, times in ps.
// That fixes the mass unit to hbar * ps / um^2 and the energy unit to
// hbar / ps.  Conversions live at the I/O boundary only; everything inside
// the library is in internal units.
inline constexpr double hbar_si = 1.054571817e-34;        // J s (CODATA 2018)
inline constexpr double mass_unit_kg = 1.054571817e-34;   // hbar * ps / um^2
inline constexpr double energy_unit_j = 1.054571817e-22;  // hbar / ps
inline constexpr double speed_unit_m_per_s = 1.0e6;       // 1 um/ps

inline constexpr double mass_from_kg(double kg) { return kg / mass_unit_kg; }
inline constexpr double mass_to_kg(double m) { return m * mass_unit_kg; }
inline constexpr double energy_from_j(double e) { return e / energy_unit_j; }
inline constexpr double energy_to_j(double e) { return e * energy_unit_j; }
inline constexpr double omega_from_rad_per_s(double w) { return w * 1e-12; }
inline constexpr double omega_to_rad_per_s(double w) { return w * 1e12; }

}  // namespace dwell::units
