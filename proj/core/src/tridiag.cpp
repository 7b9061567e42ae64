#include "dwell/tridiag.hpp"

#include <cmath>
#include <cstdio>

namespace dwell {

std::vector<double> TridiagonalOperator::apply(const std::vector<double>& f) const {
  const int n = grid.size();
  const double t = 1.0 / (2.0 * mass * grid.h() * grid.h());
  std::vector<double> out(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    const double left = (i > 1) ? f[i - 1] : 0.0;
    const double right = (i < n - 2) ? f[i + 1] : 0.0;
    out[i] = diag[i - 1] * f[i] - t * (left + right);
  }
  return out;
}

double TridiagonalOperator::rayleigh_quotient(const std::vector<double>& f) const {
  const auto hf = apply(f);
  const double num = grid.inner(f, hf);
  const double den = grid.inner(f, f);
  if (den <= 0.0) throw NumericError("rayleigh_quotient: zero trial function");
  return num / den;
}

TridiagonalOperator build_hamiltonian(const Grid1D& grid, const PotentialSpec& pot) {
  pot.validate();
  const int n = grid.size();
  if (n < 5) throw ConfigError("build_hamiltonian: need at least 5 grid points");
  const double h = grid.h();
  const double t = 1.0 / (2.0 * pot.mass * h * h);

  std::vector<double> vy(n);
  double dvmax = 0.0;
  for (int i = 0; i < n; ++i) {
    vy[i] = pot.v(grid.y(i));
    if (!std::isfinite(vy[i]))
      throw ConfigError("build_hamiltonian: non-finite potential value on grid");
    if (i > 0) dvmax = std::max(dvmax, std::abs(vy[i] - vy[i - 1]));
  }
  // Parity is exact for |y|-based potentials on the mirror-exact grid; a
  // mismatch means someone fed an asymmetric V through a patched PotentialSpec.
  for (int i = 0; i < n; ++i) {
    if (vy[i] != vy[n - 1 - i])
      throw ConfigError("build_hamiltonian: sampled potential is not symmetric in y");
  }

  TridiagonalOperator op{grid, pot.mass, {}, {}, {}};
  op.diag.resize(n - 2);
  op.off.assign(n - 3, -t);
  for (int i = 1; i < n - 1; ++i) op.diag[i - 1] = 2.0 * t + vy[i];

  if (dvmax > 0.1 * pot.well_frequency) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "potential varies by %.3e per cell (> 0.1 hbar*w0 = %.3e); "
                  "grid may be too coarse",
                  dvmax, 0.1 * pot.well_frequency);
    op.warnings.emplace_back(buf);
  }
  return op;
}

}  // namespace dwell
