#pragma once

#include <span>
#include <vector>

#include "dwell/tridiag.hpp"

namespace dwell {

/// One eigenpair on the full grid, trapezoid-normalized, with the boundary
/// values pinned to zero.
struct EigenPair {
  double energy = 0.0;
  std::vector<double> chi;
};

/// Lowest-k eigenpairs of H, energies ascending.
///
/// For the symmetric double well the lowest pair is nearly degenerate (the
/// tunnel splitting can sit many orders below the absolute energies), and
/// inverse iteration on the full matrix then returns an arbitrary mixture of
/// the even/odd states.  Exploiting the exact mirror symmetry instead, the
/// even and odd parity sectors are solved separately on the half grid (with a
/// Neumann respectively Dirichlet condition at y = 0), where the targets are
/// isolated by the full level spacing.  Parity of the returned vectors is
/// then exact by construction.  Falls back to a plain full-matrix solve when
/// the diagonal is not mirror-symmetric.
std::vector<EigenPair> solve_lowest(const TridiagonalOperator& H, int k);

/// The even/odd eigenpair driving the two-mode beat, plus derived constants.
struct ModePair {
  Grid1D grid;
  double mass = 0.0;
  std::vector<double> chi_e;  // even, node-free ground state
  std::vector<double> chi_o;  // odd first excited state
  double e_even = 0.0;
  double e_odd = 0.0;

  double omega_s() const { return e_odd - e_even; }          // rad/ps
  double e_bar() const { return 0.5 * (e_even + e_odd); }
  double j0() const { return 0.5 * omega_s(); }
  double period() const;  // 2 pi / omega_s; throws InvariantError if degenerate

  /// True when the splitting is below 1e3 * eps * |E_bar|: the period is then
  /// numerically meaningless and dynamics refuses to run.
  bool degenerate() const;
  void require_resolved() const;
};

/// Classifies parity of the lowest two states, applies the sign convention
/// (both positive at y = +a so (chi_e + chi_o)/sqrt(2) localizes at positive
/// y), and packages the pair.  Throws InvariantError when the lowest two
/// states fail the parity test (asymmetric potential or too-coarse grid).
ModePair make_mode_pair(const Grid1D& grid, const PotentialSpec& pot,
                        std::span<const EigenPair> pairs);

/// build_hamiltonian + solve_lowest(2) + make_mode_pair.
ModePair solve_modes(const Grid1D& grid, const PotentialSpec& pot);

}  // namespace dwell
