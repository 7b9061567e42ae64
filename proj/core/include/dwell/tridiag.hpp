#pragma once

#include <string>
#include <vector>

#include "dwell/grid.hpp"
#include "dwell/potential.hpp"

namespace dwell {

/// Symmetric tridiagonal discretization of H = p^2/2m + V(y) with a
/// second-order central-difference kinetic term and Dirichlet ends (the
/// wavefunction is pinned to zero at both grid boundaries).  The matrix acts
/// on the n-2 interior nodes; diag[k] and off[k] refer to interior node k,
/// i.e. grid node k+1.
struct TridiagonalOperator {
  Grid1D grid;
  double mass = 0.0;
  std::vector<double> diag;  // size n-2
  std::vector<double> off;   // size n-3
  std::vector<std::string> warnings;

  int dim() const { return static_cast<int>(diag.size()); }

  /// H f for a full-grid function (boundary values are ignored; the result is
  /// zero at both ends).
  std::vector<double> apply(const std::vector<double>& f) const;

  /// <f, H f> / <f, f> under the trapezoid inner product.
  double rayleigh_quotient(const std::vector<double>& f) const;
};

/// Discretizes H_y.  Warns (does not fail) when the potential varies by more
/// than 0.1 hbar*w0 across a cell anywhere, which signals an under-resolved
/// grid.  Throws ConfigError for a non-symmetric sampled potential and
/// ConfigError for non-finite potential values.
TridiagonalOperator build_hamiltonian(const Grid1D& grid, const PotentialSpec& pot);

}  // namespace dwell
