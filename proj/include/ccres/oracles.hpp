#pragma once

// Reference implementations that share no code path with the Numerov
// propagator. Tests compare the pipeline against them.

#include <complex>
#include <vector>

#include "ccres/potentials.hpp"

namespace ccres::oracles {

using cplx = std::complex<double>;

/// Closed-form s-wave S-matrix of the attractive square well
/// V(r) = -depth for r < radius:
///   S(k) = e^{-2ikR} (κ cot κR + ik) / (κ cot κR - ik),  κ² = k² + 2μ·depth.
/// Only l = 0 is supported. At a pole of cot κR the limit e^{-2ikR} is
/// returned. Throws Error(domain) for k = 0, radius <= 0 or l != 0.
cplx square_well_smatrix(int l, double depth, double radius, double mu, cplx k);

struct FDSpectrum {
  std::vector<cplx> bound_k;  ///< i·sqrt(-2μE), sorted by Im k descending
  int n_grid = 0;
  double r_max = 0.0;
  double h = 0.0;             ///< r_max / (n_grid + 1)
};

/// Bound states of the second-order central-difference discretization
/// with Dirichlet ends at r = 0 and r = r_max, interior nodes r_j = j·h,
/// j = 1..n_grid. The banded symmetric matrix is never formed densely:
/// eigenvalues are isolated by bisection on the LDLᵀ inertia count.
/// Throws Error(config) for n_grid < 200 or r_max <= 0.
FDSpectrum fd_bound_states(const PotentialModel& model, double lambda, int n_grid, double r_max);

/// Same discretization, assembled densely and diagonalized with Eigen.
/// Meant for small grids; used to cross-check the bisection path.
FDSpectrum fd_bound_states_dense(const PotentialModel& model, double lambda, int n_grid,
                                 double r_max);

}  // namespace ccres::oracles
