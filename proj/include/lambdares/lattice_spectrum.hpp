#pragma once

// Negative spectrum of the five-point finite-difference -Delta + V, used as
// an independent count of bound states.

#include <vector>

#include "lambdares/scatterers.hpp"

namespace lres {

struct LatticeOptions {
  /// Dirichlet box [-B, B]^2; the grid of v is padded with zeros to reach it.
  double box_half_width = 6.0;
};

/// Number of eigenvalues below `shift`, from the inertia of an LDL^T
/// factorization of -Delta_h + V - shift.
int lattice_count_below(const Potential2D& v, double shift, const LatticeOptions& opt = {});

/// Negative eigenvalues, each located by bisection on the count to `tol`.
std::vector<double> lattice_negative_eigenvalues(const Potential2D& v, double tol = 1e-6,
                                                 const LatticeOptions& opt = {});

}  // namespace lres
