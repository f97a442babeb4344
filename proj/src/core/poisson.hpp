#pragma once

#include "grid.hpp"

namespace rigidflow {

struct PoissonResult {
  int iterations = 0;
  double residual = 0.0;
};

// Solves the 5-point Neumann Laplacian lap(p) = rhs on cell centers with the
// mean-zero gauge, matrix-free conjugate gradients. rhs is projected to zero
// mean. Throws PoissonDiverged when the residual target is missed.
PoissonResult solve_poisson_neumann(const Grid& grid, const Field2& rhs, Field2& p,
                                    double rel_tol = 1e-9, int max_iters = 0);

// Applies the Neumann 5-point Laplacian (zero flux through walls).
void apply_laplacian_neumann(const Grid& grid, const Field2& p, Field2& out);

}  // namespace rigidflow
