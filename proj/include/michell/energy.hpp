#pragma once

// Quadrature of the spectral densities over a stress field, and the lattice
// H⁻¹ surrogate used as a load diagnostic.

#include "michell/grid.hpp"
#include "michell/integrands.hpp"

namespace michell {

/// Midpoint rule Σ_cells density(τ_cell)·vol, τ_cell with shear averaged from
/// the surrounding corners. `lambda` is used by HTilde and HLambda only.
double energy(const StressField& f, DensityKind kind, double lambda = 0.0);

/// Per-cell density values in cell-lattice order.
std::vector<double> density_map(const StressField& f, DensityKind kind, double lambda = 0.0);

/// √⟨g, (I − Δ_h)⁻¹ g⟩ with Δ_h the componentwise 5/7-point Laplacian on each
/// face lattice, extended by zero. Throws NumericalFailure if CG stalls.
double hminus1_norm(const VectorField& g);

}  // namespace michell
