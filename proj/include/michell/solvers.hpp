#pragma once

// The three optimizers: ground-structure LP for the Michell weight, a
// primal-dual method for the convex limit problem min ∫h_limit(σ) s.t.
// −div σ = g, and an augmented-Lagrangian scheme for the nonconvex finite-λ
// problem min ∫h_λ(σ) under the same constraint.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "michell/grid.hpp"
#include "michell/report.hpp"
#include "michell/truss.hpp"

namespace michell {

struct SolveOptions {
    int max_iterations = 5000;
    /// Primal/dual step sizes; ≤ 0 selects them from a power-iteration
    /// estimate of the operator norm (product 0.95/‖K‖²).
    double primal_step = 0.0;
    double dual_step = 0.0;
    /// Relative constraint residual ‖div σ + g‖/‖g‖ to accept.
    double tolerance = 1e-6;
    /// Relative change of the objective over `check_every` iterations.
    double objective_tolerance = 1e-6;
    int check_every = 50;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SolveReport {
    double objective = 0.0;
    double residual = 0.0;  // relative, same norm as SolveOptions::tolerance
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
    double lower_bound = 0.0;  // certified bound where available (LP dual), else NaN
    std::string message;
};

// ---------------------------------------------------------------------------

struct TrussSolution {
    TrussDesign design;
    SolveReport report;
    /// Dual certificate: nodal displacements u (free-node rows) with
    /// |⟨B_k, u⟩| ≤ L_k for every bar and −⟨g, u⟩ equal to the weight.
    Eigen::VectorXd displacement;
    double dual_objective = 0.0;
    double dual_infeasibility = 0.0;  // max_k (|⟨B_k,u⟩| − L_k)₊ / L_k
};

/// min Σ L_k(w⁺ + w⁻) s.t. B(w⁺ − w⁻) = −g by revised simplex.
/// Throws Infeasible when the ground structure cannot carry the load.
TrussSolution solve_truss_lp(const GroundStructure& gs, const PointLoadSet& loads,
                             const SolveOptions& opts = {});

// ---------------------------------------------------------------------------

/// Orthogonal projection of a load onto the balanced subspace (orthogonal to
/// the discrete rigid motions). Returns the relative size of the removed part.
double balance_load(VectorField& g);

/// Exact projection onto the affine set {σ : div σ = −g} in the Frobenius
/// field inner product, via a sparse factorization of D M⁻¹ Dᵀ with the
/// rigid-motion null space pinned. Factor once, project many times.
class EquilibriumProjector {
public:
    explicit EquilibriumProjector(const Grid& grid);
    ~EquilibriumProjector();
    EquilibriumProjector(EquilibriumProjector&&) noexcept;
    EquilibriumProjector& operator=(EquilibriumProjector&&) noexcept;

    const Grid& grid() const;
    /// σ ← argmin ‖τ − σ‖ over div τ = −g. g must be balanced.
    void project(StressField& sigma, const VectorField& g) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct FieldSolution {
    StressField field;
    SolveReport report;
};

/// Primal-dual hybrid gradient on min F(Aσ) + ι{div σ = −g}, where A maps the
/// staggered field to cell tensors and F = Σ vol·h_limit. Every iterate is
/// exactly feasible (up to the balanced part of g); the objective of the best
/// ergodic/last iterate is returned. The load is balanced first and the
/// removed fraction is reported in the message.
FieldSolution solve_limit_field(const Grid& grid, const VectorField& load, const SolveOptions& opts = {});

/// Linearized augmented Lagrangian for min Σ vol·h_λ(q) s.t. q = Aσ, div σ =
/// −g, with the q-step done by prox_h_lambda. Starts from `init` (projected
/// onto the constraint) and returns the best iterate seen, so the h_λ energy
/// never exceeds that of the projected init.
FieldSolution solve_finite_lambda(const Grid& grid, const VectorField& load, Lambda lambda,
                                  const SolveOptions& opts, const StressField& init);

/// Both of the above share the factorization when a projector is supplied.
/// The limit solver may start from `init` (projected first) instead of zero.
FieldSolution solve_limit_field(const EquilibriumProjector& proj, const VectorField& load,
                                const SolveOptions& opts = {}, const StressField* init = nullptr);
FieldSolution solve_finite_lambda(const EquilibriumProjector& proj, const VectorField& load,
                                  Lambda lambda, const SolveOptions& opts, const StressField& init);

/// Problem data for a λ sweep: the load and the target value (the Γ-limit
/// optimum) the energies should approach.
struct SweepProblem {
    Grid grid;
    VectorField load;
    double target = 0.0;
};

/// For each λ (ascending): solve_finite_lambda warm-started from the previous
/// result (the first from the limit solution). Columns: lambda, energy, gap,
/// limit_gap, residual, hminus1, iters. Per-λ failures are recorded as NaN
/// rows and the sweep continues.
ExperimentReport lambda_sweep(const SweepProblem& problem, const std::vector<double>& lambdas,
                              const SolveOptions& opts, std::vector<double>* seconds = nullptr);

}  // namespace michell
