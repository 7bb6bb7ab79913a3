#pragma once

// Scripted experiments. Each returns an ExperimentReport whose checks carry
// their own tolerances; violations become report values, not exceptions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "michell/loads.hpp"
#include "michell/report.hpp"
#include "michell/solvers.hpp"
#include "michell/tensor.hpp"
#include "michell/truss.hpp"

namespace michell {

/// Random symmetric tensors with isotropic directions and log-uniform
/// Frobenius norms in [10^lo_exp, 10^hi_exp].
template <int N>
std::vector<SymTensor<N>> sample_tensors(std::size_t count, std::uint64_t seed, double lo_exp = -3.0,
                                         double hi_exp = 3.0);

/// One row per (dim, λ): the chain 0 ≤ H ≤ h_λ ≤ h̃_λ on n_samples mixed-scale
/// tensors, jumps of h_λ across the branch boundary r(τ) = √λ, the wave-cone
/// identity H = h_limit on tensors with a zero eigenvalue, and (3D) central
/// differences of h_λ in the smallest eigenvalue magnitude.
ExperimentReport run_inequality_sampler(std::size_t n_samples, const std::vector<double>& lambdas,
                                        std::uint64_t seed);

/// Rows per (dim, sample, λ): h_limit − h_λ against 2λ^{-1/2}|τ₁τ₂| (2D) and
/// the fitted log-log slope of the gap over the λ list (3D).
ExperimentReport run_pointwise_convergence(const std::vector<SymTensor2>& samples2,
                                           const std::vector<SymTensor3>& samples3,
                                           const std::vector<double>& lambdas);

/// Recovery sequence for a truss: the LP design's line measure mollified at the
/// scheduled ε(λ), with its own divergence as load. Rows: lambda, epsilon,
/// energy, limit, gap, sup, sup_bound, hminus1 (λ^{-1/4}·‖load‖₋₁, reported only).
ExperimentReport run_recovery_experiment(const TrussInstance& instance, const Grid& grid,
                                         const std::vector<double>& lambdas);

struct GammaInstance {
    TrussInstance truss;
    /// Grid load; when absent, the nodal loads and reactions of the LP design
    /// are used as point forces mollified over `point_cells` cells.
    std::optional<LoadSpec> continuum;
    double point_cells = 4.0;
    /// Relative tolerance on the limit value against 2·(LP weight).
    double limit_tolerance = 0.02;
    /// Relative tolerance on the finite-λ value at the largest λ.
    double final_tolerance = 0.05;
};

/// LP weight → target 2W; continuum limit solve; warm-started finite-λ
/// solves. Rows: lambda, lp_weight, target, limit_value, energy, gap,
/// limit_gap, competitor, residual, iters. `seconds` receives the limit solve
/// time followed by one entry per λ.
ExperimentReport run_gamma_sweep(const GammaInstance& instance, const Grid& grid, const std::vector<double>& lambdas,
                                 const SolveOptions& opts, std::vector<double>* seconds = nullptr);

/// The LP design rasterized with a transverse profile of `point_cells` cells
/// and evaluated under h_limit, against 2·(LP weight) and against the
/// continuum limit solve on the same loads. One row.
ExperimentReport run_cross_validation(const TrussInstance& instance, const Grid& grid, double point_cells,
                                      const SolveOptions& opts, FieldSolution* solution = nullptr);

/// Discrete integration by parts on random pairs for each grid.
ExperimentReport run_adjointness(const std::vector<Grid>& grids, int pairs, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Figures (plain SVG).

struct Series {
    std::string label;
    std::vector<double> x, y;
};

/// Log-log line plot; nonpositive or non-finite points are skipped.
void write_loglog_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series);

/// Cell heatmap of a per-cell scalar (2D grids; 3D shows the middle slice).
void write_heatmap_svg(const std::string& path, const std::string& title, const Grid& grid,
                       const std::vector<double>& cell_values);

/// Truss layout with stroke widths ∝ |w|; compression (w > 0) blue, tension red.
void write_truss_svg(const std::string& path, const GroundStructure& gs, const TrussDesign& design);

}  // namespace michell
