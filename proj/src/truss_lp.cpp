#include <chrono>
#include <cmath>

#include "michell/errors.hpp"
#include "michell/simplex.hpp"
#include "michell/solvers.hpp"

namespace michell {

void SolveOptions::validate() const {
    if (max_iterations < 1) throw InvalidInput("max_iterations must be positive");
    if (!(tolerance > 0.0) || !(objective_tolerance > 0.0)) throw InvalidInput("tolerances must be positive");
    if (check_every < 1) throw InvalidInput("check_every must be positive");
    if (primal_step > 0.0 && dual_step > 0.0 && primal_step * dual_step >= 1.0)
        throw InvalidInput("primal and dual steps violate the stability bound (product must be < 1/‖K‖² ≤ 1)");
}

TrussSolution solve_truss_lp(const GroundStructure& gs, const PointLoadSet& loads, const SolveOptions& opts) {
    opts.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::MatrixXd B = equilibrium_matrix(gs);
    const Eigen::VectorXd g = load_vector(gs, loads);
    const int nb = gs.num_bars();
    const int m = static_cast<int>(B.rows());

    Eigen::MatrixXd A(m, 2 * nb);
    A << B, -B;
    Eigen::VectorXd c(2 * nb);
    for (int k = 0; k < nb; ++k) c(k) = c(nb + k) = gs.bars()[k].length;

    const LpResult lp = solve_lp(A, -g, c, std::max(opts.max_iterations, 1000 * (m + 1)));
    if (lp.status == LpResult::Status::Infeasible)
        throw Infeasible("the ground structure cannot carry the load");
    if (lp.status != LpResult::Status::Optimal)
        throw NumericalFailure("simplex did not finish", static_cast<double>(lp.iterations));

    TrussSolution sol;
    sol.design.w.resize(nb);
    for (int k = 0; k < nb; ++k) sol.design.w[k] = lp.x(k) - lp.x(nb + k);
    sol.displacement = lp.y;
    sol.dual_objective = -g.dot(lp.y);
    for (int k = 0; k < nb; ++k) {
        const double L = gs.bars()[k].length;
        const double v = std::abs(B.col(k).dot(lp.y));
        sol.dual_infeasibility = std::max(sol.dual_infeasibility, (v - L) / L);
    }

    SolveReport& r = sol.report;
    r.objective = truss_weight(gs, sol.design);
    r.residual = truss_residual(gs, sol.design, loads);
    r.iterations = lp.iterations;
    r.lower_bound = sol.dual_objective;
    r.converged = true;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.message = "simplex optimal";
    return sol;
}

}  // namespace michell
