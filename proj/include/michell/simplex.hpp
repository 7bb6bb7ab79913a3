#pragma once

// Dense two-phase revised simplex for  min cᵀx  s.t.  Ax = b, x ≥ 0.

#include <Eigen/Dense>

namespace michell {

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };
    Status status = Status::IterationLimit;
    Eigen::VectorXd x;  // primal basic solution
    Eigen::VectorXd y;  // duals, one per row of A (0 on redundant rows)
    double objective = 0.0;
    int iterations = 0;
};

/// Dantzig pricing with a switch to Bland's rule after a run of degenerate
/// pivots, which rules out cycling. Redundant equality rows found at the end
/// of phase I are dropped.
LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  int max_iterations = 100000);

}  // namespace michell
