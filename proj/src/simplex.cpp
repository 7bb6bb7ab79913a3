#include "michell/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "michell/errors.hpp"

namespace michell {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr int kDegenerateRun = 50;

struct Tableau {
    Eigen::MatrixXd A;  // includes artificial columns during phase I
    Eigen::VectorXd b;
    std::vector<int> basis;
    int iterations = 0;
};

enum class Outcome { Optimal, Unbounded, IterationLimit };

// Runs simplex on columns [0, allowed) with costs c from the current basis.
Outcome iterate(Tableau& t, const Eigen::VectorXd& c, int allowed, int max_iterations) {
    const int m = static_cast<int>(t.A.rows());
    std::vector<char> in_basis(t.A.cols(), 0);
    for (int j : t.basis) in_basis[j] = 1;
    int degenerate = 0;
    double cost_scale = 1.0;
    for (int j = 0; j < allowed; ++j) cost_scale = std::max(cost_scale, std::abs(c(j)));

    while (t.iterations < max_iterations) {
        Eigen::MatrixXd B(m, m);
        Eigen::VectorXd cB(m);
        for (int i = 0; i < m; ++i) {
            B.col(i) = t.A.col(t.basis[i]);
            cB(i) = c(t.basis[i]);
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        const Eigen::VectorXd xB = lu.solve(t.b);
        const Eigen::VectorXd y = lu.transpose().solve(cB);

        const bool bland = degenerate >= kDegenerateRun;
        int enter = -1;
        double best = -kPivotTol * cost_scale;
        for (int j = 0; j < allowed; ++j) {
            if (in_basis[j]) continue;
            const double d = c(j) - t.A.col(j).dot(y);
            if (d < best) {
                enter = j;
                if (bland) break;
                best = d;
            }
        }
        if (enter < 0) return Outcome::Optimal;

        const Eigen::VectorXd dir = lu.solve(t.A.col(enter));
        int leave = -1;
        double step = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (dir(i) <= kPivotTol) continue;
            const double r = std::max(xB(i), 0.0) / dir(i);
            if (leave < 0 || r < step - 1e-12) {
                step = r;
                leave = i;
            } else if (r <= step + 1e-12 && t.basis[i] < t.basis[leave]) {
                step = std::min(step, r);  // Bland tie-break on the leaving index
                leave = i;
            }
        }
        if (leave < 0) return Outcome::Unbounded;

        degenerate = step <= 1e-12 ? degenerate + 1 : 0;
        in_basis[t.basis[leave]] = 0;
        in_basis[enter] = 1;
        t.basis[leave] = enter;
        ++t.iterations;
    }
    return Outcome::IterationLimit;
}

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  int max_iterations) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.size() != m || c.size() != n) throw ShapeMismatch("solve_lp: inconsistent dimensions");
    LpResult res;
    res.x = Eigen::VectorXd::Zero(n);
    res.y = Eigen::VectorXd::Zero(m);

    // phase I on [A | I] with rows signed so that b ≥ 0
    Tableau t;
    t.A.resize(m, n + m);
    t.b.resize(m);
    std::vector<double> sign(m);
    for (int i = 0; i < m; ++i) {
        sign[i] = b(i) < 0.0 ? -1.0 : 1.0;
        t.A.row(i).head(n) = sign[i] * A.row(i);
        t.b(i) = sign[i] * b(i);
    }
    t.A.rightCols(m).setIdentity();
    for (int i = 0; i < m; ++i) t.basis.push_back(n + i);

    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + m);
    c1.tail(m).setOnes();
    if (m > 0 && iterate(t, c1, n + m, max_iterations) == Outcome::IterationLimit) {
        res.iterations = t.iterations;
        return res;
    }

    auto basic_values = [&](const Tableau& tt) {
        Eigen::MatrixXd B(tt.A.rows(), tt.A.rows());
        for (int i = 0; i < tt.A.rows(); ++i) B.col(i) = tt.A.col(tt.basis[i]);
        return Eigen::VectorXd(B.partialPivLu().solve(tt.b));
    };

    const double bscale = 1.0 + b.cwiseAbs().maxCoeff();
    if (m > 0) {
        const Eigen::VectorXd xB = basic_values(t);
        double infeas = 0.0;
        for (int i = 0; i < m; ++i)
            if (t.basis[i] >= n) infeas += std::abs(xB(i));
        if (infeas > 1e-9 * bscale) {
            res.status = LpResult::Status::Infeasible;
            res.iterations = t.iterations;
            return res;
        }
    }

    // drive artificials out of the basis; rows where that is impossible are redundant
    std::vector<int> kept;
    for (int i = 0; i < m; ++i) kept.push_back(i);
    for (int r = 0; r < static_cast<int>(t.basis.size());) {
        if (t.basis[r] < n) {
            ++r;
            continue;
        }
        const int rows = static_cast<int>(t.A.rows());
        Eigen::MatrixXd B(rows, rows);
        for (int i = 0; i < rows; ++i) B.col(i) = t.A.col(t.basis[i]);
        Eigen::VectorXd er = Eigen::VectorXd::Zero(rows);
        er(r) = 1.0;
        const Eigen::VectorXd row = B.transpose().partialPivLu().solve(er);  // row r of B⁻¹
        int pick = -1;
        double best = 1e-7;
        for (int j = 0; j < n; ++j) {
            bool basic = false;
            for (int k : t.basis) basic = basic || k == j;
            if (basic) continue;
            const double v = std::abs(row.dot(t.A.col(j)));
            if (v > best) best = v, pick = j;
        }
        if (pick >= 0) {
            t.basis[r] = pick;
            ++r;
            continue;
        }
        // redundant: the artificial's own row carries the slack; drop it
        const int art_row = t.basis[r] - n;
        int local = -1;
        for (int i = 0; i < rows; ++i)
            if (kept[i] == art_row) local = i;
        if (local < 0) throw NumericalFailure("solve_lp: lost track of a redundant row", 0.0);
        Eigen::MatrixXd A2(rows - 1, t.A.cols());
        Eigen::VectorXd b2(rows - 1);
        for (int i = 0, k = 0; i < rows; ++i) {
            if (i == local) continue;
            A2.row(k) = t.A.row(i);
            b2(k) = t.b(i);
            ++k;
        }
        t.A = std::move(A2);
        t.b = std::move(b2);
        kept.erase(kept.begin() + local);
        t.basis.erase(t.basis.begin() + r);
    }

    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n + m);
    c2.head(n) = c;
    const Outcome out = t.basis.empty() ? Outcome::Optimal : iterate(t, c2, n, max_iterations);
    res.iterations = t.iterations;
    if (out == Outcome::Unbounded) {
        res.status = LpResult::Status::Unbounded;
        return res;
    }
    if (out == Outcome::IterationLimit) return res;

    const int rows = static_cast<int>(t.A.rows());
    if (rows > 0) {
        Eigen::MatrixXd B(rows, rows);
        Eigen::VectorXd cB(rows);
        for (int i = 0; i < rows; ++i) {
            B.col(i) = t.A.col(t.basis[i]);
            cB(i) = c2(t.basis[i]);
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        const Eigen::VectorXd xB = lu.solve(t.b);
        const Eigen::VectorXd y = lu.transpose().solve(cB);
        for (int i = 0; i < rows; ++i) res.x(t.basis[i]) = std::max(xB(i), 0.0);
        for (int i = 0; i < rows; ++i) res.y(kept[i]) = sign[kept[i]] * y(i);
    }
    res.objective = c.dot(res.x);
    res.status = LpResult::Status::Optimal;
    return res;
}

}  // namespace michell
