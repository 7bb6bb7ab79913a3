#include "michell/energy.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <cmath>
#include <vector>

#include "michell/errors.hpp"

namespace michell {

std::vector<double> density_map(const StressField& f, DensityKind kind, double lambda) {
    const Grid& g = f.grid();
    std::vector<double> out(g.num_cells());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = g.dim() == 2 ? evaluate_density<2>(kind, f.cell_tensor<2>(i), lambda)
                              : evaluate_density<3>(kind, f.cell_tensor<3>(i), lambda);
    return out;
}

double energy(const StressField& f, DensityKind kind, double lambda) {
    double s = 0.0;
    for (double v : density_map(f, kind, lambda)) s += v;
    return s * f.grid().cell_volume();
}

double hminus1_norm(const VectorField& g) {
    const Grid& grid = g.grid();
    double total = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
        const auto& ga = g.component(a);
        bool any = false;
        for (double x : ga) any = any || x != 0.0;
        if (!any) continue;

        const Lattice l = grid.face_lattice(a);
        const auto n = static_cast<Eigen::Index>(l.size());
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(l.size() * 7);
        for (std::size_t i = 0; i < l.size(); ++i) {
            const auto p = l.coords(i);
            double diag = 1.0;
            for (int b = 0; b < grid.dim(); ++b) {
                const double w = 1.0 / (l.h[b] * l.h[b]);
                diag += 2.0 * w;
                for (int d : {-1, 1}) {
                    auto q = p;
                    q[b] += d;
                    if (q[b] < 0 || q[b] >= l.n[b]) continue;
                    trips.emplace_back(static_cast<Eigen::Index>(i),
                                       static_cast<Eigen::Index>(l.index(q[0], q[1], q[2])), -w);
                }
            }
            trips.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), diag);
        }
        Eigen::SparseMatrix<double> A(n, n);
        A.setFromTriplets(trips.begin(), trips.end());

        const Eigen::Map<const Eigen::VectorXd> rhs(ga.data(), n);
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(1e-12);
        cg.setMaxIterations(20 * static_cast<int>(std::sqrt(static_cast<double>(n))) + 200);
        cg.compute(A);
        const Eigen::VectorXd x = cg.solve(rhs);
        if (cg.info() != Eigen::Success)
            throw NumericalFailure("hminus1_norm: conjugate gradients did not converge", cg.error());
        total += rhs.dot(x);
    }
    return std::sqrt(total * grid.cell_volume());
}

}  // namespace michell
