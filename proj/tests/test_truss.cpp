#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "michell/energy.hpp"
#include "michell/errors.hpp"
#include "michell/simplex.hpp"
#include "michell/solvers.hpp"
#include "michell/truss.hpp"

using namespace michell;
using doctest::Approx;

namespace {

const double kSqrt2 = std::sqrt(2.0);

GroundStructure single_bar() { return GroundStructure({{0, 0}, {1, 0}}, {{0, 1}}); }

GroundStructure roof() { return GroundStructure({{0, 0}, {1, 1}, {2, 0}}, {{0, 1}, {1, 2}}, {0, 2}); }

// Force on every node from the f_ij formula, summed bar by bar.
std::vector<Point2> direct_forces(const GroundStructure& gs, const std::vector<double>& w) {
    std::vector<Point2> f(gs.num_nodes(), Point2{0, 0});
    for (int k = 0; k < gs.num_bars(); ++k) {
        const auto [i, j, len, dir] = gs.bars()[k];
        (void)dir;
        const auto& xi = gs.nodes()[i];
        const auto& xj = gs.nodes()[j];
        for (int a = 0; a < 2; ++a) {
            const double e = (xi[a] - xj[a]) / std::hypot(xi[0] - xj[0], xi[1] - xj[1]);
            f[i][a] += w[k] * e;
            f[j][a] -= w[k] * e;
        }
    }
    return f;
}

// Exhaustive LP oracle: try every basis of m columns, keep the best feasible vertex.
double brute_force_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
    double best = INFINITY;
    std::vector<int> idx(m);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == m) {
            Eigen::MatrixXd B(m, m);
            for (int i = 0; i < m; ++i) B.col(i) = A.col(idx[i]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
            if (lu.rank() < m) return;
            const Eigen::VectorXd x = lu.solve(b);
            if (x.minCoeff() < -1e-10) return;
            double v = 0.0;
            for (int i = 0; i < m; ++i) v += c(idx[i]) * x(i);
            best = std::min(best, v);
            return;
        }
        for (int j = start; j < n; ++j) {
            idx[depth] = j;
            rec(j + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST_CASE("ground structure validation") {
    CHECK_THROWS_AS(GroundStructure({{0, 0}, {0, 0}}, {{0, 1}}), InvalidInput);
    CHECK_THROWS_AS(GroundStructure({{0, 0}, {1, 0}}, {{0, 1}, {1, 0}}), InvalidInput);
    CHECK_THROWS_AS(GroundStructure({{0, 0}, {1, 0}}, {{0, 2}}), InvalidInput);
    CHECK_THROWS_AS(GroundStructure({{0, 0}, {1, 0}}, {{0, 1}}, {5}), InvalidInput);
    const auto gs = GroundStructure::complete({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    CHECK(gs.num_bars() == 6);
    CHECK(gs.bars()[2].length == Approx(kSqrt2));
}

TEST_CASE("equilibrium matrix") {
    const Eigen::MatrixXd B = equilibrium_matrix(single_bar());
    REQUIRE(B.rows() == 4);
    CHECK(B(0, 0) == -1.0);
    CHECK(B(1, 0) == 0.0);
    CHECK(B(2, 0) == 1.0);
    CHECK(B(3, 0) == 0.0);

    // supports drop rows
    CHECK(equilibrium_matrix(roof()).rows() == 2);
    CHECK(equilibrium_matrix(roof(), true).rows() == 6);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Point2> nodes;
        for (int i = 0; i < 6; ++i) nodes.push_back({u(rng), u(rng)});
        const auto gs = GroundStructure::complete(nodes);
        const Eigen::MatrixXd Bf = equilibrium_matrix(gs, true);
        // rigid translation: Bᵀ t = 0 per bar
        Eigen::VectorXd t(2 * gs.num_nodes());
        for (int i = 0; i < gs.num_nodes(); ++i) t(2 * i) = 0.3, t(2 * i + 1) = -1.7;
        CHECK((Bf.transpose() * t).cwiseAbs().maxCoeff() <= 1e-14);
        // action matches direct per-bar summation
        std::vector<double> w(gs.num_bars());
        for (double& x : w) x = u(rng);
        const Eigen::VectorXd Bw = Bf * Eigen::Map<Eigen::VectorXd>(w.data(), w.size());
        const auto f = direct_forces(gs, w);
        for (int i = 0; i < gs.num_nodes(); ++i)
            for (int a = 0; a < 2; ++a) CHECK(Bw(2 * i + a) == Approx(f[i][a]).epsilon(1e-12));
        // translated copies act identically
        const Eigen::MatrixXd Bt = equilibrium_matrix(gs.translated({5.0, -3.0}), true);
        CHECK((Bt - Bf).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("weight and residual") {
    CHECK(truss_weight(single_bar(), {{-1.0}}) == 1.0);
    CHECK(truss_weight(single_bar(), {{0.0}}) == 0.0);
    CHECK(truss_weight(roof(), {{kSqrt2 / 2, kSqrt2 / 2}}) == Approx(2.0));
    CHECK(truss_weight(roof().scaled(3.0), {{kSqrt2 / 2, kSqrt2 / 2}}) == Approx(6.0));
    CHECK(truss_weight(roof().translated({1, 2}), {{kSqrt2 / 2, 1.0}}) ==
          Approx(truss_weight(roof(), {{kSqrt2 / 2, 1.0}})));

    const PointLoadSet pull{{0, {-1, 0}}, {1, {1, 0}}};
    CHECK(truss_residual(single_bar(), {{-1.0}}, pull) <= 1e-15);
    CHECK(truss_residual(single_bar(), {{0.0}}, {{0, {-1, 0}}, {1, {1, 2.5}}}) == 2.5);
    CHECK(truss_residual(roof(), {{kSqrt2 / 2, kSqrt2 / 2}}, {{1, {0, -1}}}) <= 1e-15);
    CHECK_THROWS_AS(truss_weight(roof(), {{1.0}}), ShapeMismatch);

    const auto react = support_reactions(roof(), {{kSqrt2 / 2, kSqrt2 / 2}}, {{1, {0, -1}}});
    REQUIRE(react.size() == 2);
    CHECK(react[0].force[0] == Approx(0.5));
    CHECK(react[0].force[1] == Approx(0.5));
    CHECK(react[1].force[0] == Approx(-0.5));
    CHECK(react[1].force[1] == Approx(0.5));
}

TEST_CASE("simplex agrees with exhaustive vertex enumeration") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int feasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 3, n = 8;
        Eigen::MatrixXd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = u(rng);
        Eigen::VectorXd x0(n);
        for (int j = 0; j < n; ++j) x0(j) = std::max(0.0, u(rng));
        const Eigen::VectorXd b = A * x0;
        Eigen::VectorXd c(n);
        for (int j = 0; j < n; ++j) c(j) = 0.2 + std::abs(u(rng));
        const LpResult r = solve_lp(A, b, c);
        REQUIRE(r.status == LpResult::Status::Optimal);
        CHECK(r.objective == Approx(brute_force_lp(A, b, c)).epsilon(1e-9));
        CHECK((A * r.x - b).cwiseAbs().maxCoeff() <= 1e-9);
        // strong duality and dual feasibility
        CHECK(b.dot(r.y) == Approx(r.objective).epsilon(1e-9));
        CHECK((A.transpose() * r.y - c).maxCoeff() <= 1e-9);
        ++feasible;
    }
    CHECK(feasible == 200);

    // a redundant row and an infeasible system
    Eigen::MatrixXd A(3, 3);
    A << 1, 1, 0, 0, 1, 1, 1, 2, 1;
    Eigen::VectorXd b(3);
    b << 1, 1, 2;
    const LpResult r = solve_lp(A, b, Eigen::Vector3d(1, 2, 1));
    CHECK(r.status == LpResult::Status::Optimal);
    CHECK(r.objective == Approx(2.0));
    b(2) = 3;
    CHECK(solve_lp(A, b, Eigen::Vector3d(1, 2, 1)).status == LpResult::Status::Infeasible);
}

TEST_CASE("truss LP: single bar, roof, zero load") {
    const auto one = solve_truss_lp(single_bar(), {{0, {-1, 0}}, {1, {1, 0}}});
    CHECK(one.report.objective == Approx(1.0).epsilon(1e-12));
    CHECK(one.design.w[0] == Approx(-1.0));
    CHECK(one.report.residual <= 1e-12);

    const auto r = solve_truss_lp(roof(), {{1, {0, -1}}});
    CHECK(r.report.objective == Approx(2.0).epsilon(1e-12));
    CHECK(r.design.w[0] == Approx(kSqrt2 / 2));
    CHECK(r.design.w[1] == Approx(kSqrt2 / 2));
    CHECK(std::abs(r.dual_objective - r.report.objective) <= 1e-9);
    CHECK(r.dual_infeasibility <= 1e-9);

    const auto z = solve_truss_lp(roof(), {});
    CHECK(z.report.objective == 0.0);
    for (double w : z.design.w) CHECK(w == 0.0);

    // a load on a node no bar reaches
    const GroundStructure lonely({{0, 0}, {1, 0}, {0, 1}}, {{0, 1}});
    CHECK_THROWS_AS(solve_truss_lp(lonely, {{2, {1, 0}}, {0, {-1, 0}}}), Infeasible);
}

TEST_CASE("truss LP on dense ground structures matches the exhaustive oracle") {
    // uniaxial pull on a 3×3 node grid: every bar present
    std::vector<Point2> nodes;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) nodes.push_back({0.5 * i, 0.5 * j});
    const auto gs = GroundStructure::complete(nodes);
    PointLoadSet loads;
    const double share[3] = {0.25, 0.5, 0.25};
    for (int j = 0; j < 3; ++j) {
        loads.push_back({3 * j, {-share[j], 0}});
        loads.push_back({3 * j + 2, {share[j], 0}});
    }
    const auto sol = solve_truss_lp(gs, loads);
    CHECK(sol.report.objective == Approx(1.0).epsilon(1e-10));
    CHECK(sol.report.residual <= 1e-10);
    CHECK(std::abs(sol.dual_objective - sol.report.objective) <= 1e-9);

    // roof apex over a complete 5-node structure: still weight 2
    const auto dense = GroundStructure::complete({{0, 0}, {1, 1}, {2, 0}, {1, 0}, {1, 0.5}}, {0, 2});
    const auto rd = solve_truss_lp(dense, {{1, {0, -1}}});
    CHECK(rd.report.objective == Approx(2.0).epsilon(1e-10));
    const Eigen::MatrixXd B = equilibrium_matrix(dense);
    Eigen::MatrixXd A(B.rows(), 2 * B.cols());
    A << B, -B;
    Eigen::VectorXd c(2 * B.cols());
    for (int k = 0; k < dense.num_bars(); ++k) c(k) = c(k + dense.num_bars()) = dense.bars()[k].length;
    CHECK(rd.report.objective == Approx(brute_force_lp(A, -load_vector(dense, {{1, {0, -1}}}), c)));
}

TEST_CASE("rasterized horizontal bar") {
    const Grid g(2, {64, 32, 1}, {-0.5, -0.5, 0}, {1.5, 0.5, 1});
    const auto gs = single_bar();
    const StressField exact = rasterize_truss_exact(gs, {{1.0}}, g);
    const StressField f = rasterize_truss(gs, {{1.0}}, g, Mollifier(1, 4 * g.spacing(1)));
    for (const StressField* s : {&exact, &f}) {
        for (double x : s->diag(1)) CHECK(x == 0.0);
        for (double x : s->shear(0)) CHECK(x == 0.0);
    }
    // cross sections x = const inside the bar carry exactly w
    const Lattice cl = g.cell_lattice();
    for (int i = 17; i < 47; ++i) {
        double col = 0.0, col_exact = 0.0;
        for (int j = 0; j < 32; ++j) {
            col += f.diag(0)[cl.index(i, j, 0)] * g.spacing(1);
            col_exact += exact.diag(0)[cl.index(i, j, 0)] * g.spacing(1);
        }
        CHECK(col == Approx(1.0).epsilon(1e-12));
        CHECK(col_exact == Approx(1.0).epsilon(1e-12));
    }
    // y = 0 is a cell boundary: the exact deposit is shared by two rows
    CHECK(exact.diag(0)[cl.index(20, 15, 0)] == Approx(0.5 / g.spacing(1)));
    CHECK(exact.diag(0)[cl.index(20, 16, 0)] == Approx(0.5 / g.spacing(1)));
    CHECK(energy(f, DensityKind::HLimit) == Approx(2.0).epsilon(1e-12));
    for (std::size_t i = 0; i < g.num_cells(); ++i) CHECK(std::abs(f.cell_tensor<2>(i).det()) <= 1e-12);

    CHECK_THROWS_AS(rasterize_truss(gs, {{1.0}}, g, Mollifier(1, g.spacing(0))), InvalidInput);
}

TEST_CASE("rasterized diagonal bars: weight and energy") {
    const Grid g(2, {128, 128, 1}, {-0.25, -0.75, 0}, {2.25, 1.75, 1});
    const TrussDesign d{{kSqrt2 / 2, kSqrt2 / 2}};
    const StressField f = rasterize_truss(roof(), d, g, Mollifier(1, 4 * g.spacing(0)));
    const double w = truss_weight(roof(), d);
    CHECK(energy(f, DensityKind::HLimit) == Approx(2.0 * w).epsilon(0.05));
    CHECK(energy(f, DensityKind::TotalVariation) == Approx(w).epsilon(0.05));
    // the line measure has exact total mass Σ|w|L in each diagonal component
    const StressField e = rasterize_truss_exact(roof(), d, g);
    double m11 = 0.0;
    for (double x : e.diag(0)) m11 += x * g.cell_volume();
    CHECK(m11 == Approx(w / 2).epsilon(1e-12));
}

TEST_CASE("rasterized truss balances its load weakly as the grid refines") {
    const TrussDesign d{{kSqrt2 / 2, kSqrt2 / 2}};
    const PointLoadSet loads{{1, {0, -1}}};
    const LoadSpec spec = truss_load_spec(roof(), d, loads);
    CHECK(spec.points.size() == 3);
    // ⟨div σ + g, φ⟩ for a smooth φ vanishes as ε ∝ h → 0
    for (int n : {32, 64, 128, 256}) {
        const Grid g(2, {n, n, 1}, {-0.25, -0.75, 0}, {2.25, 1.75, 1});
        const double eps = 4 * g.spacing(0);
        VectorField r = divergence(rasterize_truss(roof(), d, g, Mollifier(1, eps)));
        r += assemble_load(spec, g, eps);
        double pair = 0.0;
        for (int a = 0; a < 2; ++a) {
            const Lattice l = g.face_lattice(a);
            for (std::size_t i = 0; i < l.size(); ++i) {
                const auto c = l.coords(i);
                const double x = l.position(0, c[0]), y = l.position(1, c[1]);
                const double phi = a == 0 ? std::sin(x + 0.3 * y) : std::cos(2 * y - x);
                pair += r.component(a)[i] * phi * g.cell_volume();
            }
        }
        CHECK(std::abs(pair) <= 0.02 * eps);
    }
}

TEST_CASE("truss file format") {
    std::istringstream in(
        "# roof\n"
        "nodes\n0 0 0\n1 1 1\n2 2 0\n"
        "bars\n0 1\n1 2\n"
        "loads\n1 0 -1\n"
        "supports\n0 2\n");
    const auto inst = read_truss_instance(in);
    CHECK(inst.structure.num_nodes() == 3);
    CHECK(inst.structure.num_bars() == 2);
    CHECK(inst.structure.is_support(2));
    CHECK(inst.loads.size() == 1);

    std::istringstream all("nodes\n0 0 0\n1 1 0\n2 0 1\nbars all\n");
    CHECK(read_truss_instance(all).structure.num_bars() == 3);

    std::istringstream bad("nodes\n0 0 0\n2 1 0\n");
    CHECK_THROWS_WITH_AS(read_truss_instance(bad), doctest::Contains("line 3"), InvalidInput);

    std::ostringstream out;
    write_truss_design(out, inst.structure, {{0.5, -0.25}});
    CHECK(out.str().rfind("i,j,length,w\n0,1,", 0) == 0);
}
