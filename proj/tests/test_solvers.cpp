#include <doctest.h>

#include <cmath>
#include <random>

#include "michell/energy.hpp"
#include "michell/errors.hpp"
#include "michell/loads.hpp"
#include "michell/solvers.hpp"
#include "michell/truss.hpp"

using namespace michell;
using doctest::Approx;

namespace {

const double kSqrt2 = std::sqrt(2.0);

StressField random_stress(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    StressField s(g);
    for (int c = 0; c < s.num_components(); ++c)
        for (double& x : s.component(c)) x = nd(rng);
    return s;
}

VectorField random_vector(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    VectorField v(g);
    for (int a = 0; a < g.dim(); ++a)
        for (double& x : v.component(a)) x = nd(rng);
    return v;
}

double relative_residual(const StressField& s, const VectorField& g) {
    VectorField r = divergence(s);
    r += g;
    return norm(r) / std::max(norm(g), 1e-300);
}

VectorField uniaxial_load(const Grid& g) {
    LoadSpec spec;
    spec.dim = g.dim();
    Vec3 hi{0, 1, g.dim() == 3 ? 1.0 : 0.0};
    spec.tractions.push_back({0, false, {0, 0, 0}, hi, {-1, 0, 0}});
    spec.tractions.push_back({0, true, {0, 0, 0}, hi, {1, 0, 0}});
    return assemble_load(spec, g, 0.0);
}

struct RoofCase {
    Grid grid;
    VectorField load;
    StressField competitor;
};

RoofCase roof_case(int n) {
    const GroundStructure roof({{0, 0}, {1, 1}, {2, 0}}, {{0, 1}, {1, 2}}, {0, 2});
    const TrussDesign d{{kSqrt2 / 2, kSqrt2 / 2}};
    const Grid g(2, {n, n, 1}, {-0.25, -0.75, 0}, {2.25, 1.75, 1});
    const double eps = 4 * g.spacing(0);
    return {g, assemble_load(truss_load_spec(roof, d, {{1, {0, -1}}}), g, eps),
            rasterize_truss(roof, d, g, Mollifier(1, eps))};
}

}  // namespace

TEST_CASE("balance_load removes exactly the rigid-motion part") {
    std::mt19937_64 rng(3);
    for (const Grid& g : {Grid::square(12), Grid(2, {10, 6, 1}, {0, -1, 0}, {2, 0.5, 1}), Grid::cube(5)}) {
        VectorField v = random_vector(g, rng);
        const double removed = balance_load(v);
        CHECK(removed > 0.0);
        for (const auto& r : rigid_motions(g)) CHECK(std::abs(inner(r, v)) <= 1e-12 * norm(r) * norm(v));
        const VectorField again = v;
        CHECK(balance_load(v) <= 1e-12);
        VectorField d = v;
        d -= again;
        CHECK(norm(d) <= 1e-12 * norm(v));
    }
}

TEST_CASE("equilibrium projector") {
    std::mt19937_64 rng(11);
    for (const Grid& g : {Grid::square(16), Grid(2, {12, 20, 1}, {-1, 0, 0}, {1, 1, 1}), Grid::cube(6)}) {
        const EquilibriumProjector proj(g);
        VectorField load = random_vector(g, rng);
        balance_load(load);

        StressField s = random_stress(g, rng);
        proj.project(s, load);
        CHECK(relative_residual(s, load) <= 1e-10);
        // idempotent
        StressField again = s;
        proj.project(again, load);
        again -= s;
        CHECK(norm(again) <= 1e-10 * norm(s));

        // with zero load it is an orthogonal projector: self-adjoint
        const VectorField zero(g);
        StressField a = random_stress(g, rng), b = random_stress(g, rng);
        StressField pa = a, pb = b;
        proj.project(pa, zero);
        proj.project(pb, zero);
        CHECK(inner(pa, b) == Approx(inner(a, pb)).epsilon(1e-10));
        // and the removed part is a symmetric gradient, orthogonal to div-free fields
        StressField removed = a;
        removed -= pa;
        CHECK(std::abs(inner(removed, pb)) <= 1e-10 * norm(removed) * norm(pb));
    }
    const EquilibriumProjector proj(Grid::square(8));
    StressField wrong(Grid::square(9));
    CHECK_THROWS_AS(proj.project(wrong, VectorField(Grid::square(8))), ShapeMismatch);
}

TEST_CASE("limit solver: uniaxial tension") {
    for (const Grid& g : {Grid::square(64), Grid::cube(8)}) {
        const FieldSolution s = solve_limit_field(g, uniaxial_load(g));
        CHECK(s.report.objective == Approx(2.0).epsilon(0.02));
        CHECK(s.report.residual <= 1e-6);
        CHECK(s.report.converged);
        // the field is e₁⊗e₁
        for (double x : s.field.diag(0)) CHECK(x == Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(s.field.diag(1)[g.num_cells() / 2]) <= 1e-6);
    }
}

TEST_CASE("limit solver: zero load and homogeneity") {
    const Grid g = Grid::square(16);
    const FieldSolution z = solve_limit_field(g, VectorField(g));
    CHECK(z.report.objective == 0.0);
    CHECK(z.field.max_cell_norm() == 0.0);

    const RoofCase rc = roof_case(32);
    SolveOptions opts;
    opts.max_iterations = 300;
    const EquilibriumProjector proj(rc.grid);
    const FieldSolution one = solve_limit_field(proj, rc.load, opts);
    VectorField scaled = rc.load;
    scaled *= 3.0;
    const FieldSolution three = solve_limit_field(proj, scaled, opts);
    CHECK(three.report.objective == Approx(3.0 * one.report.objective).epsilon(1e-8));
}

TEST_CASE("limit solver beats the rasterized truss competitor") {
    const RoofCase rc = roof_case(64);
    const double competitor = energy(rc.competitor, DensityKind::HLimit);
    CHECK(competitor == Approx(4.0).epsilon(0.05));
    SolveOptions opts;
    opts.max_iterations = 400;
    const FieldSolution s = solve_limit_field(rc.grid, rc.load, opts);
    CHECK(s.report.objective <= 1.02 * competitor);
    CHECK(s.report.objective >= 3.6);  // bumps shorten the bars by at most ~ε
    CHECK(s.report.residual <= 1e-6);
    CHECK(s.report.iterations <= 400);
}

TEST_CASE("finite-lambda solver") {
    const RoofCase rc = roof_case(32);
    const EquilibriumProjector proj(rc.grid);
    SolveOptions opts;
    opts.max_iterations = 300;
    const FieldSolution limit = solve_limit_field(proj, rc.load, opts);

    SUBCASE("low-branch identity for the initial energy") {
        const double lam = 1e4;
        double det = 0.0;
        for (std::size_t i = 0; i < rc.grid.num_cells(); ++i) {
            const auto t = limit.field.cell_tensor<2>(i);
            REQUIRE(h_limit(t) / 2 <= std::sqrt(lam));  // every cell in the low branch
            det += std::abs(t.det()) * rc.grid.cell_volume();
        }
        const double expected = energy(limit.field, DensityKind::HLimit) - 2.0 / std::sqrt(lam) * det;
        CHECK(energy(limit.field, DensityKind::HLambda, lam) == Approx(expected).epsilon(1e-12));
    }

    SUBCASE("descent from the limit field") {
        for (double lam : {1.0, 10.0, 100.0, 1e4}) {
            const double init = energy(limit.field, DensityKind::HLambda, lam);
            const FieldSolution f = solve_finite_lambda(proj, rc.load, Lambda(lam), opts, limit.field);
            CHECK(f.report.objective <= init + 1e-8);
            CHECK(f.report.objective == Approx(energy(f.field, DensityKind::HLambda, lam)).epsilon(1e-12));
            CHECK(f.report.residual <= 1e-6);
        }
    }

    SUBCASE("zero load") {
        const FieldSolution f =
            solve_finite_lambda(proj, VectorField(rc.grid), Lambda(100.0), opts, StressField(rc.grid));
        CHECK(f.report.objective == 0.0);
    }
}

TEST_CASE("finite-lambda solver: uniaxial") {
    const Grid g = Grid::square(32);
    const VectorField load = uniaxial_load(g);
    const FieldSolution limit = solve_limit_field(g, load);
    const FieldSolution f = solve_finite_lambda(g, load, Lambda(1e4), {}, limit.field);
    double det = 0.0;
    for (std::size_t i = 0; i < g.num_cells(); ++i) det += std::abs(f.field.cell_tensor<2>(i).det()) * g.cell_volume();
    CHECK(f.report.objective >= 2.0 - 2e-2 * det - 1e-9);
    CHECK(f.report.objective <= 2.0 * 1.05);
}

TEST_CASE("lambda sweep") {
    const Grid g = Grid::square(16);
    SolveOptions opts;
    opts.max_iterations = 200;
    SweepProblem zero{g, VectorField(g), 0.0};
    std::vector<double> secs;
    const ExperimentReport z = lambda_sweep(zero, {1e2, 1e3, 1e4}, opts, &secs);
    CHECK(z.rows().size() == 3);
    CHECK(secs.size() == 3);
    for (double e : z.column("energy")) CHECK(e == 0.0);

    SweepProblem uni{g, uniaxial_load(g), 2.0};
    const ExperimentReport u = lambda_sweep(uni, {1e2, 1e3, 1e4}, opts);
    const auto gap = u.column("gap");
    REQUIRE(gap.size() == 3);
    for (std::size_t i = 1; i < gap.size(); ++i) CHECK(gap[i] <= gap[i - 1] + 1e-6);
    for (double e : u.column("energy")) CHECK(e == Approx(2.0).epsilon(1e-6));
    const auto h = u.column("hminus1");
    CHECK(h[1] < h[0]);

    CHECK_THROWS_WITH_AS(lambda_sweep(uni, {100.0, 10.0}, opts), "lambda list not ascending", InvalidInput);
}

TEST_CASE("solve options validation") {
    SolveOptions o;
    o.tolerance = 0.0;
    CHECK_THROWS_AS(o.validate(), InvalidInput);
    o = {};
    o.primal_step = 2.0;
    o.dual_step = 0.6;
    CHECK_THROWS_AS(o.validate(), InvalidInput);
    o = {};
    o.check_every = 0;
    CHECK_THROWS_AS(o.validate(), InvalidInput);
}
