#include <Eigen/LU>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "michell/energy.hpp"
#include "michell/errors.hpp"
#include "michell/integrands.hpp"
#include "michell/solvers.hpp"

namespace michell {

namespace {

using Clock = std::chrono::steady_clock;
using SpMat = Eigen::SparseMatrix<double>;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Flat layout of the face unknowns: component a occupies [offset[a], offset[a+1]).
std::array<std::size_t, 4> face_offsets(const Grid& g) {
    std::array<std::size_t, 4> off{};
    for (int a = 0; a < 3; ++a) off[a + 1] = off[a] + (a < g.dim() ? g.face_lattice(a).size() : 0);
    return off;
}

Eigen::VectorXd flatten(const VectorField& v) {
    const auto off = face_offsets(v.grid());
    Eigen::VectorXd x(off[3]);
    for (int a = 0; a < v.grid().dim(); ++a)
        for (std::size_t i = 0; i < v.component(a).size(); ++i) x(off[a] + i) = v.component(a)[i];
    return x;
}

VectorField unflatten(const Grid& g, const Eigen::VectorXd& x) {
    VectorField v(g);
    const auto off = face_offsets(g);
    for (int a = 0; a < g.dim(); ++a)
        for (std::size_t i = 0; i < v.component(a).size(); ++i) v.component(a)[i] = x(off[a] + i);
    return v;
}

// √M·e(u) as a sparse matrix (rows: stress slots, shear rows scaled by √2), so
// that Eᵀ E = −div∘e in the plain face coordinates.
SpMat weighted_sym_gradient(const Grid& g) {
    const auto off = face_offsets(g);
    const Lattice cells = g.cell_lattice();
    std::vector<Eigen::Triplet<double>> trip;
    std::size_t row = 0;
    for (int a = 0; a < g.dim(); ++a) {
        const Lattice fl = g.face_lattice(a);
        const double ha = g.spacing(a);
        for (std::size_t idx = 0; idx < cells.size(); ++idx, ++row) {
            auto p = cells.coords(idx);
            trip.emplace_back(row, off[a] + fl.index(p[0], p[1], p[2]), -1.0 / ha);
            p[a] += 1;
            trip.emplace_back(row, off[a] + fl.index(p[0], p[1], p[2]), 1.0 / ha);
        }
    }
    const double w = std::sqrt(2.0) * 0.5;
    for (int s = 0; s < g.num_shear(); ++s) {
        const auto [a, b] = Grid::shear_axes(s);
        const Lattice sl = g.shear_lattice(a, b);
        const Lattice fa = g.face_lattice(a);
        const Lattice fb = g.face_lattice(b);
        for (std::size_t idx = 0; idx < sl.size(); ++idx, ++row) {
            const auto m = sl.coords(idx);
            auto q = m;
            q[a] = m[a] + 1;
            q[b] = m[b] + 1;
            trip.emplace_back(row, off[a] + fa.index(q[0], q[1], q[2]), w / g.spacing(b));
            q[b] = m[b];
            trip.emplace_back(row, off[a] + fa.index(q[0], q[1], q[2]), -w / g.spacing(b));
            auto r = m;
            r[a] = m[a] + 1;
            r[b] = m[b] + 1;
            trip.emplace_back(row, off[b] + fb.index(r[0], r[1], r[2]), w / g.spacing(a));
            r[a] = m[a];
            trip.emplace_back(row, off[b] + fb.index(r[0], r[1], r[2]), -w / g.spacing(a));
        }
    }
    SpMat E(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(off[3]));
    E.setFromTriplets(trip.begin(), trip.end());
    return E;
}

// Face unknowns to pin so that the rigid motions restricted to them have full
// rank; pinning exactly that many removes the null space of −div∘e.
std::vector<std::size_t> pinned_dofs(const Grid& g) {
    const auto modes = rigid_motions(g);
    const int m = static_cast<int>(modes.size());
    std::vector<Eigen::VectorXd> flat;
    for (const auto& r : modes) flat.push_back(flatten(r));
    const auto off = face_offsets(g);

    std::vector<std::size_t> candidates;
    for (int a = 0; a < g.dim(); ++a) {
        const std::size_t n = off[a + 1] - off[a];
        for (std::size_t i : {std::size_t{0}, n - 1, n / 2, n / 3, (2 * n) / 3}) candidates.push_back(off[a] + i);
    }
    std::vector<std::size_t> pinned;
    for (std::size_t c : candidates) {
        if (static_cast<int>(pinned.size()) == m) break;
        Eigen::MatrixXd R(pinned.size() + 1, m);
        for (std::size_t r = 0; r <= pinned.size(); ++r) {
            const std::size_t dof = r < pinned.size() ? pinned[r] : c;
            for (int k = 0; k < m; ++k) R(r, k) = flat[k](dof);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(R);
        lu.setThreshold(1e-10);
        if (lu.rank() == static_cast<int>(pinned.size()) + 1) pinned.push_back(c);
    }
    if (static_cast<int>(pinned.size()) != m)
        throw NumericalFailure("could not pin the rigid motions", static_cast<double>(pinned.size()));
    return pinned;
}

}  // namespace

// ---------------------------------------------------------------------------

double balance_load(VectorField& g) {
    const auto modes = rigid_motions(g.grid());
    const int m = static_cast<int>(modes.size());
    Eigen::MatrixXd G(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        rhs(i) = inner(modes[i], g);
        for (int j = 0; j < m; ++j) G(i, j) = inner(modes[i], modes[j]);
    }
    const Eigen::VectorXd c = G.ldlt().solve(rhs);
    const double before = norm(g);
    VectorField removed(g.grid());
    for (int i = 0; i < m; ++i) {
        VectorField t = modes[i];
        t *= c(i);
        removed += t;
    }
    g -= removed;
    return before > 0.0 ? norm(removed) / before : 0.0;
}

struct EquilibriumProjector::Impl {
    Grid grid;
    std::vector<Eigen::Index> free_index;  // full face dof → reduced index, −1 if pinned
    Eigen::Index reduced = 0;
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;

    explicit Impl(const Grid& g) : grid(g) {}
};

EquilibriumProjector::EquilibriumProjector(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {
    const SpMat E = weighted_sym_gradient(grid);
    const SpMat K = SpMat(E.transpose()) * E;
    const auto pins = pinned_dofs(grid);

    const Eigen::Index n = K.rows();
    impl_->free_index.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t p : pins) impl_->free_index[p] = -1;
    Eigen::Index k = 0;
    for (auto& f : impl_->free_index)
        if (f >= 0) f = k++;
    impl_->reduced = k;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(K.nonZeros()));
    for (Eigen::Index col = 0; col < K.outerSize(); ++col)
        for (SpMat::InnerIterator it(K, col); it; ++it) {
            const auto r = impl_->free_index[static_cast<std::size_t>(it.row())];
            const auto c = impl_->free_index[static_cast<std::size_t>(it.col())];
            if (r >= 0 && c >= 0 && r >= c) trip.emplace_back(r, c, it.value());
        }
    SpMat Kr(k, k);
    Kr.setFromTriplets(trip.begin(), trip.end());
    impl_->ldlt.compute(Kr);
    if (impl_->ldlt.info() != Eigen::Success)
        throw NumericalFailure("equilibrium factorization failed", 0.0);
}

EquilibriumProjector::~EquilibriumProjector() = default;
EquilibriumProjector::EquilibriumProjector(EquilibriumProjector&&) noexcept = default;
EquilibriumProjector& EquilibriumProjector::operator=(EquilibriumProjector&&) noexcept = default;

const Grid& EquilibriumProjector::grid() const { return impl_->grid; }

void EquilibriumProjector::project(StressField& sigma, const VectorField& g) const {
    if (!(sigma.grid() == impl_->grid) || !(g.grid() == impl_->grid))
        throw ShapeMismatch("project: field is not on the projector's grid");
    const double scale = std::max(norm(g), norm(divergence(sigma)));
    // one refinement sweep absorbs the round-off of the first solve
    for (int pass = 0; pass < 2; ++pass) {
        VectorField r = divergence(sigma);
        r += g;
        const Eigen::VectorXd rf = flatten(r);
        if (pass > 0 && std::sqrt(rf.squaredNorm() * impl_->grid.cell_volume()) <= 1e-10 * scale) break;
        Eigen::VectorXd rr(impl_->reduced);
        for (std::size_t i = 0; i < impl_->free_index.size(); ++i)
            if (impl_->free_index[i] >= 0) rr(impl_->free_index[i]) = rf(static_cast<Eigen::Index>(i));
        const Eigen::VectorXd mu_r = impl_->ldlt.solve(rr);
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(rf.size());
        for (std::size_t i = 0; i < impl_->free_index.size(); ++i)
            if (impl_->free_index[i] >= 0) mu(static_cast<Eigen::Index>(i)) = mu_r(impl_->free_index[i]);
        sigma += sym_gradient(unflatten(impl_->grid, mu));
    }
}

// ---------------------------------------------------------------------------

namespace {

// Cell-tensor space: dim diagonal arrays followed by the shear arrays, all on
// the cell lattice.
using CellField = std::vector<std::vector<double>>;

CellField apply_A(const StressField& s) {
    const Grid& g = s.grid();
    CellField out(static_cast<std::size_t>(s.num_components()));
    for (int a = 0; a < g.dim(); ++a) out[a] = s.diag(a);
    for (int k = 0; k < g.num_shear(); ++k) {
        out[g.dim() + k].assign(g.num_cells(), 0.0);
        average_shear_to_cells(g, k, s.shear(k), out[g.dim() + k]);
    }
    return out;
}

StressField apply_At(const Grid& g, const CellField& p) {
    StressField s(g);
    for (int a = 0; a < g.dim(); ++a) s.diag(a) = p[a];
    for (int k = 0; k < g.num_shear(); ++k) scatter_shear_from_cells(g, k, p[g.dim() + k], s.shear(k));
    return s;
}

double cell_norm(const Grid& g, const CellField& p) {
    double s = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
        const double w = static_cast<int>(c) < g.dim() ? 1.0 : 2.0;
        for (double x : p[c]) s += w * x * x;
    }
    return std::sqrt(s * g.cell_volume());
}

template <int N>
SymTensor<N> gather(const CellField& p, std::size_t i) {
    SymTensor<N> t;
    for (int a = 0; a < N; ++a) t(a, a) = p[a][i];
    for (int k = 0; k < (N == 2 ? 1 : 3); ++k) {
        const auto ax = Grid::shear_axes(k);
        t(ax[0], ax[1]) = p[N + k][i];
    }
    return t;
}

template <int N>
void scatter(CellField& p, std::size_t i, const SymTensor<N>& t) {
    for (int a = 0; a < N; ++a) p[a][i] = t(a, a);
    for (int k = 0; k < (N == 2 ? 1 : 3); ++k) {
        const auto ax = Grid::shear_axes(k);
        p[N + k][i] = t(ax[0], ax[1]);
    }
}

// ‖A‖ by power iteration on A*A (A maps into the cell-tensor space).
double operator_norm(const Grid& g, std::uint64_t seed) {
    StressField x(g);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (int c = 0; c < x.num_components(); ++c)
        for (double& v : x.component(c)) v = nd(rng);
    double est = 1.0;
    for (int it = 0; it < 30; ++it) {
        const double nx = norm(x);
        if (nx == 0.0) break;
        x *= 1.0 / nx;
        x = apply_At(g, apply_A(x));
        est = std::sqrt(norm(x));
    }
    return std::max(est, 1e-3);
}

template <int N>
void dual_prox_limit(CellField& y) {
    // prox of the conjugate of a 1-homogeneous density: Y − prox_h(Y, 1)
    for (std::size_t i = 0; i < y[0].size(); ++i) {
        const SymTensor<N> t = gather<N>(y, i);
        const SymTensor<N> p = prox_h_limit(t, 1.0);
        SymTensor<N> d;
        for (int a = 0; a < N; ++a)
            for (int b = a; b < N; ++b) d(a, b) = t(a, b) - p(a, b);
        scatter<N>(y, i, d);
    }
}

double relative_residual(const StressField& s, const VectorField& g) {
    VectorField r = divergence(s);
    r += g;
    const double ng = norm(g);
    return ng > 0.0 ? norm(r) / ng : norm(r);
}

bool stalled(double prev, double now, double tol) {
    const double scale = std::max(std::abs(now), std::abs(prev));
    return scale == 0.0 || std::abs(now - prev) <= tol * scale;
}

template <int N>
FieldSolution limit_pdhg(const EquilibriumProjector& proj, const VectorField& g, const SolveOptions& opts,
                         const StressField* init) {
    const Grid& grid = proj.grid();
    const double L = operator_norm(grid, opts.seed);
    // default steps: primal scale from the load, dual ball of radius ~2 per cell
    double tau = opts.primal_step, sig = opts.dual_step;
    StressField x = init ? *init : StressField(grid);
    proj.project(x, g);
    // primal/dual magnitude ratio; also makes the step balancing scale-free
    double ratio = 1.0;
    if (!(tau > 0.0 && sig > 0.0)) {
        const double xs = std::max(norm(x), 1e-12);
        const double ys = 2.0 * std::sqrt(static_cast<double>(N) * grid.num_cells() * grid.cell_volume());
        ratio = xs / ys;  // τ/σ
        tau = 0.95 * ratio / L;
        sig = 0.95 / (ratio * L);
    } else if (tau * sig * L * L >= 1.0) {
        throw InvalidInput("primal and dual steps violate τσ‖A‖² < 1");
    }
    const bool adaptive = !(opts.primal_step > 0.0 && opts.dual_step > 0.0);

    CellField y(static_cast<std::size_t>(x.num_components()), std::vector<double>(grid.num_cells(), 0.0));
    StressField xbar = x;
    StressField xsum(grid);
    double weight_sum = 0.0;

    FieldSolution best{x, {}};
    best.report.objective = energy(x, DensityKind::HLimit);
    double prev_obj = best.report.objective;
    int it = 0;
    bool converged = false;
    double alpha = 0.5;  // residual-balancing aggressiveness

    for (it = 1; it <= opts.max_iterations; ++it) {
        // dual: y ← prox_{σF*}(y + σ A x̄)
        const CellField ax = apply_A(xbar);
        const CellField y_old = y;
        for (std::size_t c = 0; c < y.size(); ++c)
            for (std::size_t i = 0; i < y[c].size(); ++i) y[c][i] += sig * ax[c][i];
        dual_prox_limit<N>(y);

        // primal: x ← Proj(x − τ A*y)
        StressField xn = x;
        StressField step = apply_At(grid, y);
        step *= -tau;
        xn += step;
        proj.project(xn, g);

        xbar = xn;
        xbar *= 2.0;
        xbar -= x;

        if (adaptive && it % 10 == 0) {
            // balance primal/dual residuals (Goldstein–Esser style)
            StressField dx = x;
            dx -= xn;
            CellField dy = y;
            for (std::size_t c = 0; c < y.size(); ++c)
                for (std::size_t i = 0; i < y[c].size(); ++i) dy[c][i] = y_old[c][i] - y[c][i];
            StressField pres = dx;
            pres *= 1.0 / tau;
            StressField aty = apply_At(grid, dy);
            StressField aty_t = aty;
            proj.project(aty_t, VectorField(grid));  // tangential part only
            pres -= aty_t;
            CellField dres = dy;
            const CellField adx = apply_A(dx);
            for (std::size_t c = 0; c < dres.size(); ++c)
                for (std::size_t i = 0; i < dres[c].size(); ++i) dres[c][i] = dy[c][i] / sig - adx[c][i];
            const double p = ratio * norm(pres), d = cell_norm(grid, dres);
            if (p > 2.0 * d) {
                tau /= 1.0 - alpha;
                sig *= 1.0 - alpha;
                alpha *= 0.95;
            } else if (d > 2.0 * p) {
                tau *= 1.0 - alpha;
                sig /= 1.0 - alpha;
                alpha *= 0.95;
            }
        }
        x = std::move(xn);

        xsum += x;
        weight_sum += 1.0;

        if (it % opts.check_every == 0 || it == opts.max_iterations) {
            const double e_last = energy(x, DensityKind::HLimit);
            StressField avg = xsum;
            avg *= 1.0 / weight_sum;
            const double e_avg = energy(avg, DensityKind::HLimit);
            if (e_last < best.report.objective) best.field = x, best.report.objective = e_last;
            if (e_avg < best.report.objective) best.field = std::move(avg), best.report.objective = e_avg;
            const double now = best.report.objective;
            if (stalled(prev_obj, now, opts.objective_tolerance)) {
                converged = true;
                break;
            }
            prev_obj = now;
        }
    }
    best.report.iterations = std::min(it, opts.max_iterations);
    best.report.residual = relative_residual(best.field, g);
    best.report.converged = converged && best.report.residual <= opts.tolerance;
    return best;
}

template <int N>
void prox_cells_lambda(CellField& q, double step, Lambda lambda) {
    for (std::size_t i = 0; i < q[0].size(); ++i) scatter<N>(q, i, prox_h_lambda(gather<N>(q, i), step, lambda));
}

constexpr double kPenaltyScale = 50.0;

template <int N>
FieldSolution lambda_admm(const EquilibriumProjector& proj, const VectorField& g, Lambda lambda,
                          const SolveOptions& opts, const StressField& init) {
    const Grid& grid = proj.grid();
    const double L = operator_norm(grid, opts.seed);
    StressField x = init;
    proj.project(x, g);

    FieldSolution best{x, {}};
    best.report.objective = energy(x, DensityKind::HLambda, lambda.value());
    // penalty ∝ 1/peak keeps the q-prox threshold well below the field scale
    double beta = opts.dual_step;
    if (!(beta > 0.0)) {
        const double peak = x.max_cell_norm();
        beta = peak > 0.0 ? kPenaltyScale / peak : 1.0;
    }
    const double step = 1.0 / (L * L);

    CellField ax = apply_A(x);
    // multiplier warm start: β(Ax − prox(Ax)), a subgradient at the prox point
    CellField q = ax;
    prox_cells_lambda<N>(q, 1.0 / beta, lambda);
    CellField y = ax;
    for (std::size_t c = 0; c < y.size(); ++c)
        for (std::size_t i = 0; i < y[c].size(); ++i) y[c][i] = beta * (ax[c][i] - q[c][i]);
    double prev_obj = best.report.objective;
    bool converged = false;
    int it = 0;
    for (it = 1; it <= opts.max_iterations; ++it) {
        // q ← prox_{h_λ/β}(A x + y/β)
        for (std::size_t c = 0; c < q.size(); ++c)
            for (std::size_t i = 0; i < q[c].size(); ++i) q[c][i] = ax[c][i] + y[c][i] / beta;
        prox_cells_lambda<N>(q, 1.0 / beta, lambda);

        // x ← Proj(x − A*(y/β + A x − q)/‖A‖²)
        CellField r = ax;
        for (std::size_t c = 0; c < r.size(); ++c)
            for (std::size_t i = 0; i < r[c].size(); ++i) r[c][i] = y[c][i] / beta + ax[c][i] - q[c][i];
        StressField d = apply_At(grid, r);
        d *= -step;
        x += d;
        proj.project(x, g);
        ax = apply_A(x);

        for (std::size_t c = 0; c < y.size(); ++c)
            for (std::size_t i = 0; i < y[c].size(); ++i) y[c][i] += beta * (ax[c][i] - q[c][i]);

        if (it % opts.check_every == 0 || it == opts.max_iterations) {
            const double e = energy(x, DensityKind::HLambda, lambda.value());
            if (!std::isfinite(e)) throw NumericalFailure("finite-lambda iterate is not finite", e);
            if (e < best.report.objective) best.field = x, best.report.objective = e;
            if (stalled(prev_obj, e, opts.objective_tolerance)) {
                converged = true;
                break;
            }
            prev_obj = e;
        }
    }
    best.report.iterations = std::min(it, opts.max_iterations);
    best.report.residual = relative_residual(best.field, g);
    best.report.converged = converged && best.report.residual <= opts.tolerance;
    return best;
}

VectorField balanced_copy(const VectorField& load, std::string& message) {
    VectorField g = load;
    const double removed = balance_load(g);
    if (removed > 1e-12) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "removed %.3g of the load as unbalanced", removed);
        message = buf;
    }
    return g;
}

}  // namespace

FieldSolution solve_limit_field(const EquilibriumProjector& proj, const VectorField& load, const SolveOptions& opts,
                                const StressField* init) {
    opts.validate();
    if (!(load.grid() == proj.grid())) throw ShapeMismatch("solve_limit_field: load is not on the grid");
    if (init && !(init->grid() == proj.grid())) throw ShapeMismatch("solve_limit_field: init is not on the grid");
    const auto t0 = Clock::now();
    std::string msg;
    const VectorField g = balanced_copy(load, msg);
    FieldSolution s = proj.grid().dim() == 2 ? limit_pdhg<2>(proj, g, opts, init) : limit_pdhg<3>(proj, g, opts, init);
    s.report.lower_bound = std::numeric_limits<double>::quiet_NaN();
    s.report.message = msg;
    s.report.seconds = seconds_since(t0);
    return s;
}

FieldSolution solve_limit_field(const Grid& grid, const VectorField& load, const SolveOptions& opts) {
    const auto t0 = Clock::now();
    const EquilibriumProjector proj(grid);
    FieldSolution s = solve_limit_field(proj, load, opts);
    s.report.seconds = seconds_since(t0);
    return s;
}

FieldSolution solve_finite_lambda(const EquilibriumProjector& proj, const VectorField& load, Lambda lambda,
                                  const SolveOptions& opts, const StressField& init) {
    opts.validate();
    if (!(load.grid() == proj.grid()) || !(init.grid() == proj.grid()))
        throw ShapeMismatch("solve_finite_lambda: load or init is not on the grid");
    const auto t0 = Clock::now();
    std::string msg;
    const VectorField g = balanced_copy(load, msg);
    FieldSolution s = proj.grid().dim() == 2 ? lambda_admm<2>(proj, g, lambda, opts, init)
                                             : lambda_admm<3>(proj, g, lambda, opts, init);
    s.report.lower_bound = std::numeric_limits<double>::quiet_NaN();
    s.report.message = msg;
    s.report.seconds = seconds_since(t0);
    return s;
}

FieldSolution solve_finite_lambda(const Grid& grid, const VectorField& load, Lambda lambda,
                                  const SolveOptions& opts, const StressField& init) {
    const auto t0 = Clock::now();
    const EquilibriumProjector proj(grid);
    FieldSolution s = solve_finite_lambda(proj, load, lambda, opts, init);
    s.report.seconds = seconds_since(t0);
    return s;
}

ExperimentReport lambda_sweep(const SweepProblem& problem, const std::vector<double>& lambdas,
                              const SolveOptions& opts, std::vector<double>* seconds) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0)) throw InvalidInput("lambda values must be positive");
        if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw InvalidInput("lambda list not ascending");
    }
    ExperimentReport rep("lambda_sweep", {"lambda", "energy", "gap", "limit_gap", "residual", "hminus1", "iters"},
                         opts.seed);
    if (seconds) seconds->clear();
    const EquilibriumProjector proj(problem.grid);
    const FieldSolution limit = solve_limit_field(proj, problem.load, opts);
    const double limit_gap = std::abs(limit.report.objective - problem.target);
    const double load_h1 = hminus1_norm(problem.load);
    rep.set_parameter("limit_value", format_number(limit.report.objective));
    rep.set_parameter("limit_iterations", std::to_string(limit.report.iterations));
    rep.set_parameter("target", format_number(problem.target));

    StressField warm = limit.field;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double lam : lambdas) {
        const auto t0 = Clock::now();
        try {
            const FieldSolution s = solve_finite_lambda(proj, problem.load, Lambda(lam), opts, warm);
            rep.add_row({lam, s.report.objective, std::abs(s.report.objective - problem.target), limit_gap,
                         s.report.residual, std::pow(lam, -0.25) * load_h1,
                         static_cast<double>(s.report.iterations)});
            warm = s.field;
        } catch (const std::exception&) {
            rep.add_row({lam, nan, nan, limit_gap, nan, std::pow(lam, -0.25) * load_h1, nan});
        }
        if (seconds) seconds->push_back(seconds_since(t0));
    }
    return rep;
}

}  // namespace michell
