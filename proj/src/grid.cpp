#include "michell/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace michell {

Grid::Grid(int dim, std::array<int, 3> cells, std::array<double, 3> lo, std::array<double, 3> hi)
    : dim_(dim), cells_(cells), lo_(lo), hi_(hi), h_{1.0, 1.0, 1.0} {
    if (dim != 2 && dim != 3) throw InvalidInput("grid dimension must be 2 or 3");
    if (dim == 2) {
        cells_[2] = 1;
        lo_[2] = 0.0;
        hi_[2] = 1.0;
    }
    for (int a = 0; a < dim; ++a) {
        if (cells_[a] < 2) throw InvalidInput("grid needs at least 2 cells per axis");
        if (!(hi_[a] > lo_[a]) || !std::isfinite(lo_[a]) || !std::isfinite(hi_[a]))
            throw InvalidInput("grid box must have positive finite extent");
        h_[a] = (hi_[a] - lo_[a]) / cells_[a];
    }
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= h_[a];
    return v;
}

Lattice Grid::cell_lattice() const {
    Lattice l;
    for (int a = 0; a < 3; ++a) {
        l.n[a] = cells_[a];
        l.h[a] = h_[a];
        l.origin[a] = lo_[a] + 0.5 * h_[a];
    }
    return l;
}

Lattice Grid::shear_lattice(int a, int b) const {
    Lattice l = cell_lattice();
    for (int ax : {a, b}) {
        l.n[ax] = cells_[ax] - 1;
        l.origin[ax] = lo_[ax] + h_[ax];
    }
    return l;
}

Lattice Grid::face_lattice(int a) const {
    Lattice l = cell_lattice();
    l.n[a] = cells_[a] + 1;
    l.origin[a] = lo_[a];
    return l;
}

std::array<int, 2> Grid::shear_axes(int s) {
    static constexpr std::array<std::array<int, 2>, 3> axes{{{0, 1}, {0, 2}, {1, 2}}};
    return axes[s];
}

// ---------------------------------------------------------------------------

StressField::StressField(const Grid& grid) : grid_(grid) {
    for (int a = 0; a < grid.dim(); ++a) diag_[a].assign(grid.num_cells(), 0.0);
    for (int s = 0; s < grid.num_shear(); ++s) {
        const auto ax = Grid::shear_axes(s);
        shear_[s].assign(grid.shear_lattice(ax[0], ax[1]).size(), 0.0);
    }
}

std::vector<double>& StressField::component(int c) {
    return c < grid_.dim() ? diag_[c] : shear_[c - grid_.dim()];
}
const std::vector<double>& StressField::component(int c) const {
    return c < grid_.dim() ? diag_[c] : shear_[c - grid_.dim()];
}

Lattice StressField::component_lattice(int c) const {
    if (c < grid_.dim()) return grid_.cell_lattice();
    const auto ax = Grid::shear_axes(c - grid_.dim());
    return grid_.shear_lattice(ax[0], ax[1]);
}

std::array<int, 2> StressField::component_axes(int c) const {
    if (c < grid_.dim()) return {c, c};
    return Grid::shear_axes(c - grid_.dim());
}

namespace {

// Average of the (up to) four corner values around cell `ci` for shear slot s.
double corner_average(const Grid& g, int s, const std::vector<double>& corner,
                      const std::array<int, 3>& ci) {
    const auto ax = Grid::shear_axes(s);
    const Lattice l = g.shear_lattice(ax[0], ax[1]);
    double sum = 0.0;
    for (int da = -1; da <= 0; ++da)
        for (int db = -1; db <= 0; ++db) {
            std::array<int, 3> m = ci;
            m[ax[0]] += da;
            m[ax[1]] += db;
            if (m[ax[0]] < 0 || m[ax[0]] >= l.n[ax[0]] || m[ax[1]] < 0 || m[ax[1]] >= l.n[ax[1]])
                continue;
            sum += corner[l.index(m[0], m[1], m[2])];
        }
    return 0.25 * sum;
}

}  // namespace

template <int N>
SymTensor<N> StressField::cell_tensor(std::size_t idx) const {
    SymTensor<N> t;
    for (int a = 0; a < N; ++a) t(a, a) = diag_[a][idx];
    const auto ci = grid_.cell_lattice().coords(idx);
    for (int s = 0; s < grid_.num_shear(); ++s) {
        const auto ax = Grid::shear_axes(s);
        t(ax[0], ax[1]) = corner_average(grid_, s, shear_[s], ci);
    }
    return t;
}

template SymTensor<2> StressField::cell_tensor<2>(std::size_t) const;
template SymTensor<3> StressField::cell_tensor<3>(std::size_t) const;

StressField& StressField::operator+=(const StressField& o) {
    if (!(grid_ == o.grid_)) throw ShapeMismatch("stress fields on different grids");
    for (int c = 0; c < num_components(); ++c) {
        auto& x = component(c);
        const auto& y = o.component(c);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    }
    return *this;
}

StressField& StressField::operator-=(const StressField& o) {
    if (!(grid_ == o.grid_)) throw ShapeMismatch("stress fields on different grids");
    for (int c = 0; c < num_components(); ++c) {
        auto& x = component(c);
        const auto& y = o.component(c);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
    }
    return *this;
}

StressField& StressField::operator*=(double s) {
    for (int c = 0; c < num_components(); ++c)
        for (double& x : component(c)) x *= s;
    return *this;
}

double StressField::max_cell_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid_.num_cells(); ++i) {
        const double n = grid_.dim() == 2 ? cell_tensor<2>(i).norm() : cell_tensor<3>(i).norm();
        m = std::max(m, n);
    }
    return m;
}

bool StressField::all_finite() const {
    for (int c = 0; c < num_components(); ++c)
        for (double x : component(c))
            if (!std::isfinite(x)) return false;
    return true;
}

// ---------------------------------------------------------------------------

VectorField::VectorField(const Grid& grid) : grid_(grid) {
    for (int a = 0; a < grid.dim(); ++a) comp_[a].assign(grid.face_lattice(a).size(), 0.0);
}

VectorField& VectorField::operator+=(const VectorField& o) {
    if (!(grid_ == o.grid_)) throw ShapeMismatch("vector fields on different grids");
    for (int a = 0; a < grid_.dim(); ++a)
        for (std::size_t i = 0; i < comp_[a].size(); ++i) comp_[a][i] += o.comp_[a][i];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    if (!(grid_ == o.grid_)) throw ShapeMismatch("vector fields on different grids");
    for (int a = 0; a < grid_.dim(); ++a)
        for (std::size_t i = 0; i < comp_[a].size(); ++i) comp_[a][i] -= o.comp_[a][i];
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (int a = 0; a < grid_.dim(); ++a)
        for (double& x : comp_[a]) x *= s;
    return *this;
}

std::array<double, 3> VectorField::total() const {
    std::array<double, 3> t{};
    const double vol = grid_.cell_volume();
    for (int a = 0; a < grid_.dim(); ++a) {
        double s = 0.0;
        for (double x : comp_[a]) s += x;
        t[a] = s * vol;
    }
    return t;
}

double VectorField::max_abs() const {
    double m = 0.0;
    for (int a = 0; a < grid_.dim(); ++a)
        for (double x : comp_[a]) m = std::max(m, std::abs(x));
    return m;
}

// ---------------------------------------------------------------------------

VectorField divergence(const StressField& sigma) {
    const Grid& g = sigma.grid();
    VectorField out(g);
    const Lattice cells = g.cell_lattice();

    for (int a = 0; a < g.dim(); ++a) {
        const Lattice fl = g.face_lattice(a);
        auto& f = out.component(a);
        const auto& saa = sigma.diag(a);
        const double ha = g.spacing(a);

        for (std::size_t idx = 0; idx < fl.size(); ++idx) {
            const auto p = fl.coords(idx);
            double v = 0.0;
            // ∂_a σ_aa: cells p_a − 1 and p_a along a
            if (p[a] < g.cells(a)) v += saa[cells.index(p[0], p[1], p[2])] / ha;
            if (p[a] >= 1) {
                auto q = p;
                q[a] -= 1;
                v -= saa[cells.index(q[0], q[1], q[2])] / ha;
            }
            f[idx] = v;
        }

        for (int s = 0; s < g.num_shear(); ++s) {
            const auto ax = Grid::shear_axes(s);
            if (ax[0] != a && ax[1] != a) continue;
            const int b = (ax[0] == a) ? ax[1] : ax[0];
            const Lattice sl = g.shear_lattice(ax[0], ax[1]);
            const auto& sab = sigma.shear(s);
            const double hb = g.spacing(b);

            for (std::size_t idx = 0; idx < fl.size(); ++idx) {
                const auto p = fl.coords(idx);
                const int ma = p[a] - 1;
                if (ma < 0 || ma >= sl.n[a]) continue;
                auto m = p;
                m[a] = ma;
                double v = 0.0;
                if (p[b] < sl.n[b]) {
                    m[b] = p[b];
                    v += sab[sl.index(m[0], m[1], m[2])];
                }
                if (p[b] - 1 >= 0) {
                    m[b] = p[b] - 1;
                    v -= sab[sl.index(m[0], m[1], m[2])];
                }
                f[idx] += v / hb;
            }
        }
    }
    return out;
}

StressField sym_gradient(const VectorField& u) {
    const Grid& g = u.grid();
    StressField e(g);
    const Lattice cells = g.cell_lattice();

    for (int a = 0; a < g.dim(); ++a) {
        const Lattice fl = g.face_lattice(a);
        const auto& ua = u.component(a);
        auto& eaa = e.diag(a);
        const double ha = g.spacing(a);
        for (std::size_t idx = 0; idx < cells.size(); ++idx) {
            auto p = cells.coords(idx);
            const double lo = ua[fl.index(p[0], p[1], p[2])];
            p[a] += 1;
            const double hi = ua[fl.index(p[0], p[1], p[2])];
            eaa[idx] = (hi - lo) / ha;
        }
    }

    for (int s = 0; s < g.num_shear(); ++s) {
        const auto ax = Grid::shear_axes(s);
        const int a = ax[0];
        const int b = ax[1];
        const Lattice sl = g.shear_lattice(a, b);
        const Lattice fa = g.face_lattice(a);
        const Lattice fb = g.face_lattice(b);
        const auto& ua = u.component(a);
        const auto& ub = u.component(b);
        auto& eab = e.shear(s);
        for (std::size_t idx = 0; idx < sl.size(); ++idx) {
            const auto m = sl.coords(idx);
            // ∂_b u_a: u_a on face p_a = m_a + 1, cells m_b and m_b + 1 along b
            auto q = m;
            q[a] = m[a] + 1;
            q[b] = m[b] + 1;
            double dba = ua[fa.index(q[0], q[1], q[2])];
            q[b] = m[b];
            dba -= ua[fa.index(q[0], q[1], q[2])];
            // ∂_a u_b: u_b on face p_b = m_b + 1, cells m_a and m_a + 1 along a
            auto r = m;
            r[b] = m[b] + 1;
            r[a] = m[a] + 1;
            double dab = ub[fb.index(r[0], r[1], r[2])];
            r[a] = m[a];
            dab -= ub[fb.index(r[0], r[1], r[2])];
            eab[idx] = 0.5 * (dba / g.spacing(b) + dab / g.spacing(a));
        }
    }
    return e;
}

double inner(const StressField& x, const StressField& y) {
    if (!(x.grid() == y.grid())) throw ShapeMismatch("inner: stress fields on different grids");
    const Grid& g = x.grid();
    double s = 0.0;
    for (int c = 0; c < x.num_components(); ++c) {
        const double w = (c < g.dim()) ? 1.0 : 2.0;
        const auto& a = x.component(c);
        const auto& b = y.component(c);
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
        s += w * acc;
    }
    return s * g.cell_volume();
}

double inner(const VectorField& f, const VectorField& u) {
    if (!(f.grid() == u.grid())) throw ShapeMismatch("inner: vector fields on different grids");
    double s = 0.0;
    for (int a = 0; a < f.grid().dim(); ++a) {
        const auto& x = f.component(a);
        const auto& y = u.component(a);
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    }
    return s * f.grid().cell_volume();
}

double norm(const StressField& s) { return std::sqrt(inner(s, s)); }
double norm(const VectorField& v) { return std::sqrt(inner(v, v)); }

void average_shear_to_cells(const Grid& g, int slot, std::span<const double> corner,
                            std::span<double> cell) {
    const auto ax = Grid::shear_axes(slot);
    const Lattice sl = g.shear_lattice(ax[0], ax[1]);
    const Lattice cl = g.cell_lattice();
    if (corner.size() != sl.size() || cell.size() != cl.size())
        throw ShapeMismatch("average_shear_to_cells: wrong array sizes");
    std::fill(cell.begin(), cell.end(), 0.0);
    for (std::size_t idx = 0; idx < sl.size(); ++idx) {
        const double v = 0.25 * corner[idx];
        if (v == 0.0) continue;
        const auto m = sl.coords(idx);
        for (int da = 0; da <= 1; ++da)
            for (int db = 0; db <= 1; ++db) {
                auto c = m;
                c[ax[0]] += da;
                c[ax[1]] += db;
                cell[cl.index(c[0], c[1], c[2])] += v;
            }
    }
}

void scatter_shear_from_cells(const Grid& g, int slot, std::span<const double> cell,
                              std::span<double> corner) {
    const auto ax = Grid::shear_axes(slot);
    const Lattice sl = g.shear_lattice(ax[0], ax[1]);
    const Lattice cl = g.cell_lattice();
    if (corner.size() != sl.size() || cell.size() != cl.size())
        throw ShapeMismatch("scatter_shear_from_cells: wrong array sizes");
    for (std::size_t idx = 0; idx < sl.size(); ++idx) {
        const auto m = sl.coords(idx);
        double acc = 0.0;
        for (int da = 0; da <= 1; ++da)
            for (int db = 0; db <= 1; ++db) {
                auto c = m;
                c[ax[0]] += da;
                c[ax[1]] += db;
                acc += cell[cl.index(c[0], c[1], c[2])];
            }
        corner[idx] = 0.25 * acc;
    }
}

std::vector<VectorField> rigid_motions(const Grid& g) {
    std::vector<VectorField> modes;
    for (int a = 0; a < g.dim(); ++a) {
        VectorField t(g);
        std::fill(t.component(a).begin(), t.component(a).end(), 1.0);
        modes.push_back(std::move(t));
    }
    std::array<double, 3> center{};
    for (int a = 0; a < g.dim(); ++a) center[a] = 0.5 * (g.lo(a) + g.hi(a));
    for (int s = 0; s < g.num_shear(); ++s) {
        const auto ax = Grid::shear_axes(s);
        const int a = ax[0];
        const int b = ax[1];
        VectorField r(g);
        // u_a = −(x_b − c_b), u_b = x_a − c_a
        const Lattice fa = g.face_lattice(a);
        for (std::size_t i = 0; i < fa.size(); ++i)
            r.component(a)[i] = -(fa.position(b, fa.coords(i)[b]) - center[b]);
        const Lattice fb = g.face_lattice(b);
        for (std::size_t i = 0; i < fb.size(); ++i)
            r.component(b)[i] = fb.position(a, fb.coords(i)[a]) - center[a];
        modes.push_back(std::move(r));
    }
    return modes;
}

}  // namespace michell
