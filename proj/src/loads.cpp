#include "michell/loads.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "michell/errors.hpp"
#include "michell/mollifier.hpp"

namespace michell {

namespace {

double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

Vec3 center_of(const Grid& g) {
    Vec3 c{};
    for (int a = 0; a < g.dim(); ++a) c[a] = 0.5 * (g.lo(a) + g.hi(a));
    return c;
}

// Box intersected with the grid box.
std::pair<Vec3, Vec3> clip(const Grid& g, const Vec3& lo, const Vec3& hi) {
    Vec3 l{}, h{};
    for (int a = 0; a < g.dim(); ++a) {
        l[a] = std::max(lo[a], g.lo(a));
        h[a] = std::min(hi[a], g.hi(a));
    }
    return {l, h};
}

double box_measure(const Grid& g, const Vec3& lo, const Vec3& hi, int skip = -1) {
    double v = 1.0;
    for (int a = 0; a < g.dim(); ++a)
        if (a != skip) v *= std::max(0.0, hi[a] - lo[a]);
    return v;
}

// Force, application point pairs for each item, for resultant bookkeeping.
struct Resultant {
    Vec3 force{};
    Vec3 point{};
};

std::vector<Resultant> resultants(const LoadSpec& s, const Grid& g) {
    std::vector<Resultant> out;
    for (const auto& b : s.bodies) {
        const auto [lo, hi] = clip(g, b.lo, b.hi);
        const double v = box_measure(g, lo, hi);
        Resultant r;
        for (int a = 0; a < g.dim(); ++a) {
            r.force[a] = b.density[a] * v;
            r.point[a] = 0.5 * (lo[a] + hi[a]);
        }
        out.push_back(r);
    }
    for (const auto& t : s.tractions) {
        auto [lo, hi] = clip(g, t.lo, t.hi);
        const double side = t.upper ? g.hi(t.axis) : g.lo(t.axis);
        lo[t.axis] = hi[t.axis] = side;
        const double area = box_measure(g, lo, hi, t.axis);
        Resultant r;
        for (int a = 0; a < g.dim(); ++a) {
            r.force[a] = t.density[a] * area;
            r.point[a] = 0.5 * (lo[a] + hi[a]);
        }
        out.push_back(r);
    }
    for (const auto& p : s.points) out.push_back({p.force, p.x});
    return out;
}

Vec3 moment_about(const std::vector<Resultant>& rs, const Vec3& c, int dim) {
    Vec3 m{};
    const int slots = dim == 2 ? 1 : 3;
    for (const auto& r : rs)
        for (int s = 0; s < slots; ++s) {
            const auto ax = Grid::shear_axes(s);
            const int a = ax[0], b = ax[1];
            m[s] += (r.point[a] - c[a]) * r.force[b] - (r.point[b] - c[b]) * r.force[a];
        }
    return m;
}

void check_balance(const LoadSpec& s, const Grid& g) {
    const auto rs = resultants(s, g);
    double scale = 0.0;
    for (const auto& r : rs)
        for (int a = 0; a < g.dim(); ++a) scale += std::abs(r.force[a]);
    if (scale == 0.0) return;
    double len = 0.0;
    for (int a = 0; a < g.dim(); ++a) len = std::max(len, g.hi(a) - g.lo(a));
    const Vec3 f = s.total_force(g);
    const Vec3 m = moment_about(rs, center_of(g), g.dim());
    for (int a = 0; a < 3; ++a) {
        if (std::abs(f[a]) > 1e-10 * scale)
            throw Infeasible("unbalanced load: resultant force component " + std::to_string(a) +
                             " is " + std::to_string(f[a]));
        if (std::abs(m[a]) > 1e-10 * scale * len)
            throw Infeasible("unbalanced load: resultant moment " + std::to_string(m[a]));
    }
}

}  // namespace

Vec3 LoadSpec::total_force(const Grid& g) const {
    Vec3 f{};
    for (const auto& r : resultants(*this, g))
        for (int a = 0; a < 3; ++a) f[a] += r.force[a];
    return f;
}

Vec3 LoadSpec::total_moment(const Grid& g) const {
    return moment_about(resultants(*this, g), center_of(g), g.dim());
}

LoadSpec LoadSpec::scaled(double s) const {
    LoadSpec out = *this;
    for (auto& b : out.bodies)
        for (double& x : b.density) x *= s;
    for (auto& t : out.tractions)
        for (double& x : t.density) x *= s;
    for (auto& p : out.points)
        for (double& x : p.force) x *= s;
    return out;
}

VectorField assemble_load(const LoadSpec& spec, const Grid& grid, double epsilon) {
    if (spec.dim != grid.dim()) throw ShapeMismatch("load dimension does not match grid");
    check_balance(spec, grid);
    VectorField g(grid);
    const int n = grid.dim();

    for (int a = 0; a < n; ++a) {
        const Lattice fl = grid.face_lattice(a);
        auto& ga = g.component(a);

        for (const auto& b : spec.bodies) {
            if (b.density[a] == 0.0) continue;
            const auto [lo, hi] = clip(grid, b.lo, b.hi);
            for (std::size_t i = 0; i < fl.size(); ++i) {
                const auto p = fl.coords(i);
                double frac = 1.0;
                for (int c = 0; c < n && frac > 0.0; ++c) {
                    const double x = fl.position(c, p[c]);
                    const double h = fl.h[c];
                    frac *= overlap(x - 0.5 * h, x + 0.5 * h, lo[c], hi[c]) / h;
                }
                ga[i] += b.density[a] * frac;
            }
        }

        for (const auto& t : spec.tractions) {
            if (t.density[a] == 0.0) continue;
            const int k = t.axis;
            if (k < 0 || k >= n) throw InvalidInput("traction axis out of range");
            const int layer = t.upper ? fl.n[k] - 1 : 0;
            for (std::size_t i = 0; i < fl.size(); ++i) {
                const auto p = fl.coords(i);
                if (p[k] != layer) continue;
                double frac = 1.0;
                for (int c = 0; c < n && frac > 0.0; ++c) {
                    if (c == k) continue;
                    const double x = fl.position(c, p[c]);
                    const double h = fl.h[c];
                    const double lo = std::max(t.lo[c], grid.lo(c));
                    const double hi = std::min(t.hi[c], grid.hi(c));
                    frac *= overlap(x - 0.5 * h, x + 0.5 * h, lo, hi) / h;
                }
                ga[i] += t.density[a] * frac / grid.spacing(k);
            }
        }

        if (spec.points.empty()) continue;
        const Mollifier eta(n, epsilon);
        for (int c = 0; c < n; ++c)
            if (epsilon < 2.0 * grid.spacing(c))
                throw InvalidInput("point-force mollifier width " + std::to_string(epsilon) +
                                   " is below two grid spacings");
        const double vol = grid.cell_volume();
        for (const auto& pf : spec.points) {
            if (pf.force[a] == 0.0) continue;
            std::vector<std::pair<std::size_t, double>> w;
            double total = 0.0;
            for (std::size_t i = 0; i < fl.size(); ++i) {
                const auto p = fl.coords(i);
                double r2 = 0.0;
                for (int c = 0; c < n; ++c) {
                    const double d = fl.position(c, p[c]) - pf.x[c];
                    r2 += d * d;
                }
                if (r2 >= epsilon * epsilon) continue;
                const double v = eta(std::sqrt(r2));
                w.emplace_back(i, v);
                total += v * vol;
            }
            if (total <= 0.0) throw InvalidInput("point force lies outside the grid");
            for (const auto& [i, v] : w) ga[i] += pf.force[a] * v / total;
        }
    }
    return g;
}

Vec3 discrete_force(const VectorField& g) { return g.total(); }

Vec3 discrete_moment(const VectorField& g) {
    const auto modes = rigid_motions(g.grid());
    Vec3 m{};
    const int d = g.grid().dim();
    for (std::size_t s = d; s < modes.size(); ++s) m[s - d] = inner(g, modes[s]);
    return m;
}

// ---------------------------------------------------------------------------

LoadSpec read_load_spec(std::istream& in) {
    LoadSpec s;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw InvalidInput("load spec line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        auto nums = [&](int count) {
            std::vector<double> v(count);
            for (double& x : v)
                if (!(ls >> x)) fail("expected " + std::to_string(count) + " numbers after '" + kw + "'");
            return v;
        };
        auto vec = [&](const std::vector<double>& v, int off) {
            Vec3 r{};
            for (int a = 0; a < s.dim; ++a) r[a] = v[off + a];
            return r;
        };
        if (kw == "dim") {
            if (!(ls >> s.dim) || (s.dim != 2 && s.dim != 3)) fail("dim must be 2 or 3");
            if (!s.empty()) fail("dim must precede all load items");
        } else if (kw == "body") {
            const auto v = nums(3 * s.dim);
            s.bodies.push_back({vec(v, 0), vec(v, s.dim), vec(v, 2 * s.dim)});
        } else if (kw == "traction") {
            Traction t;
            std::string side;
            if (!(ls >> t.axis >> side) || t.axis < 0 || t.axis >= s.dim || (side != "lo" && side != "hi"))
                fail("traction needs an axis index and lo|hi");
            t.upper = side == "hi";
            std::vector<double> ext = nums(2 * (s.dim - 1));
            int e = 0;
            for (int a = 0; a < s.dim; ++a) {
                if (a == t.axis) continue;
                t.lo[a] = ext[e++];
                t.hi[a] = ext[e++];
            }
            t.density = vec(nums(s.dim), 0);
            s.tractions.push_back(t);
        } else if (kw == "point") {
            const auto v = nums(2 * s.dim);
            s.points.push_back({vec(v, 0), vec(v, s.dim)});
        } else {
            fail("unknown item '" + kw + "'");
        }
        std::string extra;
        if (ls >> extra) fail("unexpected trailing token '" + extra + "'");
    }
    return s;
}

LoadSpec read_load_spec_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot open load spec '" + path + "'");
    return read_load_spec(f);
}

}  // namespace michell
