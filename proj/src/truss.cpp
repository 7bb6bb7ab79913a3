#include "michell/truss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "michell/errors.hpp"

namespace michell {

GroundStructure::GroundStructure(std::vector<Point2> nodes, const std::vector<std::pair<int, int>>& bars,
                                 std::vector<int> supports)
    : nodes_(std::move(nodes)), supports_(std::move(supports)) {
    const int m = num_nodes();
    for (const auto& x : nodes_)
        if (!std::isfinite(x[0]) || !std::isfinite(x[1])) throw InvalidInput("non-finite node coordinate");
    std::set<std::pair<int, int>> seen;
    for (auto [i, j] : bars) {
        if (i < 0 || j < 0 || i >= m || j >= m) throw InvalidInput("bar refers to a missing node");
        if (i > j) std::swap(i, j);
        if (i == j) throw InvalidInput("bar joins a node to itself");
        if (!seen.insert({i, j}).second)
            throw InvalidInput("duplicate bar " + std::to_string(i) + "-" + std::to_string(j));
        const double dx = nodes_[i][0] - nodes_[j][0];
        const double dy = nodes_[i][1] - nodes_[j][1];
        const double len = std::hypot(dx, dy);
        if (len == 0.0) throw InvalidInput("zero-length bar " + std::to_string(i) + "-" + std::to_string(j));
        bars_.push_back({i, j, len, {dx / len, dy / len}});
    }
    std::sort(supports_.begin(), supports_.end());
    supports_.erase(std::unique(supports_.begin(), supports_.end()), supports_.end());
    for (int s : supports_)
        if (s < 0 || s >= m) throw InvalidInput("support refers to a missing node");
}

GroundStructure GroundStructure::complete(std::vector<Point2> nodes, std::vector<int> supports) {
    std::vector<std::pair<int, int>> bars;
    const int m = static_cast<int>(nodes.size());
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) bars.emplace_back(i, j);
    return GroundStructure(std::move(nodes), bars, std::move(supports));
}

bool GroundStructure::is_support(int node) const {
    return std::binary_search(supports_.begin(), supports_.end(), node);
}

GroundStructure GroundStructure::translated(const Point2& shift) const {
    auto nodes = nodes_;
    for (auto& x : nodes) x[0] += shift[0], x[1] += shift[1];
    std::vector<std::pair<int, int>> bars;
    for (const auto& b : bars_) bars.emplace_back(b.i, b.j);
    return GroundStructure(std::move(nodes), bars, supports_);
}

GroundStructure GroundStructure::scaled(double s) const {
    if (!(s > 0.0)) throw InvalidInput("scale factor must be positive");
    auto nodes = nodes_;
    for (auto& x : nodes) x[0] *= s, x[1] *= s;
    std::vector<std::pair<int, int>> bars;
    for (const auto& b : bars_) bars.emplace_back(b.i, b.j);
    return GroundStructure(std::move(nodes), bars, supports_);
}

// ---------------------------------------------------------------------------

std::vector<int> free_nodes(const GroundStructure& gs) {
    std::vector<int> out;
    for (int i = 0; i < gs.num_nodes(); ++i)
        if (!gs.is_support(i)) out.push_back(i);
    return out;
}

namespace {

// node → first row, or −1 when the node's rows are removed
std::vector<int> row_map(const GroundStructure& gs, bool keep_supports) {
    std::vector<int> r(gs.num_nodes(), -1);
    int next = 0;
    for (int i = 0; i < gs.num_nodes(); ++i)
        if (keep_supports || !gs.is_support(i)) r[i] = next, next += 2;
    return r;
}

void check_design(const GroundStructure& gs, const TrussDesign& d) {
    if (static_cast<int>(d.w.size()) != gs.num_bars())
        throw ShapeMismatch("design has " + std::to_string(d.w.size()) + " strengths for " +
                            std::to_string(gs.num_bars()) + " bars");
    for (double w : d.w)
        if (!std::isfinite(w)) throw InvalidInput("non-finite bar strength");
}

Eigen::VectorXd full_forces(const GroundStructure& gs, const TrussDesign& d, const PointLoadSet& loads) {
    check_design(gs, d);
    const Eigen::Map<const Eigen::VectorXd> w(d.w.data(), gs.num_bars());
    return load_vector(gs, loads, true) + equilibrium_matrix(gs, true) * w;
}

}  // namespace

Eigen::MatrixXd equilibrium_matrix(const GroundStructure& gs, bool keep_supports) {
    const auto rows = row_map(gs, keep_supports);
    int nrows = 0;
    for (int r : rows) nrows = std::max(nrows, r + 2);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nrows, gs.num_bars());
    for (int k = 0; k < gs.num_bars(); ++k) {
        const Bar& b = gs.bars()[k];
        for (int a = 0; a < 2; ++a) {
            if (rows[b.i] >= 0) B(rows[b.i] + a, k) += b.dir[a];
            if (rows[b.j] >= 0) B(rows[b.j] + a, k) -= b.dir[a];
        }
    }
    return B;
}

Eigen::VectorXd load_vector(const GroundStructure& gs, const PointLoadSet& loads, bool keep_supports) {
    const auto rows = row_map(gs, keep_supports);
    int nrows = 0;
    for (int r : rows) nrows = std::max(nrows, r + 2);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(nrows);
    for (const auto& l : loads) {
        if (l.node < 0 || l.node >= gs.num_nodes()) throw InvalidInput("load refers to a missing node");
        if (rows[l.node] < 0) continue;
        g(rows[l.node]) += l.force[0];
        g(rows[l.node] + 1) += l.force[1];
    }
    return g;
}

double truss_weight(const GroundStructure& gs, const TrussDesign& d) {
    check_design(gs, d);
    double s = 0.0;
    for (int k = 0; k < gs.num_bars(); ++k) s += std::abs(d.w[k]) * gs.bars()[k].length;
    return s;
}

double truss_residual(const GroundStructure& gs, const TrussDesign& d, const PointLoadSet& loads) {
    const Eigen::VectorXd r = full_forces(gs, d, loads);
    double m = 0.0;
    for (int i = 0; i < gs.num_nodes(); ++i)
        if (!gs.is_support(i)) m = std::max({m, std::abs(r(2 * i)), std::abs(r(2 * i + 1))});
    return m;
}

PointLoadSet support_reactions(const GroundStructure& gs, const TrussDesign& d, const PointLoadSet& loads) {
    const Eigen::VectorXd r = full_forces(gs, d, loads);
    PointLoadSet out;
    for (int s : gs.supports()) out.push_back({s, {-r(2 * s), -r(2 * s + 1)}});
    return out;
}

LoadSpec truss_load_spec(const GroundStructure& gs, const TrussDesign& d, const PointLoadSet& loads) {
    LoadSpec spec;
    spec.dim = 2;
    std::vector<Point2> total(gs.num_nodes(), Point2{0.0, 0.0});
    for (const auto& l : loads) total[l.node][0] += l.force[0], total[l.node][1] += l.force[1];
    for (const auto& r : support_reactions(gs, d, loads))
        total[r.node][0] += r.force[0], total[r.node][1] += r.force[1];
    for (int i = 0; i < gs.num_nodes(); ++i) {
        if (total[i][0] == 0.0 && total[i][1] == 0.0) continue;
        const auto& x = gs.nodes()[i];
        spec.points.push_back({{x[0], x[1], 0.0}, {-total[i][0], -total[i][1], 0.0}});
    }
    return spec;
}

// ---------------------------------------------------------------------------

namespace {

// Adds value·(length of segment ∩ dual box)/vol to every dual box of `l` the
// segment P0→P1 crosses. Segments running exactly along a box face are
// shared half-and-half by the two boxes.
void deposit_segment(const Lattice& l, const Point2& p0, const Point2& p1, double value,
                     std::vector<double>& out) {
    const double len = std::hypot(p1[0] - p0[0], p1[1] - p0[1]);
    const double vol = l.h[0] * l.h[1];
    // u_a(t) = (X_a(t) − origin_a)/h_a + ½, dual box k covers u ∈ [k, k+1)
    std::array<double, 2> u0{}, u1{};
    for (int a = 0; a < 2; ++a) {
        u0[a] = (p0[a] - l.origin[a]) / l.h[a] + 0.5;
        u1[a] = (p1[a] - l.origin[a]) / l.h[a] + 0.5;
    }
    std::vector<double> ts{0.0, 1.0};
    for (int a = 0; a < 2; ++a) {
        const double lo = std::min(u0[a], u1[a]);
        const double hi = std::max(u0[a], u1[a]);
        if (hi - lo < 1e-12) continue;
        for (double m = std::floor(lo) + 1.0; m < hi; m += 1.0) ts.push_back((m - u0[a]) / (u1[a] - u0[a]));
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double dt = ts[k + 1] - ts[k];
        if (dt <= 1e-14) continue;
        const double tm = 0.5 * (ts[k] + ts[k + 1]);
        // candidate boxes per axis with their shares
        std::array<std::array<std::pair<int, double>, 2>, 2> boxes{};
        std::array<int, 2> count{};
        for (int a = 0; a < 2; ++a) {
            const double u = u0[a] + tm * (u1[a] - u0[a]);
            const double r = std::round(u);
            if (std::abs(u1[a] - u0[a]) < 1e-12 && std::abs(u - r) < 1e-9) {
                boxes[a][0] = {static_cast<int>(r) - 1, 0.5};
                boxes[a][1] = {static_cast<int>(r), 0.5};
                count[a] = 2;
            } else {
                boxes[a][0] = {static_cast<int>(std::floor(u)), 1.0};
                count[a] = 1;
            }
        }
        const double piece = value * dt * len / vol;
        for (int i = 0; i < count[0]; ++i)
            for (int j = 0; j < count[1]; ++j) {
                const int x = boxes[0][i].first, y = boxes[1][j].first;
                if (x < 0 || y < 0 || x >= l.n[0] || y >= l.n[1]) continue;
                out[l.index(x, y, 0)] += piece * boxes[0][i].second * boxes[1][j].second;
            }
    }
}

void rasterize_bar(const GroundStructure& gs, const Bar& b, double w, StressField& f) {
    const Point2& p0 = gs.nodes()[b.j];
    const Point2& p1 = gs.nodes()[b.i];
    for (int c = 0; c < f.num_components(); ++c) {
        const auto ax = f.component_axes(c);
        const double v = w * b.dir[ax[0]] * b.dir[ax[1]];
        if (v == 0.0) continue;
        deposit_segment(f.component_lattice(c), p0, p1, v, f.component(c));
    }
}

void require_planar(const Grid& g) {
    if (g.dim() != 2) throw InvalidInput("trusses rasterize onto two-dimensional grids only");
}

}  // namespace

StressField rasterize_truss_exact(const GroundStructure& gs, const TrussDesign& d, const Grid& grid) {
    require_planar(grid);
    check_design(gs, d);
    StressField f(grid);
    for (int k = 0; k < gs.num_bars(); ++k)
        if (d.w[k] != 0.0) rasterize_bar(gs, gs.bars()[k], d.w[k], f);
    return f;
}

StressField rasterize_truss(const GroundStructure& gs, const TrussDesign& d, const Grid& grid,
                            const Mollifier& profile) {
    require_planar(grid);
    check_design(gs, d);
    if (profile.dim() != 1) throw InvalidInput("rasterize_truss needs a one-dimensional profile");
    for (int a = 0; a < 2; ++a)
        if (profile.epsilon() < 2.0 * grid.spacing(a))
            throw InvalidInput("bar profile width " + std::to_string(profile.epsilon()) +
                               " is below two grid spacings");
    StressField f(grid);
    for (int k = 0; k < gs.num_bars(); ++k) {
        if (d.w[k] == 0.0) continue;
        const Bar& b = gs.bars()[k];
        StressField one(grid);
        rasterize_bar(gs, b, d.w[k], one);
        // smear along the axis making the largest angle with the bar
        const int axis = std::abs(b.dir[0]) < std::abs(b.dir[1]) ? 0 : 1;
        for (int c = 0; c < f.num_components(); ++c) {
            auto& src = one.component(c);
            std::vector<double> tmp(src.size());
            convolve_axis(f.component_lattice(c), axis, src, tmp, profile);
            auto& dst = f.component(c);
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += tmp[i];
        }
    }
    return f;
}

// ---------------------------------------------------------------------------

TrussInstance read_truss_instance(std::istream& in) {
    std::vector<Point2> nodes;
    std::vector<std::pair<int, int>> bars;
    bool all_bars = false;
    PointLoadSet loads;
    std::vector<int> supports;
    std::string section, line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw InvalidInput("truss file line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "nodes" || first == "bars" || first == "loads" || first == "supports") {
            section = first;
            std::string rest;
            if (ls >> rest) {
                if (first == "bars" && rest == "all") all_bars = true;
                else fail("unexpected '" + rest + "' after section name");
            }
            continue;
        }
        std::istringstream row(line);
        if (section == "nodes") {
            int id;
            Point2 x;
            if (!(row >> id >> x[0] >> x[1])) fail("expected 'id x y'");
            if (id != static_cast<int>(nodes.size())) fail("node ids must run 0,1,2,... in order");
            nodes.push_back(x);
        } else if (section == "bars") {
            int i, j;
            if (!(row >> i >> j)) fail("expected 'i j'");
            bars.emplace_back(i, j);
        } else if (section == "loads") {
            NodalLoad l;
            if (!(row >> l.node >> l.force[0] >> l.force[1])) fail("expected 'id gx gy'");
            loads.push_back(l);
        } else if (section == "supports") {
            int id;
            while (row >> id) supports.push_back(id);
            if (!row.eof()) fail("support ids must be integers");
            continue;
        } else {
            fail("data before any section header");
        }
        std::string extra;
        if (row >> extra) fail("unexpected trailing token '" + extra + "'");
    }
    if (nodes.empty()) throw InvalidInput("truss file has no nodes");
    if (all_bars && !bars.empty()) throw InvalidInput("truss file: 'bars all' cannot be combined with a bar list");
    for (const auto& l : loads)
        if (l.node < 0 || l.node >= static_cast<int>(nodes.size()))
            throw InvalidInput("truss file: load on missing node " + std::to_string(l.node));
    if (all_bars) return {GroundStructure::complete(std::move(nodes), std::move(supports)), loads};
    return {GroundStructure(std::move(nodes), bars, std::move(supports)), loads};
}

TrussInstance read_truss_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot open truss file '" + path + "'");
    return read_truss_instance(f);
}

void write_truss_design(std::ostream& out, const GroundStructure& gs, const TrussDesign& d) {
    check_design(gs, d);
    char buf[160];
    out << "i,j,length,w\n";
    for (int k = 0; k < gs.num_bars(); ++k) {
        const Bar& b = gs.bars()[k];
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", b.i, b.j, b.length, d.w[k]);
        out << buf;
    }
}

}  // namespace michell
