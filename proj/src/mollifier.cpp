#include "michell/mollifier.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "michell/errors.hpp"

namespace michell {

namespace {

double bump(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

// ∫₀¹ r^{n−1} bump(r) dr by composite Simpson; the integrand is C^∞ and flat at 1.
double radial_moment(int n) {
    constexpr int kPanels = 200000;
    const double h = 1.0 / kPanels;
    double s = 0.0;
    for (int i = 0; i <= kPanels; ++i) {
        const double r = i * h;
        const double f = std::pow(r, n - 1) * bump(r);
        const double w = (i == 0 || i == kPanels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * f;
    }
    return s * h / 3.0;
}

struct Constants {
    std::array<double, 4> c{};
    Constants() {
        const double pi = std::numbers::pi;
        c[1] = 1.0 / (2.0 * radial_moment(1));
        c[2] = 1.0 / (2.0 * pi * radial_moment(2));
        c[3] = 1.0 / (4.0 * pi * radial_moment(3));
    }
};

const Constants& constants() {
    static const Constants k;
    return k;
}

struct Stencil {
    std::vector<std::array<int, 3>> offset;
    std::vector<double> weight;
    double vol = 1.0;  // cell measure over the active axes
};

// Lattice-sampled η_ε over the active axes, normalized to discrete mass 1.
Stencil make_stencil(const Lattice& l, const Mollifier& m, const std::array<bool, 3>& active) {
    std::array<int, 3> r{0, 0, 0};
    double vol = 1.0;
    for (int a = 0; a < 3; ++a) {
        if (!active[a]) continue;
        if (m.epsilon() < 2.0 * l.h[a])
            throw InvalidInput("mollifier width " + std::to_string(m.epsilon()) +
                               " is under-resolved (needs at least two spacings of " +
                               std::to_string(l.h[a]) + ")");
        r[a] = static_cast<int>(std::ceil(m.epsilon() / l.h[a]));
        vol *= l.h[a];
    }
    Stencil s;
    s.vol = vol;
    double total = 0.0;
    for (int k = -r[2]; k <= r[2]; ++k)
        for (int j = -r[1]; j <= r[1]; ++j)
            for (int i = -r[0]; i <= r[0]; ++i) {
                const double dx = i * l.h[0], dy = j * l.h[1], dz = k * l.h[2];
                const double w = m(std::sqrt(dx * dx + dy * dy + dz * dz));
                if (w <= 0.0) continue;
                s.offset.push_back({i, j, k});
                s.weight.push_back(w);
                total += w * vol;
            }
    for (double& w : s.weight) w /= total;
    return s;
}

void apply_stencil(const Lattice& l, const Stencil& st, std::span<const double> in,
                   std::span<double> out, Padding pad) {
    if (in.size() != l.size() || out.size() != l.size())
        throw ShapeMismatch("convolve: array does not match lattice");
    std::vector<double> acc(l.size(), 0.0);
    // the stencil weights carry 1/vol; scattering v·vol·w keeps the integral
    const double vol = st.vol;
    for (std::size_t idx = 0; idx < l.size(); ++idx) {
        const double v = in[idx];
        if (v == 0.0) continue;
        const auto p = l.coords(idx);
        for (std::size_t t = 0; t < st.offset.size(); ++t) {
            std::array<int, 3> q{p[0] + st.offset[t][0], p[1] + st.offset[t][1],
                                 p[2] + st.offset[t][2]};
            bool inside = true;
            for (int a = 0; a < 3; ++a) {
                if (q[a] >= 0 && q[a] < l.n[a]) continue;
                if (pad == Padding::Periodic)
                    q[a] = ((q[a] % l.n[a]) + l.n[a]) % l.n[a];
                else
                    inside = false;
            }
            if (inside) acc[l.index(q[0], q[1], q[2])] += v * vol * st.weight[t];
        }
    }
    std::copy(acc.begin(), acc.end(), out.begin());
}

}  // namespace

Mollifier::Mollifier(int dim, double epsilon) : dim_(dim), eps_(epsilon) {
    if (dim < 1 || dim > 3) throw InvalidInput("mollifier dimension must be 1, 2 or 3");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InvalidInput("mollifier width must be positive and finite");
}

double Mollifier::operator()(double r) const {
    return normalization(dim_) * std::pow(eps_, -dim_) * bump(std::abs(r) / eps_);
}

double Mollifier::sup() const { return unit_sup(dim_) * std::pow(eps_, -dim_); }

double Mollifier::normalization(int dim) {
    if (dim < 1 || dim > 3) throw InvalidInput("mollifier dimension must be 1, 2 or 3");
    return constants().c[dim];
}

double Mollifier::unit_sup(int dim) { return normalization(dim) * std::exp(-1.0); }

double epsilon_schedule(Lambda lambda, double mass, double eta_sup, int n) {
    if (!(mass > 0.0) || !(eta_sup > 0.0)) throw InvalidInput("epsilon_schedule: mass and sup must be positive");
    if (n < 1 || n > 3) throw InvalidInput("epsilon_schedule: dimension must be 1, 2 or 3");
    // need ε ≥ (4·mass·sup/√λ)^{1/n}
    const double bound = std::pow(4.0 * mass * eta_sup / lambda.sqrt(), 1.0 / n);
    int k = static_cast<int>(std::floor(-std::log2(bound)));
    auto ok = [&](int kk) {
        const double e = std::ldexp(1.0, -kk);
        return mass * std::pow(e, -n) * eta_sup <= 0.25 * lambda.sqrt();
    };
    // guard the floating-point log against off-by-one
    while (!ok(k)) --k;
    while (ok(k + 1)) ++k;
    return std::ldexp(1.0, -k);
}

void convolve(const Lattice& lattice, std::span<const double> in, std::span<double> out,
              const Mollifier& m, Padding pad) {
    std::array<bool, 3> active{false, false, false};
    int dims = 0;
    for (int a = 0; a < 3; ++a)
        if (lattice.n[a] > 1 && dims < m.dim()) active[a] = true, ++dims;
    if (dims != m.dim()) throw ShapeMismatch("convolve: mollifier dimension exceeds lattice dimension");
    apply_stencil(lattice, make_stencil(lattice, m, active), in, out, pad);
}

void convolve_axis(const Lattice& lattice, int axis, std::span<const double> in,
                   std::span<double> out, const Mollifier& m, Padding pad) {
    if (m.dim() != 1) throw InvalidInput("convolve_axis needs a one-dimensional mollifier");
    std::array<bool, 3> active{false, false, false};
    active[axis] = true;
    apply_stencil(lattice, make_stencil(lattice, m, active), in, out, pad);
}

StressField mollify(const StressField& f, const Mollifier& m, Padding pad) {
    if (m.dim() != f.grid().dim()) throw ShapeMismatch("mollify: dimension mismatch");
    StressField out(f.grid());
    for (int c = 0; c < f.num_components(); ++c) {
        Lattice l = f.component_lattice(c);
        std::array<bool, 3> active{false, false, false};
        for (int a = 0; a < m.dim(); ++a) active[a] = true;
        apply_stencil(l, make_stencil(l, m, active), f.component(c), out.component(c), pad);
    }
    return out;
}

VectorField mollify(const VectorField& f, const Mollifier& m, Padding pad) {
    if (m.dim() != f.grid().dim()) throw ShapeMismatch("mollify: dimension mismatch");
    VectorField out(f.grid());
    for (int a = 0; a < f.grid().dim(); ++a) {
        Lattice l = f.grid().face_lattice(a);
        std::array<bool, 3> active{false, false, false};
        for (int b = 0; b < m.dim(); ++b) active[b] = true;
        apply_stencil(l, make_stencil(l, m, active), f.component(a), out.component(a), pad);
    }
    return out;
}

}  // namespace michell
