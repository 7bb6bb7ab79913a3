#pragma once

// Brute-force references used only by the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace michell::testing {

/// Global minimum of f over the box [-m, m]^N by an exhaustive grid with
/// `per_axis` points per axis, followed by compass search from the best few
/// grid points down to step `tol`.
template <std::size_t N>
std::pair<std::array<double, N>, double> grid_minimize(
    const std::function<double(const std::array<double, N>&)>& f, double m, int per_axis,
    double tol = 1e-11) {
    struct Seed {
        double value;
        std::array<double, N> x;
    };
    std::vector<Seed> seeds;
    const double h = 2.0 * m / (per_axis - 1);
    std::array<int, N> idx{};
    while (true) {
        std::array<double, N> x{};
        for (std::size_t d = 0; d < N; ++d) x[d] = -m + h * idx[d];
        seeds.push_back({f(x), x});
        std::size_t d = 0;
        while (d < N && ++idx[d] == per_axis) idx[d++] = 0;
        if (d == N) break;
    }
    const std::size_t keep = std::min<std::size_t>(6, seeds.size());
    std::partial_sort(seeds.begin(), seeds.begin() + keep, seeds.end(),
                      [](const Seed& a, const Seed& b) { return a.value < b.value; });

    std::array<double, N> best = seeds[0].x;
    double best_val = seeds[0].value;
    for (std::size_t s = 0; s < keep; ++s) {
        std::array<double, N> x = seeds[s].x;
        double fx = seeds[s].value;
        double step = h;
        while (step > tol * std::max(1.0, m)) {
            bool moved = false;
            for (std::size_t d = 0; d < N && !moved; ++d)
                for (double sgn : {1.0, -1.0}) {
                    auto y = x;
                    y[d] += sgn * step;
                    const double fy = f(y);
                    if (fy < fx) {
                        x = y;
                        fx = fy;
                        moved = true;
                        break;
                    }
                }
            // diagonal moves help along the C¹ creases between branches
            if (!moved && N > 1) {
                for (std::size_t d = 0; d < N && !moved; ++d)
                    for (std::size_t e = d + 1; e < N && !moved; ++e)
                        for (double sd : {1.0, -1.0})
                            for (double se : {1.0, -1.0}) {
                                auto y = x;
                                y[d] += sd * step;
                                y[e] += se * step;
                                const double fy = f(y);
                                if (fy < fx && !moved) {
                                    x = y;
                                    fx = fy;
                                    moved = true;
                                }
                            }
            }
            if (!moved) step *= 0.5;
        }
        if (fx < best_val) {
            best_val = fx;
            best = x;
        }
    }
    return {best, best_val};
}

/// Golden-section minimization of a unimodal f on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double tol = 1e-12) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - g * (hi - lo);
    double d = lo + g * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi))) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace michell::testing
