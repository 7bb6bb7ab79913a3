#pragma once

#include <array>
#include <cmath>
#include <random>

#include "michell/tensor.hpp"

namespace michell::testing {

/// Random symmetric tensor with Frobenius norm spread over [10^lo, 10^hi].
template <int N>
SymTensor<N> random_tensor(std::mt19937_64& rng, double log_lo = -3.0, double log_hi = 3.0) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> e(log_lo, log_hi);
    SymTensor<N> t;
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) t(i, j) = g(rng);
    const double n = t.norm();
    if (n == 0.0) return t;
    return std::pow(10.0, e(rng)) / n * t;
}

/// Random rotation from a normalized Gaussian quaternion (3D) or angle (2D).
template <int N>
std::array<std::array<double, N>, N> random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::array<std::array<double, N>, N> q{};
    if constexpr (N == 2) {
        const double th = std::atan2(g(rng), g(rng));
        q = {{{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}}};
    } else {
        double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
        const double n = std::sqrt(w * w + x * x + y * y + z * z);
        w /= n, x /= n, y /= n, z /= n;
        q = {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
              {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
              {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
    }
    return q;
}

template <int N, class Rotation>
SymTensor<N> rotate(const SymTensor<N>& t, const Rotation& q) {
    SymTensor<N> r;
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
            double s = 0.0;
            for (int k = 0; k < N; ++k)
                for (int l = 0; l < N; ++l) s += q[i][k] * t(k, l) * q[j][l];
            r(i, j) = s;
        }
    return r;
}

}  // namespace michell::testing
