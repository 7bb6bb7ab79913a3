#include "michell/tensor.hpp"

#include <algorithm>
#include <numeric>

namespace michell {

template <int N>
Spectrum<N> eigen_sym(const SymTensor<N>& t) {
    if (!t.is_finite()) throw InvalidInput("eigen_sym: non-finite tensor entry");

    double a[N][N];
    double v[N][N];
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            a[i][j] = t(i, j);
            v[i][j] = (i == j) ? 1.0 : 0.0;
        }

    // Cyclic sweeps; each rotation zeroes a[p][q] exactly in exact arithmetic.
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        double diag = 0.0;
        for (int p = 0; p < N; ++p) {
            diag += a[p][p] * a[p][p];
            for (int q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
        }
        if (off == 0.0 || off <= 1e-34 * diag) break;

        for (int p = 0; p < N - 1; ++p) {
            for (int q = p + 1; q < N; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double tn = std::copysign(1.0, theta) /
                                  (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tn * tn + 1.0);
                const double s = tn * c;

                for (int k = 0; k < N; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < N; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = a[q][p] = 0.0;

                for (int k = 0; k < N; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    // Algebraic order first, then a stable sort by magnitude: ties in |·|
    // keep the algebraically smaller value first.
    std::array<int, N> order{};
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return std::abs(a[i][i]) < std::abs(a[j][j]);
    });

    Spectrum<N> s;
    for (int k = 0; k < N; ++k) {
        s.values[k] = a[order[k]][order[k]];
        for (int r = 0; r < N; ++r) s.frame[r][k] = v[r][order[k]];
    }
    return s;
}

template Spectrum<2> eigen_sym<2>(const SymTensor<2>&);
template Spectrum<3> eigen_sym<3>(const SymTensor<3>&);

}  // namespace michell
