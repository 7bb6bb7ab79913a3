#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include "michell/errors.hpp"

namespace michell {

/// Symmetric N×N tensor (N = 2 or 3) stored as its N(N+1)/2 independent
/// entries: the diagonal first, then the off-diagonals in (0,1), (0,2), (1,2)
/// order.
template <int N>
class SymTensor {
    static_assert(N == 2 || N == 3, "only 2×2 and 3×3 tensors are supported");

public:
    static constexpr int dim = N;
    static constexpr int size = N * (N + 1) / 2;

    constexpr SymTensor() = default;

    /// (a11, a22, a12) in 2D; (a11, a22, a33, a12, a13, a23) in 3D.
    constexpr explicit SymTensor(const std::array<double, size>& entries) : v_(entries) {}

    static constexpr SymTensor diagonal(const std::array<double, N>& d) {
        SymTensor t;
        for (int i = 0; i < N; ++i) t.v_[i] = d[i];
        return t;
    }

    static constexpr SymTensor identity() {
        std::array<double, N> ones{};
        ones.fill(1.0);
        return diagonal(ones);
    }

    constexpr double operator()(int i, int j) const { return v_[index(i, j)]; }
    constexpr double& operator()(int i, int j) { return v_[index(i, j)]; }

    const std::array<double, size>& entries() const { return v_; }

    /// Frobenius norm squared, Tr(AᵀA).
    constexpr double norm2() const {
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += v_[k] * v_[k];
        for (int k = N; k < size; ++k) s += 2.0 * v_[k] * v_[k];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }

    /// Frobenius inner product.
    constexpr double dot(const SymTensor& o) const {
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += v_[k] * o.v_[k];
        for (int k = N; k < size; ++k) s += 2.0 * v_[k] * o.v_[k];
        return s;
    }

    constexpr double trace() const {
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += v_[k];
        return s;
    }

    constexpr double det() const {
        const SymTensor& a = *this;
        if constexpr (N == 2) {
            return a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
        } else {
            return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(1, 2)) -
                   a(0, 1) * (a(0, 1) * a(2, 2) - a(1, 2) * a(0, 2)) +
                   a(0, 2) * (a(0, 1) * a(1, 2) - a(1, 1) * a(0, 2));
        }
    }

    bool is_zero() const {
        for (double x : v_)
            if (x != 0.0) return false;
        return true;
    }

    bool is_finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    constexpr SymTensor& operator+=(const SymTensor& o) {
        for (int k = 0; k < size; ++k) v_[k] += o.v_[k];
        return *this;
    }
    constexpr SymTensor& operator-=(const SymTensor& o) {
        for (int k = 0; k < size; ++k) v_[k] -= o.v_[k];
        return *this;
    }
    constexpr SymTensor& operator*=(double s) {
        for (auto& x : v_) x *= s;
        return *this;
    }
    friend constexpr SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
    friend constexpr SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
    friend constexpr SymTensor operator*(double s, SymTensor a) { return a *= s; }
    friend constexpr SymTensor operator*(SymTensor a, double s) { return a *= s; }

    /// Storage slot of entry (i, j).
    static constexpr int index(int i, int j) {
        if (i == j) return i;
        if (i > j) std::swap(i, j);
        if constexpr (N == 2) {
            return 2;
        } else {
            return (i == 0) ? (j == 1 ? 3 : 4) : 5;
        }
    }

private:
    std::array<double, size> v_{};
};

using SymTensor2 = SymTensor<2>;
using SymTensor3 = SymTensor<3>;

/// Rank-one tensor s·(e ⊗ e).
template <int N>
SymTensor<N> outer(const std::array<double, N>& e, double s = 1.0) {
    SymTensor<N> t;
    for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) t(i, j) = s * e[i] * e[j];
    return t;
}

/// Eigenvalues ordered by absolute value ascending, with an orthonormal frame
/// whose k-th column belongs to values[k].
template <int N>
struct Spectrum {
    std::array<double, N> values{};
    std::array<std::array<double, N>, N> frame{};  // frame[row][col]

    /// |values| in the stored order (already ascending).
    std::array<double, N> abs_values() const {
        std::array<double, N> a{};
        for (int i = 0; i < N; ++i) a[i] = std::abs(values[i]);
        return a;
    }

    /// frame · diag(d) · frameᵀ
    SymTensor<N> reconstruct(const std::array<double, N>& d) const {
        SymTensor<N> t;
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j) {
                double s = 0.0;
                for (int k = 0; k < N; ++k) s += frame[i][k] * d[k] * frame[j][k];
                t(i, j) = s;
            }
        return t;
    }
    SymTensor<N> reconstruct() const { return reconstruct(values); }
};

/// Spectral decomposition by cyclic Jacobi rotations. Throws InvalidInput on
/// non-finite entries.
template <int N>
Spectrum<N> eigen_sym(const SymTensor<N>& t);

extern template Spectrum<2> eigen_sym<2>(const SymTensor<2>&);
extern template Spectrum<3> eigen_sym<3>(const SymTensor<3>&);

/// Penalization parameter λ > 0.
class Lambda {
public:
    explicit Lambda(double value) : value_(value) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw InvalidInput("lambda must be positive and finite");
    }
    double value() const noexcept { return value_; }
    double sqrt() const noexcept { return std::sqrt(value_); }

private:
    double value_;
};

}  // namespace michell
