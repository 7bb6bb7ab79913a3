#include "michell/integrands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace michell {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
// Relative first-order residual accepted from the finite-difference check.
constexpr double kKktTolerance = 1e-4;

template <std::size_t N>
std::array<double, N> sorted(std::array<double, N> x) {
    for (auto& v : x) v = std::abs(v);
    std::sort(x.begin(), x.end());
    return x;
}

double norm2_abs(const std::array<double, 2>& x) { return x[0] * x[0] + x[1] * x[1]; }
double norm2_abs(const std::array<double, 3>& x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
}

// Low (non-quadratic) branch of h_λ, i.e. h_λ without the (r − √λ)₊² term.
double h_low_abs(const std::array<double, 2>& x, double s) {
    return 2.0 * (x[0] + x[1] - x[0] * x[1] / s);
}

double h_low_abs(const std::array<double, 3>& x, double s) {
    const double u = x[0] + x[1];
    if (u <= x[2]) return 2.0 * (std::hypot(u, x[2]) - x[0] * x[1] / s);
    const double sum = u + x[2];
    const double pairs = x[0] * x[1] + x[0] * x[2] + x[1] * x[2];
    return kSqrt2 * sum + (0.5 * norm2_abs(x) - pairs) / s;
}

template <std::size_t N>
std::array<double, N> spectrum_abs(const SymTensor<static_cast<int>(N)>& t) {
    return eigen_sym(t).abs_values();
}

template <std::size_t N, class H>
double prox_objective(const std::array<double, N>& x, const std::array<double, N>& a, double step,
                      H&& h) {
    double q = 0.0;
    for (std::size_t i = 0; i < N; ++i) q += 0.5 * (x[i] - a[i]) * (x[i] - a[i]);
    return q + step * h(sorted(x));
}

// First-order check on the nonnegative orthant by finite differences: at
// positive coordinates the partial derivative must vanish, at zero
// coordinates the right derivative must be nonnegative.
template <std::size_t N, class H>
double kkt_residual(const std::array<double, N>& x, const std::array<double, N>& a, double step,
                    H&& h) {
    double scale = std::max(1.0, step);
    for (double v : a) scale = std::max(scale, v);
    const double d = 1e-8 * scale;
    double worst = 0.0;
    const double f0 = prox_objective(x, a, step, h);
    for (std::size_t i = 0; i < N; ++i) {
        auto xp = x;
        xp[i] += d;
        const double fp = prox_objective(xp, a, step, h);
        if (x[i] > d) {
            auto xm = x;
            xm[i] -= d;
            const double fm = prox_objective(xm, a, step, h);
            // Kinks between branches are C¹, so one-sided slopes agree there;
            // take the smaller one to stay robust at the orthant corners.
            const double g = std::min(std::abs(fp - f0), std::abs(f0 - fm)) / d;
            worst = std::max(worst, g);
        } else {
            const double g = (fp - f0) / d;
            worst = std::max(worst, -g);
        }
    }
    return worst / scale;
}

// Positive roots R of
//   b²/(R(1−k) + 4t)² + c²/(R + 2t)² = 1
// restricted to R(1−k) + 4t > 0. The map is the radius equation of the
// x₁+x₂ ≤ x₃ branch after eliminating x₁ − x₂.
std::vector<double> branch2_radii(double b, double c, double t, double k, double r_max) {
    auto psi = [&](double r) {
        const double den_u = r * (1.0 - k) + 4.0 * t;
        const double den_3 = r + 2.0 * t;
        return b * b / (den_u * den_u) + c * c / (den_3 * den_3) - 1.0;
    };
    double hi = r_max;
    if (k > 1.0) hi = std::min(hi, 4.0 * t / (k - 1.0) * (1.0 - 1e-12));
    std::vector<double> roots;
    if (!(hi > 0.0)) return roots;

    auto bisect = [&](double lo, double up) {
        double flo = psi(lo);
        for (int it = 0; it < 200 && up - lo > 1e-16 * up; ++it) {
            const double mid = 0.5 * (lo + up);
            const double fm = psi(mid);
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                up = mid;
            }
        }
        return 0.5 * (lo + up);
    };

    if (k == 0.0) {
        // ψ is strictly decreasing; a root exists iff ψ(0) > 0.
        if (psi(0.0) > 0.0 && psi(hi) <= 0.0) roots.push_back(bisect(0.0, hi));
        return roots;
    }
    constexpr int kSamples = 400;
    const double lo0 = hi * 1e-12;
    double prev_r = lo0;
    double prev = psi(lo0);
    for (int i = 1; i <= kSamples; ++i) {
        const double r = lo0 * std::pow(hi / lo0, static_cast<double>(i) / kSamples);
        const double cur = psi(r);
        if ((cur > 0.0) != (prev > 0.0)) roots.push_back(bisect(prev_r, r));
        prev = cur;
        prev_r = r;
    }
    return roots;
}

// Candidate minimizers of ½|x − a|² + t·h(x) with h = 2r (limit) or h_λ, for
// sorted a. Pieces are C¹ across their interfaces, so every local minimizer
// is a stationary point of the piece formula on some face of the orthant.
void branch2_candidates(const std::array<double, 3>& a, double t, double k, double r_max,
                        std::vector<std::array<double, 3>>& out) {
    const double b = a[0] + a[1];
    const double d = (a[0] - a[1]) / (1.0 + k);
    for (double r : branch2_radii(b, a[2], t, k, r_max)) {
        const double u = b * r / (r * (1.0 - k) + 4.0 * t);
        const double x3 = a[2] * r / (r + 2.0 * t);
        if (u < std::abs(d)) continue;
        out.push_back({0.5 * (u + d), 0.5 * (u - d), x3});
    }
    // One coordinate at zero: h reduces to 2‖(x_i, x_j)‖, an isotropic shrink.
    for (int z = 0; z < 3; ++z) {
        const int i = (z + 1) % 3;
        const int j = (z + 2) % 3;
        const double n = std::hypot(a[i], a[j]);
        if (n > 2.0 * t) {
            std::array<double, 3> x{};
            x[i] = a[i] * (1.0 - 2.0 * t / n);
            x[j] = a[j] * (1.0 - 2.0 * t / n);
            out.push_back(x);
        }
    }
    for (int i = 0; i < 3; ++i) {
        std::array<double, 3> x{};
        x[i] = std::max(0.0, a[i] - 2.0 * t);
        out.push_back(x);
    }
}

template <std::size_t N>
std::array<double, N> unsort(const std::array<double, N>& xs, const std::array<int, N>& perm) {
    std::array<double, N> x{};
    for (std::size_t i = 0; i < N; ++i) x[perm[i]] = xs[i];
    return x;
}

template <std::size_t N>
std::array<int, N> sort_perm(const std::array<double, N>& a) {
    std::array<int, N> perm{};
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int i, int j) { return a[i] < a[j]; });
    return perm;
}

template <std::size_t N, class H>
std::array<double, N> pick_best(const std::vector<std::array<double, N>>& candidates,
                                const std::array<double, N>& a, double step, H&& h) {
    std::array<double, N> best{};
    double best_val = std::numeric_limits<double>::infinity();
    for (auto x : candidates) {
        bool ok = true;
        for (auto& v : x) {
            if (!std::isfinite(v)) ok = false;
            v = std::max(v, 0.0);
        }
        if (!ok) continue;
        const double val = prox_objective(x, a, step, h);
        if (val < best_val) {
            best_val = val;
            best = x;
        }
    }
    return best;
}

void check_prox_args(double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("prox step must be positive");
}

template <int N, class F>
SymTensor<N> apply_spectral(const SymTensor<N>& t, F&& f) {
    const Spectrum<N> s = eigen_sym(t);
    std::array<double, N> a = s.abs_values();
    const std::array<double, N> x = f(a);
    std::array<double, N> y{};
    for (int i = 0; i < N; ++i) y[i] = (s.values[i] < 0.0 ? -x[i] : x[i]);
    return s.reconstruct(y);
}

}  // namespace

// ---------------------------------------------------------------------------

double rho_abs(const std::array<double, 2>& x) { return x[0] + x[1]; }

double rho_abs(const std::array<double, 3>& x) { return 0.5 * branch_radius_abs(x); }

double branch_radius_abs(const std::array<double, 2>& x) { return x[0] + x[1]; }

double branch_radius_abs(const std::array<double, 3>& x) {
    const double u = x[0] + x[1];
    if (u <= x[2]) return std::hypot(u, x[2]);
    return (u + x[2]) / kSqrt2;
}

double h_lambda_abs(const std::array<double, 2>& x, double s) {
    if (branch_radius_abs(x) >= s) return norm2_abs(x) / s + s;
    return h_low_abs(x, s);
}

double h_lambda_abs(const std::array<double, 3>& x, double s) {
    if (branch_radius_abs(x) >= s) return norm2_abs(x) / s + s;
    return h_low_abs(x, s);
}

double h_limit_abs(const std::array<double, 2>& x) { return 2.0 * (x[0] + x[1]); }

double h_limit_abs(const std::array<double, 3>& x) { return 2.0 * branch_radius_abs(x); }

double wavecone_abs(const std::array<double, 2>& x) { return 2.0 * x[1]; }

double wavecone_abs(const std::array<double, 3>& x) { return 2.0 * std::hypot(x[1], x[2]); }

double rho2(const SymTensor2& t) { return rho_abs(spectrum_abs<2>(t)); }

double rho3(const SymTensor3& t) { return rho_abs(spectrum_abs<3>(t)); }

template <int N>
double h_tilde(const SymTensor<N>& t, Lambda lambda) {
    if (t.is_zero()) return 0.0;
    const double s = lambda.sqrt();
    return t.norm2() / s + s;
}

template <int N>
double h_lambda(const SymTensor<N>& t, Lambda lambda) {
    return h_lambda_abs(spectrum_abs<N>(t), lambda.sqrt());
}

template <int N>
double h_limit(const SymTensor<N>& t) {
    return h_limit_abs(spectrum_abs<N>(t));
}

template <int N>
double wavecone_bound(const SymTensor<N>& t) {
    return wavecone_abs(spectrum_abs<N>(t));
}

template <int N>
double compliance_integrand(const SymTensor<N>& xi, Lambda lambda) {
    if (xi.is_zero()) return 0.0;
    return xi.norm2() + lambda.value();
}

// ---------------------------------------------------------------------------

std::array<double, 2> prox_h_limit_abs(const std::array<double, 2>& a, double step) {
    check_prox_args(step);
    return {std::max(0.0, a[0] - 2.0 * step), std::max(0.0, a[1] - 2.0 * step)};
}

std::array<double, 3> prox_h_limit_abs(const std::array<double, 3>& a_in, double step) {
    check_prox_args(step);
    const auto perm = sort_perm(a_in);
    const std::array<double, 3> a{a_in[perm[0]], a_in[perm[1]], a_in[perm[2]]};
    auto h = [](const std::array<double, 3>& x) { return h_limit_abs(x); };

    std::vector<std::array<double, 3>> cand;
    cand.push_back({0.0, 0.0, 0.0});
    // |τ₁|+|τ₂| ≥ |τ₃| branch: h = √2·Σ|τᵢ|, separable soft threshold.
    cand.push_back({std::max(0.0, a[0] - kSqrt2 * step), std::max(0.0, a[1] - kSqrt2 * step),
                    std::max(0.0, a[2] - kSqrt2 * step)});
    branch2_candidates(a, step, 0.0, 4.0 * std::hypot(a[0] + a[1], a[2]) + 1.0, cand);

    const auto best = pick_best(cand, a, step, h);
    const double res = kkt_residual(best, a, step, h);
    if (res > kKktTolerance) throw NumericalFailure("prox_h_limit: no stationary candidate", res);
    return unsort(best, perm);
}

std::array<double, 2> prox_h_lambda_abs(const std::array<double, 2>& a_in, double step,
                                        double s) {
    check_prox_args(step);
    const auto perm = sort_perm(a_in);
    const std::array<double, 2> a{a_in[perm[0]], a_in[perm[1]]};
    auto h = [s](const std::array<double, 2>& x) { return h_lambda_abs(x, s); };
    const double k = 2.0 * step / s;

    std::vector<std::array<double, 2>> cand;
    cand.push_back({0.0, 0.0});
    cand.push_back({a[0] / (1.0 + k), a[1] / (1.0 + k)});
    const double det = 1.0 - k * k;
    if (std::abs(det) > 1e-14) {
        const double r0 = a[0] - 2.0 * step;
        const double r1 = a[1] - 2.0 * step;
        cand.push_back({(r0 + k * r1) / det, (r1 + k * r0) / det});
    }
    for (int i = 0; i < 2; ++i) {
        std::array<double, 2> lo{};
        lo[i] = a[i] - 2.0 * step;
        cand.push_back(lo);
        std::array<double, 2> hi{};
        hi[i] = a[i] / (1.0 + k);
        cand.push_back(hi);
    }

    const auto best = pick_best(cand, a, step, h);
    const double res = kkt_residual(best, a, step, h);
    if (res > kKktTolerance) throw NumericalFailure("prox_h_lambda: no stationary candidate", res);
    return unsort(best, perm);
}

std::array<double, 3> prox_h_lambda_abs(const std::array<double, 3>& a_in, double step,
                                        double s) {
    check_prox_args(step);
    const auto perm = sort_perm(a_in);
    const std::array<double, 3> a{a_in[perm[0]], a_in[perm[1]], a_in[perm[2]]};
    auto h = [s](const std::array<double, 3>& x) { return h_lambda_abs(x, s); };
    const double k = 2.0 * step / s;
    const double c = step / s;

    std::vector<std::array<double, 3>> cand;
    cand.push_back({0.0, 0.0, 0.0});
    cand.push_back({a[0] / (1.0 + k), a[1] / (1.0 + k), a[2] / (1.0 + k)});

    // Quadratic piece √2·Σx + (½|x|² − Σ_{i<j} xᵢxⱼ)/√λ on every face of the
    // orthant: (I + c·M_F) x_F = a_F − √2·t with M = 2I − 11ᵀ.
    for (int mask = 1; mask < 8; ++mask) {
        int idx[3];
        int m = 0;
        for (int i = 0; i < 3; ++i)
            if (mask & (1 << i)) idx[m++] = i;
        double mat[3][3];
        double rhs[3];
        for (int p = 0; p < m; ++p) {
            rhs[p] = a[idx[p]] - kSqrt2 * step;
            for (int q = 0; q < m; ++q) mat[p][q] = (p == q) ? 1.0 + c : -c;
        }
        // Gaussian elimination with partial pivoting on ≤ 3 unknowns.
        bool singular = false;
        for (int col = 0; col < m && !singular; ++col) {
            int piv = col;
            for (int r = col + 1; r < m; ++r)
                if (std::abs(mat[r][col]) > std::abs(mat[piv][col])) piv = r;
            if (std::abs(mat[piv][col]) < 1e-13 * (1.0 + c)) {
                singular = true;
                break;
            }
            std::swap(mat[piv], mat[col]);
            std::swap(rhs[piv], rhs[col]);
            for (int r = col + 1; r < m; ++r) {
                const double f = mat[r][col] / mat[col][col];
                for (int q = col; q < m; ++q) mat[r][q] -= f * mat[col][q];
                rhs[r] -= f * rhs[col];
            }
        }
        if (singular) continue;
        double sol[3];
        for (int r = m - 1; r >= 0; --r) {
            double acc = rhs[r];
            for (int q = r + 1; q < m; ++q) acc -= mat[r][q] * sol[q];
            sol[r] = acc / mat[r][r];
        }
        std::array<double, 3> x{};
        for (int p = 0; p < m; ++p) x[idx[p]] = sol[p];
        cand.push_back(x);
    }

    // Branch x₁+x₂ ≤ x₃: 2√((x₁+x₂)² + x₃²) − 2x₁x₂/√λ.
    branch2_candidates(a, step, k, 2.0 * (s + std::hypot(a[0] + a[1], a[2])), cand);

    const auto best = pick_best(cand, a, step, h);
    const double res = kkt_residual(best, a, step, h);
    if (res > kKktTolerance) throw NumericalFailure("prox_h_lambda: no stationary candidate", res);
    return unsort(best, perm);
}

template <int N>
SymTensor<N> prox_h_limit(const SymTensor<N>& t, double step) {
    check_prox_args(step);
    return apply_spectral<N>(t, [&](const std::array<double, N>& a) {
        return prox_h_limit_abs(a, step);
    });
}

template <int N>
SymTensor<N> prox_h_lambda(const SymTensor<N>& t, double step, Lambda lambda) {
    check_prox_args(step);
    const double s = lambda.sqrt();
    return apply_spectral<N>(t, [&](const std::array<double, N>& a) {
        return prox_h_lambda_abs(a, step, s);
    });
}

template <int N>
double evaluate_density(DensityKind kind, const SymTensor<N>& t, double lambda) {
    switch (kind) {
        case DensityKind::HTilde: return h_tilde(t, Lambda(lambda));
        case DensityKind::HLambda: return h_lambda(t, Lambda(lambda));
        case DensityKind::HLimit: return h_limit(t);
        case DensityKind::WaveCone: return wavecone_bound(t);
        case DensityKind::TotalVariation: return t.norm();
    }
    return 0.0;
}

#define MICHELL_INSTANTIATE(N)                                                      \
    template double h_tilde<N>(const SymTensor<N>&, Lambda);                        \
    template double h_lambda<N>(const SymTensor<N>&, Lambda);                       \
    template double h_limit<N>(const SymTensor<N>&);                                \
    template double wavecone_bound<N>(const SymTensor<N>&);                         \
    template double compliance_integrand<N>(const SymTensor<N>&, Lambda);           \
    template SymTensor<N> prox_h_limit<N>(const SymTensor<N>&, double);             \
    template SymTensor<N> prox_h_lambda<N>(const SymTensor<N>&, double, Lambda);    \
    template double evaluate_density<N>(DensityKind, const SymTensor<N>&, double);

MICHELL_INSTANTIATE(2)
MICHELL_INSTANTIATE(3)

#undef MICHELL_INSTANTIATE

}  // namespace michell
