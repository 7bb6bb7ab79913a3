#pragma once

// Pointwise spectral densities of the relaxed optimal-design problem and
// their proximal maps. Every density depends on τ only through the absolute
// eigenvalues |τ₁| ≤ |τ₂| (≤ |τ₃|), so each one has an "_abs" form taking
// those sorted magnitudes directly; the tensor overloads diagonalize first.

#include <array>

#include "michell/tensor.hpp"

namespace michell {

// ---------------------------------------------------------------------------
// Densities on sorted absolute eigenvalues x (ascending).

double rho_abs(const std::array<double, 2>& x);
double rho_abs(const std::array<double, 3>& x);

/// Branch threshold quantity r(τ): h_λ takes its quadratic branch iff
/// r(τ) ≥ √λ, and h_limit = 2r. In 2D r = ρ⁽²⁾; in 3D r = 2ρ⁽³⁾.
double branch_radius_abs(const std::array<double, 2>& x);
double branch_radius_abs(const std::array<double, 3>& x);

double h_lambda_abs(const std::array<double, 2>& x, double sqrt_lambda);
double h_lambda_abs(const std::array<double, 3>& x, double sqrt_lambda);

double h_limit_abs(const std::array<double, 2>& x);
double h_limit_abs(const std::array<double, 3>& x);

double wavecone_abs(const std::array<double, 2>& x);
double wavecone_abs(const std::array<double, 3>& x);

// ---------------------------------------------------------------------------
// Tensor forms.

/// ρ⁽²⁾(τ) = |τ₁| + |τ₂|.
double rho2(const SymTensor2& t);

/// ρ⁽³⁾(τ): ½√((|τ₁|+|τ₂|)² + τ₃²) if |τ₁|+|τ₂| ≤ |τ₃|, else (|τ₁|+|τ₂|+|τ₃|)/(2√2).
double rho3(const SymTensor3& t);

/// h̃_λ(τ) = λ^{-1/2}|τ|² + λ^{1/2} for τ ≠ 0, and 0 at τ = 0.
template <int N>
double h_tilde(const SymTensor<N>& t, Lambda lambda);

/// Relaxed (div-quasiconvex) density h_λ.
template <int N>
double h_lambda(const SymTensor<N>& t, Lambda lambda);

/// Pointwise limit of h_λ as λ → ∞: 2ρ⁽²⁾ in 2D, 4ρ⁽³⁾ in 3D.
template <int N>
double h_limit(const SymTensor<N>& t);

/// Restriction of h_limit to the wave cone, extended to all tensors:
/// 2|τ₂| in 2D, 2√(τ₂² + τ₃²) in 3D.
template <int N>
double wavecone_bound(const SymTensor<N>& t);

/// Compliance integrand with identity elasticity tensor: |ξ|² + λ for ξ ≠ 0.
/// Satisfies h̃_λ(ξ) = λ^{-1/2}·compliance_integrand(ξ, λ).
template <int N>
double compliance_integrand(const SymTensor<N>& xi, Lambda lambda);

// ---------------------------------------------------------------------------
// Proximal maps, argmin_y ½|y − τ|² + t·f(y).

template <int N>
SymTensor<N> prox_h_limit(const SymTensor<N>& t, double step);

template <int N>
SymTensor<N> prox_h_lambda(const SymTensor<N>& t, double step, Lambda lambda);

/// Eigenvalue-space versions on nonnegative magnitudes a (any order).
/// Return the minimizing magnitudes in the same slot order as a.
std::array<double, 2> prox_h_limit_abs(const std::array<double, 2>& a, double step);
std::array<double, 3> prox_h_limit_abs(const std::array<double, 3>& a, double step);
std::array<double, 2> prox_h_lambda_abs(const std::array<double, 2>& a, double step,
                                        double sqrt_lambda);
std::array<double, 3> prox_h_lambda_abs(const std::array<double, 3>& a, double step,
                                        double sqrt_lambda);

/// Density selector used by quadrature and solvers.
enum class DensityKind { HTilde, HLambda, HLimit, WaveCone, TotalVariation };

/// Evaluates the selected density; lambda is ignored by the λ-free ones.
template <int N>
double evaluate_density(DensityKind kind, const SymTensor<N>& t, double lambda);

}  // namespace michell
