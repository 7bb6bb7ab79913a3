#pragma once

// Radial bump mollifier η(x) = C_n exp(−1/(1−|x|²)) on the unit ball, its
// ε-rescaling η_ε(x) = ε⁻ⁿ η(x/ε), and lattice convolutions with it.

#include <span>

#include "michell/grid.hpp"
#include "michell/tensor.hpp"

namespace michell {

class Mollifier {
public:
    /// dim ∈ {1,2,3}; epsilon > 0 is the support radius.
    Mollifier(int dim, double epsilon);

    int dim() const { return dim_; }
    double epsilon() const { return eps_; }

    /// η_ε at distance r from the center.
    double operator()(double r) const;
    /// sup η_ε = C_n e⁻¹ ε⁻ⁿ.
    double sup() const;

    /// C_n, chosen so that ∫η = 1.
    static double normalization(int dim);
    /// sup of the unit-width profile η.
    static double unit_sup(int dim);

private:
    int dim_;
    double eps_;
};

/// Smallest ε = 2^{-k} (k ∈ ℤ) with mass·ε⁻ⁿ·eta_sup ≤ ¼√λ.
double epsilon_schedule(Lambda lambda, double mass, double eta_sup, int n);

enum class Padding { Zero, Periodic };

/// Convolution of an array on `lattice` with η_ε, using the lattice-sampled
/// kernel renormalized so its discrete integral is exactly 1. Inputs are
/// scattered, so sparse inputs are cheap. Throws InvalidInput when ε is
/// below two lattice spacings on any axis.
void convolve(const Lattice& lattice, std::span<const double> in, std::span<double> out,
              const Mollifier& m, Padding pad = Padding::Zero);

/// One-dimensional convolution along `axis` with a 1D mollifier.
void convolve_axis(const Lattice& lattice, int axis, std::span<const double> in,
                   std::span<double> out, const Mollifier& m, Padding pad = Padding::Zero);

/// Component-wise mollification. With zero padding, mass convolved past the
/// edge of a lattice is dropped (the result is the restriction to the grid).
StressField mollify(const StressField& f, const Mollifier& m, Padding pad = Padding::Zero);
VectorField mollify(const VectorField& f, const Mollifier& m, Padding pad = Padding::Zero);

}  // namespace michell
