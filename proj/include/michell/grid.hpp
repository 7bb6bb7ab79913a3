#pragma once

// Staggered rectangular grids and the fields that live on them.
//
// Layout (per axis a, h_a = spacing):
//   diagonal stress σ_aa      cell centers          n_a points from lo_a + h_a/2
//   shear stress σ_ab (a<b)   interior corners/edges in the a-b plane,
//                             n_a − 1 points from lo_a + h_a along a and b,
//                             cell-centered along the remaining axis
//   vector component v_a      faces normal to a     n_a + 1 points from lo_a
//
// Shear lives only at interior corners, so a field never pushes on anything
// outside Ω̄ and the discrete symmetrized gradient vanishes exactly on the
// rigid motions.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "michell/tensor.hpp"

namespace michell {

/// Regular point set with a box of volume ∏h around every point.
struct Lattice {
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> origin{};  // position of index 0
    std::array<double, 3> h{1.0, 1.0, 1.0};

    std::size_t size() const {
        return static_cast<std::size_t>(n[0]) * n[1] * n[2];
    }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n[0]) * (static_cast<std::size_t>(j) +
                                                 static_cast<std::size_t>(n[1]) * k);
    }
    std::array<int, 3> coords(std::size_t idx) const {
        const int i = static_cast<int>(idx % n[0]);
        const std::size_t r = idx / n[0];
        return {i, static_cast<int>(r % n[1]), static_cast<int>(r / n[1])};
    }
    double position(int axis, int i) const { return origin[axis] + h[axis] * i; }
    bool operator==(const Lattice&) const = default;
};

class Grid {
public:
    /// n = 2: cells = {nx, ny}, lo/hi 2-vectors. n = 3 likewise with three.
    Grid(int dim, std::array<int, 3> cells, std::array<double, 3> lo, std::array<double, 3> hi);

    static Grid square(int cells_per_axis, double lo = 0.0, double hi = 1.0) {
        return Grid(2, {cells_per_axis, cells_per_axis, 1}, {lo, lo, 0.0}, {hi, hi, 1.0});
    }
    static Grid cube(int cells_per_axis, double lo = 0.0, double hi = 1.0) {
        return Grid(3, {cells_per_axis, cells_per_axis, cells_per_axis}, {lo, lo, lo},
                    {hi, hi, hi});
    }

    int dim() const { return dim_; }
    int cells(int axis) const { return cells_[axis]; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    /// Cell volume (area in 2D).
    double cell_volume() const;
    std::size_t num_cells() const { return cell_lattice().size(); }

    Lattice cell_lattice() const;
    /// Interior corner (2D) / edge (3D) lattice of the shear component (a, b).
    Lattice shear_lattice(int a, int b) const;
    /// Face lattice of vector component a.
    Lattice face_lattice(int a) const;

    /// Number of off-diagonal components: 1 in 2D, 3 in 3D.
    int num_shear() const { return dim_ == 2 ? 1 : 3; }
    /// Axis pair of shear slot s: (0,1), (0,2), (1,2).
    static std::array<int, 2> shear_axes(int s);

    bool operator==(const Grid&) const = default;

private:
    int dim_;
    std::array<int, 3> cells_;
    std::array<double, 3> lo_;
    std::array<double, 3> hi_;
    std::array<double, 3> h_;
};

/// Grid-sampled symmetric stress field on the staggered layout.
class StressField {
public:
    explicit StressField(const Grid& grid);

    const Grid& grid() const { return grid_; }
    /// Diagonal component σ_aa at cell centers.
    std::vector<double>& diag(int a) { return diag_[a]; }
    const std::vector<double>& diag(int a) const { return diag_[a]; }
    /// Shear slot s (see Grid::shear_axes).
    std::vector<double>& shear(int s) { return shear_[s]; }
    const std::vector<double>& shear(int s) const { return shear_[s]; }

    /// Component array and lattice by flat slot: 0..dim-1 diagonal, then shear.
    int num_components() const { return grid_.dim() + grid_.num_shear(); }
    std::vector<double>& component(int c);
    const std::vector<double>& component(int c) const;
    Lattice component_lattice(int c) const;
    /// Tensor indices (a, b) of slot c.
    std::array<int, 2> component_axes(int c) const;

    /// Tensor at cell `idx` with shear averaged from the surrounding corners.
    template <int N>
    SymTensor<N> cell_tensor(std::size_t idx) const;

    StressField& operator+=(const StressField& o);
    StressField& operator-=(const StressField& o);
    StressField& operator*=(double s);
    friend StressField operator+(StressField a, const StressField& b) { return a += b; }
    friend StressField operator-(StressField a, const StressField& b) { return a -= b; }
    friend StressField operator*(double s, StressField a) { return a *= s; }

    /// max over cells of the Frobenius norm of cell_tensor.
    double max_cell_norm() const;
    bool all_finite() const;

private:
    Grid grid_;
    std::array<std::vector<double>, 3> diag_;
    std::array<std::vector<double>, 3> shear_;
};

/// Vector field with component a on faces normal to axis a.
class VectorField {
public:
    explicit VectorField(const Grid& grid);

    const Grid& grid() const { return grid_; }
    std::vector<double>& component(int a) { return comp_[a]; }
    const std::vector<double>& component(int a) const { return comp_[a]; }

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(double s, VectorField a) { return a *= s; }

    /// Σ over faces of v_a · cell volume, per component.
    std::array<double, 3> total() const;
    double max_abs() const;

private:
    Grid grid_;
    std::array<std::vector<double>, 3> comp_;
};

/// Row-wise divergence on the staggered grid, with every field extended by
/// zero outside its lattice. Boundary faces therefore see the jump σ·n → 0,
/// which is the traction part of −div μ = g on Ω̄.
VectorField divergence(const StressField& sigma);

/// Symmetrized gradient e(u) = ½(∇u + ∇uᵀ); the negative adjoint of
/// divergence under the weighted pairings below.
StressField sym_gradient(const VectorField& u);

/// Σ_cells vol·(Σ_a σ_aa τ_aa) + Σ_corners vol·2·σ_ab τ_ab (Frobenius pairing).
double inner(const StressField& a, const StressField& b);
/// Σ_faces vol·f_a u_a.
double inner(const VectorField& f, const VectorField& u);

double norm(const StressField& s);
double norm(const VectorField& v);

/// Averaging of each shear slot from its corner lattice to cell centers, and
/// its adjoint (scatter back with weight ¼ per adjacent cell).
void average_shear_to_cells(const Grid& g, int slot, std::span<const double> corner,
                            std::span<double> cell);
void scatter_shear_from_cells(const Grid& g, int slot, std::span<const double> cell,
                              std::span<double> corner);

/// Discrete rigid motions (translations, infinitesimal rotations) sampled on
/// the face lattices; sym_gradient annihilates each of them.
std::vector<VectorField> rigid_motions(const Grid& g);

}  // namespace michell
