#pragma once

// Right-hand sides g of −div μ = g: body-force patches, boundary tractions
// and (mollified) point forces, assembled onto the face lattices of a grid.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "michell/grid.hpp"

namespace michell {

using Vec3 = std::array<double, 3>;

/// Constant force density b on an axis-aligned box (clipped to the grid box).
struct BodyPatch {
    Vec3 lo{};
    Vec3 hi{};
    Vec3 density{};
};

/// Surface density c on part of the boundary face x_axis = lo/hi. `lo`/`hi`
/// bound the loaded region along the tangential axes; entries for `axis`
/// itself are ignored.
struct Traction {
    int axis = 0;
    bool upper = false;
    Vec3 lo{};
    Vec3 hi{};
    Vec3 density{};
};

struct PointForce {
    Vec3 x{};
    Vec3 force{};
};

struct LoadSpec {
    int dim = 2;
    std::vector<BodyPatch> bodies;
    std::vector<Traction> tractions;
    std::vector<PointForce> points;

    /// Continuum resultant force and moment (moment components ordered as the
    /// shear slots: (0,1), (0,2), (1,2); only the first is used in 2D).
    Vec3 total_force(const Grid& g) const;
    Vec3 total_moment(const Grid& g) const;
    bool empty() const { return bodies.empty() && tractions.empty() && points.empty(); }
    LoadSpec scaled(double s) const;
};

/// Assembles g on the face lattices. Point forces become η_ε bumps
/// renormalized to their in-grid support; tractions sit on the outermost face
/// layer scaled by 1/h. Throws Infeasible when force or moment balance fails
/// (relative tolerance 1e-10) and InvalidInput when ε < 2h with point forces.
VectorField assemble_load(const LoadSpec& spec, const Grid& grid, double epsilon);

/// Discrete resultant Σ vol·g and moment against the discrete rotations.
Vec3 discrete_force(const VectorField& g);
Vec3 discrete_moment(const VectorField& g);

/// Plain-text load description, one item per line ('#' starts a comment):
///   dim 2|3
///   body     <lo…> <hi…> <b…>
///   traction <axis> lo|hi <t_lo t_hi per tangential axis> <c…>
///   point    <x…> <g…>
LoadSpec read_load_spec(std::istream& in);
LoadSpec read_load_spec_file(const std::string& path);

}  // namespace michell
