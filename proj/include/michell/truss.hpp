#pragma once

// Planar ground-structure trusses: nodes, candidate bars, signed bar
// strengths, equilibrium, weight, and rasterization to stress fields.

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "michell/grid.hpp"
#include "michell/loads.hpp"
#include "michell/mollifier.hpp"

namespace michell {

using Point2 = std::array<double, 2>;

struct Bar {
    int i = 0;
    int j = 0;
    double length = 0.0;
    Point2 dir{};  // (x_i − x_j)/|x_i − x_j|
};

class GroundStructure {
public:
    GroundStructure(std::vector<Point2> nodes, const std::vector<std::pair<int, int>>& bars,
                    std::vector<int> supports = {});

    /// Every node pair as a candidate bar.
    static GroundStructure complete(std::vector<Point2> nodes, std::vector<int> supports = {});

    const std::vector<Point2>& nodes() const { return nodes_; }
    const std::vector<Bar>& bars() const { return bars_; }
    const std::vector<int>& supports() const { return supports_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_bars() const { return static_cast<int>(bars_.size()); }
    bool is_support(int node) const;

    GroundStructure translated(const Point2& shift) const;
    GroundStructure scaled(double s) const;

private:
    std::vector<Point2> nodes_;
    std::vector<Bar> bars_;
    std::vector<int> supports_;
};

/// Signed bar strengths, one per bar. With the force convention of
/// equilibrium_matrix, w > 0 pushes the end nodes apart (compression).
struct TrussDesign {
    std::vector<double> w;
};

struct NodalLoad {
    int node = 0;
    Point2 force{};
};
using PointLoadSet = std::vector<NodalLoad>;

/// B: bar strengths → nodal forces. Column of bar (i,j) holds +dir at node i
/// and −dir at node j. Rows are (node, axis) pairs in node order, support
/// rows removed unless keep_supports.
Eigen::MatrixXd equilibrium_matrix(const GroundStructure& gs, bool keep_supports = false);

/// Nodes whose rows survive in equilibrium_matrix, in row order (2 rows each).
std::vector<int> free_nodes(const GroundStructure& gs);

/// Stacked load vector matching the rows of equilibrium_matrix.
Eigen::VectorXd load_vector(const GroundStructure& gs, const PointLoadSet& loads,
                            bool keep_supports = false);

/// W = Σ |w_ij| |x_i − x_j|.
double truss_weight(const GroundStructure& gs, const TrussDesign& d);

/// max-norm of g + Bw over non-support nodes.
double truss_residual(const GroundStructure& gs, const TrussDesign& d, const PointLoadSet& loads);

/// Reactions at supports, −(g + Bw) restricted to support nodes.
PointLoadSet support_reactions(const GroundStructure& gs, const TrussDesign& d,
                               const PointLoadSet& loads);

/// Continuum load carried by the truss stress measure σ = Σ w e⊗e H¹⌞bar.
/// Since −div σ = Σ f_ij = −(g + reactions), this is the negated applied
/// loads plus reactions, as point forces. Energies are even in σ, so the sign
/// only matters when pairing rasterized trusses with assembled loads.
LoadSpec truss_load_spec(const GroundStructure& gs, const TrussDesign& d,
                         const PointLoadSet& loads);

/// Line measure Σ w e⊗e H¹⌞bar deposited by exact segment/dual-box
/// intersection lengths on each component lattice (no smoothing).
StressField rasterize_truss_exact(const GroundStructure& gs, const TrussDesign& d, const Grid& grid);

/// As above, then each bar is smeared across its width by a 1D η_ε profile
/// along the grid axis most transverse to it. Cross-section integrals are
/// preserved. Throws InvalidInput when ε is below two spacings.
StressField rasterize_truss(const GroundStructure& gs, const TrussDesign& d, const Grid& grid,
                            const Mollifier& profile);

struct TrussInstance {
    GroundStructure structure;
    PointLoadSet loads;
};

/// Whitespace-delimited sections:
///   nodes      then lines "id x y" (ids 0..M−1 in order)
///   bars       then lines "i j", or "bars all" for the complete structure
///   loads      then lines "id gx gy"
///   supports   then node ids (any number per line)
TrussInstance read_truss_instance(std::istream& in);
TrussInstance read_truss_file(const std::string& path);
void write_truss_design(std::ostream& out, const GroundStructure& gs, const TrussDesign& d);

}  // namespace michell
