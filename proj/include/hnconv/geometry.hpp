#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hnconv {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Thermal boundary condition carried by each boundary edge.
enum class BoundaryTag : std::uint8_t { HotWall, ColdWall, Adiabatic };

const char* to_string(BoundaryTag tag);
BoundaryTag boundary_tag_from_string(const std::string& name);

enum class CavityShape : std::uint8_t { Square, LShape, HShape };

const char* to_string(CavityShape shape);
CavityShape cavity_shape_from_string(const std::string& name);

/// Parametric description of the cavity. All lengths are nondimensional.
///
/// Square: [0,W] x [0,H].
/// LShape: vertical arm [0,a] x [0,H] plus horizontal arm [0,W] x [0,a],
///         where a = arm_thickness.
/// HShape: left bar [0,a] x [0,H], right bar [W-a,W] x [0,H], and a central
///         web [a,W-a] x [(H-b)/2,(H+b)/2] with b = bridge_height. The shape
///         is mirror-symmetric about x = W/2.
///
/// The hot wall is the extreme-left vertical wall; heater_extent is the
/// heated fraction of that wall measured from its bottom end. The extreme
/// right vertical wall is cold; every other wall is adiabatic.
struct GeometrySpec {
    CavityShape shape = CavityShape::Square;
    double outer_width = 1.0;
    double outer_height = 1.0;
    double arm_thickness = 0.25;  // L and H shapes
    double bridge_height = 0.25;  // H shape only
    double heater_extent = 1.0;   // fraction of the hot wall, anchored at bottom

    static GeometrySpec square();
    static GeometrySpec lshape();
    static GeometrySpec hshape();

    /// Exact area of the cavity polygon.
    double area() const;

    /// Closed-region membership test (tolerance 1e-12).
    bool contains(double x, double y) const;

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

struct BoundaryEdge {
    int a = -1;  // node indices, stored with a < b
    int b = -1;
    BoundaryTag tag = BoundaryTag::Adiabatic;
};

/// Conforming triangulation with counterclockwise triangles and tagged
/// boundary edges. Meshes are immutable once built and safe to share
/// read-only between concurrent solves.
struct Mesh {
    std::vector<Point2> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    int resolution = 0;  // characteristic grid count n

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    int num_boundary_edges() const { return static_cast<int>(boundary_edges.size()); }

    double triangle_area(int t) const;
    double total_area() const;
    double max_edge_length() const;
};

/// Cuts an n x n structured grid to the cavity outline; every kept cell is
/// split into two triangles along the same (bottom-left to top-right)
/// diagonal. Node ordering is row-major over the background grid.
///
/// Throws std::invalid_argument when n < 2 or when a cut line of the outline
/// (arm or bridge boundary) is not aligned with the grid, which would
/// otherwise produce staircase boundaries.
Mesh build_mesh(const GeometrySpec& spec, int n);

/// Splits every triangle into 4 similar children via edge midpoints.
/// Boundary tags are inherited and the mesh stays conforming.
Mesh uniform_refine(const Mesh& mesh);

struct MeshCheck {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct MeshReport {
    std::vector<MeshCheck> checks;
    bool all_pass() const;
    std::string summary() const;
};

/// Runs the mesh invariant checks (positive areas, conformity, closed tagged
/// boundary, no duplicate or hanging nodes) and reports the first offending
/// entity per check.
MeshReport validate_mesh(const Mesh& mesh);

/// Plain-text mesh format:
///   nodes <N> triangles <M> edges <E>
///   x y                 (N lines)
///   i0 i1 i2            (M lines, zero-based)
///   a b tag             (E lines)
void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(std::istream& in);
Mesh read_mesh(const std::string& path);

} // namespace hnconv
