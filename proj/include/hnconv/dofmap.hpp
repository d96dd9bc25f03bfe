#pragma once

#include "hnconv/geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace hnconv {

/// Taylor-Hood degree-of-freedom layout for one mesh.
///
/// Each scalar P2 field (U, V, T) is numbered vertices first, then global
/// edges in lexicographically sorted order. Pressure is P1 on the vertices.
/// The full coupled vector is ordered [U | V | T | p | mean-pressure
/// multiplier]; the reduced (free) numbering drops Dirichlet entries while
/// preserving block order.
///
/// Velocity is Dirichlet (value 0) on every boundary dof. Temperature is
/// Dirichlet 1 on HotWall dofs and 0 on ColdWall dofs; Adiabatic dofs stay
/// free (natural condition). A dof shared by walls of different tags takes
/// the hottest one.
struct DofMap {
    int n_vertices = 0;
    int n_edges = 0;
    int n_p2 = 0;  // per scalar field: n_vertices + n_edges
    int n_p1 = 0;  // = n_vertices

    /// Sorted unique edges (node pairs, a < b); edge k owns P2 dof
    /// n_vertices + k.
    std::vector<std::pair<int, int>> edges;
    /// Per triangle, the P2 dof of the midside node on local edges
    /// (0,1), (1,2), (2,0).
    std::vector<std::array<int, 3>> tri_edge_dofs;
    /// Coordinates of all P2 nodes (vertices, then edge midpoints).
    std::vector<Point2> p2_coords;

    std::vector<std::uint8_t> vel_dirichlet;   // per P2 dof
    std::vector<std::uint8_t> temp_dirichlet;  // per P2 dof
    std::vector<double> temp_value;            // valid where temp_dirichlet

    /// Adjacency of each mesh boundary edge: owning triangle and local edge.
    std::vector<std::pair<int, int>> boundary_adjacency;

    // Block offsets in the full vector.
    int offset_u() const { return 0; }
    int offset_v() const { return n_p2; }
    int offset_t() const { return 2 * n_p2; }
    int offset_p() const { return 3 * n_p2; }
    int multiplier_index() const { return 3 * n_p2 + n_p1; }
    int n_full() const { return 3 * n_p2 + n_p1 + 1; }

    std::vector<int> full_to_free;  // -1 on Dirichlet entries
    std::vector<int> free_to_full;
    int n_free = 0;

    /// P2 dofs of one triangle: 3 vertices then 3 midside nodes, aligned
    /// with the local P2 basis numbering.
    std::array<int, 6> p2_dofs(const Mesh& mesh, int t) const {
        const auto& tri = mesh.triangles[t];
        const auto& ed = tri_edge_dofs[t];
        return {tri[0], tri[1], tri[2], ed[0], ed[1], ed[2]};
    }

    int edge_dof(int a, int b) const;  // throws if (a,b) is not a mesh edge
};

DofMap enumerate_dofs(const Mesh& mesh);

} // namespace hnconv
