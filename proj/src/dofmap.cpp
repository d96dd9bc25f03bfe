#include "hnconv/dofmap.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace hnconv {

namespace {

std::pair<int, int> sorted_edge(int a, int b) {
    return {std::min(a, b), std::max(a, b)};
}

} // namespace

int DofMap::edge_dof(int a, int b) const {
    const auto key = sorted_edge(a, b);
    const auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key)
        throw std::out_of_range("not a mesh edge");
    return n_vertices + static_cast<int>(it - edges.begin());
}

DofMap enumerate_dofs(const Mesh& mesh) {
    DofMap dofs;
    dofs.n_vertices = mesh.num_nodes();

    dofs.edges.reserve(mesh.num_triangles() * 2);
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e)
            dofs.edges.push_back(sorted_edge(tri[e], tri[(e + 1) % 3]));
    std::sort(dofs.edges.begin(), dofs.edges.end());
    dofs.edges.erase(std::unique(dofs.edges.begin(), dofs.edges.end()),
                     dofs.edges.end());
    dofs.n_edges = static_cast<int>(dofs.edges.size());
    dofs.n_p2 = dofs.n_vertices + dofs.n_edges;
    dofs.n_p1 = dofs.n_vertices;

    dofs.tri_edge_dofs.resize(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        dofs.tri_edge_dofs[t] = {dofs.edge_dof(tri[0], tri[1]),
                                 dofs.edge_dof(tri[1], tri[2]),
                                 dofs.edge_dof(tri[2], tri[0])};
    }

    dofs.p2_coords.resize(dofs.n_p2);
    for (int i = 0; i < dofs.n_vertices; ++i) dofs.p2_coords[i] = mesh.nodes[i];
    for (int k = 0; k < dofs.n_edges; ++k) {
        const auto& [a, b] = dofs.edges[k];
        dofs.p2_coords[dofs.n_vertices + k] = {
            0.5 * (mesh.nodes[a].x + mesh.nodes[b].x),
            0.5 * (mesh.nodes[a].y + mesh.nodes[b].y)};
    }

    // Boundary conditions. Rank keeps the assignment order-independent when
    // a vertex is shared by walls with different tags: Hot > Cold > none.
    dofs.vel_dirichlet.assign(dofs.n_p2, 0);
    dofs.temp_dirichlet.assign(dofs.n_p2, 0);
    dofs.temp_value.assign(dofs.n_p2, 0.0);
    std::vector<std::uint8_t> temp_rank(dofs.n_p2, 0);
    for (const auto& be : mesh.boundary_edges) {
        const int d[3] = {be.a, be.b, dofs.edge_dof(be.a, be.b)};
        for (int dof : d) {
            dofs.vel_dirichlet[dof] = 1;
            if (be.tag == BoundaryTag::HotWall && temp_rank[dof] < 2) {
                temp_rank[dof] = 2;
                dofs.temp_dirichlet[dof] = 1;
                dofs.temp_value[dof] = 1.0;
            } else if (be.tag == BoundaryTag::ColdWall && temp_rank[dof] < 1) {
                temp_rank[dof] = 1;
                dofs.temp_dirichlet[dof] = 1;
                dofs.temp_value[dof] = 0.0;
            }
        }
    }

    // Reduced numbering over [U | V | T | p | multiplier].
    dofs.full_to_free.assign(dofs.n_full(), -1);
    auto push_free = [&](int full) {
        dofs.full_to_free[full] = static_cast<int>(dofs.free_to_full.size());
        dofs.free_to_full.push_back(full);
    };
    for (int i = 0; i < dofs.n_p2; ++i)
        if (!dofs.vel_dirichlet[i]) push_free(dofs.offset_u() + i);
    for (int i = 0; i < dofs.n_p2; ++i)
        if (!dofs.vel_dirichlet[i]) push_free(dofs.offset_v() + i);
    for (int i = 0; i < dofs.n_p2; ++i)
        if (!dofs.temp_dirichlet[i]) push_free(dofs.offset_t() + i);
    for (int i = 0; i < dofs.n_p1; ++i) push_free(dofs.offset_p() + i);
    push_free(dofs.multiplier_index());
    dofs.n_free = static_cast<int>(dofs.free_to_full.size());

    // Boundary edge adjacency (each boundary edge belongs to one triangle).
    std::map<std::pair<int, int>, int> boundary_index;
    for (size_t k = 0; k < mesh.boundary_edges.size(); ++k) {
        const auto& be = mesh.boundary_edges[k];
        boundary_index[sorted_edge(be.a, be.b)] = static_cast<int>(k);
    }
    dofs.boundary_adjacency.assign(mesh.boundary_edges.size(), {-1, -1});
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const auto it =
                boundary_index.find(sorted_edge(tri[e], tri[(e + 1) % 3]));
            if (it != boundary_index.end())
                dofs.boundary_adjacency[it->second] = {t, e};
        }
    }
    return dofs;
}

} // namespace hnconv
