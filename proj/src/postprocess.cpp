#include "hnconv/postprocess.hpp"

#include "hnconv/fe.hpp"
#include "hnconv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace hnconv {

namespace {

struct WallEdge {
    int boundary_index;
    double arc_start;  // cumulative arc length at the first endpoint
    double length;
};

/// Boundary edges with the requested tag, ordered along the wall by midpoint
/// (all walls here are straight, so lexicographic midpoint order is the
/// arc-length order).
std::vector<WallEdge> wall_edges(const Mesh& mesh, BoundaryTag tag) {
    std::vector<int> indices;
    for (int k = 0; k < mesh.num_boundary_edges(); ++k)
        if (mesh.boundary_edges[k].tag == tag) indices.push_back(k);
    std::sort(indices.begin(), indices.end(), [&](int a, int b) {
        const auto& ea = mesh.boundary_edges[a];
        const auto& eb = mesh.boundary_edges[b];
        const auto ma = std::pair{0.5 * (mesh.nodes[ea.a].x + mesh.nodes[ea.b].x),
                                  0.5 * (mesh.nodes[ea.a].y + mesh.nodes[ea.b].y)};
        const auto mb = std::pair{0.5 * (mesh.nodes[eb.a].x + mesh.nodes[eb.b].x),
                                  0.5 * (mesh.nodes[eb.a].y + mesh.nodes[eb.b].y)};
        return ma < mb;
    });
    std::vector<WallEdge> out;
    double arc = 0.0;
    for (int k : indices) {
        const auto& be = mesh.boundary_edges[k];
        const double len = std::hypot(mesh.nodes[be.b].x - mesh.nodes[be.a].x,
                                      mesh.nodes[be.b].y - mesh.nodes[be.a].y);
        out.push_back({k, arc, len});
        arc += len;
    }
    return out;
}

/// Temperature gradient at a point of a boundary edge, traced from the
/// adjacent triangle. t_param runs from edge node a to edge node b.
struct EdgeTrace {
    int tri;
    int local_a;  // local vertex index of edge endpoint a
    int local_b;
    std::array<double, 6> coeffs;
    ElementGeometry geom;
    double nx, ny;  // into-fluid normal
};

EdgeTrace edge_trace(const SolutionFields& solution, const Mesh& mesh,
                     const DofMap& dofs, int boundary_index) {
    const auto [tri, local_edge] = dofs.boundary_adjacency[boundary_index];
    if (tri < 0) throw std::logic_error("boundary edge without adjacency");
    const auto& be = mesh.boundary_edges[boundary_index];
    const auto& tv = mesh.triangles[tri];

    EdgeTrace tr;
    tr.tri = tri;
    tr.local_a = -1;
    tr.local_b = -1;
    for (int k = 0; k < 3; ++k) {
        if (tv[k] == be.a) tr.local_a = k;
        if (tv[k] == be.b) tr.local_b = k;
    }
    if (tr.local_a < 0 || tr.local_b < 0)
        throw std::logic_error("boundary adjacency does not contain the edge");

    const auto p2 = dofs.p2_dofs(mesh, tri);
    for (int k = 0; k < 6; ++k)
        tr.coeffs[k] = solution.full[dofs.offset_t() + p2[k]];
    tr.geom = element_geometry(mesh.nodes[tv[0]], mesh.nodes[tv[1]],
                               mesh.nodes[tv[2]]);

    // Into-fluid normal: perpendicular of the edge oriented toward the
    // opposite vertex.
    const Point2& pa = mesh.nodes[be.a];
    const Point2& pb = mesh.nodes[be.b];
    const int opposite = 3 - tr.local_a - tr.local_b;
    const Point2& po = mesh.nodes[tv[opposite]];
    double ex = pb.x - pa.x, ey = pb.y - pa.y;
    const double len = std::hypot(ex, ey);
    double nx = -ey / len, ny = ex / len;
    const double mx = 0.5 * (pa.x + pb.x), my = 0.5 * (pa.y + pb.y);
    if (nx * (po.x - mx) + ny * (po.y - my) < 0.0) {
        nx = -nx;
        ny = -ny;
    }
    tr.nx = nx;
    tr.ny = ny;
    (void)local_edge;
    return tr;
}

double normal_gradient(const EdgeTrace& tr, double t_param) {
    double lambda[3] = {0.0, 0.0, 0.0};
    lambda[tr.local_a] = 1.0 - t_param;
    lambda[tr.local_b] = t_param;
    const auto g2 = p2_grads(lambda[0], lambda[1], lambda[2], tr.geom);
    double gx = 0.0, gy = 0.0;
    for (int k = 0; k < 6; ++k) {
        gx += tr.coeffs[k] * g2[k][0];
        gy += tr.coeffs[k] * g2[k][1];
    }
    return gx * tr.nx + gy * tr.ny;
}

} // namespace

NusseltReport global_nusselt(const SolutionFields& solution, const Mesh& mesh,
                             const DofMap& dofs, const PropertyRatios& ratios,
                             BoundaryTag wall, bool conductivity_weighted) {
    const auto edges = wall_edges(mesh, wall);
    if (edges.empty())
        throw std::invalid_argument(std::string("mesh has no wall tagged ") +
                                    to_string(wall));

    const double weight = conductivity_weighted ? ratios.k_ratio : 1.0;
    NusseltReport report;
    report.wall = wall;
    report.conductivity_weighted = conductivity_weighted;

    for (const auto& we : edges) {
        const EdgeTrace tr = edge_trace(solution, mesh, dofs, we.boundary_index);
        double integral = 0.0;
        for (const auto& q : edge_rule())
            integral += q.w * (-normal_gradient(tr, q.t)) * we.length;
        report.global_nu += weight * integral;
        report.local_profile.emplace_back(
            we.arc_start + 0.5 * we.length,
            weight * (-normal_gradient(tr, 0.5)));
    }
    return report;
}

StreamFunctionField stream_function(const SolutionFields& solution,
                                    const Mesh& mesh, const DofMap& dofs) {
    // Vorticity magnitude of the sign convention used by the reference
    // tables (primary cell positive for a hot left wall): psi satisfies
    // U = -dpsi/dy, V = dpsi/dx, so the Poisson right-hand side is
    // dU/dy - dV/dx evaluated from the P2 velocity.
    const int n2 = dofs.n_p2;
    QuadDensity vorticity = [&](int tri, double l0, double l1, double l2,
                                double, double) {
        const auto p2 = dofs.p2_dofs(mesh, tri);
        const auto& tv = mesh.triangles[tri];
        const ElementGeometry geom = element_geometry(
            mesh.nodes[tv[0]], mesh.nodes[tv[1]], mesh.nodes[tv[2]]);
        const auto g2 = p2_grads(l0, l1, l2, geom);
        double vx = 0.0, uy = 0.0;
        for (int k = 0; k < 6; ++k) {
            vx += solution.full[n2 + p2[k]] * g2[k][0];
            uy += solution.full[p2[k]] * g2[k][1];
        }
        return uy - vx;
    };

    // psi = 0 on the whole boundary; the domains are simply connected.
    std::vector<double> zero(n2, 0.0);
    StreamFunctionField field;
    field.psi = solve_scalar_poisson(mesh, dofs, dofs.vel_dirichlet, zero, 1.0,
                                     vorticity);
    field.psi_max = field.psi.maxCoeff();
    field.psi_min = field.psi.minCoeff();
    return field;
}

EnergyBalance energy_balance(const SolutionFields& solution, const Mesh& mesh,
                             const DofMap& dofs, const PropertyRatios& ratios) {
    EnergyBalance balance;
    balance.hot_flux =
        global_nusselt(solution, mesh, dofs, ratios, BoundaryTag::HotWall).global_nu;
    balance.cold_flux =
        global_nusselt(solution, mesh, dofs, ratios, BoundaryTag::ColdWall).global_nu;
    const double denom = std::abs(balance.hot_flux);
    balance.imbalance =
        denom > 0.0 ? std::abs(balance.hot_flux + balance.cold_flux) / denom
                    : std::abs(balance.cold_flux);
    return balance;
}

void export_fields(const SolutionFields& solution, const Mesh& mesh,
                   const DofMap& dofs, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const StreamFunctionField sf = stream_function(solution, mesh, dofs);

    const int n2 = dofs.n_p2;
    const int off_t = dofs.offset_t();
    const int off_p = dofs.offset_p();

    // Pressure is P1; at a midside node it interpolates to the mean of the
    // edge endpoints.
    auto pressure_at = [&](int dof) {
        if (dof < dofs.n_vertices) return solution.full[off_p + dof];
        const auto& [a, b] = dofs.edges[dof - dofs.n_vertices];
        return 0.5 * (solution.full[off_p + a] + solution.full[off_p + b]);
    };

    {
        std::ofstream csv(dir + "/fields.csv");
        if (!csv) throw std::runtime_error("cannot write " + dir + "/fields.csv");
        csv << "x,y,U,V,T,p,psi\n";
        char buf[256];
        for (int i = 0; i < n2; ++i) {
            std::snprintf(buf, sizeof buf,
                          "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          dofs.p2_coords[i].x, dofs.p2_coords[i].y,
                          solution.full[i], solution.full[n2 + i],
                          solution.full[off_t + i], pressure_at(i), sf.psi[i]);
            csv << buf;
        }
    }

    {
        std::ofstream vtk(dir + "/fields.vtk");
        if (!vtk) throw std::runtime_error("cannot write " + dir + "/fields.vtk");
        char buf[256];
        vtk << "# vtk DataFile Version 2.0\n";
        vtk << "cavity flow fields\n";
        vtk << "ASCII\n";
        vtk << "DATASET UNSTRUCTURED_GRID\n";
        vtk << "POINTS " << n2 << " double\n";
        for (int i = 0; i < n2; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n",
                          dofs.p2_coords[i].x, dofs.p2_coords[i].y);
            vtk << buf;
        }
        const int m = mesh.num_triangles();
        vtk << "CELLS " << m << " " << m * 7 << "\n";
        for (int t = 0; t < m; ++t) {
            const auto p2 = dofs.p2_dofs(mesh, t);
            vtk << "6 " << p2[0] << " " << p2[1] << " " << p2[2] << " " << p2[3]
                << " " << p2[4] << " " << p2[5] << "\n";
        }
        vtk << "CELL_TYPES " << m << "\n";
        for (int t = 0; t < m; ++t) vtk << "22\n";

        vtk << "POINT_DATA " << n2 << "\n";
        auto scalars = [&](const char* name, auto value_at) {
            vtk << "SCALARS " << name << " double 1\n";
            vtk << "LOOKUP_TABLE default\n";
            for (int i = 0; i < n2; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g\n", value_at(i));
                vtk << buf;
            }
        };
        scalars("U", [&](int i) { return solution.full[i]; });
        scalars("V", [&](int i) { return solution.full[n2 + i]; });
        scalars("T", [&](int i) { return solution.full[off_t + i]; });
        scalars("p", [&](int i) { return pressure_at(i); });
        scalars("psi", [&](int i) { return sf.psi[i]; });
        vtk << "VECTORS velocity double\n";
        for (int i = 0; i < n2; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", solution.full[i],
                          solution.full[n2 + i]);
            vtk << buf;
        }
    }
}

} // namespace hnconv
