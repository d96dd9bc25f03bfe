#include "hnconv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hnconv {

namespace {

constexpr double kGeomTol = 1e-12;

bool in_rect(double x, double y, double x0, double x1, double y0, double y1) {
    return x >= x0 - kGeomTol && x <= x1 + kGeomTol &&
           y >= y0 - kGeomTol && y <= y1 + kGeomTol;
}

bool is_grid_multiple(double value, double h) {
    const double k = value / h;
    return std::abs(k - std::round(k)) < 1e-9;
}

} // namespace

const char* to_string(BoundaryTag tag) {
    switch (tag) {
        case BoundaryTag::HotWall: return "HotWall";
        case BoundaryTag::ColdWall: return "ColdWall";
        case BoundaryTag::Adiabatic: return "Adiabatic";
    }
    return "?";
}

BoundaryTag boundary_tag_from_string(const std::string& name) {
    if (name == "HotWall") return BoundaryTag::HotWall;
    if (name == "ColdWall") return BoundaryTag::ColdWall;
    if (name == "Adiabatic") return BoundaryTag::Adiabatic;
    throw std::invalid_argument("unknown boundary tag: " + name);
}

const char* to_string(CavityShape shape) {
    switch (shape) {
        case CavityShape::Square: return "square";
        case CavityShape::LShape: return "lshape";
        case CavityShape::HShape: return "hshape";
    }
    return "?";
}

CavityShape cavity_shape_from_string(const std::string& name) {
    if (name == "square") return CavityShape::Square;
    if (name == "lshape") return CavityShape::LShape;
    if (name == "hshape") return CavityShape::HShape;
    throw std::invalid_argument("unknown cavity shape: " + name);
}

GeometrySpec GeometrySpec::square() {
    GeometrySpec s;
    s.shape = CavityShape::Square;
    return s;
}

GeometrySpec GeometrySpec::lshape() {
    GeometrySpec s;
    s.shape = CavityShape::LShape;
    return s;
}

GeometrySpec GeometrySpec::hshape() {
    GeometrySpec s;
    s.shape = CavityShape::HShape;
    return s;
}

double GeometrySpec::area() const {
    const double W = outer_width;
    const double H = outer_height;
    const double a = arm_thickness;
    switch (shape) {
        case CavityShape::Square:
            return W * H;
        case CavityShape::LShape:
            return a * H + W * a - a * a;
        case CavityShape::HShape:
            return 2.0 * a * H + (W - 2.0 * a) * bridge_height;
    }
    return 0.0;
}

bool GeometrySpec::contains(double x, double y) const {
    const double W = outer_width;
    const double H = outer_height;
    const double a = arm_thickness;
    switch (shape) {
        case CavityShape::Square:
            return in_rect(x, y, 0, W, 0, H);
        case CavityShape::LShape:
            return in_rect(x, y, 0, a, 0, H) || in_rect(x, y, 0, W, 0, a);
        case CavityShape::HShape: {
            const double b = bridge_height;
            return in_rect(x, y, 0, a, 0, H) ||
                   in_rect(x, y, W - a, W, 0, H) ||
                   in_rect(x, y, a, W - a, 0.5 * (H - b), 0.5 * (H + b));
        }
    }
    return false;
}

void GeometrySpec::validate() const {
    if (!(outer_width > 0.0) || !(outer_height > 0.0))
        throw std::invalid_argument("outer dimensions must be positive");
    if (!(heater_extent > 0.0) || heater_extent > 1.0)
        throw std::invalid_argument("heater_extent must be in (0, 1]");
    if (shape == CavityShape::Square) return;

    if (!(arm_thickness > 0.0) ||
        arm_thickness >= std::min(outer_width, outer_height))
        throw std::invalid_argument(
            "arm_thickness must be in (0, min(outer_width, outer_height))");
    if (shape == CavityShape::HShape) {
        if (2.0 * arm_thickness >= outer_width)
            throw std::invalid_argument(
                "H shape needs 2*arm_thickness < outer_width");
        if (!(bridge_height > 0.0) || bridge_height > outer_height)
            throw std::invalid_argument(
                "bridge_height must be in (0, outer_height]");
    }
}

double Mesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    const Point2& p0 = nodes[tri[0]];
    const Point2& p1 = nodes[tri[1]];
    const Point2& p2 = nodes[tri[2]];
    return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

double Mesh::total_area() const {
    double sum = 0.0;
    for (int t = 0; t < num_triangles(); ++t) sum += triangle_area(t);
    return sum;
}

double Mesh::max_edge_length() const {
    double best = 0.0;
    for (const auto& tri : triangles) {
        for (int e = 0; e < 3; ++e) {
            const Point2& p = nodes[tri[e]];
            const Point2& q = nodes[tri[(e + 1) % 3]];
            best = std::max(best, std::hypot(q.x - p.x, q.y - p.y));
        }
    }
    return best;
}

Mesh build_mesh(const GeometrySpec& spec, int n) {
    spec.validate();
    if (n < 2) throw std::invalid_argument("grid count must be at least 2");

    const double W = spec.outer_width;
    const double H = spec.outer_height;
    const double hx = W / n;
    const double hy = H / n;

    // Every cut line of the outline must sit on a grid line, otherwise the
    // cut-cell boundary would staircase.
    if (spec.shape == CavityShape::LShape || spec.shape == CavityShape::HShape) {
        if (!is_grid_multiple(spec.arm_thickness, hx) ||
            !is_grid_multiple(spec.arm_thickness, hy))
            throw std::invalid_argument(
                "arm_thickness is not an integer multiple of the cell size");
    }
    if (spec.shape == CavityShape::HShape) {
        const double notch = 0.5 * (H - spec.bridge_height);
        if (!is_grid_multiple(notch, hy))
            throw std::invalid_argument(
                "bridge_height does not align with the grid");
    }

    Mesh mesh;
    mesh.resolution = n;

    // Keep cells whose center lies inside the outline. With the alignment
    // check above this is an exact membership test.
    std::vector<std::uint8_t> cell_kept(static_cast<size_t>(n) * n, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double cx = (i + 0.5) * hx;
            const double cy = (j + 0.5) * hy;
            cell_kept[static_cast<size_t>(j) * n + i] = spec.contains(cx, cy) ? 1 : 0;
        }

    // Compress used grid nodes in row-major order.
    const int stride = n + 1;
    std::vector<int> node_id(static_cast<size_t>(stride) * stride, -1);
    auto mark = [&](int i, int j) { node_id[static_cast<size_t>(j) * stride + i] = 0; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (cell_kept[static_cast<size_t>(j) * n + i]) {
                mark(i, j);
                mark(i + 1, j);
                mark(i + 1, j + 1);
                mark(i, j + 1);
            }
    int next = 0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const size_t k = static_cast<size_t>(j) * stride + i;
            if (node_id[k] == 0) {
                node_id[k] = next++;
                mesh.nodes.push_back({i * hx, j * hy});
            }
        }

    // Two CCW triangles per cell, all cut along the bottom-left to top-right
    // diagonal. This keeps the square mesh invariant under 180-degree
    // rotation, which the centro-symmetry checks rely on.
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (!cell_kept[static_cast<size_t>(j) * n + i]) continue;
            const int bl = node_id[static_cast<size_t>(j) * stride + i];
            const int br = node_id[static_cast<size_t>(j) * stride + i + 1];
            const int tr = node_id[static_cast<size_t>(j + 1) * stride + i + 1];
            const int tl = node_id[static_cast<size_t>(j + 1) * stride + i];
            mesh.triangles.push_back({bl, br, tr});
            mesh.triangles.push_back({bl, tr, tl});
        }

    // Boundary edges are exactly the edges used by a single triangle.
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = std::min(tri[e], tri[(e + 1) % 3]);
            const int b = std::max(tri[e], tri[(e + 1) % 3]);
            edge_use[{a, b}] += 1;
        }

    const double heater_y = spec.heater_extent * H;
    for (const auto& [edge, count] : edge_use) {
        if (count != 1) continue;
        const Point2& p = mesh.nodes[edge.first];
        const Point2& q = mesh.nodes[edge.second];
        BoundaryTag tag = BoundaryTag::Adiabatic;
        if (std::abs(p.x) < kGeomTol && std::abs(q.x) < kGeomTol) {
            const double ymid = 0.5 * (p.y + q.y);
            if (ymid <= heater_y + kGeomTol) tag = BoundaryTag::HotWall;
        } else if (std::abs(p.x - W) < kGeomTol && std::abs(q.x - W) < kGeomTol) {
            tag = BoundaryTag::ColdWall;
        }
        mesh.boundary_edges.push_back({edge.first, edge.second, tag});
    }

    return mesh;
}

Mesh uniform_refine(const Mesh& mesh) {
    Mesh out;
    out.resolution = mesh.resolution * 2;
    out.nodes = mesh.nodes;

    // Midpoint node per unique edge, appended in sorted-edge order.
    std::set<std::pair<int, int>> edges;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e)
            edges.insert({std::min(tri[e], tri[(e + 1) % 3]),
                          std::max(tri[e], tri[(e + 1) % 3])});
    std::map<std::pair<int, int>, int> midpoint;
    for (const auto& edge : edges) {
        const Point2& p = mesh.nodes[edge.first];
        const Point2& q = mesh.nodes[edge.second];
        midpoint[edge] = out.num_nodes();
        out.nodes.push_back({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
    }
    auto mid = [&](int a, int b) {
        return midpoint.at({std::min(a, b), std::max(a, b)});
    };

    for (const auto& tri : mesh.triangles) {
        const int a = tri[0], b = tri[1], c = tri[2];
        const int mab = mid(a, b), mbc = mid(b, c), mca = mid(c, a);
        out.triangles.push_back({a, mab, mca});
        out.triangles.push_back({b, mbc, mab});
        out.triangles.push_back({c, mca, mbc});
        out.triangles.push_back({mab, mbc, mca});
    }

    for (const auto& be : mesh.boundary_edges) {
        const int m = mid(be.a, be.b);
        out.boundary_edges.push_back({std::min(be.a, m), std::max(be.a, m), be.tag});
        out.boundary_edges.push_back({std::min(m, be.b), std::max(m, be.b), be.tag});
    }
    std::sort(out.boundary_edges.begin(), out.boundary_edges.end(),
              [](const BoundaryEdge& l, const BoundaryEdge& r) {
                  return std::pair{l.a, l.b} < std::pair{r.a, r.b};
              });
    return out;
}

bool MeshReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string MeshReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "pass" : "FAIL") << "  " << c.name;
        if (!c.detail.empty()) os << "  (" << c.detail << ")";
        os << "\n";
    }
    return os.str();
}

MeshReport validate_mesh(const Mesh& mesh) {
    MeshReport report;

    {
        MeshCheck check{"positive_area", true, ""};
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            if (!(mesh.triangle_area(t) > 0.0)) {
                check.pass = false;
                check.detail = "triangle " + std::to_string(t);
                break;
            }
        }
        report.checks.push_back(check);
    }

    {
        MeshCheck check{"valid_indices", true, ""};
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            const auto& tri = mesh.triangles[t];
            const bool in_range = tri[0] >= 0 && tri[0] < mesh.num_nodes() &&
                                  tri[1] >= 0 && tri[1] < mesh.num_nodes() &&
                                  tri[2] >= 0 && tri[2] < mesh.num_nodes();
            const bool distinct = tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2];
            if (!in_range || !distinct) {
                check.pass = false;
                check.detail = "triangle " + std::to_string(t);
                break;
            }
        }
        report.checks.push_back(check);
    }

    {
        MeshCheck check{"no_duplicate_nodes", true, ""};
        std::map<std::pair<double, double>, int> seen;
        for (int i = 0; i < mesh.num_nodes(); ++i) {
            auto key = std::pair{mesh.nodes[i].x, mesh.nodes[i].y};
            auto [it, inserted] = seen.insert({key, i});
            if (!inserted) {
                check.pass = false;
                check.detail = "nodes " + std::to_string(it->second) + " and " +
                               std::to_string(i);
                break;
            }
        }
        report.checks.push_back(check);
    }

    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = std::min(tri[e], tri[(e + 1) % 3]);
            const int b = std::max(tri[e], tri[(e + 1) % 3]);
            edge_use[{a, b}] += 1;
        }

    {
        MeshCheck check{"conforming_edges", true, ""};
        for (const auto& [edge, count] : edge_use) {
            if (count > 2) {
                check.pass = false;
                check.detail = "edge (" + std::to_string(edge.first) + "," +
                               std::to_string(edge.second) + ") used " +
                               std::to_string(count) + " times";
                break;
            }
        }
        report.checks.push_back(check);
    }

    {
        // A hanging node shows up as a mesh node sitting at the midpoint of a
        // used edge.
        MeshCheck check{"no_hanging_nodes", true, ""};
        std::map<std::pair<double, double>, int> coord;
        for (int i = 0; i < mesh.num_nodes(); ++i)
            coord[{mesh.nodes[i].x, mesh.nodes[i].y}] = i;
        for (const auto& [edge, count] : edge_use) {
            (void)count;
            const Point2& p = mesh.nodes[edge.first];
            const Point2& q = mesh.nodes[edge.second];
            auto it = coord.find({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
            if (it != coord.end()) {
                check.pass = false;
                check.detail = "node " + std::to_string(it->second) +
                               " splits edge (" + std::to_string(edge.first) + "," +
                               std::to_string(edge.second) + ")";
                break;
            }
        }
        report.checks.push_back(check);
    }

    {
        MeshCheck check{"boundary_closed", true, ""};
        std::set<std::pair<int, int>> from_topology;
        for (const auto& [edge, count] : edge_use)
            if (count == 1) from_topology.insert(edge);
        std::set<std::pair<int, int>> declared;
        for (const auto& be : mesh.boundary_edges)
            declared.insert({std::min(be.a, be.b), std::max(be.a, be.b)});
        if (from_topology != declared) {
            check.pass = false;
            check.detail = "declared " + std::to_string(declared.size()) +
                           " edges, topology has " +
                           std::to_string(from_topology.size());
        }
        report.checks.push_back(check);
    }

    return report;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
    out << "nodes " << mesh.num_nodes() << " triangles " << mesh.num_triangles()
        << " edges " << mesh.num_boundary_edges() << "\n";
    char buf[80];
    for (const auto& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
        out << buf;
    }
    for (const auto& tri : mesh.triangles)
        out << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    for (const auto& be : mesh.boundary_edges)
        out << be.a << " " << be.b << " " << to_string(be.tag) << "\n";
}

void write_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_mesh(mesh, out);
}

Mesh read_mesh(std::istream& in) {
    std::string kw_nodes, kw_tris, kw_edges;
    int n_nodes = 0, n_tris = 0, n_edges = 0;
    in >> kw_nodes >> n_nodes >> kw_tris >> n_tris >> kw_edges >> n_edges;
    if (!in || kw_nodes != "nodes" || kw_tris != "triangles" || kw_edges != "edges")
        throw std::runtime_error("malformed mesh header");

    Mesh mesh;
    mesh.nodes.resize(n_nodes);
    for (auto& p : mesh.nodes) in >> p.x >> p.y;
    mesh.triangles.resize(n_tris);
    for (auto& tri : mesh.triangles) in >> tri[0] >> tri[1] >> tri[2];
    mesh.boundary_edges.resize(n_edges);
    for (auto& be : mesh.boundary_edges) {
        std::string tag;
        in >> be.a >> be.b >> tag;
        be.tag = boundary_tag_from_string(tag);
    }
    if (!in) throw std::runtime_error("truncated mesh file");
    return mesh;
}

Mesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_mesh(in);
}

} // namespace hnconv
