#include "hnconv/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

using namespace hnconv;

namespace {

/// Independent point-in-polygon oracle (even-odd ray casting) against an
/// explicit vertex list; deliberately not reusing GeometrySpec::contains.
bool point_in_polygon(const std::vector<Point2>& poly, double x, double y) {
    bool inside = false;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const bool crosses = (poly[i].y > y) != (poly[j].y > y);
        if (crosses) {
            const double xi = poly[j].x + (poly[i].x - poly[j].x) *
                                              (y - poly[j].y) /
                                              (poly[i].y - poly[j].y);
            if (x < xi) inside = !inside;
        }
    }
    return inside;
}

} // namespace

TEST_CASE("square spec area and membership") {
    const GeometrySpec s = GeometrySpec::square();
    CHECK(s.area() == doctest::Approx(1.0));
    CHECK(s.contains(0.5, 0.5));
    CHECK(s.contains(0.0, 1.0));
    CHECK_FALSE(s.contains(1.2, 0.5));
}

TEST_CASE("lshape and hshape areas") {
    CHECK(GeometrySpec::lshape().area() == doctest::Approx(0.25 + 0.25 - 0.0625));
    GeometrySpec h = GeometrySpec::hshape();
    h.bridge_height = 0.5;
    CHECK(h.area() == doctest::Approx(2 * 0.25 + 0.5 * 0.5));
}

TEST_CASE("spec validation rejects bad parameters") {
    GeometrySpec s = GeometrySpec::lshape();
    s.arm_thickness = 1.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = GeometrySpec::square();
    s.heater_extent = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("square n=2 structured mesh counts") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 2);
    CHECK(mesh.num_nodes() == 9);
    CHECK(mesh.num_triangles() == 8);
    CHECK(mesh.num_boundary_edges() == 8);
    CHECK(validate_mesh(mesh).all_pass());
    CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("boundary tagging on the square") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 4);
    int hot = 0, cold = 0, adiabatic = 0;
    for (const auto& be : mesh.boundary_edges) {
        switch (be.tag) {
            case BoundaryTag::HotWall: ++hot; break;
            case BoundaryTag::ColdWall: ++cold; break;
            case BoundaryTag::Adiabatic: ++adiabatic; break;
        }
        const Point2& p = mesh.nodes[be.a];
        const Point2& q = mesh.nodes[be.b];
        if (be.tag == BoundaryTag::HotWall) {
            CHECK(p.x == doctest::Approx(0.0));
            CHECK(q.x == doctest::Approx(0.0));
        }
        if (be.tag == BoundaryTag::ColdWall) {
            CHECK(p.x == doctest::Approx(1.0));
            CHECK(q.x == doctest::Approx(1.0));
        }
    }
    CHECK(hot == 4);
    CHECK(cold == 4);
    CHECK(adiabatic == 8);
}

TEST_CASE("partial heating anchors at the bottom of the hot wall") {
    GeometrySpec s = GeometrySpec::square();
    s.heater_extent = 0.5;
    const Mesh mesh = build_mesh(s, 8);
    for (const auto& be : mesh.boundary_edges) {
        const double ymid = 0.5 * (mesh.nodes[be.a].y + mesh.nodes[be.b].y);
        const bool left = mesh.nodes[be.a].x == 0.0 && mesh.nodes[be.b].x == 0.0;
        if (left && ymid < 0.5) CHECK(be.tag == BoundaryTag::HotWall);
        if (left && ymid > 0.5) CHECK(be.tag == BoundaryTag::Adiabatic);
    }
}

TEST_CASE("lshape working-grid counts are consistent with the cell oracle") {
    GeometrySpec s = GeometrySpec::lshape();  // arm 0.25 of a unit square
    const int n = 100;
    const Mesh mesh = build_mesh(s, n);

    // Independent cell count: centers inside the L outline.
    const std::vector<Point2> outline = {{0, 0},    {1, 0},    {1, 0.25},
                                         {0.25, 0.25}, {0.25, 1}, {0, 1}};
    int cells = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (point_in_polygon(outline, (i + 0.5) / n, (j + 0.5) / n)) ++cells;
    CHECK(mesh.num_triangles() == 2 * cells);
    CHECK(mesh.total_area() == doctest::Approx(s.area()).epsilon(1e-10));
    CHECK(validate_mesh(mesh).all_pass());
}

TEST_CASE("hshape triangle count matches the point-in-polygon oracle") {
    GeometrySpec s = GeometrySpec::hshape();
    s.bridge_height = 0.5;
    const int n = 64;
    const Mesh mesh = build_mesh(s, n);

    // H outline with bridge height 0.5: 12 corners, counterclockwise.
    const std::vector<Point2> outline = {
        {0, 0},        {0.25, 0},    {0.25, 0.25}, {0.75, 0.25},
        {0.75, 0},     {1, 0},       {1, 1},       {0.75, 1},
        {0.75, 0.75},  {0.25, 0.75}, {0.25, 1},    {0, 1}};
    int cells = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (point_in_polygon(outline, (i + 0.5) / n, (j + 0.5) / n)) ++cells;

    CHECK(mesh.num_triangles() == 2 * cells);
    CHECK(mesh.total_area() == doctest::Approx(s.area()).epsilon(1e-10));
    CHECK(validate_mesh(mesh).all_pass());
}

TEST_CASE("hshape mesh is mirror symmetric with swapped tags") {
    GeometrySpec s = GeometrySpec::hshape();
    s.bridge_height = 0.5;
    const Mesh mesh = build_mesh(s, 16);

    std::map<std::pair<double, double>, int> index;
    for (int i = 0; i < mesh.num_nodes(); ++i)
        index[{mesh.nodes[i].x, mesh.nodes[i].y}] = i;

    auto mirrored = [&](int node) {
        const Point2& p = mesh.nodes[node];
        // Snap to the grid to keep the key exact.
        const double mx = std::round((1.0 - p.x) * 16.0) / 16.0;
        auto it = index.find({mx, p.y});
        REQUIRE(it != index.end());
        return it->second;
    };

    std::set<std::tuple<int, int, int>> edges, mirrored_edges;
    for (const auto& be : mesh.boundary_edges) {
        edges.insert({be.a, be.b, static_cast<int>(be.tag)});
        BoundaryTag swapped = be.tag;
        if (be.tag == BoundaryTag::HotWall) swapped = BoundaryTag::ColdWall;
        else if (be.tag == BoundaryTag::ColdWall) swapped = BoundaryTag::HotWall;
        const int ma = mirrored(be.a), mb = mirrored(be.b);
        mirrored_edges.insert({std::min(ma, mb), std::max(ma, mb),
                               static_cast<int>(swapped)});
    }
    CHECK(edges == mirrored_edges);
}

TEST_CASE("misaligned arm thickness is rejected") {
    GeometrySpec s = GeometrySpec::lshape();
    CHECK_THROWS_AS(build_mesh(s, 10), std::invalid_argument);  // 0.25 * 10 = 2.5
    GeometrySpec h = GeometrySpec::hshape();
    h.bridge_height = 0.5;
    CHECK_THROWS_AS(build_mesh(h, 30), std::invalid_argument);
    CHECK_NOTHROW(build_mesh(h, 32));
    CHECK_THROWS_AS(build_mesh(GeometrySpec::square(), 1), std::invalid_argument);
}

TEST_CASE("uniform refinement quadruples elements and halves edges") {
    const Mesh coarse = build_mesh(GeometrySpec::square(), 2);
    const Mesh fine = uniform_refine(coarse);
    CHECK(fine.num_triangles() == 32);
    CHECK(validate_mesh(fine).all_pass());
    CHECK(fine.total_area() == doctest::Approx(coarse.total_area()).epsilon(1e-12));
    CHECK(fine.max_edge_length() ==
          doctest::Approx(0.5 * coarse.max_edge_length()).epsilon(1e-12));

    // Tags are inherited.
    int hot_coarse = 0, hot_fine = 0;
    for (const auto& be : coarse.boundary_edges)
        if (be.tag == BoundaryTag::HotWall) ++hot_coarse;
    for (const auto& be : fine.boundary_edges)
        if (be.tag == BoundaryTag::HotWall) ++hot_fine;
    CHECK(hot_fine == 2 * hot_coarse);
}

TEST_CASE("refinement of the L mesh preserves area") {
    const Mesh coarse = build_mesh(GeometrySpec::lshape(), 8);
    const Mesh fine = uniform_refine(coarse);
    CHECK(fine.total_area() == doctest::Approx(coarse.total_area()).epsilon(1e-12));
    CHECK(validate_mesh(fine).all_pass());
}

TEST_CASE("validate_mesh flags a flipped triangle") {
    Mesh mesh = build_mesh(GeometrySpec::square(), 2);
    std::swap(mesh.triangles[3][0], mesh.triangles[3][1]);
    const MeshReport report = validate_mesh(mesh);
    CHECK_FALSE(report.all_pass());
    bool found = false;
    for (const auto& c : report.checks)
        if (c.name == "positive_area") {
            CHECK_FALSE(c.pass);
            CHECK(c.detail == "triangle 3");
            found = true;
        }
    CHECK(found);
}

TEST_CASE("mesh text round trip") {
    const Mesh mesh = build_mesh(GeometrySpec::lshape(), 8);
    std::stringstream ss;
    write_mesh(mesh, ss);
    const Mesh back = read_mesh(ss);
    REQUIRE(back.num_nodes() == mesh.num_nodes());
    REQUIRE(back.num_triangles() == mesh.num_triangles());
    REQUIRE(back.num_boundary_edges() == mesh.num_boundary_edges());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        CHECK(back.nodes[i].x == mesh.nodes[i].x);
        CHECK(back.nodes[i].y == mesh.nodes[i].y);
    }
    for (int t = 0; t < mesh.num_triangles(); ++t)
        CHECK(back.triangles[t] == mesh.triangles[t]);
    for (int e = 0; e < mesh.num_boundary_edges(); ++e) {
        CHECK(back.boundary_edges[e].a == mesh.boundary_edges[e].a);
        CHECK(back.boundary_edges[e].b == mesh.boundary_edges[e].b);
        CHECK(back.boundary_edges[e].tag == mesh.boundary_edges[e].tag);
    }
}
