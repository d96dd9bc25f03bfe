#include "hnconv/postprocess.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hnconv;

namespace {

FlowParams clear_params(double pr, double ra) {
    FlowParams p;
    p.Pr = pr;
    p.Ra = ra;
    p.ratios = PropertyRatios::clear_fluid();
    return p;
}

std::pair<SolutionFields, DofMap> conduction_square(int n) {
    const Mesh mesh = build_mesh(GeometrySpec::square(), n);
    DofMap dofs = enumerate_dofs(mesh);
    SolverConfig config;
    config.tolerance = 1e-11;
    auto [solution, report] =
        solve_stationary(mesh, dofs, clear_params(1.0, 0.0), config);
    REQUIRE(report.converged);
    return {std::move(solution), std::move(dofs)};
}

} // namespace

TEST_CASE("pure conduction square gives unit Nusselt") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 8);
    auto [solution, dofs] = conduction_square(8);
    const PropertyRatios ratios = PropertyRatios::clear_fluid();
    const NusseltReport nu =
        global_nusselt(solution, mesh, dofs, ratios, BoundaryTag::HotWall);
    CHECK(nu.global_nu == doctest::Approx(1.0).epsilon(1e-9));

    // Local flux is 1 everywhere along the wall.
    for (const auto& [s, q] : nu.local_profile) {
        CHECK(q == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("global Nusselt equals the integral of the local profile") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 8);
    const DofMap dofs = enumerate_dofs(mesh);
    SolverConfig config;
    config.tolerance = 1e-10;
    auto [solution, report] =
        solve_stationary(mesh, dofs, clear_params(0.71, 1e3), config);
    REQUIRE(report.converged);

    const NusseltReport nu = global_nusselt(solution, mesh, dofs,
                                            PropertyRatios::clear_fluid(),
                                            BoundaryTag::HotWall);
    // The local flux is linear along each edge, so the midpoint rule is the
    // exact arc-length integral.
    const double edge_len = 1.0 / 8.0;
    double integral = 0.0;
    for (const auto& [s, q] : nu.local_profile) integral += q * edge_len;
    CHECK(integral == doctest::Approx(nu.global_nu).epsilon(1e-10));
}

TEST_CASE("conductivity weighting scales the Nusselt number") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 8);
    auto [solution, dofs] = conduction_square(8);
    PropertyRatios ratios = PropertyRatios::clear_fluid();
    ratios.k_ratio = 1.25;
    const double weighted =
        global_nusselt(solution, mesh, dofs, ratios, BoundaryTag::HotWall, true)
            .global_nu;
    const double plain =
        global_nusselt(solution, mesh, dofs, ratios, BoundaryTag::HotWall, false)
            .global_nu;
    CHECK(weighted == doctest::Approx(1.25 * plain).epsilon(1e-12));
}

TEST_CASE("missing wall tag is rejected") {
    GeometrySpec s = GeometrySpec::square();
    s.heater_extent = 0.5;
    Mesh mesh = build_mesh(s, 4);
    for (auto& be : mesh.boundary_edges)
        if (be.tag == BoundaryTag::ColdWall) be.tag = BoundaryTag::Adiabatic;
    const DofMap dofs = enumerate_dofs(mesh);
    SolutionFields fields = SolutionFields::zero(dofs);
    CHECK_THROWS_AS(global_nusselt(fields, mesh, dofs,
                                   PropertyRatios::clear_fluid(),
                                   BoundaryTag::ColdWall),
                    std::invalid_argument);
}

TEST_CASE("stream function vanishes for a quiescent fluid") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 8);
    auto [solution, dofs] = conduction_square(8);
    const StreamFunctionField sf = stream_function(solution, mesh, dofs);
    CHECK(sf.psi.lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(sf.psi_max == 0.0);
    CHECK(sf.psi_min == 0.0);
}

TEST_CASE("stream function brackets zero and vanishes on the boundary") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 12);
    const DofMap dofs = enumerate_dofs(mesh);
    SolverConfig config;
    auto [solution, report] =
        solve_stationary(mesh, dofs, clear_params(0.71, 1e4), config);
    REQUIRE(report.converged);
    const StreamFunctionField sf = stream_function(solution, mesh, dofs);
    CHECK(sf.psi_min <= 0.0);
    CHECK(sf.psi_max >= 0.0);
    CHECK(sf.psi_max > 1.0);  // the cavity circulates
    for (int i = 0; i < dofs.n_p2; ++i)
        if (dofs.vel_dirichlet[i]) CHECK(sf.psi[i] == 0.0);
}

TEST_CASE("energy balance closes for pure conduction") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 8);
    auto [solution, dofs] = conduction_square(8);
    const EnergyBalance balance = energy_balance(
        solution, mesh, dofs, PropertyRatios::clear_fluid());
    CHECK(balance.hot_flux == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(balance.cold_flux == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(balance.imbalance < 1e-10);
}

TEST_CASE("one Newton step leaves a larger imbalance than convergence") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 12);
    const DofMap dofs = enumerate_dofs(mesh);
    const FlowParams params = clear_params(0.71, 1e4);

    SolverConfig full;
    auto [converged_sol, full_report] =
        solve_stationary(mesh, dofs, params, full);
    REQUIRE(full_report.converged);

    SolverConfig truncated;
    truncated.max_picard = 0;
    truncated.max_newton = 1;
    truncated.tolerance = 1e-14;
    auto [rough_sol, rough_report] =
        solve_stationary(mesh, dofs, params, truncated);

    const PropertyRatios ratios = PropertyRatios::clear_fluid();
    const double balanced =
        energy_balance(converged_sol, mesh, dofs, ratios).imbalance;
    const double rough =
        energy_balance(rough_sol, mesh, dofs, ratios).imbalance;
    CHECK(rough > balanced);
}

TEST_CASE("field export round-trips coefficients bit-exactly") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 4);
    const DofMap dofs = enumerate_dofs(mesh);
    SolverConfig config;
    auto [solution, report] =
        solve_stationary(mesh, dofs, clear_params(1.0, 1e3), config);
    REQUIRE(report.converged);

    const auto dir = std::filesystem::temp_directory_path() / "hnconv_export";
    std::filesystem::remove_all(dir);
    export_fields(solution, mesh, dofs, dir.string());

    std::ifstream csv(dir / "fields.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,y,U,V,T,p,psi");

    int rows = 0;
    std::string line;
    while (std::getline(csv, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, y, u, v, T, p, psi;
        REQUIRE((ls >> x >> y >> u >> v >> T >> p >> psi));
        CHECK(x == dofs.p2_coords[rows].x);
        CHECK(y == dofs.p2_coords[rows].y);
        CHECK(u == solution.full[rows]);
        CHECK(v == solution.full[dofs.n_p2 + rows]);
        CHECK(T == solution.full[dofs.offset_t() + rows]);
        ++rows;
    }
    CHECK(rows == dofs.n_p2);

    // VTK structure: six point-data arrays on quadratic triangles.
    std::ifstream vtk(dir / "fields.vtk");
    REQUIRE(vtk.good());
    std::string text((std::istreambuf_iterator<char>(vtk)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(text.find("CELL_TYPES") != std::string::npos);
    CHECK(text.find("SCALARS U double 1") != std::string::npos);
    CHECK(text.find("SCALARS V double 1") != std::string::npos);
    CHECK(text.find("SCALARS T double 1") != std::string::npos);
    CHECK(text.find("SCALARS p double 1") != std::string::npos);
    CHECK(text.find("SCALARS psi double 1") != std::string::npos);
    CHECK(text.find("VECTORS velocity double") != std::string::npos);

    std::filesystem::remove_all(dir);
}

TEST_CASE("square cavity solution is centro-symmetric") {
    const Mesh mesh = build_mesh(GeometrySpec::square(), 12);
    const DofMap dofs = enumerate_dofs(mesh);
    SolverConfig config;
    config.tolerance = 1e-9;
    auto [solution, report] =
        solve_stationary(mesh, dofs, clear_params(0.71, 1e3), config);
    REQUIRE(report.converged);

    std::map<std::pair<double, double>, int> index;
    for (int i = 0; i < dofs.n_p2; ++i)
        index[{dofs.p2_coords[i].x, dofs.p2_coords[i].y}] = i;
    for (int i = 0; i < dofs.n_p2; ++i) {
        const Point2& p = dofs.p2_coords[i];
        const double mx = std::round((1.0 - p.x) * 24.0) / 24.0;
        const double my = std::round((1.0 - p.y) * 24.0) / 24.0;
        auto it = index.find({mx, my});
        REQUIRE(it != index.end());
        const int j = it->second;
        CHECK(solution.t()[i] + solution.t()[j] == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(solution.u()[i] == doctest::Approx(-solution.u()[j]).epsilon(1e-6).scale(1.0));
    }
}
