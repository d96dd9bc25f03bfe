#include "hnconv/mms.hpp"

#include "hnconv/fe.hpp"
#include "hnconv/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hnconv {

namespace {

/// Builds the forcing functions from exact fields and their derivatives.
/// fx, fy, fe are the exact residuals of the momentum and energy equations.
Forcing make_forcing(const FlowParams& params, const ManufacturedCase::Field& u,
                     const ManufacturedCase::Field& v,
                     const ManufacturedCase::Field& T,
                     const ManufacturedCase::Field& u_x,
                     const ManufacturedCase::Field& u_y,
                     const ManufacturedCase::Field& v_x,
                     const ManufacturedCase::Field& v_y,
                     const ManufacturedCase::Field& T_x,
                     const ManufacturedCase::Field& T_y,
                     const ManufacturedCase::Field& lap_u,
                     const ManufacturedCase::Field& lap_v,
                     const ManufacturedCase::Field& lap_T,
                     const ManufacturedCase::Field& p_x,
                     const ManufacturedCase::Field& p_y) {
    const double c_visc = params.viscous_coeff();
    const double c_div = params.pressure_coeff();
    const double c_buoy = params.buoyancy_coeff();
    const double c_th = params.thermal_coeff();

    Forcing f;
    f.momentum_x = [=](double x, double y) {
        return -c_visc * lap_u(x, y) + u(x, y) * u_x(x, y) +
               v(x, y) * u_y(x, y) + c_div * p_x(x, y);
    };
    f.momentum_y = [=](double x, double y) {
        return -c_visc * lap_v(x, y) + u(x, y) * v_x(x, y) +
               v(x, y) * v_y(x, y) + c_div * p_y(x, y) - c_buoy * T(x, y);
    };
    f.energy = [=](double x, double y) {
        return -c_th * lap_T(x, y) + u(x, y) * T_x(x, y) + v(x, y) * T_y(x, y);
    };
    return f;
}

} // namespace

ManufacturedCase ManufacturedCase::zero(const FlowParams&) {
    auto null = [](double, double) { return 0.0; };
    ManufacturedCase c;
    c.name = "zero";
    c.u = c.v = c.T = c.p = null;
    c.u_x = c.u_y = c.v_x = c.v_y = c.T_x = c.T_y = null;
    // Zero forcing as well; leave the members empty so assembly skips them.
    return c;
}

ManufacturedCase ManufacturedCase::polynomial(const FlowParams& params) {
    // Divergence-free quadratic velocity (the curl of (y^3 - x^3)/3),
    // linear zero-mean pressure, quadratic temperature. All fields lie in
    // the discrete spaces, so the Galerkin solution reproduces them to
    // roundoff.
    ManufacturedCase c;
    c.name = "polynomial";
    c.u = [](double, double y) { return y * y; };
    c.v = [](double x, double) { return x * x; };
    c.T = [](double x, double y) { return x * x + y * y; };
    c.p = [](double x, double y) { return x + y - 1.0; };
    c.u_x = [](double, double) { return 0.0; };
    c.u_y = [](double, double y) { return 2.0 * y; };
    c.v_x = [](double x, double) { return 2.0 * x; };
    c.v_y = [](double, double) { return 0.0; };
    c.T_x = [](double x, double) { return 2.0 * x; };
    c.T_y = [](double, double y) { return 2.0 * y; };
    auto two = [](double, double) { return 2.0; };
    auto four = [](double, double) { return 4.0; };
    auto one = [](double, double) { return 1.0; };
    c.forcing = make_forcing(params, c.u, c.v, c.T, c.u_x, c.u_y, c.v_x, c.v_y,
                             c.T_x, c.T_y, two, two, four, one, one);
    return c;
}

ManufacturedCase ManufacturedCase::trigonometric(const FlowParams& params) {
    // Stream function (1/pi) sin^2(pi x) sin^2(pi y): velocity vanishes with
    // its tangential derivative on the whole boundary.
    using std::numbers::pi;
    auto s = [](double a) { return std::sin(a); };
    auto co = [](double a) { return std::cos(a); };

    ManufacturedCase c;
    c.name = "trigonometric";
    c.u = [=](double x, double y) { return s(pi * x) * s(pi * x) * s(2 * pi * y); };
    c.v = [=](double x, double y) { return -s(2 * pi * x) * s(pi * y) * s(pi * y); };
    c.T = [=](double x, double y) { return s(pi * x) * s(pi * y); };
    c.p = [=](double x, double y) { return co(pi * x) * co(pi * y); };

    c.u_x = [=](double x, double y) { return pi * s(2 * pi * x) * s(2 * pi * y); };
    c.u_y = [=](double x, double y) {
        return 2 * pi * s(pi * x) * s(pi * x) * co(2 * pi * y);
    };
    c.v_x = [=](double x, double y) {
        return -2 * pi * co(2 * pi * x) * s(pi * y) * s(pi * y);
    };
    c.v_y = [=](double x, double y) { return -pi * s(2 * pi * x) * s(2 * pi * y); };
    c.T_x = [=](double x, double y) { return pi * co(pi * x) * s(pi * y); };
    c.T_y = [=](double x, double y) { return pi * s(pi * x) * co(pi * y); };

    auto lap_u = [=](double x, double y) {
        return 2 * pi * pi * co(2 * pi * x) * s(2 * pi * y) -
               4 * pi * pi * s(pi * x) * s(pi * x) * s(2 * pi * y);
    };
    auto lap_v = [=](double x, double y) {
        return 4 * pi * pi * s(2 * pi * x) * s(pi * y) * s(pi * y) -
               2 * pi * pi * s(2 * pi * x) * co(2 * pi * y);
    };
    auto lap_T = [=](double x, double y) {
        return -2 * pi * pi * s(pi * x) * s(pi * y);
    };
    auto p_x = [=](double x, double y) { return -pi * s(pi * x) * co(pi * y); };
    auto p_y = [=](double x, double y) { return -pi * co(pi * x) * s(pi * y); };

    c.forcing = make_forcing(params, c.u, c.v, c.T, c.u_x, c.u_y, c.v_x, c.v_y,
                             c.T_x, c.T_y, lap_u, lap_v, lap_T, p_x, p_y);
    return c;
}

Mesh mms_mesh(int n) {
    Mesh mesh = build_mesh(GeometrySpec::square(), n);
    for (auto& be : mesh.boundary_edges) be.tag = BoundaryTag::ColdWall;
    return mesh;
}

SolutionFields interpolate_exact(const ManufacturedCase& mcase,
                                 const DofMap& dofs) {
    SolutionFields s;
    s.n_p2 = dofs.n_p2;
    s.n_p1 = dofs.n_p1;
    s.full = Eigen::VectorXd::Zero(dofs.n_full());
    for (int i = 0; i < dofs.n_p2; ++i) {
        const Point2& pt = dofs.p2_coords[i];
        s.full[dofs.offset_u() + i] = mcase.u(pt.x, pt.y);
        s.full[dofs.offset_v() + i] = mcase.v(pt.x, pt.y);
        s.full[dofs.offset_t() + i] = mcase.T(pt.x, pt.y);
    }
    for (int i = 0; i < dofs.n_p1; ++i) {
        const Point2& pt = dofs.p2_coords[i];
        s.full[dofs.offset_p() + i] = mcase.p(pt.x, pt.y);
    }
    return s;
}

MmsErrors mms_errors(const SolutionFields& solution,
                     const ManufacturedCase& mcase, const Mesh& mesh,
                     const DofMap& dofs, int quadrature_degree) {
    const auto& rule = triangle_rule(quadrature_degree);
    const int n2 = dofs.n_p2;
    const int off_t = dofs.offset_t();
    const int off_p = dofs.offset_p();

    double eu = 0.0, eT = 0.0, ep = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tv = mesh.triangles[t];
        const ElementGeometry geom = element_geometry(
            mesh.nodes[tv[0]], mesh.nodes[tv[1]], mesh.nodes[tv[2]]);
        const auto p2 = dofs.p2_dofs(mesh, t);
        const double jac = 2.0 * geom.area;

        for (const auto& q : rule.points) {
            const double w = q.w * jac;
            const auto n2v = p2_values(q.l0, q.l1, q.l2);
            const auto g2 = p2_grads(q.l0, q.l1, q.l2, geom);
            const auto n1 = p1_values(q.l0, q.l1, q.l2);
            const double x = q.l0 * mesh.nodes[tv[0]].x +
                             q.l1 * mesh.nodes[tv[1]].x +
                             q.l2 * mesh.nodes[tv[2]].x;
            const double y = q.l0 * mesh.nodes[tv[0]].y +
                             q.l1 * mesh.nodes[tv[1]].y +
                             q.l2 * mesh.nodes[tv[2]].y;

            double ux = 0, uy = 0, vx = 0, vy = 0, tx = 0, ty = 0, ph = 0;
            for (int k = 0; k < 6; ++k) {
                ux += solution.full[p2[k]] * g2[k][0];
                uy += solution.full[p2[k]] * g2[k][1];
                vx += solution.full[n2 + p2[k]] * g2[k][0];
                vy += solution.full[n2 + p2[k]] * g2[k][1];
                tx += solution.full[off_t + p2[k]] * g2[k][0];
                ty += solution.full[off_t + p2[k]] * g2[k][1];
            }
            for (int k = 0; k < 3; ++k) ph += solution.full[off_p + tv[k]] * n1[k];
            (void)n2v;

            const double dux = ux - mcase.u_x(x, y), duy = uy - mcase.u_y(x, y);
            const double dvx = vx - mcase.v_x(x, y), dvy = vy - mcase.v_y(x, y);
            const double dtx = tx - mcase.T_x(x, y), dty = ty - mcase.T_y(x, y);
            const double dp = ph - mcase.p(x, y);
            eu += w * (dux * dux + duy * duy + dvx * dvx + dvy * dvy);
            eT += w * (dtx * dtx + dty * dty);
            ep += w * dp * dp;
        }
    }
    return {std::sqrt(eu), std::sqrt(eT), std::sqrt(ep)};
}

double fit_rate(const std::vector<double>& h, const std::vector<double>& err) {
    const size_t n = h.size();
    if (n < 2 || err.size() != n)
        throw std::invalid_argument("rate fit needs matching h/error lists");
    const size_t first = n > 3 ? n - 3 : 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = first; i < n; ++i) {
        const double x = std::log(h[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void ConvergenceReport::write_csv(std::ostream& out) const {
    out << "h,err_u_h1,err_T_h1,err_p_l2\n";
    char buf[160];
    for (size_t i = 0; i < h.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", h[i],
                      err_u_h1[i], err_T_h1[i], err_p_l2[i]);
        out << buf;
    }
}

std::string ConvergenceReport::rate_summary() const {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "rates: u_h1 %.3f  T_h1 %.3f  p_l2 %.3f  (levels %d%s)",
                  rate_u, rate_T, rate_p, levels_completed,
                  all_converged ? "" : ", incomplete");
    return buf;
}

ConvergenceReport run_mms_study(const ManufacturedCase& mcase, int levels,
                                const FlowParams& params,
                                const SolverConfig& config, int n0,
                                int error_quadrature_degree, Exec exec) {
    if (levels < 1) throw std::invalid_argument("levels must be at least 1");

    ConvergenceReport report;
    for (int level = 0; level < levels; ++level) {
        const int n = n0 << level;
        const Mesh mesh = mms_mesh(n);
        const DofMap dofs = enumerate_dofs(mesh);

        // Exact Dirichlet data on every boundary dof; interior starts from
        // zero velocity and the forced conduction field.
        SolutionFields initial = SolutionFields::zero(dofs);
        const SolutionFields exact = interpolate_exact(mcase, dofs);
        for (int i = 0; i < dofs.n_p2; ++i) {
            if (dofs.vel_dirichlet[i]) {
                initial.full[dofs.offset_u() + i] = exact.full[dofs.offset_u() + i];
                initial.full[dofs.offset_v() + i] = exact.full[dofs.offset_v() + i];
            }
            if (dofs.temp_dirichlet[i])
                initial.full[dofs.offset_t() + i] = exact.full[dofs.offset_t() + i];
        }
        {
            // Conduction start consistent with the Dirichlet data.
            std::vector<double> tvals(dofs.n_p2, 0.0);
            for (int i = 0; i < dofs.n_p2; ++i)
                tvals[i] = initial.full[dofs.offset_t() + i];
            QuadDensity density;
            if (mcase.forcing.energy) {
                const auto fe = mcase.forcing.energy;
                density = [fe](int, double, double, double, double x, double y) {
                    return fe(x, y);
                };
            }
            initial.full.segment(dofs.offset_t(), dofs.n_p2) =
                solve_scalar_poisson(mesh, dofs, dofs.temp_dirichlet, tvals,
                                     params.thermal_coeff(), density, exec);
        }

        SolverConfig level_config = config;
        if (level_config.continuation.empty())
            level_config.continuation = {params.Ra};
        auto [solution, solve_report] = solve_stationary(
            mesh, dofs, params, level_config, &mcase.forcing, &initial, exec);

        report.levels_completed = level;
        if (!solve_report.converged) {
            report.all_converged = false;
            break;
        }

        const MmsErrors errors =
            mms_errors(solution, mcase, mesh, dofs, error_quadrature_degree);
        report.h.push_back(1.0 / n);
        report.err_u_h1.push_back(errors.u_h1);
        report.err_T_h1.push_back(errors.T_h1);
        report.err_p_l2.push_back(errors.p_l2);
        report.levels_completed = level + 1;
        report.all_converged = level + 1 == levels;
    }

    if (report.h.size() >= 2) {
        report.rate_u = fit_rate(report.h, report.err_u_h1);
        report.rate_T = fit_rate(report.h, report.err_T_h1);
        report.rate_p = fit_rate(report.h, report.err_p_l2);
    }
    return report;
}

double residual_of_exact(const ManufacturedCase& mcase, const Mesh& mesh,
                         const DofMap& dofs, const FlowParams& params,
                         Exec exec) {
    const SolutionFields exact = interpolate_exact(mcase, dofs);
    return assemble_residual(mesh, dofs, params, exact.full, &mcase.forcing,
                             exec)
        .norm();
}

} // namespace hnconv
