#pragma once

#include "hnconv/assembly.hpp"
#include "hnconv/solver.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace hnconv {

/// Closed-form fields on the unit square together with the source terms that
/// make them an exact solution of the forced problem. Velocities come from a
/// stream function, so they are pointwise divergence-free; the pressure has
/// zero mean. The trigonometric case satisfies u = v = 0 and T = 0 on the
/// boundary; the polynomial case carries nonzero exact Dirichlet data, which
/// the harness imposes directly.
struct ManufacturedCase {
    using Field = std::function<double(double, double)>;

    std::string name;
    Field u, v, T, p;
    Field u_x, u_y, v_x, v_y, T_x, T_y;
    Forcing forcing;

    static ManufacturedCase zero(const FlowParams& params);
    static ManufacturedCase polynomial(const FlowParams& params);
    static ManufacturedCase trigonometric(const FlowParams& params);
};

/// Error norms of one discrete solution against the closed forms:
/// H1 seminorms for velocity and temperature, L2 norm for pressure,
/// integrated with the requested quadrature degree.
struct MmsErrors {
    double u_h1 = 0.0;
    double T_h1 = 0.0;
    double p_l2 = 0.0;
};

MmsErrors mms_errors(const SolutionFields& solution,
                     const ManufacturedCase& mcase, const Mesh& mesh,
                     const DofMap& dofs, int quadrature_degree = 7);

struct ConvergenceReport {
    std::vector<double> h;
    std::vector<double> err_u_h1;
    std::vector<double> err_T_h1;
    std::vector<double> err_p_l2;
    double rate_u = 0.0;  // least-squares slopes over the finest three meshes
    double rate_T = 0.0;
    double rate_p = 0.0;
    bool all_converged = false;
    int levels_completed = 0;

    void write_csv(std::ostream& out) const;
    std::string rate_summary() const;
};

/// Fits the least-squares slope of log(err) against log(h) over the finest
/// three entries.
double fit_rate(const std::vector<double>& h, const std::vector<double>& err);

/// Solves the forced problem on meshes n0, 2*n0, ... (levels of them, unit
/// square, exact-solution Dirichlet data everywhere) and fits convergence
/// rates. A non-converged level aborts the study with a partial report.
ConvergenceReport run_mms_study(const ManufacturedCase& mcase, int levels,
                                const FlowParams& params,
                                const SolverConfig& config, int n0 = 8,
                                int error_quadrature_degree = 7,
                                Exec exec = Exec::Parallel);

/// Unit-square mesh whose boundary is entirely Dirichlet for temperature
/// (every edge retagged cold); the MMS harness overrides the values.
Mesh mms_mesh(int n);

/// Nodal interpolant of the exact fields in the discrete spaces.
SolutionFields interpolate_exact(const ManufacturedCase& mcase,
                                 const DofMap& dofs);

/// Discretization-consistency oracle: the forced residual evaluated at the
/// interpolated exact fields. Shrinks at least O(h) under refinement.
double residual_of_exact(const ManufacturedCase& mcase, const Mesh& mesh,
                         const DofMap& dofs, const FlowParams& params,
                         Exec exec = Exec::Parallel);

} // namespace hnconv
