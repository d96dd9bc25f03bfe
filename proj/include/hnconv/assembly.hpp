#pragma once

#include "hnconv/dofmap.hpp"
#include "hnconv/geometry.hpp"
#include "hnconv/materials.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <vector>

namespace hnconv {

/// Element loops run either serially or OpenMP-parallel. Per-element
/// contributions are always merged in element order, so both paths produce
/// bit-identical operators.
enum class Exec { Serial, Parallel };

/// Nondimensional flow parameters entering the weak forms.
struct FlowParams {
    double Pr = 1.0;
    double Ra = 0.0;
    PropertyRatios ratios;

    double viscous_coeff() const { return ratios.rho_ratio * ratios.mu_ratio * Pr; }
    double pressure_coeff() const { return ratios.rho_ratio; }
    double buoyancy_coeff() const { return ratios.rhobeta_ratio * Pr * Ra; }
    double thermal_coeff() const { return ratios.alpha_ratio; }
};

/// Unassembled sparse operator; duplicate (row, col) pairs sum on conversion.
struct SparseTriplets {
    int rows = 0;
    int cols = 0;
    std::vector<Eigen::Triplet<double>> entries;

    Eigen::SparseMatrix<double> to_sparse() const;
};

/// Writes the assembled operator in coordinate text format, one sorted
/// `row col value` per line.
void dump_matrix(const SparseTriplets& m, std::ostream& out);

/// The parameter-constant operators of the weak form, in full (unreduced)
/// dof numbering:
///   viscous    : velocity -> velocity, the vector Laplacian block
///   divergence : velocity -> pressure
///   buoyancy   : temperature -> velocity (V rows only; j = (0,1))
///   thermal    : temperature -> temperature diffusion
///   pressure_mass : integral of each P1 basis, used by the zero-mean row
struct LinearForms {
    SparseTriplets viscous;     // 2*n_p2 x 2*n_p2
    SparseTriplets divergence;  // n_p1 x 2*n_p2
    SparseTriplets buoyancy;    // 2*n_p2 x n_p2
    SparseTriplets thermal;     // n_p2 x n_p2
    std::vector<double> pressure_mass;  // n_p1
};

LinearForms assemble_linear_forms(const Mesh& mesh, const DofMap& dofs,
                                  const FlowParams& params,
                                  Exec exec = Exec::Parallel);

/// Convection operator u -> a1(w; u, .), with w a velocity coefficient
/// vector of length 2*n_p2 laid out [U | V].
SparseTriplets assemble_convection(const Mesh& mesh, const DofMap& dofs,
                                   const Eigen::VectorXd& w,
                                   Exec exec = Exec::Parallel);

/// The other Newton branch: du -> a1(du; u, .) at fixed transported field u.
SparseTriplets assemble_convection_linearized(const Mesh& mesh,
                                              const DofMap& dofs,
                                              const Eigen::VectorXd& u,
                                              Exec exec = Exec::Parallel);

/// Thermal advection T -> a4(w; T, .), with w as above; result is
/// n_p2 x n_p2 on the temperature space.
SparseTriplets assemble_thermal_advection(const Mesh& mesh, const DofMap& dofs,
                                          const Eigen::VectorXd& w,
                                          Exec exec = Exec::Parallel);

/// du -> a4(du; T, .) at fixed temperature T (n_p2 coefficients); result is
/// n_p2 x 2*n_p2.
SparseTriplets assemble_thermal_advection_linearized(
    const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& temperature,
    Exec exec = Exec::Parallel);

/// Optional manufactured source terms; null members mean zero. Momentum
/// forcing is zero in all physics runs.
struct Forcing {
    std::function<double(double, double)> momentum_x;
    std::function<double(double, double)> momentum_y;
    std::function<double(double, double)> energy;

    bool empty() const { return !momentum_x && !momentum_y && !energy; }
};

/// Reduced Newton system at a given state: jacobian over the free dofs plus
/// the mean-pressure multiplier, residual of the discrete equations with
/// Dirichlet values folded in (lifting). With freeze_convection the
/// linearization drops the a1(du; u, .) and a4(du; T, .) branches, which
/// turns the step into a Picard (frozen convection) update.
struct AssembledSystem {
    Eigen::SparseMatrix<double> jacobian;
    Eigen::VectorXd residual;
};

AssembledSystem assemble_newton_system(const Mesh& mesh, const DofMap& dofs,
                                       const FlowParams& params,
                                       const Eigen::VectorXd& full_state,
                                       const Forcing* forcing = nullptr,
                                       bool freeze_convection = false,
                                       Exec exec = Exec::Parallel);

/// Residual only (free rows), at the same conventions as
/// assemble_newton_system.
Eigen::VectorXd assemble_residual(const Mesh& mesh, const DofMap& dofs,
                                  const FlowParams& params,
                                  const Eigen::VectorXd& full_state,
                                  const Forcing* forcing = nullptr,
                                  Exec exec = Exec::Parallel);

/// Scalar density sampled at a quadrature point of one triangle.
using QuadDensity =
    std::function<double(int tri, double l0, double l1, double l2, double x,
                         double y)>;

/// Solves the scalar H1 problem coeff * (grad s, grad v) = (rhs_density, v)
/// with the given Dirichlet data; used for the conduction initial guess and
/// the stream function. Returns the full P2 coefficient vector.
Eigen::VectorXd solve_scalar_poisson(
    const Mesh& mesh, const DofMap& dofs,
    const std::vector<std::uint8_t>& dirichlet_mask,
    const std::vector<double>& dirichlet_values, double coeff,
    const QuadDensity& rhs_density, Exec exec = Exec::Parallel);

} // namespace hnconv
