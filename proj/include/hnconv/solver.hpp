#pragma once

#include "hnconv/assembly.hpp"
#include "hnconv/dofmap.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <iosfwd>
#include <vector>

namespace hnconv {

/// Coupled unknowns stored as one full-length vector over
/// [U | V | T | p | multiplier]; Dirichlet entries hold their prescribed
/// values exactly.
struct SolutionFields {
    Eigen::VectorXd full;
    int n_p2 = 0;
    int n_p1 = 0;

    Eigen::VectorBlock<const Eigen::VectorXd> u() const { return full.segment(0, n_p2); }
    Eigen::VectorBlock<const Eigen::VectorXd> v() const { return full.segment(n_p2, n_p2); }
    Eigen::VectorBlock<const Eigen::VectorXd> t() const { return full.segment(2 * n_p2, n_p2); }
    Eigen::VectorBlock<const Eigen::VectorXd> p() const { return full.segment(3 * n_p2, n_p1); }
    double multiplier() const { return full[3 * n_p2 + n_p1]; }

    /// Both velocity components, the layout expected by the convection
    /// assemblers.
    Eigen::VectorBlock<const Eigen::VectorXd> velocity() const {
        return full.segment(0, 2 * n_p2);
    }

    static SolutionFields zero(const DofMap& dofs);
};

struct SolverConfig {
    double tolerance = 1e-6;  // Euclidean norm of the free-dof residual
    int max_newton = 25;      // per continuation stage
    int max_picard = 2;       // frozen-convection warm-up steps per stage
    double damping = 1.0;     // initial Newton step scale, in (0,1]
    /// Rayleigh continuation ladder ending at the target; empty means decade
    /// steps starting at min(target, 1e3).
    std::vector<double> continuation;

    void validate() const;
};

/// Builds the default decade ladder for a target Rayleigh number.
std::vector<double> default_continuation(double ra_target);

struct StageReport {
    double ra = 0.0;
    int picard_iterations = 0;
    int newton_iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;
};

struct SolveReport {
    bool converged = false;
    std::vector<StageReport> stages;
    // Final per-block residual norms.
    double residual_u = 0.0;
    double residual_v = 0.0;
    double residual_t = 0.0;
    double residual_p = 0.0;
    double residual_mean = 0.0;
    double residual_total = 0.0;

    int total_iterations() const;
    /// Structured plain text (key: value lines per stage) for CI diffing.
    void serialize(std::ostream& out) const;
};

/// Direct sparse solve with pattern reuse across Newton steps. Throws
/// SingularSystemError when the factorization fails or the relative residual
/// of the linear solve stays above the threshold after iterative refinement.
class LinearSolver {
public:
    explicit LinearSolver(double residual_threshold = 1e-10)
        : threshold_(residual_threshold) {}

    Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& matrix,
                          const Eigen::VectorXd& rhs);

private:
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    double threshold_;
    bool analyzed_ = false;
};

/// One-shot direct solve of an assembled system; relative residual of the
/// linear solve is at most 1e-10.
Eigen::VectorXd linear_solve(const AssembledSystem& system);

/// Conduction temperature field: solves the thermal diffusion problem with
/// the tag-based Dirichlet data (and optional energy forcing). Returns P2
/// coefficients.
Eigen::VectorXd conduction_temperature(const Mesh& mesh, const DofMap& dofs,
                                       const FlowParams& params,
                                       const Forcing* forcing = nullptr,
                                       Exec exec = Exec::Parallel);

/// Fills the Dirichlet entries of a state from the boundary tags (velocity 0,
/// temperature hot/cold values).
void apply_tag_dirichlet(const DofMap& dofs, Eigen::VectorXd& full_state);

/// Damped Newton iteration with Picard warm-up and Rayleigh continuation.
/// params.Ra is the target; each continuation stage seeds the next. The
/// returned report carries converged = false when an iteration cap is hit
/// (no exception). Throws SingularSystemError if a factorization fails.
std::pair<SolutionFields, SolveReport> solve_stationary(
    const Mesh& mesh, const DofMap& dofs, const FlowParams& params,
    const SolverConfig& config, const Forcing* forcing = nullptr,
    const SolutionFields* initial = nullptr, Exec exec = Exec::Parallel);

} // namespace hnconv
