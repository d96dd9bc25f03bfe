#include "hnconv/solver.hpp"

#include "hnconv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace hnconv {

SolutionFields SolutionFields::zero(const DofMap& dofs) {
    SolutionFields s;
    s.full = Eigen::VectorXd::Zero(dofs.n_full());
    s.n_p2 = dofs.n_p2;
    s.n_p1 = dofs.n_p1;
    return s;
}

void SolverConfig::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (max_newton < 1) throw std::invalid_argument("max_newton must be at least 1");
    if (max_picard < 0) throw std::invalid_argument("max_picard must be nonnegative");
    if (!(damping > 0.0) || damping > 1.0)
        throw std::invalid_argument("damping must be in (0, 1]");
    for (size_t i = 1; i < continuation.size(); ++i)
        if (!(continuation[i] > continuation[i - 1]))
            throw std::invalid_argument("continuation must be strictly increasing");
}

std::vector<double> default_continuation(double ra_target) {
    if (ra_target <= 1e3) return {ra_target};
    std::vector<double> ladder;
    for (double ra = 1e3; ra < ra_target * (1.0 - 1e-12); ra *= 10.0)
        ladder.push_back(ra);
    ladder.push_back(ra_target);
    return ladder;
}

int SolveReport::total_iterations() const {
    int n = 0;
    for (const auto& s : stages) n += s.picard_iterations + s.newton_iterations;
    return n;
}

void SolveReport::serialize(std::ostream& out) const {
    char buf[128];
    out << "converged: " << (converged ? "yes" : "no") << "\n";
    out << "stages: " << stages.size() << "\n";
    for (size_t i = 0; i < stages.size(); ++i) {
        const auto& s = stages[i];
        std::snprintf(buf, sizeof buf, "stage %zu ra: %.17g\n", i, s.ra);
        out << buf;
        out << "stage " << i << " picard: " << s.picard_iterations << "\n";
        out << "stage " << i << " newton: " << s.newton_iterations << "\n";
        std::snprintf(buf, sizeof buf, "stage %zu residual: %.17g\n", i,
                      s.final_residual);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "residual_u: %.17g\n", residual_u);
    out << buf;
    std::snprintf(buf, sizeof buf, "residual_v: %.17g\n", residual_v);
    out << buf;
    std::snprintf(buf, sizeof buf, "residual_t: %.17g\n", residual_t);
    out << buf;
    std::snprintf(buf, sizeof buf, "residual_p: %.17g\n", residual_p);
    out << buf;
    std::snprintf(buf, sizeof buf, "residual_mean: %.17g\n", residual_mean);
    out << buf;
    std::snprintf(buf, sizeof buf, "residual_total: %.17g\n", residual_total);
    out << buf;
}

Eigen::VectorXd LinearSolver::solve(const Eigen::SparseMatrix<double>& matrix,
                                    const Eigen::VectorXd& rhs) {
    if (!analyzed_) {
        lu_.analyzePattern(matrix);
        analyzed_ = true;
    }
    lu_.factorize(matrix);
    if (lu_.info() != Eigen::Success)
        throw SingularSystemError("sparse LU factorization failed: " +
                                  lu_.lastErrorMessage());

    Eigen::VectorXd x = lu_.solve(rhs);
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return Eigen::VectorXd::Zero(rhs.size());

    // Iterative refinement; direct solves of ill-scaled saddle systems can
    // lose a few digits otherwise.
    double rel = (matrix * x - rhs).norm() / rhs_norm;
    for (int pass = 0; pass < 2 && rel > threshold_; ++pass) {
        const Eigen::VectorXd correction = lu_.solve(rhs - matrix * x);
        x += correction;
        rel = (matrix * x - rhs).norm() / rhs_norm;
    }
    if (!(rel <= threshold_))
        throw SingularSystemError(
            "linear solve residual " + std::to_string(rel) +
            " exceeds threshold " + std::to_string(threshold_));
    return x;
}

Eigen::VectorXd linear_solve(const AssembledSystem& system) {
    LinearSolver solver(1e-10);
    return solver.solve(system.jacobian, system.residual);
}

void apply_tag_dirichlet(const DofMap& dofs, Eigen::VectorXd& full_state) {
    for (int i = 0; i < dofs.n_p2; ++i) {
        if (dofs.vel_dirichlet[i]) {
            full_state[dofs.offset_u() + i] = 0.0;
            full_state[dofs.offset_v() + i] = 0.0;
        }
        if (dofs.temp_dirichlet[i])
            full_state[dofs.offset_t() + i] = dofs.temp_value[i];
    }
}

Eigen::VectorXd conduction_temperature(const Mesh& mesh, const DofMap& dofs,
                                       const FlowParams& params,
                                       const Forcing* forcing, Exec exec) {
    QuadDensity density;
    if (forcing && forcing->energy) {
        const auto fe = forcing->energy;
        density = [fe](int, double, double, double, double x, double y) {
            return fe(x, y);
        };
    }
    std::vector<double> values(dofs.temp_value.begin(), dofs.temp_value.end());
    return solve_scalar_poisson(mesh, dofs, dofs.temp_dirichlet, values,
                                params.thermal_coeff(), density, exec);
}

namespace {

struct BlockNorms {
    double u, v, t, p, mean, total;
};

BlockNorms block_norms(const DofMap& dofs, const Eigen::VectorXd& residual) {
    double su = 0, sv = 0, st = 0, sp = 0, sm = 0;
    for (int f = 0; f < dofs.n_free; ++f) {
        const int full = dofs.free_to_full[f];
        const double r2 = residual[f] * residual[f];
        if (full < dofs.offset_v())
            su += r2;
        else if (full < dofs.offset_t())
            sv += r2;
        else if (full < dofs.offset_p())
            st += r2;
        else if (full < dofs.multiplier_index())
            sp += r2;
        else
            sm += r2;
    }
    return {std::sqrt(su), std::sqrt(sv), std::sqrt(st),
            std::sqrt(sp), std::sqrt(sm), residual.norm()};
}

} // namespace

std::pair<SolutionFields, SolveReport> solve_stationary(
    const Mesh& mesh, const DofMap& dofs, const FlowParams& params,
    const SolverConfig& config, const Forcing* forcing,
    const SolutionFields* initial, Exec exec) {
    config.validate();
    if (!(params.Pr > 0.0)) throw std::invalid_argument("Pr must be positive");
    if (params.Ra < 0.0) throw std::invalid_argument("Ra must be nonnegative");

    std::vector<double> ladder =
        config.continuation.empty() ? default_continuation(params.Ra)
                                    : config.continuation;
    if (std::abs(ladder.back() - params.Ra) >
        1e-12 * std::max(1.0, params.Ra))
        throw std::invalid_argument("continuation must end at the target Ra");

    SolutionFields state = SolutionFields::zero(dofs);
    if (initial) {
        if (initial->full.size() != dofs.n_full())
            throw std::invalid_argument("initial state does not match the dof map");
        state = *initial;
    } else {
        apply_tag_dirichlet(dofs, state.full);
        state.full.segment(dofs.offset_t(), dofs.n_p2) =
            conduction_temperature(mesh, dofs, params, forcing, exec);
    }

    SolveReport report;
    LinearSolver linear(1e-8);

    for (double ra : ladder) {
        FlowParams stage_params = params;
        stage_params.Ra = ra;

        StageReport stage;
        stage.ra = ra;

        auto residual_norm = [&](const Eigen::VectorXd& full) {
            return assemble_residual(mesh, dofs, stage_params, full, forcing,
                                     exec)
                .norm();
        };

        double rnorm = residual_norm(state.full);
        stage.residual_history.push_back(rnorm);

        const int total_cap = config.max_picard + config.max_newton;
        for (int it = 0; it < total_cap && rnorm > config.tolerance; ++it) {
            const bool picard = it < config.max_picard;
            AssembledSystem sys = assemble_newton_system(
                mesh, dofs, stage_params, state.full, forcing,
                /*freeze_convection=*/picard, exec);
            const Eigen::VectorXd delta = linear.solve(sys.jacobian, sys.residual);

            // Backtracking from the configured step scale; accepts the last
            // candidate after four halvings so progress never stalls on a
            // non-descent step.
            double scale = config.damping;
            Eigen::VectorXd trial = state.full;
            double trial_norm = rnorm;
            for (int bt = 0; bt < 5; ++bt) {
                trial = state.full;
                for (int f = 0; f < dofs.n_free; ++f)
                    trial[dofs.free_to_full[f]] -= scale * delta[f];
                trial_norm = residual_norm(trial);
                if (trial_norm < rnorm || bt == 4) break;
                scale *= 0.5;
            }
            state.full = trial;
            rnorm = trial_norm;
            stage.residual_history.push_back(rnorm);
            if (picard)
                ++stage.picard_iterations;
            else
                ++stage.newton_iterations;
        }

        stage.final_residual = rnorm;
        stage.converged = rnorm <= config.tolerance;
        report.stages.push_back(stage);
        if (!stage.converged) break;
    }

    const Eigen::VectorXd final_residual = assemble_residual(
        mesh, dofs, params, state.full, forcing, exec);
    const BlockNorms norms = block_norms(dofs, final_residual);
    report.residual_u = norms.u;
    report.residual_v = norms.v;
    report.residual_t = norms.t;
    report.residual_p = norms.p;
    report.residual_mean = norms.mean;
    report.residual_total = norms.total;
    report.converged = !report.stages.empty() && report.stages.back().converged &&
                       report.stages.size() == ladder.size();

    return {std::move(state), std::move(report)};
}

} // namespace hnconv
