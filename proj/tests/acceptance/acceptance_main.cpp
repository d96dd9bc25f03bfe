// Acceptance suite: runs every validation criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code is the number of
// failed criteria.

#include "hnconv/bench.hpp"
#include "hnconv/mms.hpp"
#include "hnconv/postprocess.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hnconv;

namespace {

struct Criterion {
    int id;
    bool pass;
    std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, bool pass, const std::string& detail) {
    g_results.push_back({id, pass, detail});
}

void progress(const std::string& msg) {
    std::printf("# %s\n", msg.c_str());
    std::fflush(stdout);
}

std::string num(double v, const char* format = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

FlowParams clear_params(double pr, double ra) {
    FlowParams p;
    p.Pr = pr;
    p.Ra = ra;
    p.ratios = PropertyRatios::clear_fluid();
    return p;
}

/// Converged table cases accumulate here for the energy-balance criterion.
struct BalanceSample {
    std::string label;
    double imbalance;
};
std::vector<BalanceSample> g_balances;

CaseResult run_tracked(const CaseConfig& config, const std::string& label,
                       const SolutionFields* warm = nullptr,
                       SolutionFields* solution_out = nullptr) {
    progress("running " + label);
    const CaseResult result = run_case(config, "", solution_out, warm);
    if (result.converged) g_balances.push_back({label, result.imbalance});
    progress(label + ": Nu " + num(result.nu) + " psi " + num(result.psi_max) +
             " / " + num(result.psi_min) +
             (result.converged ? "" : "  [NOT CONVERGED]"));
    return result;
}

// ---------------------------------------------------------------------------
// Criterion 1: manufactured-solution convergence rates
// ---------------------------------------------------------------------------

void criterion_1_mms_rates() {
    progress("criterion 1: manufactured-solution rate study");
    const auto start = std::chrono::steady_clock::now();

    const FlowParams params = clear_params(1.0, 100.0);
    const ManufacturedCase mcase = ManufacturedCase::trigonometric(params);
    SolverConfig config;
    config.tolerance = 1e-10;
    const ConvergenceReport report = run_mms_study(mcase, 4, params, config, 8);

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    std::ostringstream detail;
    detail << "rates u " << num(report.rate_u, "%.3f") << ", T "
           << num(report.rate_T, "%.3f") << ", p " << num(report.rate_p, "%.3f")
           << " on h=1/8..1/64 in " << num(elapsed, "%.0f") << "s";
    const bool pass = report.all_converged && report.rate_u >= 1.85 &&
                      report.rate_u <= 2.15 && report.rate_T >= 1.85 &&
                      report.rate_T <= 2.15 && report.rate_p >= 1.8 &&
                      elapsed <= 300.0;
    record(1, pass, detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 2: conduction limit
// ---------------------------------------------------------------------------

void criterion_2_conduction() {
    progress("criterion 2: conduction limit");
    bool pass = true;
    std::ostringstream detail;
    for (double phi : {0.0, 0.01}) {
        CaseConfig config;
        config.geometry = GeometrySpec::square();
        config.grid = 32;
        config.Pr = 1.0;
        config.Ra = 0.0;
        config.phi = phi;
        config.solver.tolerance = 1e-10;
        SolutionFields solution;
        const CaseResult result =
            run_tracked(config, "square Ra=0 phi=" + num(phi), nullptr, &solution);
        const double vel_norm = solution.velocity().norm();
        // In the conduction limit the temperature field and hence the plain
        // gradient integral do not depend on the mixture; the weighted
        // variant is exactly k_ratio.
        pass = pass && result.converged && vel_norm <= 1e-8 &&
               std::abs(result.nu_unweighted - 1.0) <= 1e-6;
        if (phi == 0.0) pass = pass && std::abs(result.nu - 1.0) <= 1e-6;
        detail << "phi=" << num(phi) << ": |u| " << num(vel_norm, "%.2e")
               << ", Nu " << num(result.nu_unweighted, "%.8f") << "; ";
    }
    record(2, pass, detail.str());
}

// ---------------------------------------------------------------------------
// Criteria 3/4/5/6 share solver runs on the frozen geometries.
// ---------------------------------------------------------------------------

CaseConfig hshape_config(double pr, double ra, double phi, int grid = 64) {
    CaseConfig c;
    c.geometry = paper_hshape();
    c.grid = grid;
    c.Pr = pr;
    c.Ra = ra;
    c.phi = phi;
    return c;
}

CaseConfig lshape_config(double pr, double ra, double phi, double heater = 1.0,
                         int grid = 100) {
    CaseConfig c;
    c.geometry = paper_lshape(heater);
    c.grid = grid;
    c.Pr = pr;
    c.Ra = ra;
    c.phi = phi;
    return c;
}

void criterion_3_hshape_validation() {
    progress("criterion 3: H-shape clear-fluid validation");
    const double targets[2][2] = {{1e3, 0.75371}, {1e4, 1.33099}};
    bool pass = true;
    std::ostringstream detail;
    for (const auto& [ra, reference] : targets) {
        const CaseResult result = run_tracked(
            hshape_config(1.0, ra, 0.0), "hshape CF Ra=" + num(ra));
        const double dev = std::abs(result.nu / reference - 1.0);
        pass = pass && result.converged && dev <= 0.05;
        detail << "Ra=" << num(ra) << ": Nu " << num(result.nu, "%.6f") << " vs "
               << num(reference, "%.6f") << " (dev " << num(100 * dev, "%.2f")
               << "%); ";
    }
    record(3, pass, detail.str());
}

void criterion_4_grid_convergence() {
    progress("criterion 4: grid convergence on the frozen geometries");
    bool pass = true;
    std::ostringstream detail;

    {
        CaseConfig base = lshape_config(50.0, 1e7, 0.01);
        base.solver.tolerance = 5e-4;  // Pr*Ra scales the residual by ~5e8
        base.solver.max_newton = 40;
        double nu90 = 0.0, nu100 = 0.0;
        bool ok = true;
        for (int grid : {90, 100}) {
            CaseConfig c = base;
            c.grid = grid;
            const CaseResult result = run_tracked(
                c, "lshape grid=" + std::to_string(grid) + " Ra=1e7 Pr=50");
            ok = ok && result.converged;
            (grid == 90 ? nu90 : nu100) = result.nu;
        }
        const double change = std::abs(nu100 - nu90) / std::abs(nu100);
        pass = pass && ok && change <= 0.005;
        detail << "L 90->100: " << num(100 * change, "%.3f") << "%; ";
    }
    {
        const CaseConfig base = hshape_config(10.0, 1e5, 0.01);
        double nu60 = 0.0, nu64 = 0.0;
        bool ok = true;
        for (int grid : {60, 64}) {
            CaseConfig c = base;
            c.grid = grid;
            const CaseResult result = run_tracked(
                c, "hshape grid=" + std::to_string(grid) + " Ra=1e5 Pr=10");
            ok = ok && result.converged;
            (grid == 60 ? nu60 : nu64) = result.nu;
        }
        const double change = std::abs(nu64 - nu60) / std::abs(nu64);
        pass = pass && ok && change <= 0.005;
        detail << "H 60->64: " << num(100 * change, "%.3f") << "%";
    }
    record(4, pass, detail.str());
}

struct LadderResult {
    std::vector<double> values;
    bool converged = true;
};

LadderResult nu_ladder(const std::vector<CaseConfig>& configs,
                       const std::string& label) {
    LadderResult out;
    for (size_t k = 0; k < configs.size(); ++k) {
        const CaseResult result =
            run_tracked(configs[k], label + " [" + std::to_string(k) + "]");
        out.values.push_back(result.nu);
        out.converged = out.converged && result.converged;
    }
    return out;
}

bool strictly_increasing(const std::vector<double>& v) {
    for (size_t k = 1; k < v.size(); ++k)
        if (!(v[k] > v[k - 1])) return false;
    return true;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (size_t k = 0; k < v.size(); ++k)
        out += (k ? " " : "") + num(v[k], "%.5g");
    return out;
}

// Shared results for criteria 5, 6 and 8.
std::map<std::string, double> g_nu;

void criterion_5_monotonicity() {
    progress("criterion 5: monotonicity suite");
    bool pass = true;
    std::ostringstream detail;

    {
        // Nu increasing in phi on the H shape at Pr = 1, Ra = 1e4.
        std::vector<CaseConfig> ladder;
        for (double phi : {0.0, 0.001, 0.0033, 0.01})
            ladder.push_back(hshape_config(1.0, 1e4, phi));
        const LadderResult r = nu_ladder(ladder, "H phi ladder");
        pass = pass && r.converged && strictly_increasing(r.values);
        detail << "H phi: " << join(r.values) << "; ";
        g_nu["h_phi0"] = r.values[0];
        g_nu["h_phi_1pc"] = r.values[3];
    }
    {
        // Nu increasing in phi on the L shape at Pr = 10, Ra = 1e5.
        std::vector<CaseConfig> ladder;
        for (double phi : {0.0, 0.001, 0.0033, 0.01})
            ladder.push_back(lshape_config(10.0, 1e5, phi));
        const LadderResult r = nu_ladder(ladder, "L phi ladder");
        pass = pass && r.converged && strictly_increasing(r.values);
        detail << "L phi: " << join(r.values) << "; ";
        g_nu["l_hnf1"] = r.values[1];
        g_nu["l_hnf3_full"] = r.values[3];
    }
    {
        // Nu increasing in Ra on the H shape at Pr = 1 (clear fluid).
        std::vector<CaseConfig> ladder;
        for (double ra : {1.0, 1e2, 1e3, 1e4, 1e5})
            ladder.push_back(hshape_config(1.0, ra, 0.0));
        const LadderResult r = nu_ladder(ladder, "H Ra ladder");
        pass = pass && r.converged && strictly_increasing(r.values);
        detail << "H Ra: " << join(r.values) << "; ";
        g_nu["h_ra1_cf"] = r.values[0];
    }
    {
        // Nu increasing in Pr on the H shape at Ra = 1e4 (clear fluid).
        std::vector<CaseConfig> ladder;
        for (double pr : {1.0, 5.0, 10.0})
            ladder.push_back(hshape_config(pr, 1e4, 0.0));
        const LadderResult r = nu_ladder(ladder, "H Pr ladder");
        pass = pass && r.converged && strictly_increasing(r.values);
        detail << "H Pr: " << join(r.values) << "; ";
    }
    {
        // Nu decreasing in heater extent on the L shape (phi = 1%).
        std::vector<CaseConfig> ladder;
        for (double heater : {1.0, 0.6, 0.2})
            ladder.push_back(lshape_config(10.0, 1e5, 0.01, heater));
        const LadderResult r = nu_ladder(ladder, "L heater ladder");
        std::vector<double> reversed(r.values.rbegin(), r.values.rend());
        pass = pass && r.converged && strictly_increasing(reversed);
        detail << "L heater: " << join(r.values);
        g_nu["l_hnf3_short"] = r.values[2];
    }
    record(5, pass, detail.str());
}

void criterion_6_quantitative_targets() {
    progress("criterion 6: quantitative HNF targets");

    // Table 6 corner needs one extra run; the other three corners reuse the
    // monotonicity ladders.
    const CaseResult t6 = run_tracked(hshape_config(10.0, 1e4, 0.01),
                                      "hshape HNF3 Pr=10 Ra=1e4");
    g_nu["h_t6_corner"] = t6.nu;

    struct Target {
        const char* label;
        const char* key;
        double reference;
    };
    const Target targets[] = {
        {"table5 CF Ra=1", "h_ra1_cf", 0.744341},
        {"table6 HNF3 Pr=10", "h_t6_corner", 1.73542286},
        {"table7 HNF1 Ra=1e5", "l_hnf1", 8.33827488},
        {"table8 HNF3 0.2", "l_hnf3_short", 3.51205609},
    };

    bool within = true;
    std::ostringstream detail;
    for (const auto& t : targets) {
        const double computed = g_nu.count(t.key) ? g_nu[t.key] : std::nan("");
        const double dev = std::abs(computed / t.reference - 1.0);
        within = within && dev <= 0.10;
        detail << t.label << ": " << num(computed, "%.6f") << " vs "
               << num(t.reference, "%.6f") << " (dev " << num(100 * dev, "%.2f")
               << "%); ";
    }

    if (within) {
        record(6, true, detail.str());
    } else {
        // The particle-laden targets hinge on unpublished property
        // correlations; the stated fallback is documented deviation plus the
        // monotonicity suite passing.
        bool criterion5_passed = false;
        for (const auto& c : g_results)
            if (c.id == 5) criterion5_passed = c.pass;
        detail << (criterion5_passed
                       ? "[outside 10%: downgraded to documented deviation, "
                         "monotonicity suite passed]"
                       : "[outside 10% and monotonicity failed]");
        record(6, criterion5_passed, detail.str());
    }
}

// ---------------------------------------------------------------------------
// Criterion 7: assembly correctness
// ---------------------------------------------------------------------------

void criterion_7_assembly() {
    progress("criterion 7: assembly correctness");
    bool pass = true;
    std::ostringstream detail;

    {
        // Jacobian against central finite differences on a 4x4 mesh.
        const Mesh mesh = build_mesh(GeometrySpec::square(), 4);
        const DofMap dofs = enumerate_dofs(mesh);
        FlowParams params = clear_params(1.0, 1e3);
        params.ratios = {0.95, 1.03, 0.98, 1.01, 1.02};

        std::mt19937 rng(2026);
        std::uniform_real_distribution<double> dist(-0.3, 0.3);
        Eigen::VectorXd state = Eigen::VectorXd::Zero(dofs.n_full());
        apply_tag_dirichlet(dofs, state);
        for (int f = 0; f < dofs.n_free; ++f)
            state[dofs.free_to_full[f]] = dist(rng);

        const AssembledSystem sys = assemble_newton_system(mesh, dofs, params, state);
        Eigen::VectorXd dir(dofs.n_free);
        for (int f = 0; f < dofs.n_free; ++f) dir[f] = dist(rng);
        dir.normalize();
        const double eps = 1e-6;
        Eigen::VectorXd plus = state, minus = state;
        for (int f = 0; f < dofs.n_free; ++f) {
            plus[dofs.free_to_full[f]] += eps * dir[f];
            minus[dofs.free_to_full[f]] -= eps * dir[f];
        }
        const Eigen::VectorXd fd = (assemble_residual(mesh, dofs, params, plus) -
                                    assemble_residual(mesh, dofs, params, minus)) /
                                   (2 * eps);
        const double rel = ((sys.jacobian * dir) - fd).norm() / fd.norm();
        pass = pass && rel <= 1e-6;
        detail << "jacobian-fd " << num(rel, "%.2e") << "; ";
    }

    {
        // One-element stiffness against the closed form (twice area 1/2).
        const double K6[6][6] = {{6, 1, 1, -4, 0, -4},   {1, 3, 0, -4, 0, 0},
                                 {1, 0, 3, 0, 0, -4},    {-4, -4, 0, 16, -8, 0},
                                 {0, 0, 0, -8, 16, -8},  {-4, 0, -4, 0, -8, 16}};
        Mesh mesh;
        mesh.nodes = {{0, 0}, {1, 0}, {0, 1}};
        mesh.triangles = {{0, 1, 2}};
        mesh.boundary_edges = {{0, 1, BoundaryTag::Adiabatic},
                               {1, 2, BoundaryTag::Adiabatic},
                               {0, 2, BoundaryTag::Adiabatic}};
        mesh.resolution = 1;
        const DofMap dofs = enumerate_dofs(mesh);
        const LinearForms forms =
            assemble_linear_forms(mesh, dofs, clear_params(1.0, 0.0));
        const Eigen::MatrixXd A = Eigen::MatrixXd(forms.viscous.to_sparse());
        double max_err = 0.0;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                max_err = std::max(max_err, std::abs(A(i, j) - K6[i][j] / 6.0));
        pass = pass && max_err <= 1e-12;
        detail << "one-element stiffness err " << num(max_err, "%.2e") << "; ";
    }

    {
        // Divergence orthogonality at a tightly converged solution.
        const Mesh mesh = build_mesh(GeometrySpec::square(), 16);
        const DofMap dofs = enumerate_dofs(mesh);
        SolverConfig config;
        config.tolerance = 1e-11;
        auto [solution, report] =
            solve_stationary(mesh, dofs, clear_params(0.71, 1e3), config);
        const LinearForms forms =
            assemble_linear_forms(mesh, dofs, clear_params(0.71, 1e3));
        const Eigen::VectorXd div =
            forms.divergence.to_sparse() *
            Eigen::VectorXd(solution.velocity());
        const double bound = 1e-8 * solution.velocity().norm();
        const double worst = div.lpNorm<Eigen::Infinity>();
        pass = pass && report.converged && worst <= bound;
        detail << "divergence " << num(worst, "%.2e") << " <= "
               << num(bound, "%.2e");
    }

    record(7, pass, detail.str());
}

void criterion_8_energy_balance() {
    progress("criterion 8: energy balance across all converged cases");
    bool pass = !g_balances.empty();
    double worst = 0.0;
    std::string worst_label;
    for (const auto& sample : g_balances) {
        if (sample.imbalance > worst) {
            worst = sample.imbalance;
            worst_label = sample.label;
        }
        pass = pass && sample.imbalance <= 1e-3;
    }
    std::ostringstream detail;
    detail << g_balances.size() << " converged cases, worst imbalance "
           << num(worst, "%.2e") << " (" << worst_label << ")";
    record(8, pass, detail.str());
}

void criterion_9_centro_symmetry() {
    progress("criterion 9: square-cavity centro-symmetry");
    const Mesh mesh = build_mesh(GeometrySpec::square(), 32);
    const DofMap dofs = enumerate_dofs(mesh);
    SolverConfig config;
    config.tolerance = 1e-9;
    auto [solution, report] =
        solve_stationary(mesh, dofs, clear_params(1.0, 1e3), config);

    std::map<std::pair<long, long>, int> index;
    auto key = [](const Point2& p) {
        return std::pair{std::lround(p.x * 128.0), std::lround(p.y * 128.0)};
    };
    for (int i = 0; i < dofs.n_p2; ++i) index[key(dofs.p2_coords[i])] = i;

    double worst = 0.0;
    for (int i = 0; i < dofs.n_p2; ++i) {
        const Point2 mirrored{1.0 - dofs.p2_coords[i].x,
                              1.0 - dofs.p2_coords[i].y};
        const int j = index.at(key(mirrored));
        worst = std::max(worst,
                         std::abs(solution.t()[i] + solution.t()[j] - 1.0));
        worst = std::max(worst, std::abs(solution.u()[i] + solution.u()[j]));
    }
    const bool pass = report.converged && worst <= 1e-6;
    record(9, pass, "max symmetry defect " + num(worst, "%.2e"));
}

} // namespace

int main() {
    criterion_1_mms_rates();
    criterion_2_conduction();
    criterion_3_hshape_validation();
    criterion_4_grid_convergence();
    criterion_5_monotonicity();
    criterion_6_quantitative_targets();
    criterion_7_assembly();
    criterion_8_energy_balance();
    criterion_9_centro_symmetry();

    int failures = 0;
    std::printf("\n");
    for (const auto& c : g_results) {
        std::printf("criterion %d: %s — %s\n", c.id, c.pass ? "PASS" : "FAIL",
                    c.detail.c_str());
        if (!c.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(g_results.size()) - failures,
                g_results.size());
    return failures;
}
