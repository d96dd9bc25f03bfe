#include "hnconv/bench.hpp"

#include "hnconv/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hnconv {

namespace {

std::string fmt(const char* format, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, value);
    return buf;
}

} // namespace

GeometrySpec paper_hshape(double heater_extent) {
    GeometrySpec g = GeometrySpec::hshape();
    g.arm_thickness = 0.25;
    g.bridge_height = 0.5;  // located by the clear-fluid Nusselt sweep
    g.heater_extent = heater_extent;
    return g;
}

GeometrySpec paper_lshape(double heater_extent) {
    GeometrySpec g = GeometrySpec::lshape();
    g.arm_thickness = 0.3;  // aligns with the published 90/110 grids
    g.heater_extent = heater_extent;
    return g;
}

PropertyRatios ratios_for(const CaseConfig& config) {
    const MaterialTable table = config.materials_file.empty()
                                    ? default_materials()
                                    : load_materials(config.materials_file);
    return compute_ratios(
        mixture_from_table(table, config.phi, config.split_a));
}

CaseResult run_case(const CaseConfig& config, const std::string& out_dir,
                    SolutionFields* solution_out,
                    const SolutionFields* warm_start) {
    config.validate();
    const Mesh mesh = build_mesh(config.geometry, config.grid);
    const DofMap dofs = enumerate_dofs(mesh);
    const PropertyRatios ratios = ratios_for(config);
    const FlowParams params{config.Pr, config.Ra, ratios};

    auto [solution, report] = solve_stationary(mesh, dofs, params,
                                               config.solver, nullptr,
                                               warm_start);

    CaseResult result;
    result.converged = report.converged;
    result.iterations = report.total_iterations();
    result.report = report;

    NusseltReport hot_nu;
    if (config.outputs.nusselt) {
        hot_nu = global_nusselt(solution, mesh, dofs, ratios,
                                BoundaryTag::HotWall, config.nusselt_weighted);
        result.nu = hot_nu.global_nu;
        result.nu_unweighted =
            config.nusselt_weighted
                ? global_nusselt(solution, mesh, dofs, ratios,
                                 BoundaryTag::HotWall, false)
                      .global_nu
                : hot_nu.global_nu;
        const EnergyBalance balance = energy_balance(solution, mesh, dofs, ratios);
        result.hot_flux = balance.hot_flux;
        result.cold_flux = balance.cold_flux;
        result.imbalance = balance.imbalance;
    }
    if (config.outputs.streamfunction) {
        const StreamFunctionField sf = stream_function(solution, mesh, dofs);
        result.psi_max = sf.psi_max;
        result.psi_min = sf.psi_min;
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        if (config.outputs.report) {
            std::ofstream rep(out_dir + "/report.txt");
            if (!rep) throw std::runtime_error("cannot write " + out_dir + "/report.txt");
            report.serialize(rep);
        }
        if (config.outputs.nusselt) {
            std::ofstream prof(out_dir + "/nusselt.csv");
            if (!prof) throw std::runtime_error("cannot write " + out_dir + "/nusselt.csv");
            prof << "arc_length,local_flux\n";
            char buf[96];
            for (const auto& [s, q] : hot_nu.local_profile) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s, q);
                prof << buf;
            }
        }
        if (config.outputs.fields) export_fields(solution, mesh, dofs, out_dir);
    }

    if (solution_out) *solution_out = std::move(solution);
    return result;
}

std::string summary_line(const CaseConfig& config, const CaseResult& result) {
    std::ostringstream os;
    os << to_string(config.geometry.shape) << " " << config.grid << " "
       << fmt("%.6g", config.Pr) << " " << fmt("%.6g", config.Ra) << " "
       << fmt("%.6g", config.phi) << " " << fmt("%.9g", result.nu) << " "
       << fmt("%.9g", result.psi_max) << " " << fmt("%.9g", result.psi_min)
       << " " << result.iterations;
    return os.str();
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

namespace {

struct Chain {
    double heater, pr, phi;
    std::vector<int> row_indices;  // into the flat row list, Ra ascending
};

} // namespace

std::vector<SweepRow> run_sweep(const CaseConfig& base, const SweepAxes& axes,
                                const std::string& out_dir, int workers) {
    const std::vector<double> ras = axes.ra.empty() ? std::vector{base.Ra} : axes.ra;
    const std::vector<double> prs = axes.pr.empty() ? std::vector{base.Pr} : axes.pr;
    const std::vector<double> phis = axes.phi.empty() ? std::vector{base.phi} : axes.phi;
    const std::vector<double> heaters =
        axes.heater.empty() ? std::vector{base.geometry.heater_extent}
                            : axes.heater;
    if (ras.empty() || prs.empty() || phis.empty() || heaters.empty())
        throw std::invalid_argument("sweep axes must be nonempty");

    std::vector<SweepRow> rows;
    std::vector<Chain> chains;
    for (double heater : heaters)
        for (double pr : prs)
            for (double phi : phis) {
                Chain chain{heater, pr, phi, {}};
                for (double ra : ras) {
                    CaseConfig c = base;
                    c.geometry.heater_extent = heater;
                    c.Pr = pr;
                    c.phi = phi;
                    c.Ra = ra;
                    c.solver.continuation.clear();
                    chain.row_indices.push_back(static_cast<int>(rows.size()));
                    rows.push_back({c, {}});
                }
                chains.push_back(std::move(chain));
            }

    auto run_chain = [&rows](const Chain& chain) {
        SolutionFields warm;
        bool have_warm = false;
        for (int idx : chain.row_indices) {
            SweepRow& row = rows[idx];
            CaseConfig c = row.config;
            if (have_warm) c.solver.continuation = {c.Ra};
            SolutionFields solution;
            try {
                row.result = run_case(c, "", &solution,
                                      have_warm ? &warm : nullptr);
            } catch (const SingularSystemError&) {
                row.result = {};
                row.result.converged = false;
                have_warm = false;
                continue;
            }
            if (row.result.converged) {
                warm = std::move(solution);
                have_warm = true;
            } else {
                have_warm = false;
            }
        }
    };

    if (workers <= 1 || chains.size() <= 1) {
        for (const auto& chain : chains) run_chain(chain);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t k = next.fetch_add(1); k < chains.size();
                 k = next.fetch_add(1))
                run_chain(chains[k]);
        };
        std::vector<std::thread> pool;
        const int n_threads = std::min<int>(workers, static_cast<int>(chains.size()));
        pool.reserve(n_threads);
        for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/sweep.csv");
        if (!csv) throw std::runtime_error("cannot write " + out_dir + "/sweep.csv");
        write_sweep_csv(rows, csv);
    }
    return rows;
}

std::vector<std::string> check_sweep_monotonicity(
    const std::vector<SweepRow>& rows) {
    std::vector<std::string> notes;
    // Group rows that differ in exactly one axis and check the table trend:
    // Nu rises with Ra, phi and Pr, falls with heater extent.
    auto axis_value = [](const SweepRow& r, int axis) {
        switch (axis) {
            case 0: return r.config.Ra;
            case 1: return r.config.phi;
            case 2: return r.config.Pr;
            default: return r.config.geometry.heater_extent;
        }
    };
    const char* axis_name[] = {"Ra", "phi", "Pr", "heater_extent"};
    const bool increasing[] = {true, true, true, false};

    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows.size(); ++j) {
            if (i == j || !rows[i].result.converged || !rows[j].result.converged)
                continue;
            for (int axis = 0; axis < 4; ++axis) {
                bool differ_only_here = axis_value(rows[i], axis) < axis_value(rows[j], axis);
                for (int other = 0; other < 4 && differ_only_here; ++other)
                    if (other != axis &&
                        axis_value(rows[i], other) != axis_value(rows[j], other))
                        differ_only_here = false;
                if (!differ_only_here) continue;
                const bool rose = rows[j].result.nu > rows[i].result.nu;
                if (rose != increasing[axis]) {
                    std::ostringstream os;
                    os << "Nu not " << (increasing[axis] ? "increasing" : "decreasing")
                       << " in " << axis_name[axis] << " between "
                       << fmt("%.6g", axis_value(rows[i], axis)) << " and "
                       << fmt("%.6g", axis_value(rows[j], axis));
                    notes.push_back(os.str());
                }
            }
        }
    std::sort(notes.begin(), notes.end());
    notes.erase(std::unique(notes.begin(), notes.end()), notes.end());
    return notes;
}

GridStudyResult run_grid_study(const CaseConfig& base,
                               const std::vector<int>& grids,
                               const std::string& out_dir) {
    if (grids.empty()) throw std::invalid_argument("grid list must be nonempty");
    for (size_t i = 1; i < grids.size(); ++i)
        if (grids[i] < grids[i - 1])
            throw std::invalid_argument("grid list must be increasing");

    GridStudyResult study;
    study.grids = grids;
    for (int n : grids) {
        CaseConfig c = base;
        c.grid = n;
        study.rows.push_back(run_case(c));
    }

    const size_t m = study.rows.size();
    if (m >= 2) {
        const CaseResult& a = study.rows[m - 2];
        const CaseResult& b = study.rows[m - 1];
        auto rel = [](double prev, double fine) {
            return std::abs(fine - prev) / std::max(std::abs(fine), 1e-300);
        };
        study.nu_rel_change = rel(a.nu, b.nu);
        study.max_rel_change = std::max(
            {study.nu_rel_change, rel(a.psi_max, b.psi_max), rel(a.psi_min, b.psi_min)});
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/gridstudy.csv");
        if (!csv) throw std::runtime_error("cannot write " + out_dir + "/gridstudy.csv");
        write_grid_study_csv(study, csv);
    }
    return study;
}

// ---------------------------------------------------------------------------
// Reference tables
// ---------------------------------------------------------------------------

namespace {

constexpr double kPhiLadder[4] = {0.0, 0.001, 0.0033, 0.01};
const char* const kPhiName[4] = {"CF", "HNF1", "HNF2", "HNF3"};

struct TableCase {
    std::string label;
    CaseConfig config;
    double reference;
    bool informational;
};

SolverConfig heavy_solver() {
    SolverConfig s;
    // The Ra = 1e7, Pr = 50 cases scale the residual by Pr*Ra ~ 5e8; an
    // absolute 1e-6 would sit below the attainable floating-point floor.
    s.tolerance = 5e-4;
    s.max_newton = 40;
    s.max_picard = 2;
    return s;
}

CaseConfig hshape_case(double pr, double ra, double phi, int grid = 64) {
    CaseConfig c;
    c.geometry = paper_hshape();
    c.grid = grid;
    c.Pr = pr;
    c.Ra = ra;
    c.phi = phi;
    return c;
}

CaseConfig lshape_case(double pr, double ra, double phi, double heater = 1.0,
                       int grid = 100) {
    CaseConfig c;
    c.geometry = paper_lshape(heater);
    c.grid = grid;
    c.Pr = pr;
    c.Ra = ra;
    c.phi = phi;
    return c;
}

std::string cell_label(double ra, int phi_index) {
    return std::string(kPhiName[phi_index]) + " Ra=" + fmt("%.6g", ra);
}

std::vector<TableCase> table_cases(int table) {
    std::vector<TableCase> cases;
    switch (table) {
        case 1: {
            // Square-cavity scheme validation. The published comparison row
            // stems from porous-medium benchmarks, so the whole table is
            // calibration-sensitive; reported at Pr = 1.
            const double ra[3] = {10.0, 100.0, 1000.0};
            const double ref[3] = {1.0791, 3.13181, 14.8515};
            for (int k = 0; k < 3; ++k) {
                CaseConfig c;
                c.geometry = GeometrySpec::square();
                c.grid = 64;
                c.Pr = 1.0;
                c.Ra = ra[k];
                cases.push_back({"Ra=" + fmt("%.6g", ra[k]), c, ref[k], true});
            }
            break;
        }
        case 2: {
            const int grids[] = {40, 60, 80, 90, 100, 110, 120};
            const double nu[] = {25.1091737, 24.7312602, 24.6504471,
                                 24.6546271, 24.6223662, 24.604896, 24.6102549};
            for (size_t k = 0; k < std::size(grids); ++k) {
                CaseConfig c = lshape_case(50.0, 1e7, 0.01, 1.0, grids[k]);
                c.solver = heavy_solver();
                cases.push_back({"grid " + std::to_string(grids[k]), c, nu[k], true});
            }
            break;
        }
        case 3: {
            // 30 and 50 from the published list do not align with the frozen
            // arm thickness of 1/4 and are skipped.
            const int grids[] = {20, 40, 60, 64};
            const double nu[] = {7.1901, 7.12643, 7.11831, 7.11780};
            for (size_t k = 0; k < std::size(grids); ++k) {
                CaseConfig c = hshape_case(10.0, 1e5, 0.01, grids[k]);
                cases.push_back({"grid " + std::to_string(grids[k]), c, nu[k], true});
            }
            break;
        }
        case 4: {
            cases.push_back({"Ra=1000", hshape_case(1.0, 1e3, 0.0), 0.75371, false});
            cases.push_back({"Ra=10000", hshape_case(1.0, 1e4, 0.0), 1.33099, false});
            break;
        }
        case 5: {
            const double ra[5] = {1.0, 1e2, 1e3, 1e4, 1e5};
            const double ref[5][4] = {
                {0.744341, 0.752695104, 0.766173385, 0.797778126},
                {0.744436, 0.752788136, 0.766264995, 0.797864941},
                {0.75371, 0.761942743, 0.775216059, 0.806344953},
                {1.33099, 1.33590713, 1.34285514, 1.35921343},
                {4.9713, 4.99457439, 5.02917823, 5.1023477}};
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 4; ++c) {
                    const bool corner = r == 0 && c == 0;  // CF at Ra = 1
                    cases.push_back({cell_label(ra[r], c),
                                     hshape_case(1.0, ra[r], kPhiLadder[c]),
                                     ref[r][c], c > 0 && !corner});
                }
            break;
        }
        case 6: {
            const double pr[3] = {1.0, 5.0, 10.0};
            const double ref[3][4] = {
                {1.33099, 1.33590713, 1.3432257, 1.35921343},
                {1.56383, 1.5668908, 1.57096522, 1.57900565},
                {1.73341, 1.73458199, 1.73539058, 1.73542286}};
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 4; ++c) {
                    const bool corner = r == 2 && c == 3;  // HNF3 at Pr = 10
                    cases.push_back(
                        {std::string(kPhiName[c]) + " Pr=" + fmt("%.6g", pr[r]),
                         hshape_case(pr[r], 1e4, kPhiLadder[c]), ref[r][c],
                         c > 0 && !corner});
                }
            break;
        }
        case 7: {
            const double ra[5] = {1e5, 3e5, 5e5, 7e5, 1e6};
            const double ref[5][3] = {{8.33827488, 8.43228086, 8.65425299},
                                      {11.8195846, 11.9610339, 12.2837988},
                                      {13.8238296, 13.9901545, 14.3696117},
                                      {15.2999125, 15.4842286, 15.9049525},
                                      {17.0135319, 17.2187546, 17.6868126}};
            for (int r = 0; r < 5; ++r)
                for (int c = 0; c < 3; ++c) {
                    const bool corner = r == 0 && c == 0;  // HNF1 at Ra = 1e5
                    cases.push_back({cell_label(ra[r], c + 1),
                                     lshape_case(10.0, ra[r], kPhiLadder[c + 1]),
                                     ref[r][c], !corner});
                }
            break;
        }
        case 8: {
            const double heater[3] = {1.0, 0.6, 0.2};
            const double ref[3][3] = {{8.33488827, 7.11625273, 3.37201574},
                                      {8.43228086, 7.20183898, 3.41463114},
                                      {8.65328838, 7.3967311, 3.51205609}};
            for (int f = 0; f < 3; ++f)
                for (int h = 0; h < 3; ++h) {
                    const bool corner = f == 2 && h == 2;  // HNF3 at 0.2 units
                    cases.push_back(
                        {std::string(kPhiName[f + 1]) + " source=" +
                             fmt("%.2g", heater[h]),
                         lshape_case(10.0, 1e5, kPhiLadder[f + 1], heater[h]),
                         ref[f][h], !corner});
                }
            break;
        }
        default:
            throw std::invalid_argument("unknown table id " +
                                        std::to_string(table));
    }
    return cases;
}

} // namespace

double table_tolerance(int table) {
    switch (table) {
        case 4: return 0.05;
        case 1:
        case 2:
        case 3:
        case 5:
        case 6:
        case 7:
        case 8: return 0.10;
        default:
            throw std::invalid_argument("unknown table id " +
                                        std::to_string(table));
    }
}

std::vector<TableRow> reproduce_tables(const std::vector<int>& ids,
                                       const std::string& out_dir,
                                       std::ostream* progress) {
    std::vector<TableRow> rows;
    for (int id : ids) {
        const double tol = table_tolerance(id);
        for (const auto& tc : table_cases(id)) {
            if (progress)
                (*progress) << "table " << id << ": " << tc.label << "..."
                            << std::endl;
            TableRow row;
            row.table = id;
            row.label = tc.label;
            row.reference = tc.reference;
            row.informational = tc.informational;
            try {
                const CaseResult result = run_case(tc.config);
                row.computed = result.nu;
                row.rel_dev = std::abs(row.computed / row.reference - 1.0);
                row.pass = result.converged && row.rel_dev <= tol;
            } catch (const SingularSystemError&) {
                row.computed = std::nan("");
                row.rel_dev = std::nan("");
                row.pass = false;
            }
            rows.push_back(row);
            if (progress)
                (*progress) << "table " << id << ": " << tc.label << " computed "
                            << fmt("%.9g", rows.back().computed) << " reference "
                            << fmt("%.9g", tc.reference) << " dev "
                            << fmt("%.3g", rows.back().rel_dev) << " "
                            << (rows.back().pass ? "pass" : "FAIL")
                            << (row.informational ? " (calibration-sensitive)" : "")
                            << std::endl;
        }
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/tables.csv");
        if (!csv) throw std::runtime_error("cannot write " + out_dir + "/tables.csv");
        write_table_csv(rows, csv);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "shape,grid,heater_extent,Pr,Ra,phi,Nu,psi_max,psi_min,converged,"
           "iterations\n";
    char buf[320];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf,
                      "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                      to_string(row.config.geometry.shape), row.config.grid,
                      row.config.geometry.heater_extent, row.config.Pr,
                      row.config.Ra, row.config.phi, row.result.nu,
                      row.result.psi_max, row.result.psi_min,
                      row.result.converged ? 1 : 0, row.result.iterations);
        out << buf;
    }
}

void write_grid_study_csv(const GridStudyResult& study, std::ostream& out) {
    out << "grid,Nu,psi_max,psi_min,converged\n";
    char buf[200];
    for (size_t k = 0; k < study.grids.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n",
                      study.grids[k], study.rows[k].nu, study.rows[k].psi_max,
                      study.rows[k].psi_min, study.rows[k].converged ? 1 : 0);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "# nu_rel_change,%.17g\n", study.nu_rel_change);
    out << buf;
    std::snprintf(buf, sizeof buf, "# max_rel_change,%.17g\n", study.max_rel_change);
    out << buf;
}

void write_table_csv(const std::vector<TableRow>& rows, std::ostream& out) {
    out << "table,label,computed,reference,rel_dev,pass,calibration_sensitive\n";
    char buf[256];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g,%d,%d\n",
                      row.table, row.label.c_str(), row.computed, row.reference,
                      row.rel_dev, row.pass ? 1 : 0, row.informational ? 1 : 0);
        out << buf;
    }
}

} // namespace hnconv
