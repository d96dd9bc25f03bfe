// Command-line front end: single cases, parameter sweeps, grid studies,
// reference-table reproduction and the manufactured-solution study.
//
// Exit codes: 0 success, 2 config/usage errors, 3 solver failures
// (artifacts are still written), 4 I/O errors.

#include "hnconv/bench.hpp"
#include "hnconv/errors.hpp"
#include "hnconv/mms.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

hnconv::CaseConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return hnconv::CaseConfig{};
    return hnconv::load_case_config(path);
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const hnconv::CaseConfig config = load_config_or_default(config_path);
    const hnconv::CaseResult result = hnconv::run_case(config, out_dir);
    std::cout << hnconv::summary_line(config, result) << "\n";
    return result.converged ? kExitOk : kExitSolver;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int workers, const hnconv::SweepAxes& axes) {
    const hnconv::CaseConfig base = load_config_or_default(config_path);
    const auto rows = hnconv::run_sweep(base, axes, out_dir, workers);
    bool all_converged = true;
    for (const auto& row : rows) {
        std::cout << hnconv::summary_line(row.config, row.result) << "\n";
        all_converged = all_converged && row.result.converged;
    }
    for (const auto& note : hnconv::check_sweep_monotonicity(rows))
        std::cout << "note: " << note << "\n";
    return all_converged ? kExitOk : kExitSolver;
}

int cmd_gridstudy(const std::string& config_path, const std::string& out_dir,
                  const std::vector<int>& grids) {
    const hnconv::CaseConfig base = load_config_or_default(config_path);
    const auto study = hnconv::run_grid_study(base, grids, out_dir);
    bool all_converged = true;
    for (size_t k = 0; k < study.grids.size(); ++k) {
        hnconv::CaseConfig c = base;
        c.grid = study.grids[k];
        std::cout << hnconv::summary_line(c, study.rows[k]) << "\n";
        all_converged = all_converged && study.rows[k].converged;
    }
    std::printf("nu_rel_change %.6g\nmax_rel_change %.6g\n",
                study.nu_rel_change, study.max_rel_change);
    return all_converged ? kExitOk : kExitSolver;
}

int cmd_tables(const std::vector<int>& ids, const std::string& out_dir) {
    const auto rows = hnconv::reproduce_tables(ids, out_dir, &std::cout);
    bool gating_ok = true;
    for (const auto& row : rows)
        if (!row.informational && !row.pass) gating_ok = false;
    return gating_ok ? kExitOk : kExitSolver;
}

int cmd_mms(const std::string& case_name, int levels, int n0, double pr,
            double ra, const std::string& out_dir) {
    hnconv::FlowParams params;
    params.Pr = pr;
    params.Ra = ra;
    params.ratios = hnconv::PropertyRatios::clear_fluid();

    hnconv::ManufacturedCase mcase;
    if (case_name == "zero")
        mcase = hnconv::ManufacturedCase::zero(params);
    else if (case_name == "polynomial")
        mcase = hnconv::ManufacturedCase::polynomial(params);
    else if (case_name == "trigonometric")
        mcase = hnconv::ManufacturedCase::trigonometric(params);
    else
        throw hnconv::ConfigError(0, "unknown manufactured case " + case_name);

    hnconv::SolverConfig solver;
    solver.tolerance = 1e-10;
    const auto report = hnconv::run_mms_study(mcase, levels, params, solver, n0);

    report.write_csv(std::cout);
    std::cout << report.rate_summary() << "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/mms.csv");
        if (!csv) throw std::runtime_error("cannot write " + out_dir + "/mms.csv");
        report.write_csv(csv);
        csv << "# " << report.rate_summary() << "\n";
    }
    return report.all_converged ? kExitOk : kExitSolver;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Natural-convection cavity benchmark solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int workers = 1;
    app.add_option("--config", config_path, "Case config file")
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Artifact output directory");
    app.add_option("--workers", workers, "Concurrent sweep workers")
        ->check(CLI::PositiveNumber);

    auto* run = app.add_subcommand("run", "Run one case");

    auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
    std::string ra_list, pr_list, phi_list, heater_list;
    sweep->add_option("--ra", ra_list, "Comma list of Rayleigh numbers");
    sweep->add_option("--pr", pr_list, "Comma list of Prandtl numbers");
    sweep->add_option("--phi", phi_list, "Comma list of volume fractions");
    sweep->add_option("--heater", heater_list, "Comma list of heater extents");

    auto* gridstudy = app.add_subcommand("gridstudy", "Grid refinement study");
    std::string grid_list = "20,32,48,64";
    gridstudy->add_option("--grids", grid_list, "Comma list of grid counts");

    auto* tables = app.add_subcommand("tables", "Reproduce reference tables");
    std::string table_list = "all";
    tables->add_option("--ids", table_list, "Comma list of table ids (1-8) or `all`");

    auto* mms = app.add_subcommand("mms", "Manufactured-solution rate study");
    std::string mms_case = "trigonometric";
    int mms_levels = 4, mms_n0 = 8;
    double mms_pr = 1.0, mms_ra = 100.0;
    mms->add_option("--case", mms_case, "zero | polynomial | trigonometric");
    mms->add_option("--levels", mms_levels, "Refinement levels");
    mms->add_option("--n0", mms_n0, "Coarsest grid count");
    mms->add_option("--pr", mms_pr, "Prandtl number");
    mms->add_option("--ra", mms_ra, "Rayleigh number");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir);
        if (sweep->parsed()) {
            hnconv::SweepAxes axes;
            axes.ra = hnconv::parse_number_list(ra_list);
            axes.pr = hnconv::parse_number_list(pr_list);
            axes.phi = hnconv::parse_number_list(phi_list);
            axes.heater = hnconv::parse_number_list(heater_list);
            return cmd_sweep(config_path, out_dir, workers, axes);
        }
        if (gridstudy->parsed()) {
            std::vector<int> grids;
            for (double g : hnconv::parse_number_list(grid_list))
                grids.push_back(static_cast<int>(g));
            return cmd_gridstudy(config_path, out_dir, grids);
        }
        if (tables->parsed()) {
            std::vector<int> ids;
            if (table_list == "all")
                ids = {1, 2, 3, 4, 5, 6, 7, 8};
            else
                for (double v : hnconv::parse_number_list(table_list))
                    ids.push_back(static_cast<int>(v));
            return cmd_tables(ids, out_dir);
        }
        if (mms->parsed())
            return cmd_mms(mms_case, mms_levels, mms_n0, mms_pr, mms_ra, out_dir);
    } catch (const hnconv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const hnconv::SingularSystemError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::runtime_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitConfig;
}
