#pragma once

#include "hnconv/geometry.hpp"
#include "hnconv/solver.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace hnconv {

struct OutputFlags {
    bool fields = false;
    bool nusselt = true;
    bool streamfunction = true;
    bool report = true;
};

/// One solver case: geometry, grid, parameters, solver settings, outputs.
struct CaseConfig {
    GeometrySpec geometry;
    int grid = 32;
    double Pr = 1.0;
    double Ra = 1e3;
    double phi = 0.0;
    double split_a = 0.5;
    SolverConfig solver;
    OutputFlags outputs;
    bool nusselt_weighted = true;
    std::string materials_file;  // empty: bundled default table

    void validate() const;  // throws std::invalid_argument
};

/// Key-value view of a config file: keys are `section.key`, flattened from
/// `key = value` lines under `[section]` headers. '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;

/// Parses the flat config text. Throws ConfigError with the offending line
/// number on malformed input or unknown keys.
ConfigMap read_config_map(std::istream& in);

/// Environment variables HNCONV_<SECTION>_<KEY> override any config key.
void apply_env_overrides(ConfigMap& map);

/// Builds a typed CaseConfig from a key-value map. Unknown keys are errors.
CaseConfig case_config_from_map(const ConfigMap& map);

/// File convenience wrapper: read, apply environment overrides, build.
CaseConfig load_case_config(const std::string& path);

/// Parses a comma-separated list of numbers (used for continuation ladders
/// and sweep axes).
std::vector<double> parse_number_list(const std::string& text);

} // namespace hnconv
