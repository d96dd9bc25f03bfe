#include "hnconv/config.hpp"

#include "hnconv/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

extern "C" char** environ;

namespace hnconv {

void CaseConfig::validate() const {
    geometry.validate();
    if (grid < 2) throw std::invalid_argument("grid must be at least 2");
    if (!(Pr > 0.0)) throw std::invalid_argument("Pr must be positive");
    if (Ra < 0.0) throw std::invalid_argument("Ra must be nonnegative");
    if (phi < 0.0 || phi > 0.05)
        throw std::invalid_argument("phi must be in [0, 0.05]");
    if (split_a < 0.0 || split_a > 1.0)
        throw std::invalid_argument("split_a must be in [0, 1]");
    solver.validate();
}

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

const char* const kKnownKeys[] = {
    "geometry.shape",         "geometry.outer_width",
    "geometry.outer_height",  "geometry.arm_thickness",
    "geometry.bridge_height", "geometry.heater_extent",
    "case.grid",              "case.pr",
    "case.ra",                "case.phi",
    "case.split_a",           "solver.tolerance",
    "solver.max_newton",      "solver.max_picard",
    "solver.damping",         "solver.continuation",
    "output.fields",          "output.nusselt",
    "output.streamfunction",  "output.report",
    "output.nusselt_weighted", "materials.file",
};

bool known_key(const std::string& key) {
    for (const char* k : kKnownKeys)
        if (key == k) return true;
    return false;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double d = std::stod(value, &used);
        if (trim(value.substr(used)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError(0, key + ": expected a number, got `" + value + "`");
}

int to_int(const std::string& key, const std::string& value) {
    const double d = to_double(key, value);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw ConfigError(0, key + ": expected an integer, got `" + value + "`");
    return i;
}

bool to_bool(const std::string& key, const std::string& value) {
    const std::string v = lower(trim(value));
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(0, key + ": expected a boolean, got `" + value + "`");
}

} // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(to_double("list", item));
    }
    return out;
}

ConfigMap read_config_map(std::istream& in) {
    ConfigMap map;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(lineno, "unterminated section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section.empty())
                throw ConfigError(lineno, "empty section name");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "expected `key = value`");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "empty key");
        if (section.empty())
            throw ConfigError(lineno, "key `" + key + "` outside any section");

        const std::string full = section + "." + key;
        if (!known_key(full))
            throw ConfigError(lineno, "unknown key `" + full + "`");
        map[full] = value;
    }
    return map;
}

void apply_env_overrides(ConfigMap& map) {
    for (char** env = environ; *env; ++env) {
        const std::string entry(*env);
        if (entry.rfind("HNCONV_", 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string name = entry.substr(7, eq - 7);
        const std::string value = entry.substr(eq + 1);
        const auto underscore = name.find('_');
        if (underscore == std::string::npos) continue;
        std::string key = lower(name.substr(0, underscore)) + "." +
                          lower(name.substr(underscore + 1));
        if (known_key(key)) map[key] = value;
    }
}

CaseConfig case_config_from_map(const ConfigMap& map) {
    CaseConfig config;
    for (const auto& [key, value] : map) {
        if (key == "geometry.shape")
            config.geometry.shape = cavity_shape_from_string(lower(value));
        else if (key == "geometry.outer_width")
            config.geometry.outer_width = to_double(key, value);
        else if (key == "geometry.outer_height")
            config.geometry.outer_height = to_double(key, value);
        else if (key == "geometry.arm_thickness")
            config.geometry.arm_thickness = to_double(key, value);
        else if (key == "geometry.bridge_height")
            config.geometry.bridge_height = to_double(key, value);
        else if (key == "geometry.heater_extent")
            config.geometry.heater_extent = to_double(key, value);
        else if (key == "case.grid")
            config.grid = to_int(key, value);
        else if (key == "case.pr")
            config.Pr = to_double(key, value);
        else if (key == "case.ra")
            config.Ra = to_double(key, value);
        else if (key == "case.phi")
            config.phi = to_double(key, value);
        else if (key == "case.split_a")
            config.split_a = to_double(key, value);
        else if (key == "solver.tolerance")
            config.solver.tolerance = to_double(key, value);
        else if (key == "solver.max_newton")
            config.solver.max_newton = to_int(key, value);
        else if (key == "solver.max_picard")
            config.solver.max_picard = to_int(key, value);
        else if (key == "solver.damping")
            config.solver.damping = to_double(key, value);
        else if (key == "solver.continuation")
            config.solver.continuation = parse_number_list(value);
        else if (key == "output.fields")
            config.outputs.fields = to_bool(key, value);
        else if (key == "output.nusselt")
            config.outputs.nusselt = to_bool(key, value);
        else if (key == "output.streamfunction")
            config.outputs.streamfunction = to_bool(key, value);
        else if (key == "output.report")
            config.outputs.report = to_bool(key, value);
        else if (key == "output.nusselt_weighted")
            config.nusselt_weighted = to_bool(key, value);
        else if (key == "materials.file")
            config.materials_file = value;
    }
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
    return config;
}

CaseConfig load_case_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file " + path);
    ConfigMap map = read_config_map(in);
    apply_env_overrides(map);
    return case_config_from_map(map);
}

} // namespace hnconv
