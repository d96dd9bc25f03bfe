#include "hnconv/materials.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef HNCONV_DATA_DIR
#define HNCONV_DATA_DIR "data"
#endif

namespace hnconv {

void MaterialSpec::validate(const std::string& name) const {
    if (!(density > 0.0) || !(specific_heat > 0.0) || !(conductivity > 0.0) ||
        !(expansion_coeff > 0.0))
        throw std::invalid_argument("material " + name +
                                    " has a non-positive property");
}

namespace {

// Maxwell effective conductivity of a dilute suspension.
double maxwell(double k_base, double k_particle, double phi) {
    const double num = k_particle + 2.0 * k_base - 2.0 * phi * (k_base - k_particle);
    const double den = k_particle + 2.0 * k_base + phi * (k_base - k_particle);
    return k_base * num / den;
}

} // namespace

PropertyRatios compute_ratios(const MixtureSpec& mix) {
    if (!(mix.phi_total >= 0.0) || mix.phi_total > 0.05)
        throw std::invalid_argument("phi_total must be in [0, 0.05]");
    if (!(mix.split_a >= 0.0) || mix.split_a > 1.0)
        throw std::invalid_argument("split_a must be in [0, 1]");
    mix.base.validate("base");
    mix.particle_a.validate("particle_a");
    mix.particle_b.validate("particle_b");

    const double phi = mix.phi_total;
    const double phi_a = phi * mix.split_a;
    const double phi_b = phi - phi_a;
    const MaterialSpec& f = mix.base;
    const MaterialSpec& pa = mix.particle_a;
    const MaterialSpec& pb = mix.particle_b;

    const double rho_hnf =
        (1.0 - phi) * f.density + phi_a * pa.density + phi_b * pb.density;
    const double rhobeta_hnf = (1.0 - phi) * f.density * f.expansion_coeff +
                               phi_a * pa.density * pa.expansion_coeff +
                               phi_b * pb.density * pb.expansion_coeff;
    const double rhocp_hnf = (1.0 - phi) * f.density * f.specific_heat +
                             phi_a * pa.density * pa.specific_heat +
                             phi_b * pb.density * pb.specific_heat;

    const double k_bf = maxwell(f.conductivity, pb.conductivity, phi_b);
    const double k_hnf = maxwell(k_bf, pa.conductivity, phi_a);

    PropertyRatios r;
    r.rho_ratio = f.density / rho_hnf;
    r.mu_ratio = std::pow(1.0 - phi, -2.5);
    r.rhobeta_ratio = rhobeta_hnf / (rho_hnf * f.expansion_coeff);
    r.k_ratio = k_hnf / f.conductivity;
    r.alpha_ratio = r.k_ratio * (f.density * f.specific_heat) / rhocp_hnf;
    return r;
}

MaterialTable load_materials(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open material file " + path);

    MaterialTable table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name)) continue;  // blank line
        MaterialSpec m;
        if (!(ls >> m.density >> m.specific_heat >> m.conductivity >>
              m.expansion_coeff))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected `name rho cp k beta`");
        m.validate(name);
        table[name] = m;
    }
    if (table.empty())
        throw std::runtime_error(path + ": no materials defined");
    return table;
}

MaterialTable default_materials() {
    std::string path = std::string(HNCONV_DATA_DIR) + "/materials.txt";
    if (const char* env = std::getenv("HNCONV_MATERIALS")) path = env;
    return load_materials(path);
}

MixtureSpec mixture_from_table(const MaterialTable& table, double phi_total,
                               double split_a) {
    auto pick = [&](const std::string& name) {
        auto it = table.find(name);
        if (it == table.end())
            throw std::runtime_error("material table is missing entry " + name);
        return it->second;
    };
    MixtureSpec mix;
    mix.base = pick("water");
    mix.particle_a = pick("Cu");
    mix.particle_b = pick("Al2O3");
    mix.phi_total = phi_total;
    mix.split_a = split_a;
    return mix;
}

MixtureSpec default_mixture(double phi_total, double split_a) {
    return mixture_from_table(default_materials(), phi_total, split_a);
}

} // namespace hnconv
