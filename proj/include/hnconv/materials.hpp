#pragma once

#include <map>
#include <string>

namespace hnconv {

/// Thermophysical constants of one material (SI units).
struct MaterialSpec {
    double density = 0.0;          // kg/m^3
    double specific_heat = 0.0;    // J/(kg K)
    double conductivity = 0.0;     // W/(m K)
    double expansion_coeff = 0.0;  // 1/K

    void validate(const std::string& name) const;
};

/// Cu-Al2O3/water mixture description. split_a is the fraction of phi_total
/// assigned to particle_a (Cu by default).
struct MixtureSpec {
    MaterialSpec base;        // water
    MaterialSpec particle_a;  // Cu
    MaterialSpec particle_b;  // Al2O3
    double phi_total = 0.0;   // total particle volume fraction
    double split_a = 0.5;
};

/// The nondimensional coefficient ratios entering the governing equations,
/// plus the conductivity ratio used for Nusselt weighting. All ratios are
/// exactly 1 at phi_total = 0.
struct PropertyRatios {
    double rho_ratio = 1.0;      // rho_f / rho_hnf
    double mu_ratio = 1.0;       // mu_hnf / mu_f
    double rhobeta_ratio = 1.0;  // (rho beta)_hnf / (rho_hnf beta_f)
    double alpha_ratio = 1.0;    // alpha_hnf / alpha_f
    double k_ratio = 1.0;        // k_hnf / k_f

    static PropertyRatios clear_fluid() { return {}; }
};

/// Mixture model: linear volumetric mixing for rho, rho*beta and rho*cp,
/// Brinkman viscosity in the total fraction, and Maxwell conductivity applied
/// sequentially (base + particle_b first, then that medium + particle_a).
/// Throws std::invalid_argument when phi_total is outside [0, 0.05].
PropertyRatios compute_ratios(const MixtureSpec& mix);

using MaterialTable = std::map<std::string, MaterialSpec>;

/// Parses a material data file: one material per line,
/// `name density specific_heat conductivity expansion_coeff`,
/// with '#' comments. Throws std::runtime_error on malformed input.
MaterialTable load_materials(const std::string& path);

/// Loads the bundled data file (overridable via the HNCONV_MATERIALS
/// environment variable) and returns the water/Cu/Al2O3 triple.
MixtureSpec default_mixture(double phi_total, double split_a = 0.5);

/// Same lookup, full table.
MaterialTable default_materials();

/// Builds a MixtureSpec from a loaded table (entries water, Cu, Al2O3).
MixtureSpec mixture_from_table(const MaterialTable& table, double phi_total,
                               double split_a = 0.5);

} // namespace hnconv
