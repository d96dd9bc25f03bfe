#pragma once

#include "hnconv/dofmap.hpp"
#include "hnconv/geometry.hpp"
#include "hnconv/materials.hpp"
#include "hnconv/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hnconv {

/// Wall heat-transfer summary. local_profile holds (arc-length position,
/// local flux) sampled at edge midpoints, ordered along the wall; the
/// arc-length integral of the profile reproduces global_nu exactly because
/// the P2 normal gradient is linear along each edge.
struct NusseltReport {
    double global_nu = 0.0;
    std::vector<std::pair<double, double>> local_profile;
    BoundaryTag wall = BoundaryTag::HotWall;
    bool conductivity_weighted = true;
};

/// Integral of the wall-normal temperature gradient over the tagged wall,
/// evaluated from one-sided element traces with 3-point edge quadrature.
/// The sign convention uses the into-fluid normal, so heat entering at the
/// hot wall is positive. With conductivity_weighted the integral is scaled
/// by k_hnf/k_f. Throws std::invalid_argument when the wall tag is absent.
NusseltReport global_nusselt(const SolutionFields& solution, const Mesh& mesh,
                             const DofMap& dofs, const PropertyRatios& ratios,
                             BoundaryTag wall,
                             bool conductivity_weighted = true);

/// Stream function from the velocity field: solves
///   (grad psi, grad theta) = (omega, theta),  psi = 0 on the boundary,
/// with vorticity omega = dV/dx - dU/dy. Extrema are over nodal values.
struct StreamFunctionField {
    Eigen::VectorXd psi;  // P2 coefficients
    double psi_max = 0.0;
    double psi_min = 0.0;
};

StreamFunctionField stream_function(const SolutionFields& solution,
                                    const Mesh& mesh, const DofMap& dofs);

/// Signed hot/cold wall fluxes (into-fluid normal convention, so they sum to
/// zero in perfect balance) and the relative imbalance |hot + cold| / |hot|.
struct EnergyBalance {
    double hot_flux = 0.0;
    double cold_flux = 0.0;
    double imbalance = 0.0;
};

EnergyBalance energy_balance(const SolutionFields& solution, const Mesh& mesh,
                             const DofMap& dofs, const PropertyRatios& ratios);

/// Writes <dir>/fields.csv (header x,y,U,V,T,p,psi, one row per P2 node,
/// 17 significant digits) and <dir>/fields.vtk (legacy ASCII 2.0
/// unstructured grid with quadratic triangles and six point-data arrays).
void export_fields(const SolutionFields& solution, const Mesh& mesh,
                   const DofMap& dofs, const std::string& dir);

} // namespace hnconv
