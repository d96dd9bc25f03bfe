#pragma once

#include <array>
#include <vector>

namespace hnconv {

/// One quadrature point in barycentric coordinates. Weights include the
/// reference-triangle area, so they sum to 1/2.
struct QuadraturePoint {
    double l0, l1, l2;
    double w;
};

struct QuadratureRule {
    int degree = 0;  // highest polynomial degree integrated exactly
    std::vector<QuadraturePoint> points;
};

/// Returns the smallest symmetric triangle rule exact for polynomials of the
/// requested degree. Available tiers: 2 (3 points), 5 (7 points),
/// 7 (13 points), 9 (19 points). Throws for degree > 9.
const QuadratureRule& triangle_rule(int degree);

/// 3-point Gauss-Legendre rule on [0,1]; weights sum to 1. Exact through
/// degree 5, enough for P2 traces along an edge.
struct EdgePoint {
    double t, w;
};
const std::array<EdgePoint, 3>& edge_rule();

} // namespace hnconv
