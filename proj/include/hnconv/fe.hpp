#pragma once

#include "hnconv/geometry.hpp"

#include <array>

namespace hnconv {

/// Affine-map data of one triangle: area and the constant barycentric
/// gradients in physical coordinates.
struct ElementGeometry {
    double area = 0.0;
    std::array<std::array<double, 2>, 3> grad_lambda{};  // [vertex][x/y]
};

inline ElementGeometry element_geometry(const Point2& p0, const Point2& p1,
                                        const Point2& p2) {
    const double two_a =
        (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    ElementGeometry g;
    g.area = 0.5 * two_a;
    g.grad_lambda[0] = {(p1.y - p2.y) / two_a, (p2.x - p1.x) / two_a};
    g.grad_lambda[1] = {(p2.y - p0.y) / two_a, (p0.x - p2.x) / two_a};
    g.grad_lambda[2] = {(p0.y - p1.y) / two_a, (p1.x - p0.x) / two_a};
    return g;
}

/// Quadratic Lagrange basis on the triangle. Local numbering: vertices 0-2,
/// then midside nodes on edges (0,1), (1,2), (2,0).
inline std::array<double, 6> p2_values(double l0, double l1, double l2) {
    return {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
            4.0 * l0 * l1,         4.0 * l1 * l2,         4.0 * l2 * l0};
}

/// Physical-coordinate gradients of the P2 basis at barycentric (l0,l1,l2).
inline std::array<std::array<double, 2>, 6> p2_grads(
    double l0, double l1, double l2, const ElementGeometry& g) {
    const auto& gl = g.grad_lambda;
    std::array<std::array<double, 2>, 6> out;
    for (int d = 0; d < 2; ++d) {
        out[0][d] = (4.0 * l0 - 1.0) * gl[0][d];
        out[1][d] = (4.0 * l1 - 1.0) * gl[1][d];
        out[2][d] = (4.0 * l2 - 1.0) * gl[2][d];
        out[3][d] = 4.0 * (l1 * gl[0][d] + l0 * gl[1][d]);
        out[4][d] = 4.0 * (l2 * gl[1][d] + l1 * gl[2][d]);
        out[5][d] = 4.0 * (l0 * gl[2][d] + l2 * gl[0][d]);
    }
    return out;
}

inline std::array<double, 3> p1_values(double l0, double l1, double l2) {
    return {l0, l1, l2};
}

} // namespace hnconv
