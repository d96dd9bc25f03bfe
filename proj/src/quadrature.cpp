#include "hnconv/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hnconv {

namespace {

// Symmetric orbit helpers; weights are in the "sum to 1" normalization and
// get scaled by the reference area 1/2 below.
void orbit1(std::vector<QuadraturePoint>& pts, double w) {
    const double t = 1.0 / 3.0;
    pts.push_back({t, t, t, w});
}

void orbit3(std::vector<QuadraturePoint>& pts, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    pts.push_back({b, a, a, w});
    pts.push_back({a, b, a, w});
    pts.push_back({a, a, b, w});
}

void orbit6(std::vector<QuadraturePoint>& pts, double a, double b, double w) {
    const double c = 1.0 - a - b;
    pts.push_back({a, b, c, w});
    pts.push_back({a, c, b, w});
    pts.push_back({b, a, c, w});
    pts.push_back({b, c, a, w});
    pts.push_back({c, a, b, w});
    pts.push_back({c, b, a, w});
}

QuadratureRule make_rule(int degree) {
    QuadratureRule rule;
    rule.degree = degree;
    auto& p = rule.points;
    switch (degree) {
        case 2:
            // Edge midpoints.
            orbit3(p, 0.5, 1.0 / 3.0);
            break;
        case 5:
            orbit1(p, 0.225);
            orbit3(p, 0.470142064105115, 0.132394152788506);
            orbit3(p, 0.101286507323456, 0.125939180544827);
            break;
        case 7:
            // Dunavant degree 7; the centroid weight is negative.
            orbit1(p, -0.149570044467670);
            orbit3(p, 0.260345966079038, 0.175615257433204);
            orbit3(p, 0.065130102902216, 0.053347235608839);
            orbit6(p, 0.638444188569809, 0.312865496004875, 0.077113760890257);
            break;
        case 9:
            orbit1(p, 0.097135796282799);
            orbit3(p, 0.489682519198738, 0.031334700227139);
            orbit3(p, 0.437089591492937, 0.077827541004774);
            orbit3(p, 0.188203535619033, 0.079647738927210);
            orbit3(p, 0.044729513394453, 0.025577675658698);
            orbit6(p, 0.741198598784498, 0.036838412054736, 0.043283539377289);
            break;
        default:
            throw std::invalid_argument("no quadrature tier for this degree");
    }
    for (auto& q : p) q.w *= 0.5;
    return rule;
}

} // namespace

const QuadratureRule& triangle_rule(int degree) {
    static const QuadratureRule deg2 = make_rule(2);
    static const QuadratureRule deg5 = make_rule(5);
    static const QuadratureRule deg7 = make_rule(7);
    static const QuadratureRule deg9 = make_rule(9);
    if (degree <= 2) return deg2;
    if (degree <= 5) return deg5;
    if (degree <= 7) return deg7;
    if (degree <= 9) return deg9;
    throw std::invalid_argument("no quadrature tier above degree 9");
}

const std::array<EdgePoint, 3>& edge_rule() {
    static const std::array<EdgePoint, 3> rule = [] {
        const double s = std::sqrt(3.0 / 5.0);
        return std::array<EdgePoint, 3>{{{0.5 * (1.0 - s), 5.0 / 18.0},
                                         {0.5, 8.0 / 18.0},
                                         {0.5 * (1.0 + s), 5.0 / 18.0}}};
    }();
    return rule;
}

} // namespace hnconv
