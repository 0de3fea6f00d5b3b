#pragma once

#include <vector>

#include "swfem/mesh/mesh.hpp"

namespace swfem {

/// Quadrature on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int degree = 0;

    int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
};

constexpr int kMaxQuadratureDegree = 40;

/// Rule exact for all polynomials of total degree <= `degree`.
/// Degrees 1 and 2 use the centroid and 3-point symmetric rules; higher
/// degrees use a collapsed (Duffy) Gauss-Legendre product with positive
/// weights. Throws ElementError for degree < 1 or > kMaxQuadratureDegree.
QuadratureRule triangle_quadrature(int degree);

LineRule gauss_legendre(int num_points);

}  // namespace swfem
