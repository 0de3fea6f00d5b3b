#include "swfem/fem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "swfem/error.hpp"

namespace swfem {

namespace {

// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

LineRule gauss_legendre(int num_points) {
    if (num_points < 1) throw ElementError("invalid_argument", "Gauss-Legendre rule needs at least one point");
    const int n = num_points;
    LineRule rule;
    rule.points.assign(n, 0.5);
    rule.weights.assign(n, 0.0);
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        const double w = 1.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = 0.5 * (1.0 - x);
        rule.points[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        // Middle node x = 0: P_n'(0) from the recurrence (x*x - 1 != 0 there).
        const double dp = legendre(n, 0.0).second;
        rule.weights[n / 2] = 1.0 / (dp * dp);
    }
    return rule;
}

QuadratureRule triangle_quadrature(int degree) {
    if (degree < 1 || degree > kMaxQuadratureDegree) {
        throw ElementError("unsupported_degree", "triangle quadrature of degree " + std::to_string(degree) +
                                                     " is not supported (1.." +
                                                     std::to_string(kMaxQuadratureDegree) + ")");
    }
    QuadratureRule rule;
    rule.degree = degree;
    if (degree == 1) {
        rule.points = {Vec2(1.0 / 3.0, 1.0 / 3.0)};
        rule.weights = {0.5};
        return rule;
    }
    if (degree == 2) {
        rule.points = {Vec2(1.0 / 6.0, 1.0 / 6.0), Vec2(2.0 / 3.0, 1.0 / 6.0), Vec2(1.0 / 6.0, 2.0 / 3.0)};
        rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        return rule;
    }
    // x = s (1 - t), y = t maps the unit square onto the triangle with
    // Jacobian (1 - t); a degree-d polynomial becomes degree d in s and
    // degree d + 1 in t.
    const int m = (degree + 2 + 1) / 2;
    const LineRule gl = gauss_legendre(m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const double s = gl.points[i], t = gl.points[j];
            rule.points.emplace_back(s * (1.0 - t), t);
            rule.weights.push_back(gl.weights[i] * gl.weights[j] * (1.0 - t));
        }
    }
    return rule;
}

}  // namespace swfem
