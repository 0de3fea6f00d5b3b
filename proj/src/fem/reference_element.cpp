#include "swfem/fem/reference_element.hpp"

#include <array>
#include <cmath>

#include "swfem/error.hpp"
#include "swfem/fem/quadrature.hpp"

namespace swfem {

namespace {

constexpr int kNumMonomials = 10;  // total degree <= 3
constexpr std::array<std::array<int, 2>, kNumMonomials> kExponents{{
    {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3},
}};

int num_monomials(int degree) { return (degree + 1) * (degree + 2) / 2; }

// Basis construction and evaluation run in extended precision so that the
// tabulated values are correctly rounded doubles; discrete identities such
// as div(perp-grad) = 0 then hold to the rounding of single entries.
using Real = long double;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Mono = Eigen::Matrix<Real, kNumMonomials, 1>;

Real ipow(Real x, int n) {
    Real r = 1.0L;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

void monomials(Real x, Real y, Mono* v, Mono* dx, Mono* dy) {
    for (int m = 0; m < kNumMonomials; ++m) {
        const auto [a, b] = kExponents[m];
        if (v) (*v)[m] = ipow(x, a) * ipow(y, b);
        if (dx) (*dx)[m] = a > 0 ? a * ipow(x, a - 1) * ipow(y, b) : 0.0L;
        if (dy) (*dy)[m] = b > 0 ? b * ipow(x, a) * ipow(y, b - 1) : 0.0L;
    }
}

Mono monomial_column(const Vec2& p) {
    Mono r;
    monomials(p.x(), p.y(), &r, nullptr, nullptr);
    return r;
}

// Entries below this fraction of the table maximum are rounding residue of
// exact zeros.
constexpr Real kSnap = 1e-15L;

Eigen::MatrixXd round_table(const MatrixR& t) {
    const Real scale = t.size() ? t.cwiseAbs().maxCoeff() : 0.0L;
    Eigen::MatrixXd out(t.rows(), t.cols());
    for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j)
            out(i, j) = std::abs(t(i, j)) <= kSnap * scale ? 0.0 : static_cast<double>(t(i, j));
    return out;
}

// Clockwise rotation of an edge tangent: the outward normal for a
// counterclockwise traversal.
Vec2 rotate_cw(const Vec2& t) { return {t.y(), -t.x()}; }

// Prime (not yet nodal) basis as monomial coefficient rows.
struct PrimeBasis {
    MatrixR x;
    MatrixR y;
};

PrimeBasis scalar_prime(int degree, bool bubble) {
    const int n = num_monomials(degree) + (bubble ? 1 : 0);
    PrimeBasis prime{MatrixR::Zero(n, kNumMonomials), {}};
    for (int m = 0; m < num_monomials(degree); ++m) prime.x(m, m) = 1.0;
    if (bubble) {
        // 27 x y (1 - x - y) = 27 xy - 27 x^2 y - 27 x y^2
        prime.x(n - 1, 4) = 27.0;
        prime.x(n - 1, 7) = -27.0;
        prime.x(n - 1, 8) = -27.0;
    }
    return prime;
}

PrimeBasis vector_prime(int degree) {
    const int nm = num_monomials(degree);
    PrimeBasis prime{MatrixR::Zero(2 * nm, kNumMonomials), MatrixR::Zero(2 * nm, kNumMonomials)};
    for (int m = 0; m < nm; ++m) {
        prime.x(m, m) = 1.0;
        prime.y(nm + m, m) = 1.0;
    }
    return prime;
}

PrimeBasis rt0_prime() {
    PrimeBasis prime{MatrixR::Zero(3, kNumMonomials), MatrixR::Zero(3, kNumMonomials)};
    prime.x(0, 0) = 1.0;  // (1, 0)
    prime.y(1, 0) = 1.0;  // (0, 1)
    prime.x(2, 1) = 1.0;  // (x, y)
    prime.y(2, 2) = 1.0;
    return prime;
}

// {v in P2^2 : v.n restricted to each edge is linear}: the kernel of the
// quadratic Legendre moment of the normal component on the three edges.
PrimeBasis bdfm1_prime() {
    const PrimeBasis p2 = vector_prime(2);
    // Three-point Gauss rule on [0,1] in extended precision; exact for the
    // degree-4 integrands below.
    const Real r = std::sqrt(0.15L);
    const Real gs[3] = {0.5L - r, 0.5L, 0.5L + r};
    const Real gw[3] = {5.0L / 18.0L, 8.0L / 18.0L, 5.0L / 18.0L};
    MatrixR constraints = MatrixR::Zero(3, p2.x.rows());
    for (int e = 0; e < 3; ++e) {
        const Vec2 n = rotate_cw(reference_edge_tangent(e));
        const Vec2 a = reference_edge_point(e, 0.0), t = reference_edge_tangent(e);
        for (int k = 0; k < 3; ++k) {
            const Real s = gs[k];
            const Real legendre2 = 6.0L * s * s - 6.0L * s + 1.0L;
            Mono mono;
            monomials(a.x() + s * t.x(), a.y() + s * t.y(), &mono, nullptr, nullptr);
            constraints.row(e) +=
                (gw[k] * legendre2 * (Real(n.x()) * (p2.x * mono) + Real(n.y()) * (p2.y * mono))).transpose();
        }
    }
    const MatrixR kernel = Eigen::FullPivLU<MatrixR>(constraints).kernel();  // 12 x 9
    return {kernel.transpose() * p2.x, kernel.transpose() * p2.y};
}

DofFunctional point_value(const Vec2& p) { return {{p}, {Vec2(1.0, 0.0)}}; }

DofFunctional normal_flux(int edge, double s) {
    return {{reference_edge_point(edge, s)}, {rotate_cw(reference_edge_tangent(edge))}};
}

DofFunctional tangential_moment(int edge) {
    const LineRule gl = gauss_legendre(3);
    DofFunctional f;
    for (std::size_t k = 0; k < gl.points.size(); ++k) {
        f.points.push_back(reference_edge_point(edge, gl.points[k]));
        f.weights.push_back(gl.weights[k] * reference_edge_tangent(edge));
    }
    return f;
}

DofFunctional interior_moment(const std::function<Vec2(const Vec2&)>& against) {
    const QuadratureRule rule = triangle_quadrature(6);
    DofFunctional f;
    for (int q = 0; q < rule.size(); ++q) {
        f.points.push_back(rule.points[q]);
        f.weights.push_back(rule.weights[q] * against(rule.points[q]));
    }
    return f;
}

const std::array<Vec2, 3> kVertices{Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

}  // namespace

Vec2 reference_edge_point(int edge, double s) {
    const Vec2& a = kVertices[(edge + 1) % 3];
    const Vec2& b = kVertices[(edge + 2) % 3];
    return a + s * (b - a);
}

Vec2 reference_edge_tangent(int edge) { return kVertices[(edge + 2) % 3] - kVertices[(edge + 1) % 3]; }

std::string ReferenceElement::name() const {
    switch (family_) {
        case ElementFamily::P: return "P" + std::to_string(degree_);
        case ElementFamily::PBubble: return "P2+B3";
        case ElementFamily::DG: return "DG" + std::to_string(degree_);
        case ElementFamily::RT: return "RT" + std::to_string(degree_);
        case ElementFamily::BDM: return "BDM" + std::to_string(degree_);
        case ElementFamily::BDFM: return "BDFM" + std::to_string(degree_);
    }
    return "?";
}

ReferenceElement ReferenceElement::create(ElementFamily family, int degree) {
    ReferenceElement el;
    el.family_ = family;
    el.degree_ = degree;
    PrimeBasis prime;

    auto add = [&el](DofDescriptor d, DofFunctional f) {
        el.dofs_.push_back(d);
        el.functionals_.push_back(std::move(f));
    };
    auto unsupported = [&]() {
        return ElementError("unsupported_element", "unsupported element " + el.name());
    };

    switch (family) {
        case ElementFamily::P:
        case ElementFamily::PBubble: {
            if (family == ElementFamily::P && (degree < 1 || degree > 3)) throw unsupported();
            if (family == ElementFamily::PBubble && degree != 2) throw unsupported();
            const bool bubble = family == ElementFamily::PBubble;
            prime = scalar_prime(degree, bubble);
            el.polynomial_degree_ = bubble ? 3 : degree;
            el.per_vertex_ = 1;
            el.per_edge_ = degree - 1;
            el.per_interior_ = bubble ? 1 : (degree == 3 ? 1 : 0);
            for (int v = 0; v < 3; ++v) add({DofEntity::Vertex, v, 0, DofKind::PointValue}, point_value(kVertices[v]));
            for (int e = 0; e < 3; ++e) {
                for (int j = 1; j < degree; ++j) {
                    add({DofEntity::Edge, e, j - 1, DofKind::PointValue},
                        point_value(reference_edge_point(e, double(j) / degree)));
                }
            }
            if (el.per_interior_ == 1) {
                add({DofEntity::Interior, -1, 0, DofKind::PointValue}, point_value(Vec2(1.0 / 3.0, 1.0 / 3.0)));
            }
            break;
        }
        case ElementFamily::DG: {
            if (degree < 0 || degree > 1) throw unsupported();
            prime = scalar_prime(degree, false);
            el.polynomial_degree_ = degree;
            if (degree == 0) {
                el.per_interior_ = 1;
                add({DofEntity::Interior, -1, 0, DofKind::PointValue}, point_value(Vec2(1.0 / 3.0, 1.0 / 3.0)));
            } else {
                el.per_interior_ = 3;
                // Edge midpoints, ordered like the edges. They carry the
                // degree-2 midpoint rule, so the mass matrix is diagonal, and
                // sampling divergences there keeps D entries smaller than
                // vertex values would.
                const Vec2 nodes[3] = {Vec2(0.5, 0.5), Vec2(0.0, 0.5), Vec2(0.5, 0.0)};
                for (int k = 0; k < 3; ++k) add({DofEntity::Interior, -1, k, DofKind::PointValue}, point_value(nodes[k]));
            }
            break;
        }
        case ElementFamily::RT:
        case ElementFamily::BDM:
        case ElementFamily::BDFM: {
            el.vector_ = true;
            int edge_points = 0;
            if (family == ElementFamily::RT && degree == 0) {
                prime = rt0_prime();
                el.polynomial_degree_ = 1;
                edge_points = 1;
            } else if (family == ElementFamily::BDM && (degree == 1 || degree == 2)) {
                prime = vector_prime(degree);
                el.polynomial_degree_ = degree;
                edge_points = degree + 1;
            } else if (family == ElementFamily::BDFM && degree == 1) {
                prime = bdfm1_prime();
                el.polynomial_degree_ = 2;
                edge_points = 2;
            } else {
                throw unsupported();
            }
            el.per_edge_ = edge_points;
            // Gauss points are symmetric under s -> 1 - s, so reversing the
            // edge direction only permutes its DOFs.
            const LineRule gl = gauss_legendre(edge_points);
            for (int e = 0; e < 3; ++e) {
                for (int j = 0; j < edge_points; ++j) {
                    add({DofEntity::Edge, e, j, DofKind::NormalFlux}, normal_flux(e, gl.points[j]));
                }
            }
            if (family == ElementFamily::BDFM) {
                el.per_interior_ = 3;
                for (int e = 0; e < 3; ++e) add({DofEntity::Interior, -1, e, DofKind::TangentialMoment}, tangential_moment(e));
            } else if (family == ElementFamily::BDM && degree == 2) {
                el.per_interior_ = 3;
                add({DofEntity::Interior, -1, 0, DofKind::InteriorMoment},
                    interior_moment([](const Vec2&) { return Vec2(1.0, 0.0); }));
                add({DofEntity::Interior, -1, 1, DofKind::InteriorMoment},
                    interior_moment([](const Vec2&) { return Vec2(0.0, 1.0); }));
                add({DofEntity::Interior, -1, 2, DofKind::InteriorMoment},
                    interior_moment([](const Vec2& p) { return Vec2(-p.y(), p.x()); }));
            }
            break;
        }
    }

    const int n = el.dim();
    if (prime.x.rows() != n) {
        throw ElementError("internal", el.name() + ": prime basis size does not match the DOF count");
    }
    // vandermonde(k, j) = l_k(p_j)
    MatrixR vandermonde(n, n);
    for (int k = 0; k < n; ++k) {
        const auto& f = el.functionals_[k];
        for (int j = 0; j < n; ++j) {
            Real sum = 0.0L;
            for (std::size_t q = 0; q < f.points.size(); ++q) {
                const Mono mono = monomial_column(f.points[q]);
                sum += Real(f.weights[q].x()) * prime.x.row(j).dot(mono);
                if (el.vector_) sum += Real(f.weights[q].y()) * prime.y.row(j).dot(mono);
            }
            vandermonde(k, j) = sum;
        }
    }
    Eigen::FullPivLU<MatrixR> lu(vandermonde.transpose());
    if (!lu.isInvertible()) throw ElementError("internal", el.name() + ": DOFs are not unisolvent");
    const MatrixR inv = lu.inverse();
    el.coeffs_x_ = inv * prime.x;
    if (el.vector_) el.coeffs_y_ = inv * prime.y;
    return el;
}

void ReferenceElement::evaluate(const Vec2& p, double* values) const {
    Mono mono;
    monomials(p.x(), p.y(), &mono, nullptr, nullptr);
    const MatrixR v = coeffs_x_ * mono;
    for (int i = 0; i < dim(); ++i) values[i] = static_cast<double>(v(i));
}

void ReferenceElement::evaluate_gradients(const Vec2& p, Vec2* gradients) const {
    Mono dx, dy;
    monomials(p.x(), p.y(), nullptr, &dx, &dy);
    const MatrixR gx = coeffs_x_ * dx;
    const MatrixR gy = coeffs_x_ * dy;
    for (int i = 0; i < dim(); ++i) gradients[i] = Vec2(static_cast<double>(gx(i)), static_cast<double>(gy(i)));
}

void ReferenceElement::evaluate_vector(const Vec2& p, Vec2* values) const {
    Mono mono;
    monomials(p.x(), p.y(), &mono, nullptr, nullptr);
    const MatrixR vx = coeffs_x_ * mono;
    const MatrixR vy = coeffs_y_ * mono;
    for (int i = 0; i < dim(); ++i) values[i] = Vec2(static_cast<double>(vx(i)), static_cast<double>(vy(i)));
}

void ReferenceElement::evaluate_divergence(const Vec2& p, double* divergences) const {
    Mono dx, dy;
    monomials(p.x(), p.y(), nullptr, &dx, &dy);
    const MatrixR d = coeffs_x_ * dx + coeffs_y_ * dy;
    for (int i = 0; i < dim(); ++i) divergences[i] = static_cast<double>(d(i));
}

Eigen::MatrixXd ReferenceElement::divergence_table(const std::vector<Vec2>& points) const {
    if (!vector_) throw ElementError("incompatible_spaces", name() + " has no divergence");
    MatrixR t(points.size(), dim());
    for (std::size_t q = 0; q < points.size(); ++q) {
        Mono dx, dy;
        monomials(points[q].x(), points[q].y(), nullptr, &dx, &dy);
        t.row(q) = (coeffs_x_ * dx + coeffs_y_ * dy).transpose();
    }
    return round_table(t);
}

Eigen::MatrixXd ReferenceElement::perp_gradient_table(const ReferenceElement& scalar) const {
    if (!vector_ || scalar.vector_) {
        throw ElementError("incompatible_spaces", "perp-grad needs a scalar element and an H(div) element");
    }
    MatrixR t = MatrixR::Zero(dim(), scalar.dim());
    for (int i = 0; i < dim(); ++i) {
        const DofFunctional& f = functionals_[i];
        for (std::size_t k = 0; k < f.points.size(); ++k) {
            Mono dx, dy;
            monomials(f.points[k].x(), f.points[k].y(), nullptr, &dx, &dy);
            // perp-grad = (-d/dy, d/dx)
            t.row(i) += (Real(f.weights[k].y()) * (scalar.coeffs_x_ * dx) - Real(f.weights[k].x()) * (scalar.coeffs_x_ * dy))
                            .transpose();
        }
    }
    return round_table(t);
}

ScalarTabulation ReferenceElement::tabulate_scalar(const std::vector<Vec2>& points) const {
    ScalarTabulation t;
    t.num_points = static_cast<int>(points.size());
    t.dim = dim();
    t.values.resize(static_cast<std::size_t>(t.num_points) * t.dim);
    t.gradients.resize(t.values.size());
    for (int q = 0; q < t.num_points; ++q) {
        evaluate(points[q], &t.values[q * t.dim]);
        evaluate_gradients(points[q], &t.gradients[q * t.dim]);
    }
    return t;
}

VectorTabulation ReferenceElement::tabulate_vector(const std::vector<Vec2>& points) const {
    VectorTabulation t;
    t.num_points = static_cast<int>(points.size());
    t.dim = dim();
    t.values.resize(static_cast<std::size_t>(t.num_points) * t.dim);
    t.divergences.resize(t.values.size());
    for (int q = 0; q < t.num_points; ++q) {
        evaluate_vector(points[q], &t.values[q * t.dim]);
        evaluate_divergence(points[q], &t.divergences[q * t.dim]);
    }
    return t;
}

Eigen::VectorXd ReferenceElement::interpolate(const ScalarFunction& f) const {
    Eigen::VectorXd out(dim());
    for (int k = 0; k < dim(); ++k) {
        double sum = 0.0;
        const auto& fn = functionals_[k];
        for (std::size_t q = 0; q < fn.points.size(); ++q) sum += fn.weights[q].x() * f(fn.points[q]);
        out[k] = sum;
    }
    return out;
}

Eigen::VectorXd ReferenceElement::interpolate(const VectorFunction& f) const {
    Eigen::VectorXd out(dim());
    for (int k = 0; k < dim(); ++k) {
        double sum = 0.0;
        const auto& fn = functionals_[k];
        for (std::size_t q = 0; q < fn.points.size(); ++q) sum += fn.weights[q].dot(f(fn.points[q]));
        out[k] = sum;
    }
    return out;
}

}  // namespace swfem
