#pragma once

#include <functional>
#include <string>
#include <vector>

#include "swfem/mesh/mesh.hpp"

namespace swfem {

enum class ElementFamily {
    P,         ///< continuous Lagrange
    PBubble,   ///< continuous quadratic Lagrange enriched with the cubic bubble
    DG,        ///< discontinuous Lagrange
    RT,        ///< Raviart-Thomas (lowest order only)
    BDM,       ///< Brezzi-Douglas-Marini
    BDFM,      ///< Brezzi-Douglas-Fortin-Marini (degree 1 only)
};

enum class DofEntity { Vertex, Edge, Interior };

enum class DofKind {
    PointValue,        ///< scalar point evaluation
    NormalFlux,        ///< v . (edge vector rotated clockwise) at an edge point
    TangentialMoment,  ///< integral of v . (edge vector) along one edge, cell-local
    InteriorMoment,    ///< integral of v . p over the cell
};

struct DofDescriptor {
    DofEntity entity = DofEntity::Interior;
    /// Local vertex or edge number for Vertex/Edge DOFs, otherwise -1.
    int entity_index = -1;
    /// Position among the DOFs of the same entity; for edge DOFs the order
    /// follows the counterclockwise traversal of the local edge.
    int index_on_entity = 0;
    DofKind kind = DofKind::PointValue;
};

/// A linear functional sum_k weights[k] . f(points[k]) on the reference
/// triangle. For scalar elements only weights[k].x() is used.
struct DofFunctional {
    std::vector<Vec2> points;
    std::vector<Vec2> weights;
};

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Basis values at a fixed set of reference points, indexed [point][basis].
struct ScalarTabulation {
    int num_points = 0;
    int dim = 0;
    std::vector<double> values;
    std::vector<Vec2> gradients;

    double value(int q, int i) const { return values[q * dim + i]; }
    const Vec2& gradient(int q, int i) const { return gradients[q * dim + i]; }
};

struct VectorTabulation {
    int num_points = 0;
    int dim = 0;
    std::vector<Vec2> values;
    std::vector<double> divergences;

    const Vec2& value(int q, int i) const { return values[q * dim + i]; }
    double divergence(int q, int i) const { return divergences[q * dim + i]; }
};

/// Reference finite element on the triangle (0,0), (1,0), (0,1), with a
/// nodal basis dual to its DOF functionals.
///
/// Basis functions are stored as coefficients over the monomials x^a y^b,
/// a + b <= 3. DOF layout:
///  - P_k: vertex values, k-1 equispaced points per edge, interior points.
///  - P2 + bubble: P2 nodes plus the centroid; bubble = 27 l0 l1 l2.
///  - DG0: centroid value. DG1: values at the edge midpoints
///    (1/2,1/2), (0,1/2), (1/2,0), still cell-interior DOFs.
///  - RT0 / BDM1 / BDFM1 / BDM2: normal fluxes at 1 / 2 / 2 / 3 Gauss points
///    per edge. BDFM1 adds one tangential moment per edge and BDM2 the
///    interior moments against (1,0), (0,1) and (-y,x).
class ReferenceElement {
public:
    /// Throws ElementError for unsupported (family, degree) pairs.
    static ReferenceElement create(ElementFamily family, int degree);

    ElementFamily family() const { return family_; }
    int degree() const { return degree_; }
    /// Highest total polynomial degree among the basis functions.
    int polynomial_degree() const { return polynomial_degree_; }
    int dim() const { return static_cast<int>(dofs_.size()); }
    bool is_vector() const { return vector_; }
    /// True for H(div) families (normal components shared across edges).
    bool is_hdiv() const { return vector_; }
    std::string name() const;

    const std::vector<DofDescriptor>& dofs() const { return dofs_; }
    const std::vector<DofFunctional>& functionals() const { return functionals_; }
    int dofs_per_vertex() const { return per_vertex_; }
    int dofs_per_edge() const { return per_edge_; }
    int dofs_per_interior() const { return per_interior_; }

    // Scalar elements.
    void evaluate(const Vec2& p, double* values) const;
    void evaluate_gradients(const Vec2& p, Vec2* gradients) const;
    // Vector elements.
    void evaluate_vector(const Vec2& p, Vec2* values) const;
    void evaluate_divergence(const Vec2& p, double* divergences) const;

    /// Divergences of the basis at `points`, [point][basis]. Vector only.
    Eigen::MatrixXd divergence_table(const std::vector<Vec2>& points) const;
    /// Entry (i, j): DOF functional i of this H(div) element applied to the
    /// perp-gradient (-d/dy, d/dx) of basis function j of `scalar`, i.e. the
    /// coefficients of those perp-gradients in this basis.
    Eigen::MatrixXd perp_gradient_table(const ReferenceElement& scalar) const;

    ScalarTabulation tabulate_scalar(const std::vector<Vec2>& points) const;
    VectorTabulation tabulate_vector(const std::vector<Vec2>& points) const;

    /// Apply every DOF functional to `f` (nodal interpolation in reference
    /// coordinates).
    Eigen::VectorXd interpolate(const ScalarFunction& f) const;
    Eigen::VectorXd interpolate(const VectorFunction& f) const;

private:
    ElementFamily family_ = ElementFamily::P;
    int degree_ = 0;
    int polynomial_degree_ = 0;
    bool vector_ = false;
    int per_vertex_ = 0, per_edge_ = 0, per_interior_ = 0;
    std::vector<DofDescriptor> dofs_;
    std::vector<DofFunctional> functionals_;
    // Rows are basis functions, columns monomials; coeffs_y_ only for vector elements.
    // Held in extended precision; evaluations round once to double.
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> coeffs_x_;
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> coeffs_y_;
};

/// Reference coordinates of the point at parameter s in [0,1] along local
/// edge `edge` (from vertex (edge+1)%3 to (edge+2)%3).
Vec2 reference_edge_point(int edge, double s);
/// Unnormalised tangent of local reference edge `edge`.
Vec2 reference_edge_tangent(int edge);

}  // namespace swfem
