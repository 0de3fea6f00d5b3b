#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "swfem/fem/reference_element.hpp"
#include "swfem/mesh/mesh.hpp"

namespace swfem {

/// Global finite element space: a reference element replicated over a mesh
/// with a signed cell -> global DOF map.
///
/// Shared entities: vertex and edge DOFs for continuous scalar families, edge
/// normal-flux DOFs for H(div) families. Edge DOFs are numbered along the
/// global edge direction; an H(div) edge DOF carries sign -1 on the cell whose
/// outward normal opposes the global edge normal (tangent rotated clockwise).
class FunctionSpace {
public:
    FunctionSpace(std::shared_ptr<const Mesh> mesh, ReferenceElement element);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    const ReferenceElement& element() const { return element_; }
    int dim() const { return dim_; }
    int local_dim() const { return element_.dim(); }
    std::string name() const { return element_.name(); }
    /// No DOF is shared between cells (DG spaces).
    bool is_discontinuous() const { return element_.dofs_per_vertex() == 0 && element_.dofs_per_edge() == 0; }

    std::span<const int> cell_dofs(int cell) const {
        return {dofs_.data() + static_cast<std::size_t>(cell) * local_dim(), static_cast<std::size_t>(local_dim())};
    }
    std::span<const double> cell_signs(int cell) const {
        return {signs_.data() + static_cast<std::size_t>(cell) * local_dim(), static_cast<std::size_t>(local_dim())};
    }

    /// Cell-local DOF groups of a discontinuous space (one block per cell).
    std::vector<std::vector<int>> cell_blocks() const;

private:
    std::shared_ptr<const Mesh> mesh_;
    ReferenceElement element_;
    int dim_ = 0;
    std::vector<int> dofs_;
    std::vector<double> signs_;
};

using SpacePtr = std::shared_ptr<const FunctionSpace>;

/// Coefficient vector bound to a function space.
struct Field {
    SpacePtr space;
    Eigen::VectorXd coeffs;

    Field() = default;
    explicit Field(SpacePtr s) : space(std::move(s)), coeffs(Eigen::VectorXd::Zero(space->dim())) {}
    Field(SpacePtr s, Eigen::VectorXd c);

    /// Scalar value at reference point `ref` of `cell`.
    double value(int cell, const Vec2& ref) const;
    /// Physical gradient of a scalar field at a reference point.
    Vec2 gradient(int cell, const Vec2& ref) const;
    /// Vector value (Piola-mapped) of an H(div) field.
    Vec2 vector_value(int cell, const Vec2& ref) const;
    /// Divergence of an H(div) field.
    double divergence(int cell, const Vec2& ref) const;
};

/// Compatible (E, S, V) triple for the vorticity, velocity and depth fields:
/// perp-grad maps E into S and div maps S onto V.
enum class TripleFamily { RT0, BDM1, BDFM1, BDM2 };

struct CompatibleSpaces {
    TripleFamily family;
    SpacePtr vorticity;  ///< E
    SpacePtr velocity;   ///< S
    SpacePtr depth;      ///< V
};

/// (P1, RT0, DG0), (P2, BDM1, DG0), (P2+B3, BDFM1, DG1), (P3, BDM2, DG1).
CompatibleSpaces make_triple(std::shared_ptr<const Mesh> mesh, TripleFamily family);

std::string to_string(TripleFamily family);
/// Accepts rt0, bdm1, bdfm1, bdm2 (case-insensitive); throws ElementError.
TripleFamily parse_triple_family(const std::string& name);

}  // namespace swfem
