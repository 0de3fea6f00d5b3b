#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "swfem/fem/function_space.hpp"
#include "swfem/fem/quadrature.hpp"
#include "swfem/linalg/solvers.hpp"

namespace swfem {

/// Scalar weight at quadrature point `q` of `cell`.
using QuadratureWeight = std::function<double(int cell, int q)>;

/// Map a physical point into the periodic representative [0,1)^2.
Vec2 wrap_periodic(const Vec2& x);

/// Mass matrix M_ij = <phi_i, w phi_j> with the quadrature `rule`. The
/// weight, when given, must be positive at every quadrature point;
/// otherwise Error("non_positive_weight") is thrown.
SparseMatrix assemble_mass(const FunctionSpace& space, const QuadratureRule& rule,
                           const QuadratureWeight* weight = nullptr);

/// Unweighted or Field-weighted mass matrix with exact quadrature.
SparseMatrix assemble_mass(const FunctionSpace& space, const Field* weight = nullptr);

struct ProjectionOptions {
    /// Quadrature degree for analytic right-hand sides.
    int quadrature_degree = 14;
    CgOptions cg{};
};

/// L2 projection onto one space: the mass matrix is assembled (and for DG
/// spaces block-factorised) once, then reused for every projection.
class L2Projector {
public:
    explicit L2Projector(SpacePtr space, ProjectionOptions options = {});

    /// Analytic functions receive physical coordinates wrapped into [0,1)^2.
    Field project(const ScalarFunction& f) const;
    Field project(const VectorFunction& f) const;
    /// Project a Field from any space on the same mesh.
    Field project(const Field& source) const;

    /// Solve M x = rhs for this space.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolverReport* report = nullptr) const;

    const SparseMatrix& mass() const { return mass_; }
    const SpacePtr& space() const { return space_; }

private:
    SpacePtr space_;
    ProjectionOptions options_;
    SparseMatrix mass_;
    std::unique_ptr<BlockDiagonalSolver> block_solver_;
};

Field l2_project(SpacePtr space, const ScalarFunction& f, const ProjectionOptions& options = {});
Field l2_project(SpacePtr space, const VectorFunction& f, const ProjectionOptions& options = {});
Field l2_project(SpacePtr space, const Field& source, const ProjectionOptions& options = {});

/// Right-hand sides <phi_i, f> for analytic f.
Eigen::VectorXd assemble_load(const FunctionSpace& space, const ScalarFunction& f, int quadrature_degree);
Eigen::VectorXd assemble_load(const FunctionSpace& space, const VectorFunction& f, int quadrature_degree);

/// L2 norm of a field; with `exact`, the L2 distance to an analytic function.
double l2_norm(const Field& field, int quadrature_degree = 12);
double l2_error(const Field& field, const ScalarFunction& exact, int quadrature_degree = 12);
double l2_error(const Field& field, const VectorFunction& exact, int quadrature_degree = 12);

}  // namespace swfem
