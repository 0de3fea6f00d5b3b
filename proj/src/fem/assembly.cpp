#include "swfem/fem/assembly.hpp"

#include <cmath>

#include "swfem/error.hpp"
#include "swfem/fem/piola.hpp"

namespace swfem {

Vec2 wrap_periodic(const Vec2& x) { return {x.x() - std::floor(x.x()), x.y() - std::floor(x.y())}; }

SparseMatrix assemble_mass(const FunctionSpace& space, const QuadratureRule& rule, const QuadratureWeight* weight) {
    const Mesh& mesh = space.mesh();
    const ReferenceElement& el = space.element();
    const int n = el.dim();
    AssemblyPattern pattern(
        space.dim(), space.dim(), mesh.num_cells(), [&](int c) { return space.cell_dofs(c); },
        [&](int c) { return space.cell_dofs(c); });
    SparseMatrix m = pattern.zero_matrix();
    auto& values = m.values();

    ScalarTabulation st;
    VectorTabulation vt;
    if (el.is_vector()) {
        vt = el.tabulate_vector(rule.points);
    } else {
        st = el.tabulate_scalar(rule.points);
    }

    Eigen::MatrixXd local(n, n);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry& g = mesh.geometry(c);
        const auto signs = space.cell_signs(c);
        local.setZero();
        for (int q = 0; q < rule.size(); ++q) {
            double w = rule.weights[q];
            if (weight) {
                const double value = (*weight)(c, q);
                if (!(value > 0.0)) {
                    throw Error("non_positive_weight", "mass weight " + std::to_string(value) +
                                                           " is not positive in cell " + std::to_string(c));
                }
                w *= value;
            }
            if (el.is_vector()) {
                // phi = J phi_ref / det, dA = det dA_ref
                const double scale = w / g.det;
                for (int i = 0; i < n; ++i) {
                    const Vec2 pi = g.jacobian * vt.value(q, i);
                    for (int j = 0; j <= i; ++j) local(i, j) += scale * pi.dot(g.jacobian * vt.value(q, j));
                }
            } else {
                const double scale = w * g.det;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j <= i; ++j) local(i, j) += scale * st.value(q, i) * st.value(q, j);
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                const double v = signs[i] * signs[j] * local(i, j);
                values[pattern.slot(c, i, j)] += v;
                if (j != i) values[pattern.slot(c, j, i)] += v;
            }
        }
    }
    return m;
}

SparseMatrix assemble_mass(const FunctionSpace& space, const Field* weight) {
    int degree = 2 * space.element().polynomial_degree();
    if (weight) degree += weight->space->element().polynomial_degree();
    const QuadratureRule rule = triangle_quadrature(std::max(degree, 1));
    if (!weight) return assemble_mass(space, rule, nullptr);
    const ScalarTabulation tab = weight->space->element().tabulate_scalar(rule.points);
    const Field& w = *weight;
    const QuadratureWeight eval = [&](int cell, int q) {
        const auto dofs = w.space->cell_dofs(cell);
        double v = 0.0;
        for (int i = 0; i < tab.dim; ++i) v += w.coeffs[dofs[i]] * tab.value(q, i);
        return v;
    };
    return assemble_mass(space, rule, &eval);
}

Eigen::VectorXd assemble_load(const FunctionSpace& space, const ScalarFunction& f, int quadrature_degree) {
    const ReferenceElement& el = space.element();
    if (el.is_vector()) throw ElementError("dimension_mismatch", "scalar load on vector space " + space.name());
    const QuadratureRule rule = triangle_quadrature(quadrature_degree);
    const ScalarTabulation tab = el.tabulate_scalar(rule.points);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.dim());
    const Mesh& mesh = space.mesh();
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry& g = mesh.geometry(c);
        const auto dofs = space.cell_dofs(c);
        for (int q = 0; q < rule.size(); ++q) {
            const double fw = f(wrap_periodic(g.map(rule.points[q]))) * rule.weights[q] * g.det;
            for (int i = 0; i < tab.dim; ++i) b[dofs[i]] += fw * tab.value(q, i);
        }
    }
    return b;
}

Eigen::VectorXd assemble_load(const FunctionSpace& space, const VectorFunction& f, int quadrature_degree) {
    const ReferenceElement& el = space.element();
    if (!el.is_vector()) throw ElementError("dimension_mismatch", "vector load on scalar space " + space.name());
    const QuadratureRule rule = triangle_quadrature(quadrature_degree);
    const VectorTabulation tab = el.tabulate_vector(rule.points);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.dim());
    const Mesh& mesh = space.mesh();
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry& g = mesh.geometry(c);
        const auto dofs = space.cell_dofs(c);
        const auto signs = space.cell_signs(c);
        for (int q = 0; q < rule.size(); ++q) {
            // <J phi_ref / det, f> det = <phi_ref, J^T f>
            const Vec2 pulled = g.jacobian.transpose() * f(wrap_periodic(g.map(rule.points[q]))) * rule.weights[q];
            for (int i = 0; i < tab.dim; ++i) b[dofs[i]] += signs[i] * pulled.dot(tab.value(q, i));
        }
    }
    return b;
}

L2Projector::L2Projector(SpacePtr space, ProjectionOptions options)
    : space_(std::move(space)), options_(options), mass_(assemble_mass(*space_)) {
    if (space_->is_discontinuous()) block_solver_ = std::make_unique<BlockDiagonalSolver>(mass_, space_->cell_blocks());
}

Eigen::VectorXd L2Projector::solve(const Eigen::VectorXd& rhs, SolverReport* report) const {
    if (block_solver_) {
        if (report) *report = {1, 0.0, true};
        return block_solver_->solve(rhs);
    }
    CgResult r = cg_solve(mass_, rhs, options_.cg);
    if (report) *report = r.report;
    return std::move(r.x);
}

Field L2Projector::project(const ScalarFunction& f) const {
    return Field(space_, solve(assemble_load(*space_, f, options_.quadrature_degree)));
}

Field L2Projector::project(const VectorFunction& f) const {
    return Field(space_, solve(assemble_load(*space_, f, options_.quadrature_degree)));
}

Field L2Projector::project(const Field& source) const {
    const FunctionSpace& target = *space_;
    const FunctionSpace& from = *source.space;
    if (&target.mesh() != &from.mesh()) throw ElementError("mesh_mismatch", "projection between different meshes");
    if (target.element().is_vector() != from.element().is_vector()) {
        throw ElementError("dimension_mismatch", "projection between scalar and vector spaces");
    }
    const int degree = std::max(1, target.element().polynomial_degree() + from.element().polynomial_degree());
    const QuadratureRule rule = triangle_quadrature(degree);
    const Mesh& mesh = target.mesh();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(target.dim());
    if (target.element().is_vector()) {
        const VectorTabulation tt = target.element().tabulate_vector(rule.points);
        const VectorTabulation ft = from.element().tabulate_vector(rule.points);
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const CellGeometry& g = mesh.geometry(c);
            const auto td = target.cell_dofs(c);
            const auto ts = target.cell_signs(c);
            const auto fd = from.cell_dofs(c);
            const auto fs = from.cell_signs(c);
            for (int q = 0; q < rule.size(); ++q) {
                Vec2 v_ref = Vec2::Zero();
                for (int j = 0; j < ft.dim; ++j) v_ref += fs[j] * source.coeffs[fd[j]] * ft.value(q, j);
                // <J a / det, J b / det> det
                const Vec2 pulled = g.jacobian.transpose() * (g.jacobian * v_ref) * (rule.weights[q] / g.det);
                for (int i = 0; i < tt.dim; ++i) b[td[i]] += ts[i] * pulled.dot(tt.value(q, i));
            }
        }
    } else {
        const ScalarTabulation tt = target.element().tabulate_scalar(rule.points);
        const ScalarTabulation ft = from.element().tabulate_scalar(rule.points);
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const CellGeometry& g = mesh.geometry(c);
            const auto td = target.cell_dofs(c);
            const auto fd = from.cell_dofs(c);
            for (int q = 0; q < rule.size(); ++q) {
                double v = 0.0;
                for (int j = 0; j < ft.dim; ++j) v += source.coeffs[fd[j]] * ft.value(q, j);
                v *= rule.weights[q] * g.det;
                for (int i = 0; i < tt.dim; ++i) b[td[i]] += v * tt.value(q, i);
            }
        }
    }
    return Field(space_, solve(b));
}

Field l2_project(SpacePtr space, const ScalarFunction& f, const ProjectionOptions& options) {
    return L2Projector(std::move(space), options).project(f);
}

Field l2_project(SpacePtr space, const VectorFunction& f, const ProjectionOptions& options) {
    return L2Projector(std::move(space), options).project(f);
}

Field l2_project(SpacePtr space, const Field& source, const ProjectionOptions& options) {
    return L2Projector(std::move(space), options).project(source);
}

namespace {

template <class ExactFn>
double l2_distance(const Field& field, int quadrature_degree, ExactFn exact_sq) {
    const QuadratureRule rule = triangle_quadrature(quadrature_degree);
    const Mesh& mesh = field.space->mesh();
    double sum = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry& g = mesh.geometry(c);
        for (int q = 0; q < rule.size(); ++q) sum += rule.weights[q] * g.det * exact_sq(c, rule.points[q], g);
    }
    return std::sqrt(sum);
}

}  // namespace

double l2_norm(const Field& field, int quadrature_degree) {
    const bool vec = field.space->element().is_vector();
    return l2_distance(field, quadrature_degree, [&](int c, const Vec2& ref, const CellGeometry&) {
        return vec ? field.vector_value(c, ref).squaredNorm() : std::pow(field.value(c, ref), 2);
    });
}

double l2_error(const Field& field, const ScalarFunction& exact, int quadrature_degree) {
    return l2_distance(field, quadrature_degree, [&](int c, const Vec2& ref, const CellGeometry& g) {
        return std::pow(field.value(c, ref) - exact(wrap_periodic(g.map(ref))), 2);
    });
}

double l2_error(const Field& field, const VectorFunction& exact, int quadrature_degree) {
    return l2_distance(field, quadrature_degree, [&](int c, const Vec2& ref, const CellGeometry& g) {
        return (field.vector_value(c, ref) - exact(wrap_periodic(g.map(ref)))).squaredNorm();
    });
}

}  // namespace swfem
