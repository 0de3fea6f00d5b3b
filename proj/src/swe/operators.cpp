#include "swfem/swe/operators.hpp"

#include "swfem/error.hpp"

namespace swfem {

SparseMatrix assemble_div(const FunctionSpace& s, const FunctionSpace& v) {
    if (&s.mesh() != &v.mesh()) throw ElementError("mesh_mismatch", "div operator between different meshes");
    const ReferenceElement& se = s.element();
    const ReferenceElement& ve = v.element();
    if (!se.is_hdiv() || ve.is_vector() || !v.is_discontinuous()) {
        throw ElementError("incompatible_spaces", "div needs an H(div) space and a discontinuous scalar space");
    }
    std::vector<Vec2> nodes;
    for (const auto& f : ve.functionals()) {
        if (f.points.size() != 1) throw ElementError("incompatible_spaces", "depth DOFs must be point values");
        nodes.push_back(f.points[0]);
    }
    const Eigen::MatrixXd tab = se.divergence_table(nodes);
    const Mesh& mesh = s.mesh();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(mesh.num_cells()) * ve.dim() * se.dim());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double det = mesh.geometry(c).det;
        const auto sd = s.cell_dofs(c);
        const auto ss = s.cell_signs(c);
        const auto vd = v.cell_dofs(c);
        for (int j = 0; j < ve.dim(); ++j)
            for (int i = 0; i < se.dim(); ++i) {
                const double d = tab(j, i);
                if (d != 0.0) t.push_back({vd[j], sd[i], ss[i] * (d / det)});
            }
    }
    return SparseMatrix::from_triplets(v.dim(), s.dim(), t);
}

SparseMatrix assemble_perp_grad_embedding(const FunctionSpace& e, const FunctionSpace& s) {
    if (&s.mesh() != &e.mesh()) throw ElementError("mesh_mismatch", "perp-grad operator between different meshes");
    const ReferenceElement& ee = e.element();
    const ReferenceElement& se = s.element();
    if (!se.is_hdiv() || ee.is_vector()) {
        throw ElementError("incompatible_spaces", "perp-grad needs a scalar space and an H(div) space");
    }
    // local(i, j) = functional i of S applied to perp-grad of basis j of E,
    // all on the reference cell.
    const Eigen::MatrixXd local = se.perp_gradient_table(ee);
    const Mesh& mesh = s.mesh();
    std::vector<char> written(s.dim(), 0);
    std::vector<Triplet> t;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto sd = s.cell_dofs(c);
        const auto ss = s.cell_signs(c);
        const auto ed = e.cell_dofs(c);
        for (int i = 0; i < se.dim(); ++i) {
            if (written[sd[i]]) continue;
            written[sd[i]] = 1;
            for (int j = 0; j < ee.dim(); ++j)
                if (local(i, j) != 0.0) t.push_back({sd[i], ed[j], ss[i] * local(i, j)});
        }
    }
    return SparseMatrix::from_triplets(s.dim(), e.dim(), t);
}

}  // namespace swfem
