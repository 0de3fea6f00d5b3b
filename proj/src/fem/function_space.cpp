#include "swfem/fem/function_space.hpp"

#include <algorithm>
#include <cctype>

#include "swfem/error.hpp"
#include "swfem/fem/piola.hpp"

namespace swfem {

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, ReferenceElement element)
    : mesh_(std::move(mesh)), element_(std::move(element)) {
    const Mesh& m = *mesh_;
    const int nv = element_.dofs_per_vertex();
    const int ne = element_.dofs_per_edge();
    const int ni = element_.dofs_per_interior();
    const int vertex_offset = 0;
    const int edge_offset = vertex_offset + nv * m.num_vertices();
    const int interior_offset = edge_offset + ne * m.num_edges();
    dim_ = interior_offset + ni * m.num_cells();

    const int ld = element_.dim();
    dofs_.resize(static_cast<std::size_t>(m.num_cells()) * ld);
    signs_.assign(dofs_.size(), 1.0);
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& cell = m.cells()[c];
        const auto& edges = m.cell_edges(c);
        for (int i = 0; i < ld; ++i) {
            const DofDescriptor& d = element_.dofs()[i];
            int global = -1;
            double sign = 1.0;
            switch (d.entity) {
                case DofEntity::Vertex:
                    global = vertex_offset + nv * cell[d.entity_index] + d.index_on_entity;
                    break;
                case DofEntity::Edge: {
                    const EdgeIncidence& inc = edges[d.entity_index];
                    const int k = inc.sign > 0 ? d.index_on_entity : ne - 1 - d.index_on_entity;
                    global = edge_offset + ne * inc.edge + k;
                    if (element_.is_hdiv()) sign = inc.sign;
                    break;
                }
                case DofEntity::Interior:
                    global = interior_offset + ni * c + d.index_on_entity;
                    break;
            }
            dofs_[static_cast<std::size_t>(c) * ld + i] = global;
            signs_[static_cast<std::size_t>(c) * ld + i] = sign;
        }
    }
}

std::vector<std::vector<int>> FunctionSpace::cell_blocks() const {
    std::vector<std::vector<int>> blocks;
    blocks.reserve(mesh_->num_cells());
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto d = cell_dofs(c);
        blocks.emplace_back(d.begin(), d.end());
    }
    return blocks;
}

Field::Field(SpacePtr s, Eigen::VectorXd c) : space(std::move(s)), coeffs(std::move(c)) {
    if (coeffs.size() != space->dim()) {
        throw ElementError("dimension_mismatch", "coefficient vector of length " + std::to_string(coeffs.size()) +
                                                     " for space " + space->name() + " of dimension " +
                                                     std::to_string(space->dim()));
    }
}

double Field::value(int cell, const Vec2& ref) const {
    const int n = space->local_dim();
    std::vector<double> phi(n);
    space->element().evaluate(ref, phi.data());
    const auto dofs = space->cell_dofs(cell);
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += coeffs[dofs[i]] * phi[i];
    return v;
}

Vec2 Field::gradient(int cell, const Vec2& ref) const {
    const int n = space->local_dim();
    std::vector<Vec2> grad(n);
    space->element().evaluate_gradients(ref, grad.data());
    const auto dofs = space->cell_dofs(cell);
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < n; ++i) g += coeffs[dofs[i]] * grad[i];
    return physical_gradient(space->mesh().geometry(cell), g);
}

Vec2 Field::vector_value(int cell, const Vec2& ref) const {
    const int n = space->local_dim();
    std::vector<Vec2> phi(n);
    space->element().evaluate_vector(ref, phi.data());
    const auto dofs = space->cell_dofs(cell);
    const auto signs = space->cell_signs(cell);
    Vec2 v = Vec2::Zero();
    for (int i = 0; i < n; ++i) v += signs[i] * coeffs[dofs[i]] * phi[i];
    return piola_map(space->mesh().geometry(cell), v);
}

double Field::divergence(int cell, const Vec2& ref) const {
    const int n = space->local_dim();
    std::vector<double> div(n);
    space->element().evaluate_divergence(ref, div.data());
    const auto dofs = space->cell_dofs(cell);
    const auto signs = space->cell_signs(cell);
    double d = 0.0;
    for (int i = 0; i < n; ++i) d += signs[i] * coeffs[dofs[i]] * div[i];
    return piola_divergence(space->mesh().geometry(cell), d);
}

CompatibleSpaces make_triple(std::shared_ptr<const Mesh> mesh, TripleFamily family) {
    auto make = [&mesh](ElementFamily f, int degree) {
        return std::make_shared<const FunctionSpace>(mesh, ReferenceElement::create(f, degree));
    };
    switch (family) {
        case TripleFamily::RT0:
            return {family, make(ElementFamily::P, 1), make(ElementFamily::RT, 0), make(ElementFamily::DG, 0)};
        case TripleFamily::BDM1:
            return {family, make(ElementFamily::P, 2), make(ElementFamily::BDM, 1), make(ElementFamily::DG, 0)};
        case TripleFamily::BDFM1:
            return {family, make(ElementFamily::PBubble, 2), make(ElementFamily::BDFM, 1), make(ElementFamily::DG, 1)};
        case TripleFamily::BDM2:
            return {family, make(ElementFamily::P, 3), make(ElementFamily::BDM, 2), make(ElementFamily::DG, 1)};
    }
    throw ElementError("unknown_family", "unknown element family");
}

std::string to_string(TripleFamily family) {
    switch (family) {
        case TripleFamily::RT0: return "rt0";
        case TripleFamily::BDM1: return "bdm1";
        case TripleFamily::BDFM1: return "bdfm1";
        case TripleFamily::BDM2: return "bdm2";
    }
    return "?";
}

TripleFamily parse_triple_family(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    for (auto f : {TripleFamily::RT0, TripleFamily::BDM1, TripleFamily::BDFM1, TripleFamily::BDM2}) {
        if (to_string(f) == lower) return f;
    }
    throw ElementError("unknown_family", "unknown element family '" + name + "' (expected rt0|bdm1|bdfm1|bdm2)");
}

}  // namespace swfem
