#include <cmath>
#include <random>

#include "doctest.h"
#include "swfem/error.hpp"
#include "swfem/fem/assembly.hpp"
#include "swfem/fem/function_space.hpp"
#include "swfem/fem/reference_element.hpp"

using namespace swfem;

namespace {

const TripleFamily kFamilies[] = {TripleFamily::RT0, TripleFamily::BDM1, TripleFamily::BDFM1, TripleFamily::BDM2};
constexpr double kTwoPi = 2.0 * M_PI;

std::shared_ptr<const Mesh> mesh_ptr(int n) { return std::make_shared<const Mesh>(structured_mesh(n)); }

std::shared_ptr<const Mesh> unstructured() {
    return std::make_shared<const Mesh>(read_msh(std::string(SWFEM_TEST_DATA) + "/periodic_8.msh"));
}

Eigen::VectorXd random_coeffs(int n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

// Reference point on local edge `i` of `cell` at parameter s along the
// global edge direction, and the global unit normal there.
Vec2 edge_point(const Mesh& m, int cell, int i, double s) {
    const auto& inc = m.cell_edges(cell)[i];
    return reference_edge_point(i, inc.sign > 0 ? s : 1.0 - s);
}

Vec2 global_normal(const Mesh& m, int cell, int i) {
    const auto& g = m.geometry(cell);
    Vec2 t = g.vertices[(i + 2) % 3] - g.vertices[(i + 1) % 3];
    if (m.cell_edges(cell)[i].sign < 0) t = -t;
    return Vec2(t.y(), -t.x()).normalized();
}

int local_edge(const Mesh& m, int cell, int edge) {
    for (int i = 0; i < 3; ++i)
        if (m.cell_edges(cell)[i].edge == edge) return i;
    return -1;
}

}  // namespace

TEST_CASE("triple dimensions on structured_mesh(4)") {
    const auto m = mesh_ptr(4);
    const auto rt0 = make_triple(m, TripleFamily::RT0);
    CHECK(rt0.velocity->dim() == 48);
    CHECK(rt0.depth->dim() == 32);
    CHECK(rt0.vorticity->dim() == 16);
    const auto bdm1 = make_triple(m, TripleFamily::BDM1);
    CHECK(bdm1.velocity->dim() == 96);
    CHECK(bdm1.depth->dim() == 32);
    CHECK(bdm1.vorticity->dim() == 16 + 48);
    const auto bdfm1 = make_triple(m, TripleFamily::BDFM1);
    CHECK(bdfm1.velocity->dim() == 192);
    CHECK(bdfm1.depth->dim() == 96);
    CHECK(bdfm1.vorticity->dim() == 16 + 48 + 32);
    const auto bdm2 = make_triple(m, TripleFamily::BDM2);
    CHECK(bdm2.velocity->dim() == 3 * 48 + 3 * 32);
    CHECK(bdm2.depth->dim() == 96);
    CHECK(bdm2.vorticity->dim() == 16 + 2 * 48 + 32);
}

TEST_CASE("velocity : depth DOFs per triangle") {
    const auto m = mesh_ptr(8);
    const double cells = m->num_cells();
    const std::pair<double, double> ratio[] = {{1.5, 1}, {3, 1}, {6, 3}, {7.5, 3}};
    for (int k = 0; k < 4; ++k) {
        const auto t = make_triple(m, kFamilies[k]);
        CHECK(t.velocity->dim() / cells == doctest::Approx(ratio[k].first));
        CHECK(t.depth->dim() / cells == doctest::Approx(ratio[k].second));
    }
}

TEST_CASE("signs are -1 only on shared H(div) edge DOFs") {
    const auto m = mesh_ptr(4);
    for (auto family : kFamilies) {
        const auto t = make_triple(m, family);
        for (const auto& space : {t.vorticity, t.velocity, t.depth}) {
            const auto& dofs = space->element().dofs();
            for (int c = 0; c < m->num_cells(); ++c) {
                const auto signs = space->cell_signs(c);
                for (int i = 0; i < space->local_dim(); ++i) {
                    CHECK(std::abs(signs[i]) == 1.0);
                    if (signs[i] < 0) {
                        CHECK(space->element().is_hdiv());
                        CHECK(dofs[i].entity == DofEntity::Edge);
                    }
                }
            }
        }
    }
}

TEST_CASE("family names parse case-insensitively") {
    CHECK(parse_triple_family("BDFM1") == TripleFamily::BDFM1);
    CHECK(parse_triple_family("rt0") == TripleFamily::RT0);
    CHECK_THROWS_AS(parse_triple_family("rt1"), ElementError);
    for (auto f : kFamilies) CHECK(parse_triple_family(to_string(f)) == f);
}

TEST_CASE("velocity fields have continuous normal components and scalar E fields are continuous") {
    std::mt19937 rng(11);
    for (const auto& m : {mesh_ptr(5), unstructured()}) {
        for (auto family : kFamilies) {
            const auto t = make_triple(m, family);
            const Field u(t.velocity, random_coeffs(t.velocity->dim(), rng));
            const Field q(t.vorticity, random_coeffs(t.vorticity->dim(), rng));
            std::uniform_int_distribution<int> pick(0, m->num_edges() - 1);
            for (int k = 0; k < 20; ++k) {
                const int e = pick(rng);
                const auto [c0, c1] = m->edge_cells(e);
                const int i0 = local_edge(*m, c0, e), i1 = local_edge(*m, c1, e);
                const Vec2 n0 = global_normal(*m, c0, i0), n1 = global_normal(*m, c1, i1);
                CHECK((n0 - n1).norm() <= 1e-12);
                for (double s : {0.1127016653792583, 0.5, 0.8872983346207417}) {
                    const Vec2 p0 = edge_point(*m, c0, i0, s), p1 = edge_point(*m, c1, i1, s);
                    CHECK(std::abs(u.vector_value(c0, p0).dot(n0) - u.vector_value(c1, p1).dot(n0)) <= 1e-10);
                    CHECK(std::abs(q.value(c0, p0) - q.value(c1, p1)) <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("projection of a field already in the target space is the identity") {
    std::mt19937 rng(2);
    const auto m = mesh_ptr(4);
    for (auto family : kFamilies) {
        const auto t = make_triple(m, family);
        for (const auto& space : {t.vorticity, t.velocity, t.depth}) {
            const Field f(space, random_coeffs(space->dim(), rng));
            const Field p = l2_project(space, f, {14, {1e-15, 1000}});
            CHECK((p.coeffs - f.coeffs).lpNorm<Eigen::Infinity>() <= 1e-12 * f.coeffs.lpNorm<Eigen::Infinity>());
        }
    }
}

TEST_CASE("projecting a constant into V gives that constant") {
    const auto m = mesh_ptr(4);
    for (auto family : kFamilies) {
        const auto t = make_triple(m, family);
        const Field h = l2_project(t.depth, ScalarFunction([](const Vec2&) { return 7.0; }));
        for (int i = 0; i < h.coeffs.size(); ++i) CHECK(std::abs(h.coeffs[i] - 7.0) <= 1e-12);
    }
}

TEST_CASE("projection is Galerkin-orthogonal") {
    const auto m = mesh_ptr(5);
    const ScalarFunction f = [](const Vec2& p) { return std::sin(kTwoPi * p.x()) * std::cos(kTwoPi * p.y()) + p.x(); };
    for (auto family : kFamilies) {
        const auto t = make_triple(m, family);
        const Field q = l2_project(t.vorticity, f);
        const L2Projector proj(t.vorticity);
        const Eigen::VectorXd residual = proj.mass() * q.coeffs - assemble_load(*t.vorticity, f, 14);
        CHECK(residual.norm() <= 1e-11 * assemble_load(*t.vorticity, f, 14).norm());
    }
}

TEST_CASE("velocity projection error converges at the element order") {
    const VectorFunction v = [](const Vec2& p) { return Vec2(std::sin(kTwoPi * p.x()), 0.0); };
    const int order[] = {1, 2, 2, 3};
    for (int k = 0; k < 4; ++k) {
        std::vector<double> err;
        for (int n : {8, 16, 32}) {
            const auto t = make_triple(mesh_ptr(n), kFamilies[k]);
            err.push_back(l2_error(l2_project(t.velocity, v), v));
        }
        const double rate = std::log2(err[1] / err[2]);
        CAPTURE(to_string(kFamilies[k]));
        CHECK(std::log2(err[0] / err[1]) >= order[k] - 0.1);
        CHECK(rate >= order[k] - 0.1);
    }
}

TEST_CASE("mass matrices are symmetric and weighted masses scale linearly") {
    const auto m = mesh_ptr(4);
    for (auto family : kFamilies) {
        const auto t = make_triple(m, family);
        for (const auto& space : {t.vorticity, t.velocity, t.depth}) {
            const SparseMatrix mass = assemble_mass(*space);
            CHECK(mass.asymmetry() <= 1e-13 * mass.max_abs());
        }
        const Field c(t.depth, Eigen::VectorXd::Constant(t.depth->dim(), 2.5));
        const SparseMatrix plain = assemble_mass(*t.vorticity);
        const SparseMatrix weighted = assemble_mass(*t.vorticity, &c);
        CHECK((weighted.to_dense() - 2.5 * plain.to_dense()).cwiseAbs().maxCoeff() <= 1e-14);
        // Partition of unity: the P-type mass sums to the domain area.
        CHECK(plain.to_dense().sum() == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("DG0 mass is the diagonal of cell areas") {
    const auto m = mesh_ptr(4);
    const auto t = make_triple(m, TripleFamily::RT0);
    const Eigen::MatrixXd mass = assemble_mass(*t.depth).to_dense();
    for (int c = 0; c < m->num_cells(); ++c) {
        const int d = t.depth->cell_dofs(c)[0];
        CHECK(mass(d, d) == doctest::Approx(m->geometry(c).area).epsilon(1e-14));
    }
    CHECK((mass - Eigen::MatrixXd(mass.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("non-positive mass weights are rejected") {
    const auto m = mesh_ptr(3);
    const auto t = make_triple(m, TripleFamily::RT0);
    Field h(t.depth, Eigen::VectorXd::Ones(t.depth->dim()));
    h.coeffs[4] = -0.5;
    try {
        assemble_mass(*t.vorticity, &h);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == "non_positive_weight");
    }
}

TEST_CASE("DG1 mass is diagonal with a third of the cell area per node") {
    const auto m = mesh_ptr(4);
    const auto t = make_triple(m, TripleFamily::BDFM1);
    const Eigen::MatrixXd mass = assemble_mass(*t.depth).to_dense();
    CHECK((mass - Eigen::MatrixXd(mass.diagonal().asDiagonal())).cwiseAbs().maxCoeff() <= 1e-17);
    for (int c = 0; c < m->num_cells(); ++c)
        for (int d : t.depth->cell_dofs(c)) CHECK(mass(d, d) == doctest::Approx(m->geometry(c).area / 3.0).epsilon(1e-13));
}
