#include "swfem/mesh/mesh.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "swfem/error.hpp"

namespace swfem {

namespace {

// Shift `p` by integers so that it lies as close as possible to `anchor`.
Vec2 nearest_image(const Vec2& p, const Vec2& anchor) {
    Vec2 d = p - anchor;
    d.x() -= std::round(d.x());
    d.y() -= std::round(d.y());
    return anchor + d;
}

CellGeometry make_geometry(const std::array<Vec2, 3>& v) {
    CellGeometry g;
    g.vertices = v;
    g.jacobian.col(0) = v[1] - v[0];
    g.jacobian.col(1) = v[2] - v[0];
    g.det = g.jacobian.determinant();
    g.area = 0.5 * g.det;
    if (g.det > 0.0) g.inverse_jacobian = g.jacobian.inverse();
    return g;
}

std::array<Vec2, 3> unwrapped_vertices(const std::vector<Vec2>& vertices,
                                       const std::array<int, 3>& cell) {
    const Vec2& a = vertices[cell[0]];
    return {a, nearest_image(vertices[cell[1]], a), nearest_image(vertices[cell[2]], a)};
}

}  // namespace

Mesh Mesh::from_cells(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
                      std::vector<std::array<Vec2, 3>> cell_coordinates) {
    Mesh mesh;
    mesh.vertices_ = std::move(vertices);
    mesh.cells_ = std::move(cells);
    const int nv = mesh.num_vertices();

    for (auto& v : mesh.vertices_) {
        v.x() -= std::floor(v.x());
        v.y() -= std::floor(v.y());
    }

    if (!cell_coordinates.empty() && cell_coordinates.size() != mesh.cells_.size()) {
        throw MeshError("invalid_mesh", "cell coordinate count does not match cell count");
    }
    mesh.geometry_.reserve(mesh.cells_.size());
    for (std::size_t c = 0; c < mesh.cells_.size(); ++c) {
        auto& cell = mesh.cells_[c];
        for (int k : cell) {
            if (k < 0 || k >= nv) {
                throw MeshError("invalid_mesh", "cell " + std::to_string(c) + " references vertex " +
                                                    std::to_string(k) + " out of range");
            }
        }
        if (cell[0] == cell[1] || cell[1] == cell[2] || cell[0] == cell[2]) {
            throw MeshError("invalid_mesh", "cell " + std::to_string(c) + " repeats a vertex");
        }
        std::array<Vec2, 3> drawn = cell_coordinates.empty() ? unwrapped_vertices(mesh.vertices_, cell)
                                                              : cell_coordinates[c];
        CellGeometry g = make_geometry(drawn);
        if (g.det < 0.0) {
            std::swap(cell[1], cell[2]);
            std::swap(drawn[1], drawn[2]);
            g = make_geometry(drawn);
        }
        if (!(g.det > 0.0)) {
            throw MeshError("degenerate_cell", "cell " + std::to_string(c) + " has zero area");
        }
        mesh.geometry_.push_back(g);
    }

    // An edge is a vertex pair plus the integer period crossed between them;
    // on coarse tori the same pair can bound two distinct edges.
    std::map<std::array<long, 4>, int> edge_index;
    mesh.cell_edges_.resize(mesh.cells_.size());
    std::vector<int> edge_count;
    for (std::size_t c = 0; c < mesh.cells_.size(); ++c) {
        const auto& cell = mesh.cells_[c];
        for (int i = 0; i < 3; ++i) {
            const int a = cell[(i + 1) % 3];
            const int b = cell[(i + 2) % 3];
            const auto key = std::minmax(a, b);
            const auto& drawn = mesh.geometry_[c].vertices;
            Vec2 shift = (drawn[(i + 2) % 3] - drawn[(i + 1) % 3]) - (mesh.vertices_[b] - mesh.vertices_[a]);
            if (a > b) shift = -shift;
            const std::array<long, 4> edge_key{key.first, key.second, std::lround(shift.x()), std::lround(shift.y())};
            auto [it, inserted] = edge_index.try_emplace(edge_key, mesh.num_edges());
            if (inserted) {
                mesh.edges_.push_back({key.first, key.second});
                mesh.edge_cells_.push_back({-1, -1});
                edge_count.push_back(0);
            }
            const int e = it->second;
            if (edge_count[e] >= 2) {
                throw MeshError("invalid_mesh", "edge (" + std::to_string(key.first) + "," +
                                                    std::to_string(key.second) +
                                                    ") is shared by more than two cells");
            }
            mesh.edge_cells_[e][edge_count[e]++] = static_cast<int>(c);
            mesh.cell_edges_[c][i] = {e, a < b ? 1 : -1};
        }
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (edge_count[e] != 2 || mesh.edge_cells_[e][0] == mesh.edge_cells_[e][1]) {
            throw MeshError("invalid_mesh", "edge " + std::to_string(e) +
                                                " is not shared by two distinct cells (mesh is not periodic)");
        }
    }
    mesh.validate();
    return mesh;
}

double Mesh::total_area() const {
    double sum = 0.0;
    for (const auto& g : geometry_) sum += g.area;
    return sum;
}

double Mesh::mesh_spacing() const { return std::sqrt(2.0 * total_area() / num_cells()); }

void Mesh::validate() const {
    auto fail = [](const std::string& what) { throw MeshError("invalid_mesh", what); };

    for (std::size_t c = 0; c < cells_.size(); ++c) {
        if (!(geometry_[c].area > 0.0)) fail("cell " + std::to_string(c) + " has non-positive area");
        for (int k = 1; k < 3; ++k) {
            const Vec2 shift = geometry_[c].vertices[k] - vertices_[cells_[c][k]];
            if (std::abs(shift.x() - std::round(shift.x())) > 1e-12 ||
                std::abs(shift.y() - std::round(shift.y())) > 1e-12) {
                fail("cell " + std::to_string(c) + " geometry is not an integer shift of its vertices");
            }
        }
    }
    if (std::abs(total_area() - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "cell areas sum to " << total_area() << ", expected 1";
        fail(os.str());
    }

    std::vector<int> sign_sum(edges_.size(), 0);
    std::vector<int> incidence(edges_.size(), 0);
    for (const auto& ce : cell_edges_) {
        for (const auto& inc : ce) {
            sign_sum[inc.edge] += inc.sign;
            ++incidence[inc.edge];
        }
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (incidence[e] != 2) fail("edge " + std::to_string(e) + " has " + std::to_string(incidence[e]) + " cells");
        if (sign_sum[e] != 0) fail("edge " + std::to_string(e) + " has inconsistent orientation signs");
    }
    if (num_vertices() - num_edges() + num_cells() != 0) {
        fail("Euler characteristic V - E + F = " +
             std::to_string(num_vertices() - num_edges() + num_cells()) + ", expected 0 for a torus");
    }
}

Mesh structured_mesh(int n) {
    if (n < 3) {
        throw MeshError("invalid_argument",
                        "structured_mesh requires n >= 3 (got " + std::to_string(n) + ")");
    }
    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) vertices.emplace_back(double(i) / n, double(j) / n);

    auto id = [n](int i, int j) { return (j % n) * n + (i % n); };
    std::vector<std::array<int, 3>> cells;
    cells.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
            cells.push_back({v00, v10, v11});
            cells.push_back({v00, v11, v01});
        }
    }
    return Mesh::from_cells(std::move(vertices), std::move(cells));
}

}  // namespace swfem
