#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace swfem {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Affine map x = origin + J * xi from the reference triangle
/// (0,0), (1,0), (0,1) onto one physical cell.
struct CellGeometry {
    /// Cell vertices as periodic-unwrapped coordinates (they differ from the
    /// stored vertex representatives by integer shifts only).
    std::array<Vec2, 3> vertices;
    Mat2 jacobian;
    Mat2 inverse_jacobian;
    double det = 0.0;
    double area = 0.0;

    Vec2 map(const Vec2& ref) const { return vertices[0] + jacobian * ref; }
};

struct EdgeIncidence {
    int edge = -1;
    /// +1 when the counterclockwise traversal of the cell runs along the
    /// global edge direction (low -> high vertex index), -1 otherwise.
    int sign = 0;
};

/// Doubly-periodic triangulation of the unit square.
///
/// Local conventions: cell vertices are stored counterclockwise; local edge i
/// is opposite local vertex i and runs from vertex (i+1)%3 to (i+2)%3.
/// Global edges are oriented from the lower to the higher vertex index.
class Mesh {
public:
    /// Build topology and geometry from vertex representatives in [0,1)^2 and
    /// vertex-index triples. Clockwise triples are reordered. Throws MeshError
    /// when an edge is not shared by exactly two distinct cells, a cell is
    /// degenerate or the cell areas do not tile the unit square.
    ///
    /// `cell_coordinates`, when given, holds each cell's vertex positions as
    /// drawn (e.g. read from a file); they must equal the representatives up
    /// to integer shifts. Without them each cell is unwrapped to the nearest
    /// periodic image of its first vertex, which is unambiguous only when
    /// cells are smaller than half the period.
    static Mesh from_cells(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
                           std::vector<std::array<Vec2, 3>> cell_coordinates = {});

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& cells() const { return cells_; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }
    const std::array<EdgeIncidence, 3>& cell_edges(int cell) const { return cell_edges_[cell]; }
    const std::array<int, 2>& edge_cells(int edge) const { return edge_cells_[edge]; }
    const CellGeometry& geometry(int cell) const { return geometry_[cell]; }

    double total_area() const;
    /// sqrt(2 * mean cell area); equals 1/n for structured_mesh(n).
    double mesh_spacing() const;

    /// Re-checks every topological and geometric invariant; throws MeshError.
    void validate() const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<EdgeIncidence, 3>> cell_edges_;
    std::vector<std::array<int, 2>> edge_cells_;
    std::vector<CellGeometry> geometry_;
};

/// n x n squares, each split along its lower-left to upper-right diagonal.
/// Requires n >= 3 so that no two periodic entities coincide.
Mesh structured_mesh(int n);

/// Gmsh MSH ASCII v2.2 reader. Boundary nodes on x=1 (y=1) are identified
/// with their partners on x=0 (y=0); 0D/1D elements are skipped.
Mesh read_msh(const std::string& path);
Mesh parse_msh(std::istream& in);

/// Writes the mesh unwrapped over [0,1]^2 (boundary vertices duplicated) so
/// that read_msh reproduces the same periodic mesh.
void write_msh(const Mesh& mesh, const std::string& path);
void write_msh(const Mesh& mesh, std::ostream& out);

}  // namespace swfem
