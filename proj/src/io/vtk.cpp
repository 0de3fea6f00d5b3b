#include "swfem/io/vtk.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "swfem/error.hpp"

namespace swfem {

namespace {

const Vec2 kSubPoints[6] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(0.5, 0), Vec2(0.5, 0.5), Vec2(0, 0.5)};
const int kSubCells[4][3] = {{0, 3, 5}, {3, 1, 4}, {5, 4, 2}, {3, 4, 5}};

Vec2 sub_centroid(int k) {
    const auto& t = kSubCells[k];
    return (kSubPoints[t[0]] + kSubPoints[t[1]] + kSubPoints[t[2]]) / 3.0;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

template <class At>
void write_values(std::ofstream& out, const std::string& name, const Field& f, int per_cell, At at) {
    const bool vector = f.space->element().is_vector();
    out << (vector ? "VECTORS " : "SCALARS ") << name << " double" << (vector ? "\n" : " 1\nLOOKUP_TABLE default\n");
    const int cells = f.space->mesh().num_cells();
    for (int c = 0; c < cells; ++c)
        for (int k = 0; k < per_cell; ++k) {
            const Vec2 ref = at(k);
            if (vector) {
                const Vec2 v = f.vector_value(c, ref);
                out << num(v.x()) << ' ' << num(v.y()) << " 0\n";
            } else {
                out << num(f.value(c, ref)) << '\n';
            }
        }
}

}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<std::pair<std::string, Field>>& fields,
               const std::string& title) {
    for (const auto& [name, f] : fields) {
        if (&f.space->mesh() != &mesh) throw IoError("field " + name + " lives on a different mesh");
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const int cells = mesh.num_cells();
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << 6 * cells << " double\n";
    for (int c = 0; c < cells; ++c) {
        const CellGeometry& g = mesh.geometry(c);
        // Shift each cell so its centroid lies in the unit square.
        const Vec2 centroid = (g.vertices[0] + g.vertices[1] + g.vertices[2]) / 3.0;
        const Vec2 shift(-std::floor(centroid.x()), -std::floor(centroid.y()));
        for (const Vec2& p : kSubPoints) {
            const Vec2 x = g.map(p) + shift;
            out << num(x.x()) << ' ' << num(x.y()) << " 0\n";
        }
    }
    out << "CELLS " << 4 * cells << ' ' << 16 * cells << '\n';
    for (int c = 0; c < cells; ++c)
        for (const auto& t : kSubCells) out << "3 " << 6 * c + t[0] << ' ' << 6 * c + t[1] << ' ' << 6 * c + t[2] << '\n';
    out << "CELL_TYPES " << 4 * cells << '\n';
    for (int k = 0; k < 4 * cells; ++k) out << "5\n";
    if (!fields.empty()) {
        out << "POINT_DATA " << 6 * cells << '\n';
        for (const auto& [name, f] : fields) write_values(out, name, f, 6, [](int k) { return kSubPoints[k]; });
        out << "CELL_DATA " << 4 * cells << '\n';
        for (const auto& [name, f] : fields) write_values(out, name, f, 4, sub_centroid);
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace swfem
