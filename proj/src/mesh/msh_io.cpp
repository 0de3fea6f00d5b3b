#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "swfem/error.hpp"
#include "swfem/mesh/mesh.hpp"

namespace swfem {

namespace {

constexpr double kMatchTolerance = 1e-8;

MeshError parse_error(const std::string& what) { return MeshError("msh_parse", "MSH: " + what); }

bool is_lower_dimensional(int type) {
    switch (type) {
        case 15:                             // point
        case 1: case 8: case 26: case 27: case 28:  // lines of order 1..5
            return true;
        default:
            return false;
    }
}

std::string next_line(std::istream& in, const char* context) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) return line;
    }
    throw parse_error(std::string("unexpected end of file in ") + context);
}

void expect_section_end(std::istream& in, const std::string& name) {
    const std::string line = next_line(in, name.c_str());
    if (line.rfind("$End" + name, 0) != 0) throw parse_error("expected $End" + name + ", got '" + line + "'");
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

bool near(double a, double b) { return std::abs(a - b) <= kMatchTolerance; }

}  // namespace

Mesh parse_msh(std::istream& in) {
    bool have_format = false;
    std::unordered_map<long, Vec2> nodes;
    std::vector<std::array<long, 3>> triangles;

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line[0] != '$') throw parse_error("unexpected line outside a section: '" + line + "'");
        const std::string section = line.substr(1);

        if (section == "MeshFormat") {
            std::istringstream fmt(next_line(in, "MeshFormat"));
            std::string version;
            int file_type = -1;
            int data_size = 0;
            if (!(fmt >> version >> file_type >> data_size)) throw parse_error("malformed $MeshFormat header");
            if (version != "2.2") throw parse_error("unsupported MSH version " + version + " (only 2.2)");
            if (file_type != 0) throw parse_error("binary MSH files are not supported");
            expect_section_end(in, section);
            have_format = true;
        } else if (section == "Nodes") {
            if (!have_format) throw parse_error("$Nodes before $MeshFormat");
            long count = 0;
            if (!(std::istringstream(next_line(in, "Nodes")) >> count) || count < 0)
                throw parse_error("malformed node count");
            for (long k = 0; k < count; ++k) {
                std::istringstream row(next_line(in, "Nodes"));
                long id = 0;
                double x = 0, y = 0, z = 0;
                if (!(row >> id >> x >> y >> z)) throw parse_error("malformed node record " + std::to_string(k + 1));
                if (!nodes.emplace(id, Vec2(x, y)).second) throw parse_error("duplicate node id " + std::to_string(id));
            }
            expect_section_end(in, section);
        } else if (section == "Elements") {
            long count = 0;
            if (!(std::istringstream(next_line(in, "Elements")) >> count) || count < 0)
                throw parse_error("malformed element count");
            for (long k = 0; k < count; ++k) {
                std::istringstream row(next_line(in, "Elements"));
                long id = 0;
                int type = 0, ntags = 0;
                if (!(row >> id >> type >> ntags) || ntags < 0)
                    throw parse_error("malformed element record " + std::to_string(k + 1));
                for (int t = 0; t < ntags; ++t) {
                    long tag;
                    if (!(row >> tag)) throw parse_error("malformed tags on element " + std::to_string(id));
                }
                if (is_lower_dimensional(type)) continue;
                if (type != 2) {
                    throw MeshError("non_triangle_element", "MSH: non-triangle element " + std::to_string(id) +
                                                                " of type " + std::to_string(type));
                }
                std::array<long, 3> tri{};
                if (!(row >> tri[0] >> tri[1] >> tri[2]))
                    throw parse_error("malformed triangle " + std::to_string(id));
                triangles.push_back(tri);
            }
            expect_section_end(in, section);
        } else if (section.rfind("End", 0) == 0) {
            throw parse_error("unmatched '" + line + "'");
        } else {
            // Unknown section ($PhysicalNames, $Periodic, ...): skip it.
            const std::string end = "$End" + section;
            std::string skip;
            bool closed = false;
            while (std::getline(in, skip)) {
                if (!skip.empty() && skip.back() == '\r') skip.pop_back();
                if (skip == end) {
                    closed = true;
                    break;
                }
            }
            if (!closed) throw parse_error("unterminated section $" + section);
        }
    }
    if (!have_format) throw parse_error("missing $MeshFormat");
    if (triangles.empty()) throw parse_error("no triangle elements");

    // Compact to the nodes referenced by triangles.
    std::map<long, int> local;
    for (const auto& tri : triangles) {
        for (long id : tri) {
            if (!nodes.count(id)) throw parse_error("triangle references unknown node " + std::to_string(id));
            local.emplace(id, 0);
        }
    }
    std::vector<Vec2> coords;
    coords.reserve(local.size());
    for (auto& [id, index] : local) {
        index = static_cast<int>(coords.size());
        coords.push_back(nodes.at(id));
    }
    for (const auto& p : coords) {
        if (p.x() < -kMatchTolerance || p.x() > 1 + kMatchTolerance || p.y() < -kMatchTolerance ||
            p.y() > 1 + kMatchTolerance) {
            throw parse_error("node outside the unit square");
        }
    }

    const int n = static_cast<int>(coords.size());
    UnionFind uf(n);
    auto match = [&](int i, bool along_x) {
        // Partner of a node on x=1 (y=1) lies on x=0 (y=0) with the same other coordinate.
        for (int j = 0; j < n; ++j) {
            const Vec2& p = coords[i];
            const Vec2& q = coords[j];
            if (along_x ? (near(q.x(), 0.0) && near(q.y(), p.y())) : (near(q.y(), 0.0) && near(q.x(), p.x()))) {
                uf.unite(i, j);
                return;
            }
        }
        std::ostringstream os;
        os.precision(12);
        os << "MSH: unmatched boundary vertex at (" << coords[i].x() << ", " << coords[i].y()
           << "): no periodic partner within " << kMatchTolerance;
        throw MeshError("unmatched_boundary_vertex", os.str());
    };
    for (int i = 0; i < n; ++i) {
        if (near(coords[i].x(), 1.0)) match(i, true);
        if (near(coords[i].y(), 1.0)) match(i, false);
    }
    // Nodes on x=0 (y=0) also need a partner on the opposite side.
    for (int i = 0; i < n; ++i) {
        for (int axis = 0; axis < 2; ++axis) {
            if (!near(coords[i][axis], 0.0)) continue;
            bool found = false;
            for (int j = 0; j < n && !found; ++j) {
                found = near(coords[j][axis], 1.0) && near(coords[j][1 - axis], coords[i][1 - axis]);
            }
            if (!found) {
                std::ostringstream os;
                os.precision(12);
                os << "MSH: unmatched boundary vertex at (" << coords[i].x() << ", " << coords[i].y()
                   << "): no periodic partner within " << kMatchTolerance;
                throw MeshError("unmatched_boundary_vertex", os.str());
            }
        }
    }

    std::vector<int> vertex_of(n, -1);
    std::vector<Vec2> vertices;
    for (int i = 0; i < n; ++i) {
        const int root = uf.find(i);
        if (vertex_of[root] < 0) {
            vertex_of[root] = static_cast<int>(vertices.size());
            Vec2 p = coords[root];
            if (near(p.x(), 1.0)) p.x() = 0.0;
            if (near(p.y(), 1.0)) p.y() = 0.0;
            vertices.push_back(p);
        }
        vertex_of[i] = vertex_of[root];
    }

    std::vector<std::array<int, 3>> cells;
    std::vector<std::array<Vec2, 3>> drawn;
    cells.reserve(triangles.size());
    drawn.reserve(triangles.size());
    for (const auto& tri : triangles) {
        std::array<int, 3> cell{};
        std::array<Vec2, 3> xy;
        for (int k = 0; k < 3; ++k) {
            const int i = local.at(tri[k]);
            cell[k] = vertex_of[i];
            // Snap to the exact representative plus the integer shift.
            const Vec2& rep = vertices[cell[k]];
            xy[k] = rep + (coords[i] - rep).array().round().matrix();
        }
        cells.push_back(cell);
        drawn.push_back(xy);
    }
    return Mesh::from_cells(std::move(vertices), std::move(cells), std::move(drawn));
}

Mesh read_msh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("msh_parse", "MSH: cannot open '" + path + "'");
    return parse_msh(in);
}

void write_msh(const Mesh& mesh, std::ostream& out) {
    std::map<std::pair<long long, long long>, int> node_index;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> elements;
    auto key = [](const Vec2& p) {
        return std::make_pair(std::llround(p.x() * 1e10), std::llround(p.y() * 1e10));
    };
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& g = mesh.geometry(c);
        const Vec2 centroid = (g.vertices[0] + g.vertices[1] + g.vertices[2]) / 3.0;
        const Vec2 shift(-std::floor(centroid.x()), -std::floor(centroid.y()));
        std::array<int, 3> element{};
        for (int k = 0; k < 3; ++k) {
            const Vec2 p = g.vertices[k] + shift;
            auto [it, inserted] = node_index.try_emplace(key(p), static_cast<int>(nodes.size()));
            if (inserted) nodes.push_back(p);
            element[k] = it->second;
        }
        elements.push_back(element);
    }
    out.precision(17);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << nodes.size() << "\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out << i + 1 << " " << nodes[i].x() << " " << nodes[i].y() << " 0\n";
    }
    out << "$EndNodes\n$Elements\n" << elements.size() << "\n";
    for (std::size_t e = 0; e < elements.size(); ++e) {
        out << e + 1 << " 2 2 1 1 " << elements[e][0] + 1 << " " << elements[e][1] + 1 << " " << elements[e][2] + 1
            << "\n";
    }
    out << "$EndElements\n";
}

void write_msh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("io", "cannot write '" + path + "'");
    write_msh(mesh, out);
    if (!out) throw MeshError("io", "write failed for '" + path + "'");
}

}  // namespace swfem
