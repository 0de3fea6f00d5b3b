#include "swfem/io/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace swfem {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(const CsvTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw IoError(path + ": row width does not match the header");
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format(row[j]);
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": missing header");
    table.header = split(line);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(table.header.size()) +
                          " columns");
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(c.c_str(), &end);
            // ERANGE on underflow still yields the exact subnormal; only overflow is an error.
            if (c.empty() || *end != '\0' || (errno == ERANGE && std::isinf(v))) {
                throw IoError(path + ":" + std::to_string(lineno) + ": not a number: '" + c + "'");
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable to_table(const RunRecord& record) {
    CsvTable t{kRunColumns, {}};
    for (const Sample& s : record.samples) {
        t.rows.push_back({double(s.step), s.time, s.energy, s.enstrophy, s.vorticity, s.mass, s.imbalance,
                          double(s.cg_iters_max)});
    }
    return t;
}

RunRecord to_run_record(const CsvTable& table) {
    if (table.header != kRunColumns) throw IoError("not a run diagnostics table");
    RunRecord r;
    for (const auto& row : table.rows) {
        Sample s;
        s.step = static_cast<int>(row[0]);
        s.time = row[1];
        s.energy = row[2];
        s.enstrophy = row[3];
        s.vorticity = row[4];
        s.mass = row[5];
        s.imbalance = row[6];
        s.cg_iters_max = static_cast<int>(row[7]);
        r.samples.push_back(s);
    }
    return r;
}

}  // namespace swfem
