#pragma once

#include <string>
#include <vector>

#include "swfem/timeint/integrator.hpp"

namespace swfem {

/// Column order of run diagnostics files.
inline const std::vector<std::string> kRunColumns{"step",     "time", "energy",    "enstrophy",
                                                  "vorticity", "mass", "imbalance", "cg_iters_max"};

/// A header row plus numeric rows. Values are written with 17 significant
/// digits, so reading a file back reproduces every double exactly.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const CsvTable& table, const std::string& path);
/// Throws IoError for unreadable files and malformed or ragged rows.
CsvTable read_csv(const std::string& path);

CsvTable to_table(const RunRecord& record);
/// Throws IoError unless the header is exactly kRunColumns.
RunRecord to_run_record(const CsvTable& table);

}  // namespace swfem
