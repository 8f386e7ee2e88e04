#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "glwalk/walk.hpp"

namespace glwalk {

// All outputs carry a one-line schema header `# glwalk-csv v1 kind=<kind>`
// followed by a column-name row. Files are written to a temp path in the same
// directory and renamed into place, so an interrupted run leaves no partial
// file at the final path.

struct CsvTable {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const; // throws SchemaMismatchError
};

void write_csv_atomic(const std::filesystem::path& path, const std::string& kind,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows);

CsvTable read_csv(const std::filesystem::path& path);
CsvTable read_csv_expect(const std::filesystem::path& path, const std::string& kind);

// Shortest decimal form that round-trips a double exactly.
std::string fmt_double(double v);

// Walk sample persistence: one row per (path, n) with columns
// path_id, n, log_vec_norm, log_mat_norm, log_spec_radius.
void write_sample_matrix(const std::filesystem::path& path, const SampleMatrix& sm);
SampleMatrix read_sample_matrix(const std::filesystem::path& path);

} // namespace glwalk
