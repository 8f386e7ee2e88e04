#include "glwalk/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

#include "glwalk/errors.hpp"
#include "glwalk/version.hpp"

namespace glwalk {

std::size_t CsvTable::col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw SchemaMismatchError("csv: missing column '" + name + "' in kind '" + kind + "'");
}

std::string fmt_double(double v) {
    // Shortest representation that parses back to the same bits.
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_csv_atomic(const std::filesystem::path& path, const std::string& kind,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("csv: cannot open " + tmp.string());
        out << "# " << kCsvSchemaVersion << " kind=" << kind << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
        for (const auto& row : rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                out << row[i] << (i + 1 < row.size() ? ',' : '\n');
        if (!out) throw ConfigError("csv: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaMismatchError("csv: cannot open " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw SchemaMismatchError("csv: empty file " + path.string());
    std::string expect = std::string("# ") + kCsvSchemaVersion + " kind=";
    if (line.rfind(expect, 0) != 0)
        throw SchemaMismatchError("csv: bad schema header in " + path.string());
    t.kind = line.substr(expect.size());
    if (!std::getline(in, line)) throw SchemaMismatchError("csv: missing column row");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur += c;
            }
        }
        out.push_back(cur);
        return out;
    };
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.rows.push_back(split(line));
        if (t.rows.back().size() != t.columns.size())
            throw SchemaMismatchError("csv: ragged row in " + path.string());
    }
    return t;
}

CsvTable read_csv_expect(const std::filesystem::path& path, const std::string& kind) {
    CsvTable t = read_csv(path);
    if (t.kind != kind)
        throw SchemaMismatchError("csv: expected kind '" + kind + "', found '" + t.kind + "' in " +
                                  path.string());
    return t;
}

void write_sample_matrix(const std::filesystem::path& path, const SampleMatrix& sm) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(static_cast<std::size_t>(sm.paths) * sm.n_grid.size());
    for (std::int64_t p = 0; p < sm.paths; ++p)
        for (std::size_t g = 0; g < sm.n_grid.size(); ++g)
            rows.push_back({std::to_string(p), std::to_string(sm.n_grid[g]),
                            fmt_double(sm.log_vec_norm[g][static_cast<std::size_t>(p)]),
                            fmt_double(sm.log_mat_norm[g][static_cast<std::size_t>(p)]),
                            fmt_double(sm.log_spec_radius[g][static_cast<std::size_t>(p)])});
    write_csv_atomic(path, "walk_samples",
                     {"path_id", "n", "log_vec_norm", "log_mat_norm", "log_spec_radius"}, rows);
}

SampleMatrix read_sample_matrix(const std::filesystem::path& path) {
    CsvTable t = read_csv_expect(path, "walk_samples");
    std::size_t c_path = t.col("path_id"), c_n = t.col("n");
    std::size_t c_v = t.col("log_vec_norm"), c_m = t.col("log_mat_norm"),
                c_r = t.col("log_spec_radius");
    std::map<std::int64_t, std::size_t> n_index;
    SampleMatrix sm;
    for (const auto& row : t.rows) {
        std::int64_t n = std::stoll(row[c_n]);
        if (!n_index.count(n)) {
            n_index[n] = 0;
            sm.n_grid.push_back(n);
        }
        sm.paths = std::max<std::int64_t>(sm.paths, std::stoll(row[c_path]) + 1);
    }
    std::sort(sm.n_grid.begin(), sm.n_grid.end());
    for (std::size_t g = 0; g < sm.n_grid.size(); ++g) n_index[sm.n_grid[g]] = g;
    auto alloc = [&](std::vector<std::vector<double>>& v) {
        v.assign(sm.n_grid.size(), std::vector<double>(static_cast<std::size_t>(sm.paths)));
    };
    alloc(sm.log_vec_norm);
    alloc(sm.log_mat_norm);
    alloc(sm.log_spec_radius);
    for (const auto& row : t.rows) {
        std::size_t g = n_index[std::stoll(row[c_n])];
        std::size_t p = static_cast<std::size_t>(std::stoll(row[c_path]));
        sm.log_vec_norm[g][p] = std::stod(row[c_v]);
        sm.log_mat_norm[g][p] = std::stod(row[c_m]);
        sm.log_spec_radius[g][p] = std::stod(row[c_r]);
    }
    return sm;
}

} // namespace glwalk
