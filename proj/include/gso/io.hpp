#pragma once
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <gso/group_model.hpp>

namespace gso::io {

using json = nlohmann::json;

inline constexpr const char* version = "0.1.0";

/// Shortest text form that reads back bit-identical (17 significant digits).
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw input_error(path + ": cannot open file");
    return in;
}

inline std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw input_error(path + ": cannot open file for writing");
    return out;
}

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_cell(const std::string& cell, const std::string& path, std::size_t row,
                         std::size_t col)
{
    const std::string t = trim(cell);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size()) {
        throw input_error(path + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
                          ": cannot parse '" + t + "' as a number");
    }
    return v;
}

} // namespace detail

/// Numeric CSV into a dense matrix. Rows are 1-based in error messages (header counted).
inline Matrix read_matrix_csv(const std::string& path, bool header = false)
{
    auto in = detail::open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (header && lineno == 1) continue;
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(detail::parse_cell(cell, path, lineno, row.size() + 1));
        if (width == 0) width = row.size();
        if (row.size() != width) {
            throw input_error(path + ": row " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                              " columns, expected " + std::to_string(width));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw input_error(path + ": no data rows");
    Matrix m(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

/// One value per line, or a single row / column CSV.
inline Vector read_vector_csv(const std::string& path, bool header = false)
{
    Matrix m = read_matrix_csv(path, header);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw input_error(path + ": expected a single row or column, got " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
}

inline void write_vector_csv(const std::string& path, const Vector& v)
{
    auto out = detail::open_out(path);
    for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
    if (!out) throw input_error(path + ": write failed");
}

inline void write_matrix_csv(const std::string& path, const Matrix& m)
{
    auto out = detail::open_out(path);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
        out << '\n';
    }
    if (!out) throw input_error(path + ": write failed");
}

/// {"d": int, "groups": [[1-based indices], ...], "partial_coverage": bool (optional)}.
/// A file that sets partial_coverage may leave coordinates outside every group.
inline GroupStructure parse_groups(const json& doc, const std::string& source,
                                   Coverage coverage = Coverage::required)
{
    if (!doc.is_object()) throw input_error(source + ": group file must be a JSON object");
    if (!doc.contains("d") || !doc["d"].is_number_integer()) {
        throw input_error(source + ": missing integer field \"d\"");
    }
    if (!doc.contains("groups") || !doc["groups"].is_array()) {
        throw input_error(source + ": missing array field \"groups\"");
    }
    const auto d = doc["d"].get<long long>();
    if (d < 1) throw input_error(source + ": \"d\" must be >= 1");
    if (doc.contains("partial_coverage")) {
        if (!doc["partial_coverage"].is_boolean()) throw input_error(source + ": \"partial_coverage\" must be a boolean");
        if (doc["partial_coverage"].get<bool>()) coverage = Coverage::partial;
    }
    std::vector<std::vector<Index>> groups;
    const auto& arr = doc["groups"];
    for (std::size_t r = 0; r < arr.size(); ++r) {
        const auto& g = arr[r];
        const std::string where = source + ": group " + std::to_string(r + 1);
        if (!g.is_array()) throw input_error(where + " is not an array");
        if (g.empty()) throw input_error(where + " is empty");
        std::vector<Index> idx;
        for (const auto& v : g) {
            if (!v.is_number_integer()) throw input_error(where + ": indices must be integers");
            const auto j = v.get<long long>();
            if (j < 1 || j > d) {
                throw input_error(where + ": index " + std::to_string(j) + " out of range [1, " + std::to_string(d) + "]");
            }
            idx.push_back(static_cast<Index>(j - 1));
        }
        std::vector<Index> sorted = idx;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) throw input_error(where + ": duplicate index " + std::to_string(*dup + 1));
        groups.push_back(std::move(idx));
    }
    try {
        return GroupStructure(static_cast<Index>(d), std::move(groups), coverage);
    } catch (const input_error& e) {
        throw input_error(source + ": " + e.what());
    }
}

inline GroupStructure read_groups(const std::string& path, Coverage coverage = Coverage::required)
{
    if (!std::filesystem::exists(path)) throw input_error(path + ": group file not found");
    auto in = detail::open_in(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw input_error(path + ": invalid JSON: " + e.what());
    }
    return parse_groups(doc, path, coverage);
}

inline json groups_to_json(const GroupStructure& gs)
{
    json arr = json::array();
    for (Index r = 0; r < gs.num_groups(); ++r) {
        json g = json::array();
        for (auto j : gs.group(r)) g.push_back(j + 1);
        arr.push_back(std::move(g));
    }
    json doc{{"d", gs.dim()}, {"groups", std::move(arr)}};
    if (gs.covered_count() < gs.dim()) doc["partial_coverage"] = true;
    return doc;
}

inline void write_groups(const std::string& path, const GroupStructure& gs)
{
    auto out = detail::open_out(path);
    out << groups_to_json(gs).dump() << '\n';
}

/// Command, inputs, parameters, seed and timing accompanying every output file.
struct RunManifest
{
    std::string command;
    json inputs = json::object();
    json config = json::object();
    json results = json::object();
    std::uint64_t seed = 0;
    bool has_seed = false;
    double wall_seconds = 0;

    json to_json() const
    {
        json j{{"command", command},       {"inputs", inputs},     {"config", config},
               {"results", results},       {"wall_seconds", wall_seconds},
               {"versions", {{"gso", version}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                           std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                           std::to_string(EIGEN_MINOR_VERSION)}}}};
        j["seed"] = has_seed ? json(seed) : json(nullptr);
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        j["created"] = buf;
        return j;
    }

    void write(const std::string& path) const
    {
        auto out = detail::open_out(path);
        out << to_json().dump(2) << '\n';
    }
};

/// Sidecar path: "out.csv" -> "out.json".
inline std::string sidecar_path(const std::string& output)
{
    std::filesystem::path p(output);
    p.replace_extension(".json");
    if (p.string() == output) p += ".manifest.json";
    return p.string();
}

} // namespace gso::io
