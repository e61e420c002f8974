#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "flownet/invariants.hpp"
#include "flownet/solver.hpp"

namespace flownet {

// Parses and fully validates a scenario document. Throws ParseError for malformed
// input (with line or field path) and ValidationError listing every semantic issue.
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
[[nodiscard]] Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
[[nodiscard]] Scenario scenario_from_json(const nlohmann::json& doc);

[[nodiscard]] nlohmann::json scenario_to_json(const Scenario& s);
void write_scenario(const Scenario& s, const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Header: t,x_<id>...,z_<id>...,zeta_<id>...,w_<id>...; 17 significant digits.
[[nodiscard]] std::string trajectory_csv(const Scenario& s, const Solution& sol);

struct CsvTable {
    std::vector<std::string> header;
    Matrix rows;
};

[[nodiscard]] CsvTable parse_csv(const std::string& text);

[[nodiscard]] nlohmann::json solve_report_json(const Scenario& s, const Solution& sol);
[[nodiscard]] nlohmann::json invariant_report_json(const InvariantReport& r);

// Plotting tables: volumes (t, x_<id>) and controls (t, zeta_<id>, a_<id>), every `stride` samples.
[[nodiscard]] std::string volumes_csv(const Scenario& s, const Solution& sol, std::size_t stride);
[[nodiscard]] std::string controls_csv(const Scenario& s, const Solution& sol, const Vector& equilibrium,
                                       std::size_t stride);

}  // namespace flownet
