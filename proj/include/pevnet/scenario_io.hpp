#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pevnet/network.hpp"

namespace pevnet {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, std::size_t line, const std::string& message);

    const std::string& field() const { return field_; }
    std::size_t line() const { return line_; }  // 1-based, 0 when unknown

private:
    std::string field_;
    std::size_t line_;
};

struct ScenarioFile {
    std::string name;
    std::string description;
    Scenario scenario;
    ReportProfile reports;  // truthful when the file has no reports block
    bool has_reports = false;
};

struct BundledScenario {
    std::string name;
    std::string_view text;
};

/// Scenario files compiled into the library, sorted by name.
const std::vector<BundledScenario>& bundled_scenarios();

ScenarioFile parse_scenario_text(std::string_view text);
ScenarioFile parse_scenario(const std::filesystem::path& path);

/// A readable file path, otherwise a bundled scenario name (".json" optional).
/// Bundled scenarios are checked against their reconstruction constraints.
ScenarioFile load_scenario(std::string_view path_or_name);

/// Deterministic JSON text; parse_scenario_text(serialize_scenario(f)) == f.
std::string serialize_scenario(const ScenarioFile& file);

/// Published constraints a bundled reconstruction must satisfy; returns the
/// first violated constraint, if any. Names without constraints always pass.
std::optional<std::string> check_reconstruction(const ScenarioFile& file);

}  // namespace pevnet
