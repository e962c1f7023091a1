#pragma once

// JSON formats: scenario files, solver configuration, and path traces.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lavp/dqn.hpp"
#include "lavp/grid.hpp"
#include "lavp/order_aco.hpp"
#include "lavp/pairwise_aco.hpp"

namespace lavp {

struct LoadedScenario {
    std::string id; // file stem, or "<memory>"
    GridMap map;
    Scenario scenario;
};

/// Parses and validates a scenario document:
/// {"grid": {"x": .., "y": ..}, "obstacles": [[x,y],..], "initial": [x,y],
///  "pickups": [[x,y],..], "dropoffs": [[x,y],..], "car_park": [x,y]}
/// Throws ParseError (with line/column or field path) or a validation error.
LoadedScenario parse_scenario(std::string_view text, std::string id = "<memory>");
LoadedScenario load_scenario(const std::filesystem::path& path);

std::string scenario_to_json(const GridMap& map, const Scenario& scenario);

struct SolverConfig {
    AcoGridConfig grid_aco;
    OrderAcoConfig order_aco;
    DqnConfig dqn;
};

/// Sections "grid_aco", "order_aco" and "dqn" are optional; missing keys keep
/// their defaults, unknown keys are a ParseError.
SolverConfig parse_config(std::string_view text);
SolverConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const SolverConfig& cfg);

struct PathTrace {
    std::string solver;
    std::string scenario_id;
    double distance = 0.0;
    bool success = false;
    std::vector<std::size_t> order;
    std::string order_notation;
    std::vector<Cell> cells;
};

std::string path_trace_to_json(const PathTrace& trace);
PathTrace parse_path_trace(std::string_view text);
PathTrace load_path_trace(const std::filesystem::path& path);

/// Whole-file read; throws ParseError if the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace lavp
