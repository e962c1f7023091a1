#pragma once

// Batch commands behind the `lavp` CLI. Each writes its artifacts under
// `out` and returns the rows it reported. CSV/JSON/SVG artifacts depend only
// on the inputs and the seed; wall-clock timings go to separate *_timing.csv files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lavp/grid.hpp"

namespace lavp {

struct CommandOptions {
    std::filesystem::path scenario;
    std::optional<std::filesystem::path> config;
    std::uint64_t seed = 0;
    std::filesystem::path out = ".";
    int trials = 500;
    std::optional<int> episodes;
    std::optional<std::filesystem::path> checkpoint;
    std::optional<std::filesystem::path> path_file;
    std::vector<std::string> solvers;
    /// Human-readable progress and tables; nullptr keeps the command silent.
    std::ostream* log = nullptr;
};

struct RunReport {
    std::string solver;
    std::string scenario_id;
    /// Recomputed from `path`; +inf when the solver failed.
    double distance = 0.0;
    bool success = false;
    std::vector<std::size_t> order;
    std::string order_notation;
    std::vector<Cell> path;
    std::optional<double> train_seconds;
    double test_seconds = 0.0;
    std::uint64_t seed = 0;
};

// Sub-stream ids used with derive_seed so every command draws the same numbers
// for the same solver whether it runs alone or inside `compare`.
inline constexpr std::uint64_t kDlacoStream = 1;
inline constexpr std::uint64_t kRandomStream = 2;
inline constexpr std::uint64_t kDqnStream = 3;

RunReport cmd_dlaco(const CommandOptions& opt);
RunReport cmd_dqn_train(const CommandOptions& opt);
RunReport cmd_dqn_eval(const CommandOptions& opt);
RunReport cmd_oracle(const CommandOptions& opt);
std::vector<RunReport> cmd_compare(const CommandOptions& opt);
/// Renders opt.path_file over opt.scenario; returns the SVG path written.
std::filesystem::path cmd_render(const CommandOptions& opt);

/// Re-derives distance from the path and checks order validity, path
/// contiguity and obstacle avoidance. Throws std::logic_error if the solver's
/// own figure disagrees with the recomputation by more than 1e-6.
void verify_report(RunReport& report, double claimed_distance, const GridMap& map,
                   const Scenario& scenario);

std::string reports_csv(const std::vector<RunReport>& reports);
std::string timing_csv(const std::vector<RunReport>& reports);
/// Aligned plain-text table: solver, distance, train_time, test_time, order.
std::string reports_table(const std::vector<RunReport>& reports);

} // namespace lavp
