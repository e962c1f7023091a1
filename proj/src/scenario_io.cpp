#include "lavp/scenario_io.hpp"

#include <fstream>
#include <sstream>
#include <type_traits>

#include "json.hpp"
#include "lavp/errors.hpp"

namespace lavp {

using Json = nlohmann::ordered_json;

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Json parse_json(std::string_view text, const std::string& what) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(what + ": malformed JSON at " + line_column(text, e.byte) + ": " +
                         e.what());
    }
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
    return *it;
}

int as_int(const Json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
    return v.get<int>();
}

Cell as_cell(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw ParseError(where + ": expected an [x, y] pair");
    return {as_int(v[0], where + "[0]"), as_int(v[1], where + "[1]")};
}

std::vector<Cell> as_cells(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected a list of [x, y] pairs");
    std::vector<Cell> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(as_cell(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Json cell_json(Cell c) { return Json::array({c.x, c.y}); }

Json cells_json(const std::vector<Cell>& cells) {
    Json out = Json::array();
    for (Cell c : cells) out.push_back(cell_json(c));
    return out;
}

// Reads `key` from `section` into `field` if present; rejects wrong types.
template <typename T>
void read_field(const Json& section, const char* key, T& field, const std::string& where) {
    const auto it = section.find(key);
    if (it == section.end()) return;
    const std::string path = where + "." + key;
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw ParseError(path + ": expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) throw ParseError(path + ": expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (it->template get<long long>() < 0) {
                    throw ParseError(path + ": expected a non-negative integer");
                }
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) throw ParseError(path + ": expected a number");
        }
        field = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void reject_unknown(const Json& section, std::initializer_list<const char*> known,
                    const std::string& where) {
    if (!section.is_object()) throw ParseError(where + ": expected an object");
    for (const auto& [key, value] : section.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ParseError(where + ": unknown key '" + key + "'");
    }
}

} // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
}

LoadedScenario parse_scenario(std::string_view text, std::string id) {
    const Json doc = parse_json(text, id);
    const std::string where = id;
    const Json& grid = require(doc, "grid", where);
    const int gx = as_int(require(grid, "x", where + ".grid"), where + ".grid.x");
    const int gy = as_int(require(grid, "y", where + ".grid.y"), where + ".grid.y");

    std::vector<Cell> obstacles;
    if (const auto it = doc.find("obstacles"); it != doc.end()) {
        obstacles = as_cells(*it, where + ".obstacles");
    }

    Scenario s;
    s.initial = as_cell(require(doc, "initial", where), where + ".initial");
    s.pickups = as_cells(require(doc, "pickups", where), where + ".pickups");
    s.dropoffs = as_cells(require(doc, "dropoffs", where), where + ".dropoffs");
    s.car_park = as_cell(require(doc, "car_park", where), where + ".car_park");

    LoadedScenario out{std::move(id), GridMap(gx, gy, std::move(obstacles)), std::move(s)};
    out.scenario = validate_scenario(out.map, out.scenario);
    return out;
}

LoadedScenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_text_file(path), path.stem().string());
}

std::string scenario_to_json(const GridMap& map, const Scenario& scenario) {
    Json doc;
    doc["grid"] = {{"x", map.width_x()}, {"y", map.width_y()}};
    doc["obstacles"] = cells_json(map.obstacles());
    doc["initial"] = cell_json(scenario.initial);
    doc["pickups"] = cells_json(scenario.pickups);
    doc["dropoffs"] = cells_json(scenario.dropoffs);
    doc["car_park"] = cell_json(scenario.car_park);
    return doc.dump(2) + "\n";
}

SolverConfig parse_config(std::string_view text) {
    const Json doc = parse_json(text, "config");
    reject_unknown(doc, {"grid_aco", "order_aco", "dqn"}, "config");
    SolverConfig cfg;

    if (const auto it = doc.find("grid_aco"); it != doc.end()) {
        const std::string w = "config.grid_aco";
        reject_unknown(*it, {"alpha", "beta", "rho", "mu", "iterations", "ants", "step_cap", "tau0"},
                       w);
        auto& g = cfg.grid_aco;
        read_field(*it, "alpha", g.alpha, w);
        read_field(*it, "beta", g.beta, w);
        read_field(*it, "rho", g.rho, w);
        read_field(*it, "mu", g.mu, w);
        read_field(*it, "iterations", g.iterations, w);
        read_field(*it, "ants", g.ants, w);
        read_field(*it, "step_cap", g.step_cap, w);
        read_field(*it, "tau0", g.tau0, w);
    }
    if (const auto it = doc.find("order_aco"); it != doc.end()) {
        const std::string w = "config.order_aco";
        reject_unknown(*it, {"alpha", "beta", "rho", "mu", "iterations", "ants", "tau0"}, w);
        auto& o = cfg.order_aco;
        read_field(*it, "alpha", o.alpha, w);
        read_field(*it, "beta", o.beta, w);
        read_field(*it, "rho", o.rho, w);
        read_field(*it, "mu", o.mu, w);
        read_field(*it, "iterations", o.iterations, w);
        read_field(*it, "ants", o.ants, w);
        read_field(*it, "tau0", o.tau0, w);
    }
    if (const auto it = doc.find("dqn"); it != doc.end()) {
        const std::string w = "config.dqn";
        reject_unknown(*it,
                       {"gamma", "epsilon", "batch", "capacity", "tau", "learning_rate", "episodes",
                        "step_cap", "penalty", "warmup", "train_every", "epsilon_anneal_episodes",
                        "hidden", "randomize_spots"},
                       w);
        auto& d = cfg.dqn;
        read_field(*it, "gamma", d.gamma, w);
        read_field(*it, "epsilon", d.epsilon, w);
        read_field(*it, "batch", d.batch, w);
        read_field(*it, "capacity", d.capacity, w);
        read_field(*it, "tau", d.tau, w);
        read_field(*it, "learning_rate", d.learning_rate, w);
        read_field(*it, "episodes", d.episodes, w);
        read_field(*it, "step_cap", d.step_cap, w);
        read_field(*it, "penalty", d.penalty, w);
        read_field(*it, "warmup", d.warmup, w);
        read_field(*it, "train_every", d.train_every, w);
        read_field(*it, "epsilon_anneal_episodes", d.epsilon_anneal_episodes, w);
        read_field(*it, "randomize_spots", d.randomize_spots, w);
        if (const auto h = it->find("hidden"); h != it->end()) {
            if (!h->is_array()) throw ParseError(w + ".hidden: expected a list of widths");
            d.hidden.clear();
            for (const auto& v : *h) {
                if (!v.is_number_integer() || v.get<long long>() < 1) {
                    throw ParseError(w + ".hidden: widths must be positive integers");
                }
                d.hidden.push_back(v.get<std::size_t>());
            }
        }
    }
    try {
        cfg.grid_aco.validate();
        cfg.order_aco.validate();
        cfg.dqn.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return cfg;
}

SolverConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path));
}

std::string config_to_json(const SolverConfig& cfg) {
    Json doc;
    const auto& g = cfg.grid_aco;
    doc["grid_aco"] = {{"alpha", g.alpha},          {"beta", g.beta},   {"rho", g.rho},
                       {"mu", g.mu},                {"iterations", g.iterations},
                       {"ants", g.ants},            {"step_cap", g.step_cap},
                       {"tau0", g.tau0}};
    const auto& o = cfg.order_aco;
    doc["order_aco"] = {{"alpha", o.alpha}, {"beta", o.beta},   {"rho", o.rho},  {"mu", o.mu},
                        {"iterations", o.iterations},           {"ants", o.ants}, {"tau0", o.tau0}};
    const auto& d = cfg.dqn;
    doc["dqn"] = {{"gamma", d.gamma},
                  {"epsilon", d.epsilon},
                  {"batch", d.batch},
                  {"capacity", d.capacity},
                  {"tau", d.tau},
                  {"learning_rate", d.learning_rate},
                  {"episodes", d.episodes},
                  {"step_cap", d.step_cap},
                  {"penalty", d.penalty},
                  {"warmup", d.warmup},
                  {"train_every", d.train_every},
                  {"epsilon_anneal_episodes", d.epsilon_anneal_episodes},
                  {"hidden", d.hidden},
                  {"randomize_spots", d.randomize_spots}};
    return doc.dump(2) + "\n";
}

std::string path_trace_to_json(const PathTrace& trace) {
    Json doc;
    doc["solver"] = trace.solver;
    doc["scenario"] = trace.scenario_id;
    doc["distance"] = trace.distance;
    doc["success"] = trace.success;
    doc["order"] = trace.order;
    doc["order_notation"] = trace.order_notation;
    doc["cells"] = cells_json(trace.cells);
    return doc.dump(2) + "\n";
}

PathTrace parse_path_trace(std::string_view text) {
    const Json doc = parse_json(text, "path trace");
    PathTrace t;
    t.cells = as_cells(require(doc, "cells", "path trace"), "path trace.cells");
    read_field(doc, "solver", t.solver, "path trace");
    read_field(doc, "scenario", t.scenario_id, "path trace");
    read_field(doc, "distance", t.distance, "path trace");
    read_field(doc, "success", t.success, "path trace");
    read_field(doc, "order_notation", t.order_notation, "path trace");
    if (const auto it = doc.find("order"); it != doc.end()) {
        if (!it->is_array()) throw ParseError("path trace.order: expected a list");
        for (const auto& v : *it) {
            if (!v.is_number_unsigned()) throw ParseError("path trace.order: expected spot indices");
            t.order.push_back(v.get<std::size_t>());
        }
    }
    return t;
}

PathTrace load_path_trace(const std::filesystem::path& path) {
    return parse_path_trace(read_text_file(path));
}

} // namespace lavp
