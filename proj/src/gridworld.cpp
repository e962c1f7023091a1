#include "lavp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "lavp/errors.hpp"

namespace lavp {

std::string to_string(Cell c) {
    return "[" + std::to_string(c.x) + "," + std::to_string(c.y) + "]";
}

std::string_view action_name(Action a) {
    switch (a) {
    case Action::Up: return "UP";
    case Action::Down: return "DOWN";
    case Action::Left: return "LEFT";
    case Action::Right: return "RIGHT";
    case Action::TopLeft: return "TOP-LEFT";
    case Action::TopRight: return "TOP-RIGHT";
    case Action::BottomLeft: return "BOTTOM-LEFT";
    case Action::BottomRight: return "BOTTOM-RIGHT";
    }
    return "?";
}

GridMap::GridMap(int width_x, int width_y, std::vector<Cell> obstacles)
    : width_x_(width_x), width_y_(width_y), obstacles_(std::move(obstacles)) {
    if (width_x <= 0 || width_y <= 0) {
        throw InvalidMap("grid dimensions must be positive, got " + std::to_string(width_x) +
                         "x" + std::to_string(width_y));
    }
    blocked_.assign(static_cast<std::size_t>(width_x) * static_cast<std::size_t>(width_y), 0);
    for (const Cell& c : obstacles_) {
        if (!in_bounds(c)) {
            throw InvalidMap("obstacle " + to_string(c) + " lies outside the grid");
        }
        auto& slot = blocked_[index(c)];
        if (slot != 0) {
            throw InvalidMap("obstacle " + to_string(c) + " listed twice");
        }
        slot = 1;
    }
    std::sort(obstacles_.begin(), obstacles_.end());
}

Cell Scenario::spot(std::size_t index) const {
    const std::size_t n = n_users();
    if (index == 0) return initial;
    if (index <= n) return pickups[index - 1];
    if (index <= 2 * n) return dropoffs[index - n - 1];
    return car_park;
}

std::vector<Cell> Scenario::spots() const {
    std::vector<Cell> out;
    out.reserve(spot_count());
    out.push_back(initial);
    out.insert(out.end(), pickups.begin(), pickups.end());
    out.insert(out.end(), dropoffs.begin(), dropoffs.end());
    out.push_back(car_park);
    return out;
}

std::string spot_label(std::size_t spot_index, std::size_t n_users) {
    if (spot_index == 0) return "IS";
    if (spot_index <= n_users) return "PS" + std::to_string(spot_index);
    if (spot_index <= 2 * n_users) return "DS" + std::to_string(spot_index - n_users);
    return "CP";
}

Scenario validate_scenario(const GridMap& map, const Scenario& scenario) {
    if (scenario.pickups.empty() || scenario.pickups.size() != scenario.dropoffs.size()) {
        throw EmptyUserList("scenario needs N >= 1 users with one pickup and one dropoff each (got " +
                            std::to_string(scenario.pickups.size()) + " pickups, " +
                            std::to_string(scenario.dropoffs.size()) + " dropoffs)");
    }
    const std::size_t n = scenario.n_users();
    std::vector<std::pair<Cell, std::size_t>> seen;
    for (std::size_t i = 0; i < scenario.spot_count(); ++i) {
        const Cell c = scenario.spot(i);
        const std::string label = spot_label(i, n) + " " + to_string(c);
        if (!map.in_bounds(c)) {
            throw SpotOutOfBounds(label + " is outside the " + std::to_string(map.width_x()) + "x" +
                                  std::to_string(map.width_y()) + " grid");
        }
        if (map.is_obstacle(c)) {
            throw SpotOnObstacle(label + " is on an obstacle");
        }
        for (const auto& [other, j] : seen) {
            if (other == c) {
                throw DuplicateSpot(label + " coincides with " + spot_label(j, n));
            }
        }
        seen.emplace_back(c, i);
    }
    return scenario;
}

EpisodeState reset(const Scenario& scenario) {
    EpisodeState s;
    s.position = scenario.initial;
    s.statuses.assign(scenario.n_users(), ServingStatus::Waiting);
    return s;
}

MoveResult apply_action(Cell from, Action action, const GridMap& map) {
    const Cell candidate = from + action_delta(action);
    if (!map.is_free(candidate)) {
        return {from, true};
    }
    return {candidate, false};
}

MoveResult apply_action(const EpisodeState& state, Action action, const GridMap& map) {
    return apply_action(state.position, action, map);
}

double step_distance(Cell prev, Cell next) {
    const int dx = std::abs(next.x - prev.x);
    const int dy = std::abs(next.y - prev.y);
    if (dx > 1 || dy > 1) {
        throw NonAdjacentCells(to_string(prev) + " and " + to_string(next) + " are not 8-adjacent");
    }
    if (dx + dy == 2) return std::numbers::sqrt2;
    return static_cast<double>(dx + dy);
}

double path_length(std::span<const Cell> cells) {
    double total = 0.0;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        total += step_distance(cells[i - 1], cells[i]);
    }
    return total;
}

ServingUpdate update_serving(const EpisodeState& state, const Scenario& scenario) {
    ServingUpdate out{state.statuses, {}};
    for (std::size_t n = 0; n < out.statuses.size(); ++n) {
        auto& u = out.statuses[n];
        if (u == ServingStatus::Waiting && state.position == scenario.pickups[n]) {
            u = ServingStatus::PickedUp;
            out.events.push_back({ServingEvent::Kind::Pickup, n});
        } else if (u == ServingStatus::PickedUp && state.position == scenario.dropoffs[n]) {
            u = ServingStatus::Delivered;
            out.events.push_back({ServingEvent::Kind::Dropoff, n});
        }
    }
    return out;
}

bool is_terminal(const EpisodeState& state, const Scenario& scenario) {
    if (state.position != scenario.car_park) return false;
    return std::all_of(state.statuses.begin(), state.statuses.end(),
                       [](ServingStatus u) { return u == ServingStatus::Delivered; });
}

double reward(bool blocked, std::span<const ServingEvent> events, bool terminal, double dist,
              double penalty) {
    if (blocked) return -penalty;
    if (terminal) return 10.0 * penalty;
    const auto has = [&](ServingEvent::Kind kind) {
        return std::any_of(events.begin(), events.end(),
                           [kind](const ServingEvent& e) { return e.kind == kind; });
    };
    if (has(ServingEvent::Kind::Dropoff)) return 4.0 * penalty;
    if (has(ServingEvent::Kind::Pickup)) return 2.0 * penalty;
    return -dist;
}

StepOutcome step(const EpisodeState& state, Action action, const Scenario& scenario,
                 const GridMap& map, const EnvConfig& env) {
    if (is_terminal(state, scenario)) {
        throw EpisodeAlreadyDone("episode already reached the car park with all users served");
    }
    if (state.step >= env.step_cap) {
        throw EpisodeAlreadyDone("episode already truncated at step " + std::to_string(state.step));
    }

    StepOutcome out;
    const MoveResult move = apply_action(state, action, map);
    out.blocked = move.blocked;
    out.distance = step_distance(state.position, move.cell);

    EpisodeState next = state;
    next.position = move.cell;
    ServingUpdate serving = update_serving(next, scenario);
    next.statuses = std::move(serving.statuses);
    out.events = std::move(serving.events);
    next.step = state.step + 1;
    next.traveled = state.traveled + out.distance;

    out.done = is_terminal(next, scenario);
    out.reward = reward(out.blocked, out.events, out.done, out.distance, env.penalty);
    out.truncated = !out.done && next.step >= env.step_cap;
    out.next_state = std::move(next);
    return out;
}

} // namespace lavp
