#pragma once

// The valet-parking grid world: an AV moves on an obstacle grid, picks up N
// users, drops each off after its pickup, and finally parks at the car park.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lavp {

struct Cell {
    int x = 0;
    int y = 0;

    friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

std::string to_string(Cell c);

enum class Action : std::uint8_t {
    Up,
    Down,
    Left,
    Right,
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
};

inline constexpr std::size_t kActionCount = 8;

inline constexpr std::array<Action, kActionCount> kActions = {
    Action::Up,      Action::Down,     Action::Left,       Action::Right,
    Action::TopLeft, Action::TopRight, Action::BottomLeft, Action::BottomRight,
};

struct Delta {
    int dx;
    int dy;
};

/// UP/DOWN move along X, LEFT/RIGHT along Y; diagonals compose the two.
constexpr Delta action_delta(Action a) {
    switch (a) {
    case Action::Up: return {-1, 0};
    case Action::Down: return {1, 0};
    case Action::Left: return {0, -1};
    case Action::Right: return {0, 1};
    case Action::TopLeft: return {-1, -1};
    case Action::TopRight: return {-1, 1};
    case Action::BottomLeft: return {1, -1};
    case Action::BottomRight: return {1, 1};
    }
    return {0, 0};
}

constexpr Cell operator+(Cell c, Delta d) { return {c.x + d.dx, c.y + d.dy}; }

std::string_view action_name(Action a);

inline constexpr std::size_t action_index(Action a) { return static_cast<std::size_t>(a); }

/// Rectangular map of `width_x` by `width_y` cells with a set of blocked cells.
/// Valid coordinates are 0 <= x < width_x and 0 <= y < width_y.
class GridMap {
public:
    GridMap() = default;
    /// Throws InvalidMap on non-positive size, out-of-bounds or duplicated obstacles.
    GridMap(int width_x, int width_y, std::vector<Cell> obstacles = {});

    int width_x() const { return width_x_; }
    int width_y() const { return width_y_; }
    std::size_t cell_count() const { return blocked_.size(); }

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.y >= 0 && c.x < width_x_ && c.y < width_y_;
    }
    bool is_obstacle(Cell c) const { return in_bounds(c) && blocked_[index(c)] != 0; }
    bool is_free(Cell c) const { return in_bounds(c) && blocked_[index(c)] == 0; }

    std::size_t index(Cell c) const {
        return static_cast<std::size_t>(c.x) * static_cast<std::size_t>(width_y_) +
               static_cast<std::size_t>(c.y);
    }
    Cell cell_at(std::size_t index) const {
        return {static_cast<int>(index / static_cast<std::size_t>(width_y_)),
                static_cast<int>(index % static_cast<std::size_t>(width_y_))};
    }

    /// Obstacles in ascending (x, y) order.
    const std::vector<Cell>& obstacles() const { return obstacles_; }

private:
    int width_x_ = 0;
    int width_y_ = 0;
    std::vector<Cell> obstacles_;
    std::vector<std::uint8_t> blocked_;
};

/// Spot layout of one serving task. Spots are indexed canonically:
/// 0 = initial, 1..N = pickups, N+1..2N = dropoffs, 2N+1 = car park.
struct Scenario {
    Cell initial;
    std::vector<Cell> pickups;
    std::vector<Cell> dropoffs;
    Cell car_park;

    std::size_t n_users() const { return pickups.size(); }
    std::size_t spot_count() const { return 2 * pickups.size() + 2; }
    Cell spot(std::size_t index) const;
    std::vector<Cell> spots() const;
};

enum class ServingStatus : std::uint8_t {
    Waiting = 0,
    PickedUp = 1,
    Delivered = 2,
};

struct ServingEvent {
    enum class Kind : std::uint8_t { Pickup, Dropoff };
    Kind kind;
    std::size_t user; // 0-based

    friend bool operator==(const ServingEvent&, const ServingEvent&) = default;
};

struct EpisodeState {
    Cell position;
    std::vector<ServingStatus> statuses;
    int step = 0;
    double traveled = 0.0;

    friend bool operator==(const EpisodeState&, const EpisodeState&) = default;
};

struct EnvConfig {
    double penalty = 10.0; // p
    int step_cap = 100;    // T^max
};

struct StepOutcome {
    EpisodeState next_state;
    double reward = 0.0;
    bool done = false;
    bool blocked = false;
    /// Step cap reached without termination; not a success.
    bool truncated = false;
    double distance = 0.0;
    std::vector<ServingEvent> events;
};

struct MoveResult {
    Cell cell;
    bool blocked;
};

struct ServingUpdate {
    std::vector<ServingStatus> statuses;
    std::vector<ServingEvent> events;
};

/// Returns `scenario` unchanged if all spots are in bounds, free, pairwise
/// distinct and N >= 1; throws the matching error naming the offending spot otherwise.
Scenario validate_scenario(const GridMap& map, const Scenario& scenario);

EpisodeState reset(const Scenario& scenario);

MoveResult apply_action(Cell from, Action action, const GridMap& map);
MoveResult apply_action(const EpisodeState& state, Action action, const GridMap& map);

/// Euclidean length of one move: 0, 1 or sqrt(2). Throws NonAdjacentCells otherwise.
double step_distance(Cell prev, Cell next);

/// Sum of step_distance over consecutive cells.
double path_length(std::span<const Cell> cells);

ServingUpdate update_serving(const EpisodeState& state, const Scenario& scenario);

bool is_terminal(const EpisodeState& state, const Scenario& scenario);

/// Branch priority: blocked > terminal > dropoff > pickup > distance.
double reward(bool blocked, std::span<const ServingEvent> events, bool terminal, double dist,
              double penalty);

/// One environment transition. Throws EpisodeAlreadyDone when `state` is
/// already terminal or has reached the step cap.
StepOutcome step(const EpisodeState& state, Action action, const Scenario& scenario,
                 const GridMap& map, const EnvConfig& env = {});

/// Spot labels in IS / PSn / DSn / CP notation (1-based users).
std::string spot_label(std::size_t spot_index, std::size_t n_users);

} // namespace lavp
