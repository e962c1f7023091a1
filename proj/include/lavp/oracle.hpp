#pragma once

// Exact references for the two ACO layers and the best-of-N random baseline.

#include <cstddef>
#include <vector>

#include "lavp/grid.hpp"
#include "lavp/pairwise_aco.hpp"
#include "lavp/random.hpp"

namespace lavp {

struct OracleResult {
    /// +inf when unreachable / no trial succeeded.
    double distance = 0.0;
    std::vector<Cell> path;
    std::vector<std::size_t> order;
    /// Dijkstra: settled cells. Enumeration: complete feasible orders evaluated.
    /// Random: failed trials.
    std::size_t node_expansions = 0;
};

/// Exact 8-connected shortest path (cardinal 1, diagonal sqrt 2). Throws Unreachable.
OracleResult grid_shortest_path(const GridMap& map, Cell a, Cell b);

/// Spot distance matrix and paths computed with grid_shortest_path.
PairwiseResult oracle_distance_matrix(const Scenario& scenario, const GridMap& map);

inline constexpr std::size_t kMaxEnumerationUsers = 6;

/// Exhaustive search over every order that starts at IS, ends at CP and picks up
/// each user before dropping them off. Throws TooManyUsers above kMaxEnumerationUsers.
OracleResult enumerate_optimal_order(const std::vector<std::vector<double>>& dm,
                                     std::size_t n_users);

/// Dijkstra distances + exhaustive ordering: the exact optimum of the full task.
OracleResult optimal_tour(const Scenario& scenario, const GridMap& map);

/// Default random-baseline episode cap: ten times the training step cap.
inline constexpr int kRandomStepCap = 1000;

/// Best of `trials` episodes that pick uniformly among currently unblocked actions.
/// `node_expansions` reports the number of failed trials.
OracleResult random_rollout_best(const Scenario& scenario, const GridMap& map, int trials,
                                 int step_cap, Rng& rng);

} // namespace lavp
