#pragma once

// Ant colony search for the shortest grid path between every pair of spots.
// Produces the spot distance matrix consumed by the ordering layer.

#include <cstddef>
#include <span>
#include <vector>

#include "lavp/grid.hpp"
#include "lavp/random.hpp"

namespace lavp {

struct AcoGridConfig {
    double alpha = 1.1;
    double beta = 12.0;
    double rho = 0.5;
    double mu = 10.0;
    int iterations = 10; // e^max
    int ants = 20;       // k^max
    int step_cap = 100;  // T^max
    double tau0 = 1.0;

    /// Throws std::invalid_argument if any field is out of range.
    void validate() const;
};

/// Pheromone on directed 8-neighbour edges, indexed by (cell, action).
class PheromoneGrid {
public:
    PheromoneGrid(const GridMap& map, double tau0);

    double level(Cell from, Action dir) const { return levels_[slot(from, dir)]; }
    void set_level(Cell from, Action dir, double value) { levels_[slot(from, dir)] = value; }

    void evaporate(double rho);
    /// Adds `amount` to the edge from -> to in both directions.
    void deposit(Cell from, Cell to, double amount);

    std::span<const double> levels() const { return levels_; }

private:
    std::size_t slot(Cell from, Action dir) const {
        return (static_cast<std::size_t>(from.x) * static_cast<std::size_t>(width_y_) +
                static_cast<std::size_t>(from.y)) *
                   kActionCount +
               action_index(dir);
    }

    int width_y_;
    std::vector<double> levels_;
};

struct AntPath {
    std::vector<Cell> cells;
    double length = 0.0;
    bool success = false;
};

struct MoveDistribution {
    std::vector<Cell> cells;
    std::vector<double> probabilities;

    bool dead_end() const { return cells.empty(); }
};

/// Goal-directed attractiveness 1 / (euclidean(w, goal) + 1).
double heuristic_attractiveness(Cell w, Cell goal);

/// Transition law of one ant at `v`; `visited` is indexed by GridMap::index.
/// An empty result signals a dead end.
MoveDistribution move_probabilities(Cell v, const std::vector<bool>& visited,
                                    const PheromoneGrid& pheromone, Cell goal, const GridMap& map,
                                    const AcoGridConfig& cfg);

AntPath run_ant(Cell start, Cell goal, const PheromoneGrid& pheromone, const GridMap& map,
                const AcoGridConfig& cfg, Rng& rng);

/// Evaporates every edge once, then deposits mu / length along each successful path.
void deposit_pheromone(PheromoneGrid& pheromone, std::span<const AntPath> successful,
                       const AcoGridConfig& cfg);

struct PairPath {
    double length = 0.0;
    std::vector<Cell> cells;
};

/// Best path found between two cells. Throws Unreachable if no ant ever arrives.
PairPath solve_pair(Cell from, Cell to, const GridMap& map, const AcoGridConfig& cfg, Rng& rng);

struct PairwiseResult {
    std::vector<Cell> spots; // canonical spot order
    std::vector<std::vector<double>> distances;
    std::vector<std::vector<std::vector<Cell>>> paths; // paths[i][j] runs from spot i to spot j

    std::size_t size() const { return spots.size(); }
};

/// Solves every unordered spot pair once (fresh pheromone each) and mirrors it.
/// Each pair gets its own generator seeded from `rng` in canonical pair order.
PairwiseResult build_distance_matrix(const Scenario& scenario, const GridMap& map,
                                     const AcoGridConfig& cfg, Rng& rng);

} // namespace lavp
