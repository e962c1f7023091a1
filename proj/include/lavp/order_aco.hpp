#pragma once

// Second ACO layer: chooses the spot visiting order (pickup before dropoff)
// that minimizes the total distance over the pairwise matrix.

#include <cstddef>
#include <span>
#include <vector>

#include "lavp/grid.hpp"
#include "lavp/pairwise_aco.hpp"
#include "lavp/random.hpp"

namespace lavp {

struct OrderAcoConfig {
    double alpha = 1.1;
    double beta = 12.0;
    double rho = 0.5;
    double mu = 10.0;
    int iterations = 50; // l^max
    int ants = 20;       // k^max
    double tau0 = 1.0;

    void validate() const;
};

/// Square matrix of spot-to-spot pheromone; the diagonal is never read.
class SpotPheromone {
public:
    SpotPheromone(std::size_t spot_count, double tau0)
        : n_(spot_count), levels_(spot_count * spot_count, tau0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return levels_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return levels_[i * n_ + j]; }

    friend bool operator==(const SpotPheromone&, const SpotPheromone&) = default;

private:
    std::size_t n_;
    std::vector<double> levels_;
};

struct Tour {
    std::vector<std::size_t> order;
    double length = 0.0;
};

using DistanceMatrix = std::vector<std::vector<double>>;

struct SpotDistribution {
    std::vector<std::size_t> spots;
    std::vector<double> probabilities;
};

/// Users implied by a matrix of 2N+2 spots.
inline std::size_t users_for_spot_count(std::size_t spot_count) { return (spot_count - 2) / 2; }

/// Transition law from `current` given the spots already `visited` (indexed by spot).
/// Only feasible continuations are allowed: pickups, dropoffs whose pickup is done,
/// and the car park once it is the last spot left.
SpotDistribution order_probabilities(std::size_t current, const std::vector<bool>& visited,
                                     const SpotPheromone& pheromone, const DistanceMatrix& dm,
                                     const OrderAcoConfig& cfg);

Tour sample_tour(const DistanceMatrix& dm, const SpotPheromone& pheromone,
                 const OrderAcoConfig& cfg, Rng& rng);

/// Starts at IS, ends at CP, visits every spot once, each pickup before its dropoff.
bool is_valid_order(std::span<const std::size_t> order, std::size_t n_users);

double tour_length(std::span<const std::size_t> order, const DistanceMatrix& dm);

/// Elitist update: when `tour` is strictly shorter than `best_length`, evaporates
/// every entry, deposits mu / length on the tour's directed edges and lowers
/// `best_length`. Returns whether the update fired.
bool update_order_pheromone(SpotPheromone& pheromone, const Tour& tour, double& best_length,
                            const OrderAcoConfig& cfg);

struct OrderSolution {
    Tour best;
    /// Incumbent length after each iteration.
    std::vector<double> best_trace;
    std::size_t tours_sampled = 0;
};

OrderSolution solve_order(const DistanceMatrix& dm, const OrderAcoConfig& cfg, Rng& rng);

/// Joins the per-pair cell paths of consecutive tour spots into one route.
std::vector<Cell> assemble_path(const Tour& tour, const PairwiseResult& pairwise);

/// "IS→PS1→…→CP"
std::string order_notation(std::span<const std::size_t> order, std::size_t n_users);

} // namespace lavp
