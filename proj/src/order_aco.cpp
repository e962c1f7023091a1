#include "lavp/order_aco.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lavp/errors.hpp"

namespace lavp {

void OrderAcoConfig::validate() const {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
    if (iterations < 1 || ants < 1) throw std::invalid_argument("iterations and ants must be >= 1");
    if (!(tau0 > 0.0)) throw std::invalid_argument("tau0 must be positive");
    if (!(mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
}

namespace {

// Smallest distance treated as non-zero when forming visibility 1/d.
constexpr double kMinDistance = 1e-12;

} // namespace

SpotDistribution order_probabilities(std::size_t current, const std::vector<bool>& visited,
                                     const SpotPheromone& pheromone, const DistanceMatrix& dm,
                                     const OrderAcoConfig& cfg) {
    const std::size_t spot_count = dm.size();
    const std::size_t n = users_for_spot_count(spot_count);
    const std::size_t car_park = spot_count - 1;

    std::size_t remaining = 0;
    for (std::size_t s = 0; s < spot_count; ++s) remaining += visited[s] ? 0 : 1;

    SpotDistribution out;
    double total = 0.0;
    for (std::size_t j = 1; j < spot_count; ++j) {
        if (visited[j]) continue;
        const bool is_dropoff = j > n && j <= 2 * n;
        if (is_dropoff && !visited[j - n]) continue;
        if (j == car_park && remaining != 1) continue;
        const double eta = 1.0 / std::max(dm[current][j], kMinDistance);
        const double weight = std::pow(pheromone(current, j), cfg.alpha) * std::pow(eta, cfg.beta);
        out.spots.push_back(j);
        out.probabilities.push_back(weight);
        total += weight;
    }
    if (out.spots.empty()) return out;
    if (!(total > 0.0) || !std::isfinite(total)) {
        std::fill(out.probabilities.begin(), out.probabilities.end(),
                  1.0 / static_cast<double>(out.spots.size()));
        return out;
    }
    for (double& p : out.probabilities) p /= total;
    return out;
}

double tour_length(std::span<const std::size_t> order, const DistanceMatrix& dm) {
    double total = 0.0;
    for (std::size_t i = 1; i < order.size(); ++i) total += dm[order[i - 1]][order[i]];
    return total;
}

Tour sample_tour(const DistanceMatrix& dm, const SpotPheromone& pheromone,
                 const OrderAcoConfig& cfg, Rng& rng) {
    const std::size_t spot_count = dm.size();
    Tour tour;
    tour.order.reserve(spot_count);
    std::vector<bool> visited(spot_count, false);
    std::size_t current = 0;
    visited[0] = true;
    tour.order.push_back(0);
    while (tour.order.size() < spot_count) {
        const SpotDistribution next = order_probabilities(current, visited, pheromone, dm, cfg);
        assert(!next.spots.empty());
        current = next.spots[roulette(next.probabilities, 1.0, rng)];
        visited[current] = true;
        tour.order.push_back(current);
    }
    tour.length = tour_length(tour.order, dm);
    return tour;
}

bool is_valid_order(std::span<const std::size_t> order, std::size_t n_users) {
    const std::size_t spot_count = 2 * n_users + 2;
    if (order.size() != spot_count) return false;
    if (order.front() != 0 || order.back() != spot_count - 1) return false;
    std::vector<std::size_t> position(spot_count, spot_count);
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t s = order[i];
        if (s >= spot_count || position[s] != spot_count) return false;
        position[s] = i;
    }
    for (std::size_t u = 1; u <= n_users; ++u) {
        if (position[u] > position[u + n_users]) return false;
    }
    return true;
}

bool update_order_pheromone(SpotPheromone& pheromone, const Tour& tour, double& best_length,
                            const OrderAcoConfig& cfg) {
    if (!(tour.length < best_length)) return false;
    const std::size_t n = pheromone.size();
    const double keep = 1.0 - cfg.rho;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) pheromone(i, j) *= keep;
    }
    if (tour.length > 0.0) {
        const double amount = cfg.mu / tour.length;
        for (std::size_t i = 1; i < tour.order.size(); ++i) {
            pheromone(tour.order[i - 1], tour.order[i]) += amount;
        }
    }
    best_length = tour.length;
    return true;
}

OrderSolution solve_order(const DistanceMatrix& dm, const OrderAcoConfig& cfg, Rng& rng) {
    cfg.validate();
    const std::size_t spot_count = dm.size();
    if (spot_count < 4 || spot_count % 2 != 0) {
        throw std::invalid_argument("distance matrix must have 2N+2 spots with N >= 1");
    }
    const std::size_t n = users_for_spot_count(spot_count);

    SpotPheromone pheromone(spot_count, cfg.tau0);
    OrderSolution out;
    double best_length = std::numeric_limits<double>::infinity();
    std::vector<Tour> tours(static_cast<std::size_t>(cfg.ants));
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        // All ants of an iteration see the same pheromone snapshot.
        for (Tour& t : tours) t = sample_tour(dm, pheromone, cfg, rng);
        out.tours_sampled += tours.size();
        for (const Tour& t : tours) {
            if (!is_valid_order(t.order, n)) {
                throw std::logic_error("sampled tour violates the serving precedence");
            }
            if (update_order_pheromone(pheromone, t, best_length, cfg)) out.best = t;
        }
        out.best_trace.push_back(best_length);
    }
    return out;
}

std::vector<Cell> assemble_path(const Tour& tour, const PairwiseResult& pairwise) {
    std::vector<Cell> out;
    if (tour.order.empty()) return out;
    out.push_back(pairwise.spots.at(tour.order.front()));
    for (std::size_t k = 1; k < tour.order.size(); ++k) {
        const std::size_t i = tour.order[k - 1];
        const std::size_t j = tour.order[k];
        const auto& segment = pairwise.paths.at(i).at(j);
        if (segment.empty() || segment.front() != pairwise.spots[i] ||
            segment.back() != pairwise.spots[j]) {
            throw MissingPairPath("no stored path between spot " + std::to_string(i) +
                                  " and spot " + std::to_string(j));
        }
        out.insert(out.end(), segment.begin() + 1, segment.end());
    }
    return out;
}

std::string order_notation(std::span<const std::size_t> order, std::size_t n_users) {
    std::string out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0) out += "→";
        out += spot_label(order[i], n_users);
    }
    return out;
}

} // namespace lavp
