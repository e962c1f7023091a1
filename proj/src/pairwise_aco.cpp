#include "lavp/pairwise_aco.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lavp/errors.hpp"

namespace lavp {

void AcoGridConfig::validate() const {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
    if (iterations < 1 || ants < 1 || step_cap < 1) {
        throw std::invalid_argument("iterations, ants and step_cap must be >= 1");
    }
    if (!(tau0 > 0.0)) throw std::invalid_argument("tau0 must be positive");
    if (!(mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
}

PheromoneGrid::PheromoneGrid(const GridMap& map, double tau0)
    : width_y_(map.width_y()), levels_(map.cell_count() * kActionCount, tau0) {}

void PheromoneGrid::evaporate(double rho) {
    const double keep = 1.0 - rho;
    for (double& t : levels_) t *= keep;
}

void PheromoneGrid::deposit(Cell from, Cell to, double amount) {
    const Delta d{to.x - from.x, to.y - from.y};
    for (Action a : kActions) {
        const Delta ad = action_delta(a);
        if (ad.dx == d.dx && ad.dy == d.dy) {
            levels_[slot(from, a)] += amount;
        } else if (ad.dx == -d.dx && ad.dy == -d.dy) {
            levels_[slot(to, a)] += amount;
        }
    }
}

double heuristic_attractiveness(Cell w, Cell goal) {
    const double dx = w.x - goal.x;
    const double dy = w.y - goal.y;
    return 1.0 / (std::sqrt(dx * dx + dy * dy) + 1.0);
}

MoveDistribution move_probabilities(Cell v, const std::vector<bool>& visited,
                                    const PheromoneGrid& pheromone, Cell goal, const GridMap& map,
                                    const AcoGridConfig& cfg) {
    MoveDistribution out;
    double total = 0.0;
    for (Action a : kActions) {
        const Cell w = v + action_delta(a);
        if (!map.is_free(w) || visited[map.index(w)]) continue;
        const double weight = std::pow(pheromone.level(v, a), cfg.alpha) *
                              std::pow(heuristic_attractiveness(w, goal), cfg.beta);
        out.cells.push_back(w);
        out.probabilities.push_back(weight);
        total += weight;
    }
    if (out.cells.empty()) return out;
    if (!(total > 0.0)) {
        // Every weight underflowed; fall back to uniform over the allowed set.
        std::fill(out.probabilities.begin(), out.probabilities.end(),
                  1.0 / static_cast<double>(out.cells.size()));
        return out;
    }
    for (double& p : out.probabilities) p /= total;
    return out;
}

AntPath run_ant(Cell start, Cell goal, const PheromoneGrid& pheromone, const GridMap& map,
                const AcoGridConfig& cfg, Rng& rng) {
    AntPath path;
    path.cells.push_back(start);
    std::vector<bool> visited(map.cell_count(), false);
    visited[map.index(start)] = true;

    Cell current = start;
    for (int t = 0; t < cfg.step_cap && current != goal; ++t) {
        const MoveDistribution moves =
            move_probabilities(current, visited, pheromone, goal, map, cfg);
        if (moves.dead_end()) break;
        current = moves.cells[roulette(moves.probabilities, 1.0, rng)];
        visited[map.index(current)] = true;
        path.cells.push_back(current);
    }
    path.success = current == goal;
    path.length = path_length(path.cells);
    return path;
}

void deposit_pheromone(PheromoneGrid& pheromone, std::span<const AntPath> successful,
                       const AcoGridConfig& cfg) {
    pheromone.evaporate(cfg.rho);
    for (const AntPath& ant : successful) {
        if (!ant.success || !(ant.length > 0.0)) continue;
        const double amount = cfg.mu / ant.length;
        for (std::size_t i = 1; i < ant.cells.size(); ++i) {
            pheromone.deposit(ant.cells[i - 1], ant.cells[i], amount);
        }
    }
}

PairPath solve_pair(Cell from, Cell to, const GridMap& map, const AcoGridConfig& cfg, Rng& rng) {
    cfg.validate();
    if (!map.is_free(from) || !map.is_free(to)) {
        throw Unreachable("pair " + to_string(from) + " -> " + to_string(to) +
                          " has an endpoint that is blocked or out of bounds");
    }
    if (from == to) return {0.0, {from}};

    PheromoneGrid pheromone(map, cfg.tau0);
    PairPath best{std::numeric_limits<double>::infinity(), {}};
    std::vector<AntPath> successful;
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        successful.clear();
        for (int k = 0; k < cfg.ants; ++k) {
            AntPath ant = run_ant(from, to, pheromone, map, cfg, rng);
            if (!ant.success) continue;
            if (ant.length < best.length) {
                best.length = ant.length;
                best.cells = ant.cells;
            }
            successful.push_back(std::move(ant));
        }
        deposit_pheromone(pheromone, successful, cfg);
    }
    if (best.cells.empty()) {
        throw Unreachable("no ant reached " + to_string(to) + " from " + to_string(from));
    }
    return best;
}

PairwiseResult build_distance_matrix(const Scenario& scenario, const GridMap& map,
                                     const AcoGridConfig& cfg, Rng& rng) {
    PairwiseResult out;
    out.spots = scenario.spots();
    const std::size_t n = out.spots.size();
    out.distances.assign(n, std::vector<double>(n, 0.0));
    out.paths.assign(n, std::vector<std::vector<Cell>>(n));

    for (std::size_t i = 0; i < n; ++i) {
        out.paths[i][i] = {out.spots[i]};
        for (std::size_t j = i + 1; j < n; ++j) {
            Rng pair_rng(rng());
            PairPath pp;
            try {
                pp = solve_pair(out.spots[i], out.spots[j], map, cfg, pair_rng);
            } catch (const Unreachable& e) {
                const std::size_t users = scenario.n_users();
                throw Unreachable(spot_label(i, users) + " -> " + spot_label(j, users) + ": " +
                                  e.what());
            }
            out.distances[i][j] = pp.length;
            out.distances[j][i] = pp.length;
            out.paths[j][i].assign(pp.cells.rbegin(), pp.cells.rend());
            out.paths[i][j] = std::move(pp.cells);
        }
    }
    return out;
}

} // namespace lavp
