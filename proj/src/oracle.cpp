#include "lavp/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "lavp/errors.hpp"

namespace lavp {

OracleResult grid_shortest_path(const GridMap& map, Cell a, Cell b) {
    if (!map.is_free(a) || !map.is_free(b)) {
        throw Unreachable(to_string(a) + " -> " + to_string(b) +
                          ": endpoint blocked or out of bounds");
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    const std::size_t cells = map.cell_count();
    std::vector<double> dist(cells, kInf);
    std::vector<std::size_t> parent(cells, kNone);
    std::vector<bool> settled(cells, false);

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    const std::size_t src = map.index(a);
    const std::size_t dst = map.index(b);
    dist[src] = 0.0;
    open.emplace(0.0, src);

    OracleResult out;
    while (!open.empty()) {
        const auto [d, u] = open.top();
        open.pop();
        if (settled[u]) continue;
        settled[u] = true;
        ++out.node_expansions;
        if (u == dst) break;
        const Cell cu = map.cell_at(u);
        for (Action act : kActions) {
            const Delta delta = action_delta(act);
            const Cell cv = cu + delta;
            if (!map.is_free(cv)) continue;
            const std::size_t v = map.index(cv);
            const double w = (delta.dx != 0 && delta.dy != 0) ? std::numbers::sqrt2 : 1.0;
            if (d + w < dist[v]) {
                dist[v] = d + w;
                parent[v] = u;
                open.emplace(dist[v], v);
            }
        }
    }
    if (!settled[dst]) {
        throw Unreachable("no grid path from " + to_string(a) + " to " + to_string(b));
    }
    out.distance = dist[dst];
    for (std::size_t v = dst; v != kNone; v = parent[v]) out.path.push_back(map.cell_at(v));
    std::reverse(out.path.begin(), out.path.end());
    return out;
}

PairwiseResult oracle_distance_matrix(const Scenario& scenario, const GridMap& map) {
    PairwiseResult out;
    out.spots = scenario.spots();
    const std::size_t n = out.spots.size();
    out.distances.assign(n, std::vector<double>(n, 0.0));
    out.paths.assign(n, std::vector<std::vector<Cell>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        out.paths[i][i] = {out.spots[i]};
        for (std::size_t j = i + 1; j < n; ++j) {
            OracleResult r = grid_shortest_path(map, out.spots[i], out.spots[j]);
            out.distances[i][j] = out.distances[j][i] = r.distance;
            out.paths[j][i].assign(r.path.rbegin(), r.path.rend());
            out.paths[i][j] = std::move(r.path);
        }
    }
    return out;
}

OracleResult enumerate_optimal_order(const std::vector<std::vector<double>>& dm,
                                     std::size_t n_users) {
    if (n_users > kMaxEnumerationUsers) {
        throw TooManyUsers(std::to_string(n_users) + " users exceeds the enumeration limit of " +
                           std::to_string(kMaxEnumerationUsers));
    }
    const std::size_t spots = 2 * n_users + 2;
    if (dm.size() != spots) {
        throw std::invalid_argument("distance matrix size does not match 2N+2 spots");
    }
    OracleResult best;
    best.distance = std::numeric_limits<double>::infinity();

    // Middle spots 1..2N; a dropoff N+u may follow only once pickup u is placed.
    std::vector<std::size_t> order{0};
    std::vector<bool> used(spots, false);
    used[0] = true;
    std::function<void(double)> extend = [&](double length) {
        if (order.size() == spots - 1) {
            const double total = length + dm[order.back()][spots - 1];
            ++best.node_expansions;
            if (total < best.distance) {
                best.distance = total;
                best.order = order;
                best.order.push_back(spots - 1);
            }
            return;
        }
        for (std::size_t s = 1; s <= 2 * n_users; ++s) {
            if (used[s]) continue;
            if (s > n_users && !used[s - n_users]) continue;
            used[s] = true;
            const double step = dm[order.back()][s];
            order.push_back(s);
            extend(length + step);
            order.pop_back();
            used[s] = false;
        }
    };
    extend(0.0);
    return best;
}

OracleResult optimal_tour(const Scenario& scenario, const GridMap& map) {
    const PairwiseResult pw = oracle_distance_matrix(scenario, map);
    OracleResult out = enumerate_optimal_order(pw.distances, scenario.n_users());
    out.path.push_back(pw.spots[out.order.front()]);
    for (std::size_t k = 1; k < out.order.size(); ++k) {
        const auto& seg = pw.paths[out.order[k - 1]][out.order[k]];
        out.path.insert(out.path.end(), seg.begin() + 1, seg.end());
    }
    return out;
}

OracleResult random_rollout_best(const Scenario& scenario, const GridMap& map, int trials,
                                 int step_cap, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("random baseline needs at least one trial");
    const EnvConfig env{10.0, step_cap};
    OracleResult best;
    best.distance = std::numeric_limits<double>::infinity();
    std::vector<Action> open;
    for (int trial = 0; trial < trials; ++trial) {
        EpisodeState state = reset(scenario);
        std::vector<Cell> path{state.position};
        std::vector<std::size_t> order{0};
        bool success = false;
        while (state.step < step_cap) {
            open.clear();
            for (Action a : kActions) {
                if (!apply_action(state, a, map).blocked) open.push_back(a);
            }
            if (open.empty()) break;
            StepOutcome out = step(state, open[uniform_index(rng, open.size())], scenario, map, env);
            path.push_back(out.next_state.position);
            for (const ServingEvent& e : out.events) {
                order.push_back(e.kind == ServingEvent::Kind::Pickup
                                    ? e.user + 1
                                    : e.user + 1 + scenario.n_users());
            }
            state = std::move(out.next_state);
            if (out.done) {
                success = true;
                break;
            }
        }
        if (!success) {
            ++best.node_expansions;
            continue;
        }
        if (state.traveled < best.distance) {
            best.distance = state.traveled;
            best.path = std::move(path);
            order.push_back(scenario.spot_count() - 1);
            best.order = std::move(order);
        }
    }
    return best;
}

} // namespace lavp
