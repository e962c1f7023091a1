#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "lavp/errors.hpp"
#include "lavp/oracle.hpp"
#include "lavp/pairwise_aco.hpp"
#include "test_support.hpp"

using namespace lavp;
using lavp::testing::octile;

TEST_CASE("heuristic attractiveness") {
    CHECK(heuristic_attractiveness({4, 4}, {4, 4}) == 1.0);
    CHECK(heuristic_attractiveness({4, 7}, {4, 4}) == 0.25);
    CHECK(heuristic_attractiveness({1, 1}, {4, 4}) < heuristic_attractiveness({2, 2}, {4, 4}));
    CHECK(heuristic_attractiveness({0, 0}, {19, 19}) > 0.0);
}

TEST_CASE("move probabilities") {
    const AcoGridConfig cfg; // alpha 1.1, beta 12

    SUBCASE("two symmetric options split evenly") {
        const GridMap m(3, 3);
        std::vector<bool> visited(m.cell_count(), true);
        visited[m.index({0, 1})] = false;
        visited[m.index({1, 0})] = false;
        const PheromoneGrid tau(m, 1.0);
        const MoveDistribution d = move_probabilities({1, 1}, visited, tau, {0, 0}, m, cfg);
        REQUIRE(d.cells.size() == 2);
        CHECK(d.probabilities[0] == doctest::Approx(0.5));
        CHECK(d.probabilities[1] == doctest::Approx(0.5));
    }
    SUBCASE("visibility ratio 2:1 with beta 12") {
        // From [1,1] towards goal [0,0]: the goal itself (eta 1) vs [0,1] (eta 1/2).
        const GridMap m(2, 2);
        std::vector<bool> visited(m.cell_count(), false);
        visited[m.index({1, 1})] = true;
        visited[m.index({1, 0})] = true;
        const PheromoneGrid tau(m, 1.0);
        const MoveDistribution d = move_probabilities({1, 1}, visited, tau, {0, 0}, m, cfg);
        REQUIRE(d.cells.size() == 2);
        double p_goal = 0.0;
        double p_other = 0.0;
        for (std::size_t i = 0; i < d.cells.size(); ++i) {
            (d.cells[i] == Cell{0, 0} ? p_goal : p_other) = d.probabilities[i];
        }
        CHECK(p_goal == doctest::Approx(4096.0 / 4097.0).epsilon(1e-12));
        CHECK(p_other == doctest::Approx(1.0 / 4097.0).epsilon(1e-12));
        CHECK(p_goal == doctest::Approx(0.99976).epsilon(1e-5));
    }
    SUBCASE("pheromone enters with exponent alpha") {
        const GridMap m(3, 3);
        std::vector<bool> visited(m.cell_count(), true);
        visited[m.index({0, 1})] = false;
        visited[m.index({1, 0})] = false;
        PheromoneGrid tau(m, 1.0);
        tau.set_level({1, 1}, Action::Up, 2.0);
        const MoveDistribution d = move_probabilities({1, 1}, visited, tau, {0, 0}, m, cfg);
        const double w = std::pow(2.0, 1.1);
        for (std::size_t i = 0; i < d.cells.size(); ++i) {
            const double expect = d.cells[i] == Cell{0, 1} ? w / (w + 1) : 1 / (w + 1);
            CHECK(d.probabilities[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("dead end") {
        const GridMap m(3, 3, {{0, 1}, {1, 0}, {1, 1}});
        std::vector<bool> visited(m.cell_count(), false);
        visited[m.index({0, 0})] = true;
        const PheromoneGrid tau(m, 1.0);
        CHECK(move_probabilities({0, 0}, visited, tau, {2, 2}, m, cfg).dead_end());
    }
}

TEST_CASE("run_ant") {
    const AcoGridConfig cfg;
    Rng rng(3);
    SUBCASE("start equals goal") {
        const GridMap m(5, 5);
        const PheromoneGrid tau(m, 1.0);
        const AntPath p = run_ant({2, 2}, {2, 2}, tau, m, cfg, rng);
        CHECK(p.success);
        CHECK(p.length == 0.0);
        CHECK(p.cells == std::vector<Cell>{{2, 2}});
    }
    SUBCASE("3x3 corner to corner never beats the exact distance") {
        const GridMap m(3, 3);
        const PheromoneGrid tau(m, 1.0);
        for (int i = 0; i < 50; ++i) {
            const AntPath p = run_ant({0, 0}, {2, 2}, tau, m, cfg, rng);
            CHECK(p.success);
            CHECK(p.length >= 2 * std::numbers::sqrt2 - 1e-12);
            CHECK(lavp::testing::is_simple_free_path(m, p.cells));
        }
    }
    SUBCASE("walled-off goal is never reached") {
        const GridMap m(5, 5, {{3, 3}, {3, 4}, {4, 3}});
        const PheromoneGrid tau(m, 1.0);
        for (int i = 0; i < 50; ++i) {
            const AntPath p = run_ant({0, 0}, {4, 4}, tau, m, cfg, rng);
            CHECK_FALSE(p.success);
            CHECK(lavp::testing::is_simple_free_path(m, p.cells));
        }
    }
}

TEST_CASE("deposit_pheromone arithmetic") {
    const GridMap m(5, 5);
    AcoGridConfig cfg;
    cfg.rho = 0.5;
    cfg.mu = 10.0;
    const Cell a{1, 1};
    const Cell b{1, 2};

    SUBCASE("single ant") {
        PheromoneGrid tau(m, 1.0);
        const AntPath ant{{a, b}, 20.0, true};
        deposit_pheromone(tau, std::span<const AntPath>(&ant, 1), cfg);
        CHECK(tau.level(a, Action::Right) == doctest::Approx(1.0));
        CHECK(tau.level(b, Action::Left) == doctest::Approx(1.0));
        CHECK(tau.level(a, Action::Down) == doctest::Approx(0.5));
    }
    SUBCASE("two ants sum their deposits") {
        PheromoneGrid tau(m, 1.0);
        tau.set_level(a, Action::Right, 0.0);
        const std::vector<AntPath> ants{{{a, b}, 10.0, true}, {{a, b}, 20.0, true}};
        deposit_pheromone(tau, ants, cfg);
        CHECK(tau.level(a, Action::Right) == doctest::Approx(1.5));
    }
    SUBCASE("levels stay positive under repeated updates") {
        PheromoneGrid tau(m, 1.0);
        Rng rng(11);
        const AcoGridConfig run_cfg;
        for (int it = 0; it < 200; ++it) {
            std::vector<AntPath> ants;
            AntPath p = run_ant({0, 0}, {4, 4}, tau, m, run_cfg, rng);
            if (p.success && it % 3 == 0) ants.push_back(p);
            deposit_pheromone(tau, ants, run_cfg);
        }
        for (double t : tau.levels()) CHECK(t > 0.0);
    }
}

TEST_CASE("solve_pair") {
    AcoGridConfig cfg;
    cfg.iterations = 50;
    Rng rng(5);
    SUBCASE("degenerate pair") {
        const PairPath p = solve_pair({4, 4}, {4, 4}, GridMap(20, 20), cfg, rng);
        CHECK(p.length == 0.0);
        CHECK(p.cells == std::vector<Cell>{{4, 4}});
    }
    SUBCASE("empty 20x20 pair approaches the octile distance") {
        const double exact = 4 * std::numbers::sqrt2 + 1;
        CHECK(octile({3, 4}, {7, 9}) == doctest::Approx(6.65685).epsilon(1e-5));
        const PairPath p = solve_pair({3, 4}, {7, 9}, GridMap(20, 20), cfg, rng);
        CHECK(p.length >= exact - 1e-9);
        CHECK(p.length <= 1.05 * exact);
    }
    SUBCASE("full wall makes the pair unreachable") {
        std::vector<Cell> wall;
        for (int y = 0; y < 10; ++y) wall.push_back({5, y});
        CHECK_THROWS_AS(solve_pair({1, 1}, {8, 8}, GridMap(10, 10, wall), cfg, rng), Unreachable);
    }
}

TEST_CASE("build_distance_matrix") {
    Rng map_rng(21);
    const Scenario s{{0, 0}, {{3, 4}, {7, 9}, {10, 5}}, {{14, 7}, {17, 16}, {15, 12}}, {19, 19}};
    const GridMap m = lavp::testing::random_obstacle_map(20, 20, 0.1, map_rng, s.spots());
    const AcoGridConfig cfg;
    Rng rng(99);
    const PairwiseResult pw = build_distance_matrix(s, m, cfg, rng);
    REQUIRE(pw.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(pw.distances[i][i] == 0.0);
        for (std::size_t j = 0; j < 8; ++j) {
            CHECK(pw.distances[i][j] == pw.distances[j][i]);
            const auto& path = pw.paths[i][j];
            REQUIRE_FALSE(path.empty());
            CHECK(path.front() == pw.spots[i]);
            CHECK(path.back() == pw.spots[j]);
            CHECK(lavp::testing::is_simple_free_path(m, path));
            CHECK(std::abs(lavp::testing::move_count_length(path) - pw.distances[i][j]) < 1e-9);
            if (i != j) {
                const double exact = grid_shortest_path(m, pw.spots[i], pw.spots[j]).distance;
                CHECK(pw.distances[i][j] >= exact - 1e-9);
            }
        }
    }

    Rng again(99);
    const PairwiseResult pw2 = build_distance_matrix(s, m, cfg, again);
    CHECK(pw2.distances == pw.distances);
    CHECK(pw2.paths == pw.paths);
}

TEST_CASE("unreachable pair is reported with spot labels") {
    std::vector<Cell> wall;
    for (int y = 0; y < 10; ++y) wall.push_back({5, y});
    const GridMap m(10, 10, wall);
    const Scenario s{{0, 0}, {{2, 2}}, {{8, 8}}, {9, 9}};
    Rng rng(1);
    try {
        build_distance_matrix(s, m, AcoGridConfig{}, rng);
        FAIL("expected Unreachable");
    } catch (const Unreachable& e) {
        CHECK(std::string(e.what()).find("IS -> DS1") != std::string::npos);
    }
}
