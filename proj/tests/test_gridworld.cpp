#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "lavp/errors.hpp"
#include "lavp/grid.hpp"
#include "lavp/random.hpp"

using namespace lavp;

namespace {

GridMap empty20() { return GridMap(20, 20); }

Scenario scenario_a() {
    return {{0, 0}, {{3, 4}, {7, 9}, {10, 5}}, {{14, 7}, {17, 16}, {15, 12}}, {19, 19}};
}

Scenario one_user(Cell pickup, Cell dropoff) { return {{0, 0}, {pickup}, {dropoff}, {19, 19}}; }

} // namespace

TEST_CASE("actions map to the eight distinct unit deltas") {
    CHECK(kActions.size() == 8);
    for (std::size_t i = 0; i < kActions.size(); ++i) {
        const Delta a = action_delta(kActions[i]);
        CHECK(std::abs(a.dx) <= 1);
        CHECK(std::abs(a.dy) <= 1);
        CHECK((a.dx != 0 || a.dy != 0));
        for (std::size_t j = i + 1; j < kActions.size(); ++j) {
            const Delta b = action_delta(kActions[j]);
            CHECK((a.dx != b.dx || a.dy != b.dy));
        }
    }
    CHECK(Cell{5, 5} + action_delta(Action::Up) == Cell{4, 5});
    CHECK(Cell{5, 5} + action_delta(Action::Down) == Cell{6, 5});
    CHECK(Cell{5, 5} + action_delta(Action::Left) == Cell{5, 4});
    CHECK(Cell{5, 5} + action_delta(Action::Right) == Cell{5, 6});
    CHECK(Cell{5, 5} + action_delta(Action::TopLeft) == Cell{4, 4});
    CHECK(Cell{5, 5} + action_delta(Action::TopRight) == Cell{4, 6});
    CHECK(Cell{5, 5} + action_delta(Action::BottomLeft) == Cell{6, 4});
    CHECK(Cell{5, 5} + action_delta(Action::BottomRight) == Cell{6, 6});
}

TEST_CASE("grid map rejects malformed obstacle sets") {
    CHECK_THROWS_AS(GridMap(20, 20, {{20, 0}}), InvalidMap);
    CHECK_THROWS_AS(GridMap(20, 20, {{1, 1}, {1, 1}}), InvalidMap);
    CHECK_THROWS_AS(GridMap(0, 5), InvalidMap);
    const GridMap m(20, 20, {{5, 5}});
    CHECK(m.is_obstacle({5, 5}));
    CHECK_FALSE(m.is_free({5, 5}));
    CHECK(m.in_bounds({19, 19}));
    CHECK_FALSE(m.in_bounds({20, 19}));
    CHECK(m.cell_at(m.index({7, 13})) == Cell{7, 13});
}

TEST_CASE("validate_scenario") {
    const GridMap m = empty20();
    SUBCASE("paper scenario is valid") {
        const Scenario s = scenario_a();
        const Scenario v = validate_scenario(m, s);
        CHECK(v.pickups == s.pickups);
        CHECK(v.dropoffs == s.dropoffs);
    }
    SUBCASE("out of bounds pickup") {
        Scenario s = scenario_a();
        s.pickups[0] = {25, 0};
        CHECK_THROWS_AS(validate_scenario(m, s), SpotOutOfBounds);
    }
    SUBCASE("pickup equals dropoff") {
        CHECK_THROWS_AS(validate_scenario(m, one_user({5, 5}, {5, 5})), DuplicateSpot);
    }
    SUBCASE("spot on obstacle names the spot") {
        const GridMap blocked(20, 20, {{7, 9}});
        try {
            validate_scenario(blocked, scenario_a());
            FAIL("expected SpotOnObstacle");
        } catch (const SpotOnObstacle& e) {
            CHECK(std::string(e.what()).find("PS2") != std::string::npos);
        }
    }
    SUBCASE("empty user list") {
        Scenario s = scenario_a();
        s.pickups.clear();
        s.dropoffs.clear();
        CHECK_THROWS_AS(validate_scenario(m, s), EmptyUserList);
    }
    SUBCASE("mismatched pickup and dropoff counts") {
        Scenario s = scenario_a();
        s.dropoffs.pop_back();
        CHECK_THROWS_AS(validate_scenario(m, s), EmptyUserList);
    }
}

TEST_CASE("reset") {
    const EpisodeState s = reset(scenario_a());
    CHECK(s.position == Cell{0, 0});
    CHECK(s.statuses == std::vector<ServingStatus>(3, ServingStatus::Waiting));
    CHECK(s.step == 0);
    CHECK(s.traveled == 0.0);
    CHECK(reset(one_user({1, 1}, {2, 2})).statuses.size() == 1);
}

TEST_CASE("apply_action blocks at borders and obstacles") {
    const GridMap m = empty20();
    MoveResult r = apply_action(Cell{5, 5}, Action::Up, m);
    CHECK(r.cell == Cell{4, 5});
    CHECK_FALSE(r.blocked);

    r = apply_action(Cell{0, 0}, Action::TopLeft, m);
    CHECK(r.blocked);
    CHECK(r.cell == Cell{0, 0});

    const GridMap walled(20, 20, {{5, 5}});
    r = apply_action(Cell{4, 5}, Action::Down, walled);
    CHECK(r.blocked);
    CHECK(r.cell == Cell{4, 5});

    r = apply_action(Cell{19, 19}, Action::BottomRight, m);
    CHECK(r.blocked);
}

TEST_CASE("step_distance") {
    CHECK(step_distance({5, 5}, {5, 6}) == 1.0);
    CHECK(step_distance({5, 5}, {6, 6}) == doctest::Approx(1.41421).epsilon(1e-5));
    CHECK(step_distance({5, 5}, {6, 6}) == std::numbers::sqrt2);
    CHECK(step_distance({5, 5}, {5, 5}) == 0.0);
    CHECK_THROWS_AS(step_distance({5, 5}, {5, 7}), NonAdjacentCells);
}

TEST_CASE("update_serving honours pickup-before-dropoff") {
    const Scenario s = one_user({3, 3}, {6, 6});
    EpisodeState st = reset(s);

    st.position = {6, 6};
    ServingUpdate u = update_serving(st, s);
    CHECK(u.statuses[0] == ServingStatus::Waiting);
    CHECK(u.events.empty());

    st.position = {3, 3};
    u = update_serving(st, s);
    CHECK(u.statuses[0] == ServingStatus::PickedUp);
    REQUIRE(u.events.size() == 1);
    CHECK(u.events[0] == ServingEvent{ServingEvent::Kind::Pickup, 0});

    st.statuses = u.statuses;
    u = update_serving(st, s);
    CHECK(u.statuses[0] == ServingStatus::PickedUp);
    CHECK(u.events.empty());

    st.position = {6, 6};
    u = update_serving(st, s);
    CHECK(u.statuses[0] == ServingStatus::Delivered);
    CHECK(u.events == std::vector<ServingEvent>{{ServingEvent::Kind::Dropoff, 0}});

    // Revisiting the pickup after delivery is a plain move.
    st.statuses = u.statuses;
    st.position = {3, 3};
    u = update_serving(st, s);
    CHECK(u.statuses[0] == ServingStatus::Delivered);
    CHECK(u.events.empty());
}

TEST_CASE("is_terminal requires all delivered and the car park") {
    const Scenario s = scenario_a();
    EpisodeState st = reset(s);
    st.statuses.assign(3, ServingStatus::Delivered);
    st.position = s.car_park;
    CHECK(is_terminal(st, s));
    st.position = {18, 19};
    CHECK_FALSE(is_terminal(st, s));
    st.position = s.car_park;
    st.statuses[1] = ServingStatus::PickedUp;
    CHECK_FALSE(is_terminal(st, s));
}

TEST_CASE("reward branches with p = 10") {
    using K = ServingEvent::Kind;
    const std::vector<ServingEvent> none;
    const std::vector<ServingEvent> pickup{{K::Pickup, 0}};
    const std::vector<ServingEvent> dropoff{{K::Dropoff, 0}};
    CHECK(reward(true, none, false, 0.0, 10.0) == -10.0);
    CHECK(reward(false, pickup, false, 1.0, 10.0) == 20.0);
    CHECK(reward(false, dropoff, false, 1.0, 10.0) == 40.0);
    CHECK(reward(false, dropoff, true, 1.0, 10.0) == 100.0);
    CHECK(reward(false, none, false, 1.0, 10.0) == -1.0);
    CHECK(reward(false, none, false, std::numbers::sqrt2, 10.0) == -std::numbers::sqrt2);
}

TEST_CASE("step composes the transition") {
    const GridMap m = empty20();
    const Scenario s = one_user({3, 4}, {5, 5});
    const EnvConfig env{};

    SUBCASE("arriving at the pickup") {
        EpisodeState st = reset(s);
        st.position = {2, 3};
        const StepOutcome out = step(st, Action::BottomRight, s, m, env);
        CHECK(out.reward == 20.0);
        CHECK(out.next_state.statuses[0] == ServingStatus::PickedUp);
        CHECK(out.next_state.step == 1);
        CHECK(out.next_state.traveled == std::numbers::sqrt2);
        CHECK_FALSE(out.done);
    }
    SUBCASE("blocked step") {
        const EpisodeState st = reset(s);
        const StepOutcome out = step(st, Action::Up, s, m, env);
        CHECK(out.blocked);
        CHECK(out.next_state.position == st.position);
        CHECK(out.next_state.traveled == 0.0);
        CHECK(out.reward == -10.0);
        CHECK(out.next_state.step == 1);
    }
    SUBCASE("final step into the car park") {
        EpisodeState st = reset(s);
        st.statuses[0] = ServingStatus::Delivered;
        st.position = {18, 18};
        const StepOutcome out = step(st, Action::BottomRight, s, m, env);
        CHECK(out.done);
        CHECK(out.reward == 100.0);
        CHECK_THROWS_AS(step(out.next_state, Action::Up, s, m, env), EpisodeAlreadyDone);
    }
    SUBCASE("passing the car park early is an ordinary move") {
        EpisodeState st = reset(s);
        st.position = {18, 18};
        const StepOutcome out = step(st, Action::BottomRight, s, m, env);
        CHECK_FALSE(out.done);
        CHECK(out.reward == -std::numbers::sqrt2);
    }
    SUBCASE("truncation at the step cap") {
        EpisodeState st = reset(s);
        st.step = 99;
        const StepOutcome out = step(st, Action::Right, s, m, env);
        CHECK(out.truncated);
        CHECK_FALSE(out.done);
        CHECK_THROWS_AS(step(out.next_state, Action::Right, s, m, env), EpisodeAlreadyDone);
    }
}

TEST_CASE("random trajectories satisfy the episode invariants") {
    const GridMap m(12, 12, {{3, 3}, {3, 4}, {3, 5}, {7, 8}, {8, 8}, {9, 8}});
    const Scenario s{{0, 0}, {{1, 5}, {6, 2}}, {{10, 3}, {2, 9}}, {11, 11}};
    validate_scenario(m, s);
    const EnvConfig env{10.0, 400};
    Rng rng(7);
    for (int episode = 0; episode < 200; ++episode) {
        EpisodeState st = reset(s);
        double sum = 0.0;
        while (true) {
            const Action a = kActions[uniform_index(rng, kActionCount)];
            const StepOutcome out = step(st, a, s, m, env);
            const StepOutcome again = step(st, a, s, m, env);
            CHECK(again.next_state == out.next_state);
            CHECK(again.reward == out.reward);

            if (out.blocked) {
                CHECK(out.distance == 0.0);
                CHECK(out.next_state.position == st.position);
                CHECK(out.reward == -env.penalty);
            } else {
                CHECK((out.distance == 1.0 || out.distance == std::numbers::sqrt2));
            }
            CHECK(m.is_free(out.next_state.position));
            for (std::size_t n = 0; n < st.statuses.size(); ++n) {
                CHECK(out.next_state.statuses[n] >= st.statuses[n]);
            }
            CHECK(out.done == is_terminal(out.next_state, s));

            // Exactly one branch: the reward identifies which.
            int branches = 0;
            branches += out.reward == -env.penalty;
            branches += out.reward == 2 * env.penalty;
            branches += out.reward == 4 * env.penalty;
            branches += out.reward == 10 * env.penalty;
            branches += out.reward == -out.distance && !out.blocked;
            CHECK(branches == 1);

            sum += out.distance;
            st = out.next_state;
            if (out.done || out.truncated) {
                break;
            }
        }
        CHECK(std::abs(st.traveled - sum) < 1e-9);
    }
}
