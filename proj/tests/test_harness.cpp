#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <regex>
#include <sstream>

#include "lavp/commands.hpp"
#include "lavp/errors.hpp"
#include "lavp/oracle.hpp"
#include "lavp/order_aco.hpp"
#include "lavp/render.hpp"
#include "lavp/scenario_io.hpp"
#include "test_support.hpp"

using namespace lavp;
namespace fs = std::filesystem;

namespace {

const fs::path kData = LAVP_DATA_DIR;

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("lavp_harness_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

/// Every non-timing artifact in `a` must exist byte-identical in `b`.
void check_same_artifacts(const fs::path& a, const fs::path& b) {
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const std::string name = entry.path().filename().string();
        if (name.find("timing") != std::string::npos || entry.path().extension() == ".bin") continue;
        INFO(name);
        REQUIRE(fs::exists(b / name));
        CHECK(read_text_file(entry.path()) == read_text_file(b / name));
        ++compared;
    }
    CHECK(compared > 0);
}

const char* kSmallDqnConfig = R"({
  "dqn": {"hidden": [16, 16], "batch": 16, "warmup": 32, "capacity": 5000, "episodes": 6}
})";

} // namespace

TEST_CASE("bundled scenarios") {
    const LoadedScenario a = load_scenario(kData / "scenarios" / "scenario_a.json");
    CHECK(a.id == "scenario_a");
    CHECK(a.map.width_x() == 20);
    CHECK(a.map.width_y() == 20);
    CHECK(a.scenario.initial == Cell{0, 0});
    CHECK(a.scenario.pickups == std::vector<Cell>{{3, 4}, {7, 9}, {10, 5}});
    CHECK(a.scenario.dropoffs == std::vector<Cell>{{14, 7}, {17, 16}, {15, 12}});
    CHECK(a.scenario.car_park == Cell{19, 19});
    for (const auto& entry : fs::directory_iterator(kData / "scenarios")) {
        INFO(entry.path().string());
        const LoadedScenario s = load_scenario(entry.path());
        CHECK_NOTHROW(optimal_tour(s.scenario, s.map));
    }
}

TEST_CASE("scenario parsing errors") {
    const std::string good = R"({"grid": {"x": 5, "y": 5}, "obstacles": [[2, 2]], "initial": [0, 0],
        "pickups": [[1, 3]], "dropoffs": [[3, 1]], "car_park": [4, 4]})";
    CHECK_NOTHROW(parse_scenario(good));

    std::string missing = good;
    missing.replace(missing.find(", \"car_park\": [4, 4]"), std::string(", \"car_park\": [4, 4]").size(), "");
    CHECK_THROWS_AS(parse_scenario(missing), ParseError);

    std::string on_obstacle = good;
    on_obstacle.replace(on_obstacle.find("[[1, 3]]"), 8, "[[2, 2]]");
    CHECK_THROWS_AS(parse_scenario(on_obstacle), SpotOnObstacle);

    CHECK_THROWS_AS(parse_scenario("{\"grid\": "), ParseError);
    CHECK_THROWS_AS(parse_scenario(R"({"grid": {"x": 5, "y": "five"}})"), ParseError);

    const LoadedScenario round = parse_scenario(good);
    const LoadedScenario again = parse_scenario(scenario_to_json(round.map, round.scenario));
    CHECK(again.scenario.pickups == round.scenario.pickups);
    CHECK(again.map.obstacles() == round.map.obstacles());
}

TEST_CASE("config parsing") {
    const SolverConfig defaults = load_config(kData / "config_default.json");
    CHECK(defaults.grid_aco.alpha == 1.1);
    CHECK(defaults.grid_aco.beta == 12.0);
    CHECK(defaults.order_aco.iterations == 50);
    CHECK(defaults.dqn.batch == 256);
    CHECK(defaults.dqn.hidden == std::vector<std::size_t>{400, 300, 300});

    const SolverConfig partial = parse_config(R"({"dqn": {"learning_rate": 0.003}})");
    CHECK(partial.dqn.learning_rate == 0.003);
    CHECK(partial.dqn.gamma == 0.99);
    CHECK(partial.grid_aco.iterations == 10);

    CHECK_THROWS_AS(parse_config(R"({"dqn": {"learning_rat": 0.003}})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"colony": {}})"), ParseError);

    const SolverConfig round = parse_config(config_to_json(partial));
    CHECK(round.dqn.learning_rate == 0.003);
}

TEST_CASE("render") {
    const GridMap m(20, 20, {{5, 5}});
    const Scenario s{{0, 0}, {{3, 4}}, {{14, 7}}, {19, 19}};
    const std::vector<Cell> path{{0, 0}, {1, 1}, {2, 1}};
    const std::string svg = render_svg(m, s, path, "t");
    CHECK(svg == render_svg(m, s, path, "t"));

    const auto lattice_begin = svg.find("<g id=\"lattice\"");
    const auto lattice_end = svg.find("</g>", lattice_begin);
    const std::string lattice = svg.substr(lattice_begin, lattice_end - lattice_begin);
    std::size_t lines = 0;
    for (std::size_t p = lattice.find("<line"); p != std::string::npos; p = lattice.find("<line", p + 1)) ++lines;
    CHECK(lines == 21 + 21);

    std::smatch match;
    REQUIRE(std::regex_search(svg, match, std::regex("points=\"([^\"]*)\"")));
    std::istringstream pts(match[1].str());
    std::string pair;
    std::size_t i = 0;
    while (pts >> pair) {
        const double px = std::stod(pair.substr(0, pair.find(',')));
        const double py = std::stod(pair.substr(pair.find(',') + 1));
        REQUIRE(i < path.size());
        CHECK(px == (path[i].y + 0.5) * kSvgCellSize);
        CHECK(py == (path[i].x + 0.5) * kSvgCellSize);
        ++i;
    }
    CHECK(i == path.size());
}

TEST_CASE("dlaco command") {
    CommandOptions opt;
    opt.scenario = kData / "scenarios" / "desk_n2.json";
    opt.seed = 11;
    opt.out = fresh_dir("dlaco_a");
    const RunReport r = cmd_dlaco(opt);
    CHECK(r.success);
    CHECK(is_valid_order(r.order, 2));
    CHECK(r.order_notation.rfind("IS→PS", 0) == 0);
    const LoadedScenario ls = load_scenario(opt.scenario);
    CHECK(lavp::testing::move_count_length(r.path) == doctest::Approx(r.distance).epsilon(1e-9));
    CHECK(r.distance >= optimal_tour(ls.scenario, ls.map).distance - 1e-9);
    CHECK(fs::exists(opt.out / "dlaco_path.json"));
    CHECK(fs::exists(opt.out / "dlaco_path.svg"));

    const PathTrace trace = load_path_trace(opt.out / "dlaco_path.json");
    CHECK(trace.cells == r.path);

    CommandOptions again = opt;
    again.out = fresh_dir("dlaco_b");
    cmd_dlaco(again);
    check_same_artifacts(opt.out, again.out);

    CommandOptions render = opt;
    render.path_file = opt.out / "dlaco_path.json";
    render.out = fresh_dir("render");
    const fs::path svg = cmd_render(render);
    CHECK(read_text_file(svg) == read_text_file(cmd_render(render)));
}

TEST_CASE("verify_report rejects a wrong claimed distance") {
    const LoadedScenario ls = load_scenario(kData / "scenarios" / "desk_n1.json");
    const OracleResult best = optimal_tour(ls.scenario, ls.map);
    RunReport r;
    r.order = best.order;
    r.path = best.path;
    r.success = true;
    CHECK_NOTHROW(verify_report(r, best.distance, ls.map, ls.scenario));
    CHECK(r.distance == doctest::Approx(best.distance).epsilon(1e-12));
    CHECK_THROWS_AS(verify_report(r, best.distance + 0.5, ls.map, ls.scenario), std::logic_error);
}

TEST_CASE("dqn commands and compare") {
    const fs::path cfg_dir = fresh_dir("cfg");
    write_text_file(cfg_dir / "small.json", kSmallDqnConfig);

    CommandOptions opt;
    opt.scenario = kData / "scenarios" / "desk_n1.json";
    opt.config = cfg_dir / "small.json";
    opt.seed = 3;
    opt.out = fresh_dir("dqn_a");
    cmd_dqn_train(opt);
    const std::string csv = read_text_file(opt.out / "training.csv");
    CHECK(csv.rfind("episode,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 6);

    CommandOptions again = opt;
    again.out = fresh_dir("dqn_b");
    cmd_dqn_train(again);
    check_same_artifacts(opt.out, again.out);
    CHECK(read_text_file(opt.out / "checkpoint.bin") == read_text_file(again.out / "checkpoint.bin"));

    CommandOptions cmp = opt;
    cmp.checkpoint = opt.out / "checkpoint.bin";
    cmp.trials = 50;
    cmp.out = fresh_dir("cmp_a");
    const std::vector<RunReport> rows = cmd_compare(cmp);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].solver == "DL-ACO");
    CHECK(rows[1].solver == "DQN");
    CHECK(rows[2].solver == "Random");
    CHECK(rows[3].solver == "Oracle");
    for (const RunReport& r : rows) {
        if (r.success) CHECK(r.distance >= rows[3].distance - 1e-9);
    }
    const std::string table = reports_table(rows);
    for (const char* col : {"solver", "distance", "train_time", "test_time"}) {
        CHECK(table.find(col) != std::string::npos);
    }
    CHECK(read_text_file(cmp.out / "compare_timing.csv").rfind("solver,train_time,test_time", 0) == 0);

    CommandOptions cmp2 = cmp;
    cmp2.out = fresh_dir("cmp_b");
    cmd_compare(cmp2);
    check_same_artifacts(cmp.out, cmp2.out);

    CommandOptions bad = cmp;
    bad.solvers = {"genetic"};
    CHECK_THROWS_AS(cmd_compare(bad), std::invalid_argument);
}
