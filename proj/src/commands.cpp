#include "lavp/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "lavp/dqn.hpp"
#include "lavp/errors.hpp"
#include "lavp/oracle.hpp"
#include "lavp/order_aco.hpp"
#include "lavp/pairwise_aco.hpp"
#include "lavp/render.hpp"
#include "lavp/scenario_io.hpp"

namespace lavp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 6) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

SolverConfig options_config(const CommandOptions& opt) {
    SolverConfig cfg = opt.config ? load_config(*opt.config) : SolverConfig{};
    if (opt.episodes) {
        cfg.dqn.episodes = *opt.episodes;
        cfg.dqn.validate();
    }
    return cfg;
}

void log_line(const CommandOptions& opt, const std::string& text) {
    if (opt.log) *opt.log << text << '\n';
}

void write_path_artifacts(const CommandOptions& opt, const LoadedScenario& ls,
                          const RunReport& r, const std::string& stem) {
    PathTrace trace{r.solver, r.scenario_id, r.distance, r.success, r.order, r.order_notation,
                    r.path};
    write_text_file(opt.out / (stem + "_path.json"), path_trace_to_json(trace));
    write_text_file(opt.out / (stem + "_path.svg"),
                    render_svg(ls.map, ls.scenario, r.path,
                               r.solver + " " + r.scenario_id + "  d=" + fixed(r.distance, 3)));
}

void write_reports(const CommandOptions& opt, const std::vector<RunReport>& reports,
                   const std::string& stem) {
    write_text_file(opt.out / (stem + ".csv"), reports_csv(reports));
    write_text_file(opt.out / (stem + "_timing.csv"), timing_csv(reports));
    if (opt.log) *opt.log << reports_table(reports);
}

RunReport run_dlaco(const LoadedScenario& ls, const SolverConfig& cfg, std::uint64_t seed) {
    const auto start = Clock::now();
    Rng rng(derive_seed(seed, kDlacoStream));
    const PairwiseResult pw = build_distance_matrix(ls.scenario, ls.map, cfg.grid_aco, rng);
    const OrderSolution sol = solve_order(pw.distances, cfg.order_aco, rng);
    RunReport r;
    r.solver = "DL-ACO";
    r.scenario_id = ls.id;
    r.seed = seed;
    r.success = true;
    r.order = sol.best.order;
    r.path = assemble_path(sol.best, pw);
    r.test_seconds = seconds_since(start);
    verify_report(r, sol.best.length, ls.map, ls.scenario);
    return r;
}

RunReport run_random(const LoadedScenario& ls, int trials, std::uint64_t seed) {
    const auto start = Clock::now();
    Rng rng(derive_seed(seed, kRandomStream));
    const OracleResult best = random_rollout_best(ls.scenario, ls.map, trials, kRandomStepCap, rng);
    RunReport r;
    r.solver = "Random";
    r.scenario_id = ls.id;
    r.seed = seed;
    r.success = std::isfinite(best.distance);
    r.order = best.order;
    r.path = best.path;
    r.test_seconds = seconds_since(start);
    verify_report(r, best.distance, ls.map, ls.scenario);
    return r;
}

RunReport run_oracle(const LoadedScenario& ls, std::uint64_t seed) {
    const auto start = Clock::now();
    const OracleResult best = optimal_tour(ls.scenario, ls.map);
    RunReport r;
    r.solver = "Oracle";
    r.scenario_id = ls.id;
    r.seed = seed;
    r.success = true;
    r.order = best.order;
    r.path = best.path;
    r.test_seconds = seconds_since(start);
    verify_report(r, best.distance, ls.map, ls.scenario);
    return r;
}

std::optional<double> read_train_seconds(const std::filesystem::path& checkpoint) {
    const auto timing = checkpoint.parent_path() / "dqn_train_timing.csv";
    if (!std::filesystem::exists(timing)) return std::nullopt;
    const std::string text = read_text_file(timing);
    // second line: "DQN,<train>,<test>"
    const auto nl = text.find('\n');
    if (nl == std::string::npos) return std::nullopt;
    const std::string row = text.substr(nl + 1);
    const auto c1 = row.find(',');
    const auto c2 = row.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) return std::nullopt;
    try {
        return std::stod(row.substr(c1 + 1, c2 - c1 - 1));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

RunReport run_dqn_eval(const LoadedScenario& ls, const SolverConfig& cfg,
                       const std::filesystem::path& checkpoint, std::uint64_t seed) {
    const Network net = load_evaluation_network(checkpoint);
    if (net.input_size() != state_size(ls.scenario.n_users())) {
        throw ShapeMismatch("checkpoint expects " + std::to_string(net.input_size()) +
                            " state inputs; scenario needs " +
                            std::to_string(state_size(ls.scenario.n_users())));
    }
    const auto start = Clock::now();
    const Rollout ro = greedy_rollout(net, ls.scenario, ls.map, cfg.dqn.step_cap);
    RunReport r;
    r.solver = "DQN";
    r.scenario_id = ls.id;
    r.seed = seed;
    r.success = ro.success;
    r.test_seconds = seconds_since(start);
    r.train_seconds = read_train_seconds(checkpoint);
    if (ro.success) {
        r.order = ro.visit_order;
        r.path = ro.cells;
    }
    verify_report(r, ro.success ? ro.distance : std::numeric_limits<double>::infinity(), ls.map,
                  ls.scenario);
    return r;
}

std::string join_order(const std::vector<std::size_t>& order) {
    std::string out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0) out += ' ';
        out += std::to_string(order[i]);
    }
    return out;
}

} // namespace

void verify_report(RunReport& report, double claimed_distance, const GridMap& map,
                   const Scenario& scenario) {
    const std::size_t n = scenario.n_users();
    if (!report.success) {
        report.distance = std::numeric_limits<double>::infinity();
        report.order_notation.clear();
        return;
    }
    for (Cell c : report.path) {
        if (!map.is_free(c)) {
            throw std::logic_error(report.solver + ": path enters blocked cell " + to_string(c));
        }
    }
    if (!is_valid_order(report.order, n)) {
        throw std::logic_error(report.solver + ": reported visit order is not a valid serving order");
    }
    if (report.path.empty() || report.path.front() != scenario.initial ||
        report.path.back() != scenario.car_park) {
        throw std::logic_error(report.solver + ": path must run from IS to CP");
    }
    const double recomputed = path_length(report.path);
    if (std::abs(recomputed - claimed_distance) > 1e-6) {
        throw std::logic_error(report.solver + ": claimed distance " + fixed(claimed_distance) +
                               " differs from path length " + fixed(recomputed));
    }
    report.distance = recomputed;
    report.order_notation = order_notation(report.order, n);
}

std::string reports_csv(const std::vector<RunReport>& reports) {
    std::string out = "solver,scenario,distance,success,visit_order,seed\n";
    for (const RunReport& r : reports) {
        out += r.solver + "," + r.scenario_id + "," + fixed(r.distance) + "," +
               (r.success ? "1" : "0") + "," + join_order(r.order) + "," +
               std::to_string(r.seed) + "\n";
    }
    return out;
}

std::string timing_csv(const std::vector<RunReport>& reports) {
    std::string out = "solver,train_time,test_time\n";
    for (const RunReport& r : reports) {
        out += r.solver + "," + (r.train_seconds ? fixed(*r.train_seconds, 3) : "") + "," +
               fixed(r.test_seconds, 3) + "\n";
    }
    return out;
}

std::string reports_table(const std::vector<RunReport>& reports) {
    std::vector<std::vector<std::string>> rows{
        {"solver", "distance", "train_time", "test_time", "order"}};
    for (const RunReport& r : reports) {
        rows.push_back({r.solver, fixed(r.distance, 3),
                        r.train_seconds ? fixed(*r.train_seconds, 2) + "s" : "-",
                        fixed(r.test_seconds, 2) + "s",
                        r.success ? r.order_notation : "(failed)"});
    }
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            if (c + 1 < row.size()) out += std::string(width[c] - row[c].size() + 2, ' ');
        }
        out += '\n';
    }
    return out;
}

RunReport cmd_dlaco(const CommandOptions& opt) {
    const LoadedScenario ls = load_scenario(opt.scenario);
    const SolverConfig cfg = options_config(opt);
    RunReport r = run_dlaco(ls, cfg, opt.seed);
    write_path_artifacts(opt, ls, r, "dlaco");
    write_reports(opt, {r}, "dlaco_report");
    return r;
}

RunReport cmd_dqn_train(const CommandOptions& opt) {
    const LoadedScenario ls = load_scenario(opt.scenario);
    const SolverConfig cfg = options_config(opt);
    const auto start = Clock::now();
    DqnTrainer trainer(ls.scenario, ls.map, cfg.dqn, Rng(derive_seed(opt.seed, kDqnStream)));

    std::string csv = "episode,accumulated_reward,steps,success,mean_loss\n";
    for (int e = 0; e < cfg.dqn.episodes; ++e) {
        const EpisodeRecord rec = trainer.run_episode();
        csv += std::to_string(e + 1) + "," + fixed(rec.reward) + "," + std::to_string(rec.steps) +
               "," + (rec.success ? "1" : "0") + "," + fixed(rec.mean_loss, 9) + "\n";
        if (opt.log && (e + 1) % 100 == 0) {
            *opt.log << "episode " << (e + 1) << "/" << cfg.dqn.episodes
                     << "  reward " << fixed(rec.reward, 2) << "  success " << rec.success << std::endl;
        }
    }
    const double train_seconds = seconds_since(start);
    std::filesystem::create_directories(opt.out);
    const auto checkpoint = opt.out / "checkpoint.bin";
    trainer.save(checkpoint);
    write_text_file(opt.out / "training.csv", csv);

    const auto eval_start = Clock::now();
    const Rollout ro = greedy_rollout(trainer.evaluation(), ls.scenario, ls.map, cfg.dqn.step_cap);
    RunReport r;
    r.solver = "DQN";
    r.scenario_id = ls.id;
    r.seed = opt.seed;
    r.success = ro.success;
    r.train_seconds = train_seconds;
    r.test_seconds = seconds_since(eval_start);
    if (ro.success) {
        r.order = ro.visit_order;
        r.path = ro.cells;
    }
    verify_report(r, ro.success ? ro.distance : std::numeric_limits<double>::infinity(), ls.map,
                  ls.scenario);
    write_text_file(opt.out / "dqn_train_timing.csv", timing_csv({r}));
    write_text_file(opt.out / "dqn_train_report.csv", reports_csv({r}));
    log_line(opt, "checkpoint: " + checkpoint.string());
    if (opt.log) *opt.log << reports_table({r});
    return r;
}

RunReport cmd_dqn_eval(const CommandOptions& opt) {
    if (!opt.checkpoint) throw std::invalid_argument("dqn-eval requires --checkpoint");
    const LoadedScenario ls = load_scenario(opt.scenario);
    const SolverConfig cfg = options_config(opt);
    RunReport r = run_dqn_eval(ls, cfg, *opt.checkpoint, opt.seed);
    if (r.success) write_path_artifacts(opt, ls, r, "dqn");
    write_reports(opt, {r}, "dqn_report");
    return r;
}

RunReport cmd_oracle(const CommandOptions& opt) {
    const LoadedScenario ls = load_scenario(opt.scenario);
    RunReport r = run_oracle(ls, opt.seed);
    write_path_artifacts(opt, ls, r, "oracle");
    write_reports(opt, {r}, "oracle_report");
    return r;
}

std::vector<RunReport> cmd_compare(const CommandOptions& opt) {
    const LoadedScenario ls = load_scenario(opt.scenario);
    const SolverConfig cfg = options_config(opt);
    std::vector<std::string> solvers = opt.solvers;
    if (solvers.empty()) {
        solvers = {"dlaco"};
        if (opt.checkpoint) solvers.push_back("dqn");
        solvers.push_back("random");
        solvers.push_back("oracle");
    }
    std::vector<RunReport> reports;
    for (const std::string& s : solvers) {
        if (s == "dlaco") {
            reports.push_back(run_dlaco(ls, cfg, opt.seed));
        } else if (s == "dqn") {
            if (!opt.checkpoint) throw std::invalid_argument("the dqn row requires --checkpoint");
            reports.push_back(run_dqn_eval(ls, cfg, *opt.checkpoint, opt.seed));
        } else if (s == "random") {
            reports.push_back(run_random(ls, opt.trials, opt.seed));
        } else if (s == "oracle") {
            if (ls.scenario.n_users() <= kMaxEnumerationUsers) {
                reports.push_back(run_oracle(ls, opt.seed));
            } else {
                log_line(opt, "oracle skipped: more than " +
                                  std::to_string(kMaxEnumerationUsers) + " users");
            }
        } else {
            throw std::invalid_argument("unknown solver '" + s +
                                        "' (expected dlaco, dqn, random or oracle)");
        }
    }
    write_reports(opt, reports, "compare");
    return reports;
}

std::filesystem::path cmd_render(const CommandOptions& opt) {
    if (!opt.path_file) throw std::invalid_argument("render requires --path");
    const LoadedScenario ls = load_scenario(opt.scenario);
    const PathTrace trace = load_path_trace(*opt.path_file);
    for (Cell c : trace.cells) {
        if (!ls.map.in_bounds(c)) {
            throw ParseError(opt.path_file->string() + ": cell " + to_string(c) +
                             " lies outside the map");
        }
    }
    const auto target = opt.out / (opt.path_file->stem().string() + ".svg");
    const std::string title =
        trace.solver.empty() ? ls.id : trace.solver + " " + ls.id + "  d=" + fixed(trace.distance, 3);
    write_text_file(target, render_svg(ls.map, ls.scenario, trace.cells, title));
    log_line(opt, "wrote " + target.string());
    return target;
}

} // namespace lavp
