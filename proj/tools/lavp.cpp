// lavp: command-line front end for the valet-parking planners.
//
//   lavp dlaco      --scenario s.json [--config c.json] [--seed N] [--out dir]
//   lavp dqn-train  --scenario s.json [--config c.json] [--episodes E] [--seed N] [--out dir]
//   lavp dqn-eval   --scenario s.json --checkpoint dir/checkpoint.bin [--out dir]
//   lavp compare    --scenario s.json [--checkpoint ...] [--solvers dlaco,dqn,random,oracle]
//                   [--trials 500] [--seed N] [--out dir]
//   lavp render     --scenario s.json --path trace.json [--out dir]
//   lavp oracle     --scenario s.json [--out dir]

#include <iostream>
#include <optional>
#include <random>

#include "CLI11.hpp"
#include "lavp/commands.hpp"
#include "lavp/errors.hpp"

namespace {

struct Args {
    std::string scenario;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    int trials = 500;
    std::optional<int> episodes;
    std::string checkpoint;
    std::string path;
    std::vector<std::string> solvers;
};

lavp::CommandOptions to_options(const Args& a) {
    lavp::CommandOptions opt;
    opt.scenario = a.scenario;
    if (!a.config.empty()) opt.config = a.config;
    if (a.seed) {
        opt.seed = *a.seed;
    } else {
        std::random_device rd;
        opt.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
        std::cout << "seed: " << opt.seed << '\n';
    }
    opt.out = a.out;
    opt.trials = a.trials;
    opt.episodes = a.episodes;
    if (!a.checkpoint.empty()) opt.checkpoint = a.checkpoint;
    if (!a.path.empty()) opt.path_file = a.path;
    opt.solvers = a.solvers;
    opt.log = &std::cout;
    return opt;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-range valet parking planners: DL-ACO, DQN, random baseline and oracles"};
    app.require_subcommand(1);

    Args args;
    app.add_option("--seed", args.seed, "Random seed (derived from entropy and printed if omitted)");
    app.add_option("--out", args.out, "Output directory")->capture_default_str();

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", args.scenario, "Scenario JSON file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--config", args.config, "Solver configuration JSON")
            ->check(CLI::ExistingFile);
    };

    auto* dlaco = app.add_subcommand("dlaco", "Double-layer ACO: pairwise paths then visit order");
    add_common(dlaco);

    auto* train = app.add_subcommand("dqn-train", "Train the DQN agent; writes checkpoint and CSV");
    add_common(train);
    train->add_option("--episodes", args.episodes, "Override the number of training episodes");

    auto* eval = app.add_subcommand("dqn-eval", "Greedy rollout of a trained checkpoint");
    add_common(eval);
    eval->add_option("--checkpoint", args.checkpoint, "checkpoint.bin from dqn-train")
        ->required()
        ->check(CLI::ExistingFile);

    auto* compare = app.add_subcommand("compare", "Distance/timing table across solvers");
    add_common(compare);
    compare->add_option("--checkpoint", args.checkpoint, "Include the DQN row from this checkpoint")
        ->check(CLI::ExistingFile);
    compare->add_option("--trials", args.trials, "Random baseline trials")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    compare->add_option("--solvers", args.solvers, "Subset of dlaco,dqn,random,oracle")
        ->delimiter(',');

    auto* render = app.add_subcommand("render", "Render a path trace as SVG");
    add_common(render);
    render->add_option("--path", args.path, "Path trace JSON")->required()->check(CLI::ExistingFile);

    auto* oracle = app.add_subcommand("oracle", "Exact optimum via Dijkstra and order enumeration");
    add_common(oracle);

    for (auto* sub : {dlaco, train, eval, compare, render, oracle}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        const lavp::CommandOptions opt = to_options(args);
        if (*dlaco) {
            lavp::cmd_dlaco(opt);
        } else if (*train) {
            lavp::cmd_dqn_train(opt);
        } else if (*eval) {
            lavp::cmd_dqn_eval(opt);
        } else if (*compare) {
            lavp::cmd_compare(opt);
        } else if (*render) {
            lavp::cmd_render(opt);
        } else if (*oracle) {
            lavp::cmd_oracle(opt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
