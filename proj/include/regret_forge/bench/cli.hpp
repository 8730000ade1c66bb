#pragma once

#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regret_forge/bench/commands.hpp"
#include "regret_forge/bench/config.hpp"

namespace regret_forge::bench {

namespace detail {

// Flags shared by solve and sweep. Everything is captured as optional so a
// config file can supply defaults that explicit flags then override.
struct RunFlags {
    std::optional<std::string> game, alg, alpha, beta, minimizer, eval_every, updates, out, config;
    std::optional<double> gamma, big_blind;
    std::optional<std::int64_t> iters, period_nodes, max_nodes;
    std::optional<std::uint64_t> seed;
    std::optional<int> seeds;
    bool optimistic = false;
    bool track_pure_switch = false;

    void add_to(CLI::App& app, bool single_alg) {
        app.add_option("--game", game, "kuhn, leduc, goofspiel5, matrix:<path>, bandit:<p1,p2,...>, json:<path>");
        if (single_alg) app.add_option("--alg", alg, "algorithm preset");
        app.add_option("--alpha", alpha, "positive-regret discount exponent (number or inf)");
        app.add_option("--beta", beta, "negative-regret discount exponent (number, inf or -inf)");
        app.add_option("--gamma", gamma, "average-strategy discount exponent");
        app.add_option("--minimizer", minimizer, "rm, rm+, nh or optimistic-rm");
        app.add_flag("--optimistic", optimistic, "optimistic regret matching (lcfr, dcfr)");
        app.add_option("--iters", iters, "iterations for full-traversal algorithms");
        app.add_option("--eval-every", eval_every, "pow2 or N (iterations, or nodes for mccfr*)");
        app.add_option("--seed", seed, "base random seed");
        app.add_option("--seeds", seeds, "number of seeds for mccfr*");
        app.add_option("--period-nodes", period_nodes, "nodes touched per mccfr discount period");
        app.add_option("--max-nodes", max_nodes, "nodes-touched budget for mccfr*");
        app.add_option("--updates", updates, "alternating or simultaneous");
        app.add_option("--big-blind", big_blind, "report exploitability in mbb/g for this big blind");
        if (single_alg) {
            app.add_flag("--track-pure-switch", track_pure_switch,
                         "report the first iteration whose root strategy is pure");
            app.add_option("--out", out, "CSV path (default: stdout)");
        }
        app.add_option("--config", config, "JSON config file; explicit flags override it");
    }

    void apply(RunConfig& c) const {
        if (game) c.game = *game;
        if (alg) c.alg = *alg;
        if (alpha) c.alpha = parse_extended_real(*alpha, "alpha");
        if (beta) c.beta = parse_extended_real(*beta, "beta");
        if (gamma) c.gamma = *gamma;
        if (minimizer) c.minimizer = *minimizer;
        if (optimistic) c.optimistic = true;
        if (iters) c.iters = *iters;
        if (eval_every) c.eval = parse_eval_every(*eval_every);
        if (seed) c.seed = *seed;
        if (seeds) c.seeds = *seeds;
        if (period_nodes) c.period_nodes = *period_nodes;
        if (max_nodes) c.max_nodes = *max_nodes;
        if (updates) c.updates = parse_updates(*updates);
        if (out) c.out = *out;
        if (big_blind) c.big_blind = *big_blind;
        if (track_pure_switch) c.track_pure_switch = true;
    }
};

}  // namespace detail

/// Entry point of the regret_forge tool. Returns the process exit code.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Discounted CFR solver and benchmark harness", "regret_forge"};
    app.require_subcommand(1);

    detail::RunFlags solve_flags;
    auto* solve = app.add_subcommand("solve", "run one algorithm on one game");
    solve_flags.add_to(*solve, true);

    detail::RunFlags sweep_flags;
    std::optional<std::vector<std::string>> algs;
    std::optional<std::string> out_dir;
    auto* sweep = app.add_subcommand("sweep", "run several algorithms on one game");
    sweep_flags.add_to(*sweep, false);
    sweep->add_option("--algs", algs, "algorithm presets, comma separated")->delimiter(',');
    sweep->add_option("--out-dir", out_dir, "directory for the CSV files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kBadConfig;
    }

    try {
        if (solve->parsed()) {
            RunConfig config = solve_flags.config ? load_config_unchecked(*solve_flags.config) : RunConfig{};
            solve_flags.apply(config);
            return solve_command(std::move(config), out, err);
        }
        SweepConfig config = sweep_flags.config ? load_sweep_config(*sweep_flags.config) : SweepConfig{};
        sweep_flags.apply(config.base);
        if (algs) config.algs = *algs;
        if (out_dir) config.out_dir = *out_dir;
        return sweep_command(config, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    } catch (const GameError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidGame;
    }
}

}  // namespace regret_forge::bench
