#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "regret_forge/bench/config.hpp"
#include "regret_forge/bench/csv.hpp"
#include "regret_forge/cfr.hpp"
#include "regret_forge/errors.hpp"
#include "regret_forge/game.hpp"
#include "regret_forge/mccfr.hpp"
#include "regret_forge/rng.hpp"

namespace regret_forge::bench {

enum ExitCode : int { kOk = 0, kBadConfig = 1, kInvalidGame = 2, kNumericFailure = 3 };

/// A game ready to solve: validated tree plus its infoset index.
struct LoadedGame {
    Game game;
    InfosetIndex index;
};

/// Builds and validates `name`. Throws GameError on a malformed tree.
inline LoadedGame load_game(const std::string& name) {
    Game game = make_game(name);
    const auto report = validate_game(game);
    if (!report.ok()) throw GameError("game '" + name + "' failed validation:\n" + report.summary());
    InfosetIndex index = enumerate_infosets(game);
    return {std::move(game), std::move(index)};
}

/// One run of one algorithm (and one seed, for sampled algorithms).
struct RunOutcome {
    std::string run_id;
    std::vector<CsvRow> rows;
    std::vector<std::int64_t> thresholds;
    std::optional<PureSwitch> pure_switch;
    int exit_code = kOk;
    std::string error;
};

inline std::string run_id_for(const std::string& alg, int seeds, int k) {
    return seeds > 1 ? alg + "-seed" + std::to_string(k) : alg;
}

/// Executes a finalized config. Seed `k` of a multi-seed run uses
/// derive_seed(config.seed, k); a single run uses config.seed unchanged.
inline RunOutcome execute_run(const LoadedGame& g, const RunConfig& config, int k = 0) {
    RunOutcome out;
    out.run_id = run_id_for(config.alg, config.seeds, k);
    try {
        EngineConfig engine = resolve(config);
        auto to_rows = [&](const std::vector<ConvergenceRecord>& records) {
            for (const auto& r : records) {
                out.rows.push_back({out.run_id, config.game, config.alg, scale_record(r, config.big_blind)});
            }
        };
        if (engine.kind == EngineKind::cfr) {
            const auto result = run(g.game, g.index, engine.cfr);
            to_rows(result.records);
            out.pure_switch = result.first_pure_switch;
        } else {
            if (config.seeds > 1) engine.mccfr.seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));
            const auto result = run_mccfr(g.game, g.index, engine.mccfr);
            to_rows(result.records);
            out.thresholds = result.thresholds;
        }
    } catch (const ConfigError& e) {
        out.exit_code = kBadConfig;
        out.error = e.what();
    } catch (const NumericError& e) {
        out.exit_code = kNumericFailure;
        out.error = e.what();
    }
    return out;
}

/// Seed-averaged curve over the checkpoints every seed recorded.
inline std::vector<CsvRow> mean_curve(const std::vector<const RunOutcome*>& runs, const std::string& game,
                                      const std::string& alg) {
    std::map<std::int64_t, std::vector<const CsvRow*>> by_threshold;
    for (const auto* run : runs) {
        for (std::size_t i = 0; i < run->rows.size(); ++i) by_threshold[run->thresholds[i]].push_back(&run->rows[i]);
    }
    std::vector<CsvRow> mean;
    for (const auto& [threshold, rows] : by_threshold) {
        if (rows.size() != runs.size()) continue;
        const auto n = static_cast<double>(rows.size());
        ConvergenceRecord m{0, threshold, 0.0, 0.0, 0.0, 0.0};
        double iters = 0.0;
        for (const auto* row : rows) {
            iters += static_cast<double>(row->record.iteration);
            m.elapsed_ms += row->record.elapsed_ms / n;
            m.br_vs_p1 += row->record.br_vs_p1 / n;
            m.br_vs_p2 += row->record.br_vs_p2 / n;
            m.exploit_avg += row->record.exploit_avg / n;
        }
        m.iteration = static_cast<std::int64_t>(iters / n);
        mean.push_back({alg + "-mean", game, alg, m});
    }
    return mean;
}

/// Worker count for sweeps: REGRET_FORGE_THREADS if set, else the hardware.
inline unsigned sweep_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("REGRET_FORGE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) n = static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return n;
}

/// Runs `jobs(i)` for i in [0, n) on up to `threads` workers.
template <class Job>
void parallel_for(std::size_t n, unsigned threads, Job&& job) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) job(i);
    };
    const auto count = std::min<std::size_t>(threads, n);
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < count; ++w) pool.emplace_back(worker);
    worker();
}

namespace detail {

inline void print_final(std::ostream& out, const RunOutcome& run, const RunConfig& config) {
    if (run.rows.empty()) return;
    const auto& r = run.rows.back().record;
    out << run.run_id << ": iteration " << r.iteration << ", nodes " << r.nodes_touched << ", exploitability "
        << format_real(r.exploit_avg) << (config.big_blind ? " mbb/g" : "") << '\n';
}

inline int worst_exit(const std::vector<RunOutcome>& runs) {
    int code = kOk;
    for (const auto& r : runs) code = std::max(code, r.exit_code);
    return code;
}

}  // namespace detail

/// One solve. Writes the CSV to config.out, or to `out` when no path is set
/// (the summary then goes to `err` so stdout stays a clean CSV).
inline int solve_command(RunConfig config, std::ostream& out, std::ostream& err) {
    std::optional<LoadedGame> loaded;
    try {
        finalize(config);
        loaded.emplace(load_game(config.game));
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    } catch (const GameError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidGame;
    }
    const LoadedGame& g = *loaded;

    std::vector<RunOutcome> runs;
    const int seeds = is_mccfr(config.alg) ? config.seeds : 1;
    if (seeds != config.seeds) config.seeds = 1;
    for (int k = 0; k < seeds; ++k) runs.push_back(execute_run(g, config, k));

    std::vector<CsvRow> rows;
    for (const auto& r : runs) {
        if (r.exit_code != kOk) {
            err << "error: " << r.run_id << ": " << r.error << '\n';
            continue;
        }
        rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    }
    std::ostream& summary = config.out.empty() ? err : out;
    try {
        if (config.out.empty()) {
            write_csv(out, rows);
        } else {
            write_csv_file(config.out, rows);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    }
    for (const auto& r : runs) {
        if (r.exit_code == kOk) detail::print_final(summary, r, config);
        if (r.pure_switch) {
            summary << r.run_id << ": first pure strategy at iteration " << r.pure_switch->iteration << " (action "
                    << r.pure_switch->action << ")\n";
        } else if (config.track_pure_switch && r.exit_code == kOk) {
            summary << r.run_id << ": strategy never became pure\n";
        }
    }
    if (runs.size() > 1) {
        std::vector<const RunOutcome*> ok;
        for (const auto& r : runs) if (r.exit_code == kOk) ok.push_back(&r);
        const auto mean = mean_curve(ok, config.game, config.alg);
        if (!mean.empty()) {
            summary << config.alg << ": mean exploitability over " << ok.size() << " seeds at " << mean.back().record.nodes_touched
                    << " nodes " << format_real(mean.back().record.exploit_avg) << '\n';
        }
    }
    return detail::worst_exit(runs);
}

/// Runs every algorithm of the sweep on one game. Writes <run_id>.csv per
/// run, merged.csv with every row, and <alg>-mean.csv for multi-seed
/// sampled algorithms.
inline int sweep_command(const SweepConfig& sweep, std::ostream& out, std::ostream& err) {
    if (sweep.algs.empty()) {
        err << "error: sweep needs at least one algorithm (valid: " << known_algs() << ")\n";
        return kBadConfig;
    }
    std::vector<RunConfig> configs;
    std::optional<LoadedGame> loaded;
    try {
        for (const auto& alg : sweep.algs) {
            RunConfig c = sweep.base;
            c.alg = alg;
            c.out.clear();
            if (!is_mccfr(alg)) c.seeds = 1;
            finalize(c);
            configs.push_back(std::move(c));
        }
        loaded.emplace(load_game(sweep.base.game));
        std::filesystem::create_directories(sweep.out_dir);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    } catch (const GameError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidGame;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    }
    const LoadedGame& g = *loaded;

    struct Job {
        std::size_t config;
        int seed;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        for (int k = 0; k < configs[c].seeds; ++k) jobs.push_back({c, k});
    }
    std::vector<RunOutcome> runs(jobs.size());
    const std::filesystem::path dir(sweep.out_dir);
    parallel_for(jobs.size(), sweep_threads(), [&](std::size_t i) {
        runs[i] = execute_run(g, configs[jobs[i].config], jobs[i].seed);
        if (runs[i].exit_code != kOk) return;
        try {
            write_csv_file((dir / (runs[i].run_id + ".csv")).string(), runs[i].rows);
        } catch (const ConfigError& e) {
            runs[i].exit_code = kBadConfig;
            runs[i].error = e.what();
        }
    });

    std::vector<CsvRow> merged;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        if (r.exit_code != kOk) {
            err << "error: " << r.run_id << ": " << r.error << '\n';
            continue;
        }
        merged.insert(merged.end(), r.rows.begin(), r.rows.end());
        detail::print_final(out, r, configs[jobs[i].config]);
    }
    try {
        write_csv_file((dir / "merged.csv").string(), merged);
        for (std::size_t c = 0; c < configs.size(); ++c) {
            if (configs[c].seeds < 2) continue;
            std::vector<const RunOutcome*> ok;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (jobs[i].config == c && runs[i].exit_code == kOk) ok.push_back(&runs[i]);
            }
            if (ok.empty()) continue;
            const auto mean = mean_curve(ok, configs[c].game, configs[c].alg);
            write_csv_file((dir / (configs[c].alg + "-mean.csv")).string(), mean);
            if (!mean.empty()) {
                out << configs[c].alg << "-mean: nodes " << mean.back().record.nodes_touched << ", exploitability "
                    << format_real(mean.back().record.exploit_avg) << '\n';
            }
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kBadConfig;
    }
    return detail::worst_exit(runs);
}

}  // namespace regret_forge::bench
