#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regret_forge/errors.hpp"
#include "regret_forge/evaluator.hpp"
#include "regret_forge/flat_tree.hpp"
#include "regret_forge/game.hpp"
#include "regret_forge/regret_minimizers.hpp"

namespace regret_forge {

enum class Minimizer { rm, rm_plus, normal_hedge };
enum class UpdateMode { alternating, simultaneous };

inline std::string_view to_string(Minimizer m) {
    switch (m) {
        case Minimizer::rm: return "rm";
        case Minimizer::rm_plus: return "rm+";
        case Minimizer::normal_hedge: return "nh";
    }
    return "?";
}

/// When to evaluate the average strategy: powers of two or every N
/// iterations. The final iteration is always included.
struct EvalSchedule {
    enum class Kind { pow2, every };
    Kind kind = Kind::pow2;
    std::int64_t every = 1;

    bool includes(std::int64_t t, std::int64_t last) const {
        if (t == last) return true;
        if (kind == Kind::pow2) return t > 0 && (t & (t - 1)) == 0;
        return every > 0 && t % every == 0;
    }
};

struct SolveConfig {
    std::string name = "cfr";
    Minimizer minimizer = Minimizer::rm;
    bool optimistic = false;
    DiscountSchedule schedule = DiscountSchedule::none();
    std::int64_t iterations = 8192;
    UpdateMode updates = UpdateMode::alternating;
    EvalSchedule eval;
    // Shadow accumulators used by the bound checks.
    bool track_raw_regret = false;
    bool track_history = false;
    bool track_pure_switch = false;

    void validate() const {
        schedule.validate();
        if (iterations < 1) throw ConfigError("iterations must be >= 1");
        if (eval.kind == EvalSchedule::Kind::every && eval.every < 1) {
            throw ConfigError("evaluation interval must be >= 1");
        }
    }
};

/// Expands a named algorithm into its exact parameter tuple.
inline SolveConfig preset_config(std::string_view name) {
    SolveConfig c;
    c.name = std::string(name);
    if (name == "cfr") {
        c.minimizer = Minimizer::rm;
        c.schedule = DiscountSchedule::none();
    } else if (name == "cfr+") {
        c.minimizer = Minimizer::rm_plus;
        c.schedule = {kInf, -kInf, 2.0};
    } else if (name == "lcfr" || name == "optimistic-lcfr" || name == "nh-lcfr") {
        c.minimizer = name == "nh-lcfr" ? Minimizer::normal_hedge : Minimizer::rm;
        c.optimistic = name == "optimistic-lcfr";
        c.schedule = {1.0, 1.0, 1.0};
    } else if (name == "lcfr+") {
        c.minimizer = Minimizer::rm_plus;
        c.schedule = {1.0, -kInf, 1.0};
    } else if (name == "dcfr" || name == "optimistic-dcfr" || name == "nh-dcfr") {
        c.minimizer = name == "nh-dcfr" ? Minimizer::normal_hedge : Minimizer::rm;
        c.optimistic = name == "optimistic-dcfr";
        c.schedule = {1.5, 0.0, 2.0};
    } else if (name == "dcfr-prune") {
        c.minimizer = Minimizer::rm;
        c.schedule = {1.5, 0.5, 2.0};
    } else {
        throw ConfigError("unknown algorithm '" + std::string(name) +
                          "' (valid: cfr, cfr+, lcfr, lcfr+, dcfr, dcfr-prune, optimistic-lcfr, optimistic-dcfr, "
                          "nh-lcfr, nh-dcfr)");
    }
    return c;
}

inline constexpr std::array<std::string_view, 10> kCfrPresets = {
    "cfr", "cfr+", "lcfr", "lcfr+", "dcfr", "dcfr-prune", "optimistic-lcfr", "optimistic-dcfr", "nh-lcfr", "nh-dcfr"};

// ---------------------------------------------------------------------------
// Tables

/// Per-player flat arrays indexed by InfosetIndex::offset(p, I) + a.
struct RegretTables {
    std::array<std::vector<double>, 2> regret;         // R, or Q under floor-at-zero
    std::array<std::vector<double>, 2> strategy_sum;   // S(I, a)
    std::array<std::vector<double>, 2> instantaneous;  // r^t(I, a) of the latest traversal
    std::array<std::vector<double>, 2> current;        // sigma^t(I, a)
    std::array<std::vector<double>, 2> raw_regret;     // undiscounted, unfloored sum of r^t
    std::array<std::vector<double>, 2> uniform_sum;    // reach-weighted, unweighted-in-t sum of sigma^t
    std::array<double, 2> realized_value_sum{};
    std::int64_t history_iterations = 0;

    RegretTables() = default;

    explicit RegretTables(const InfosetIndex& index) {
        for (PlayerId p : kPlayers) {
            const auto n = index.slot_count(p);
            const auto s = seat(p);
            regret[s].assign(n, 0.0);
            strategy_sum[s].assign(n, 0.0);
            instantaneous[s].assign(n, 0.0);
            current[s].assign(n, 0.0);
            raw_regret[s].assign(n, 0.0);
            uniform_sum[s].assign(n, 0.0);
        }
    }

    static std::span<double> slice(std::vector<double>& v, const InfosetIndex& index, PlayerId p, int infoset) {
        return std::span<double>(v).subspan(index.offset(p, infoset), index.info(p, infoset).num_actions);
    }
    static std::span<const double> slice(const std::vector<double>& v, const InfosetIndex& index, PlayerId p,
                                         int infoset) {
        return std::span<const double>(v).subspan(index.offset(p, infoset), index.info(p, infoset).num_actions);
    }
};

/// Recomputes sigma for every infoset of `player` from its regrets.
inline void compute_current_strategies(const InfosetIndex& index, RegretTables& tables, PlayerId player,
                                       Minimizer minimizer, bool optimistic) {
    const auto s = seat(player);
    std::vector<double> scratch(index.max_actions());
    for (std::size_t i = 0; i < index.count(player); ++i) {
        const auto id = static_cast<int>(i);
        auto regrets = RegretTables::slice(tables.regret[s], index, player, id);
        auto out = RegretTables::slice(tables.current[s], index, player, id);
        std::span<const double> input = regrets;
        if (optimistic) {
            auto last = RegretTables::slice(tables.instantaneous[s], index, player, id);
            for (std::size_t a = 0; a < regrets.size(); ++a) scratch[a] = regrets[a] + last[a];
            input = std::span<const double>(scratch).first(regrets.size());
        }
        if (minimizer == Minimizer::normal_hedge) {
            nh_strategy(input, out);
        } else {
            rm_strategy(input, out);
        }
    }
}

struct TraversalStats {
    double root_value_p1 = 0.0;
    std::int64_t nodes_touched = 0;
};

namespace detail {

class CfrTraversal {
  public:
    CfrTraversal(const FlatTree& tree, RegretTables& tables, std::array<bool, 2> updating, bool track_history)
        : tree_(tree), tables_(tables), updating_(updating), track_history_(track_history) {}

    TraversalStats run() {
        TraversalStats stats;
        stats.root_value_p1 = visit(0, 1.0, 1.0, 1.0);
        stats.nodes_touched = nodes_;
        return stats;
    }

  private:
    double visit(std::uint32_t id, double reach1, double reach2, double chance) {
        ++nodes_;
        const auto& node = tree_.nodes[id];
        if (node.kind == NodeKind::terminal) return node.payoff_p1;

        const std::uint32_t first = node.first_child;
        const std::uint32_t n = node.num_children;
        if (node.kind == NodeKind::chance) {
            double v = 0.0;
            for (std::uint32_t a = 0; a < n; ++a) {
                const double p = tree_.chance_probs[first + a];
                if (p == 0.0) continue;
                v += p * visit(tree_.children[first + a], reach1, reach2, chance * p);
            }
            return v;
        }

        const auto s = seat(node.player);
        const double own = s == 0 ? reach1 : reach2;
        const double others = (s == 0 ? reach2 : reach1) * chance;
        const double* sigma = tables_.current[s].data() + node.slot;
        const bool updates_here = updating_[s];

        // Nothing below can change any updating player's tables.
        bool relevant = false;
        for (std::size_t q = 0; q < 2; ++q) {
            if (!updating_[q]) continue;
            const double rq = q == 0 ? reach1 : reach2;
            const double oq = (q == 0 ? reach2 : reach1) * chance;
            if (rq > 0.0 || oq > 0.0) relevant = true;
        }
        if (!relevant) return 0.0;

        double child_values[kMaxInlineActions];
        std::vector<double> spill;
        double* values = child_values;
        if (n > kMaxInlineActions) {
            spill.resize(n);
            values = spill.data();
        }

        double v = 0.0;
        for (std::uint32_t a = 0; a < n; ++a) {
            const double pa = sigma[a];
            const std::uint32_t child = tree_.children[first + a];
            values[a] = s == 0 ? visit(child, reach1 * pa, reach2, chance) : visit(child, reach1, reach2 * pa, chance);
            v += pa * values[a];
        }
        if (updates_here) {
            const double sign = s == 0 ? 1.0 : -1.0;
            double* inst = tables_.instantaneous[s].data() + node.slot;
            double* ssum = tables_.strategy_sum[s].data() + node.slot;
            for (std::uint32_t a = 0; a < n; ++a) {
                inst[a] += sign * others * (values[a] - v);
                ssum[a] += own * sigma[a];
            }
            if (track_history_) {
                double* usum = tables_.uniform_sum[s].data() + node.slot;
                for (std::uint32_t a = 0; a < n; ++a) usum[a] += own * sigma[a];
            }
        }
        return v;
    }

    static constexpr std::uint32_t kMaxInlineActions = 16;

    const FlatTree& tree_;
    RegretTables& tables_;
    std::array<bool, 2> updating_;
    bool track_history_;
    std::int64_t nodes_ = 0;
};

}  // namespace detail

/// One full traversal with the current strategies. For each updating player,
/// overwrites tables.instantaneous with the counterfactual (opponent-and-chance
/// reach weighted) instantaneous regrets and adds pi_i * sigma to S.
inline TraversalStats traverse_and_accumulate(const FlatTree& tree, RegretTables& tables,
                                              std::array<bool, 2> updating, bool track_history = false) {
    for (std::size_t s = 0; s < 2; ++s) {
        if (updating[s]) std::fill(tables.instantaneous[s].begin(), tables.instantaneous[s].end(), 0.0);
    }
    return detail::CfrTraversal(tree, tables, updating, track_history).run();
}

/// Folds the latest instantaneous regrets of `player` into its cumulative regrets.
inline void apply_regret_update(RegretTables& tables, PlayerId player, Minimizer minimizer, bool track_raw) {
    const auto s = seat(player);
    auto& regret = tables.regret[s];
    const auto& inst = tables.instantaneous[s];
    for (std::size_t k = 0; k < regret.size(); ++k) {
        if (!std::isfinite(inst[k])) throw NumericError("non-finite instantaneous regret");
        regret[k] += inst[k];
        if (minimizer == Minimizer::rm_plus && regret[k] < 0.0) regret[k] = 0.0;
    }
    if (track_raw) {
        auto& raw = tables.raw_regret[s];
        for (std::size_t k = 0; k < raw.size(); ++k) raw[k] += inst[k];
    }
}

/// Scales positive regrets, negative regrets and strategy sums by the
/// iteration-t multipliers of `schedule`.
inline void end_of_iteration_discount(RegretTables& tables, std::int64_t t, const DiscountSchedule& schedule) {
    const auto m = discount_multipliers(t, schedule);
    for (std::size_t s = 0; s < 2; ++s) {
        if (m.positive != 1.0 || m.negative != 1.0) {
            for (double& r : tables.regret[s]) r *= r > 0.0 ? m.positive : m.negative;
        }
        if (m.average != 1.0) {
            for (double& x : tables.strategy_sum[s]) x *= m.average;
        }
    }
}

namespace detail {

inline StrategyProfile normalize_sums(const InfosetIndex& index, const std::array<std::vector<double>, 2>& sums) {
    StrategyProfile profile(index);
    for (PlayerId p : kPlayers) {
        for (std::size_t i = 0; i < index.count(p); ++i) {
            const auto id = static_cast<int>(i);
            auto src = RegretTables::slice(sums[seat(p)], index, p, id);
            double total = 0.0;
            for (double x : src) total += x;
            if (total > 0.0) {
                auto& dst = profile.at(p, id);
                for (std::size_t a = 0; a < src.size(); ++a) dst[a] = src[a] / total;
            }
        }
    }
    return profile;
}

}  // namespace detail

/// Normalized S(I, .) per infoset; uniform where the infoset was never reached.
inline StrategyProfile average_strategy(const InfosetIndex& index, const RegretTables& tables) {
    return detail::normalize_sums(index, tables.strategy_sum);
}

inline StrategyProfile current_strategy_profile(const InfosetIndex& index, const RegretTables& tables) {
    StrategyProfile profile(index);
    for (PlayerId p : kPlayers) {
        for (std::size_t i = 0; i < index.count(p); ++i) {
            const auto id = static_cast<int>(i);
            auto src = RegretTables::slice(tables.current[seat(p)], index, p, id);
            profile.at(p, id).assign(src.begin(), src.end());
        }
    }
    return profile;
}

// ---------------------------------------------------------------------------
// Solver

struct PureSwitch {
    std::int64_t iteration = 0;
    int action = -1;
};

/// Full-traversal CFR family solver. Owns its tables; the game and index must
/// outlive it.
class CfrSolver {
  public:
    CfrSolver(const Game& game, const InfosetIndex& index, SolveConfig config)
        : game_(&game), index_(&index), config_(std::move(config)), tree_(game, index), tables_(index) {
        config_.validate();
    }

    /// Runs iteration t = iteration() + 1.
    void step() {
        const std::int64_t t = iteration_ + 1;
        try {
            refresh(PlayerId::p1);
            refresh(PlayerId::p2);
            track_pure_switch(t);
            if (config_.updates == UpdateMode::alternating) {
                for (PlayerId p : kPlayers) {
                    if (p == PlayerId::p2) refresh(PlayerId::p1);
                    const auto stats = traverse_and_accumulate(tree_, tables_, {p == PlayerId::p1, p == PlayerId::p2},
                                                               config_.track_history);
                    nodes_touched_ += stats.nodes_touched;
                    record_value(p, stats.root_value_p1);
                    apply_regret_update(tables_, p, config_.minimizer, config_.track_raw_regret);
                }
            } else {
                const auto stats = traverse_and_accumulate(tree_, tables_, {true, true}, config_.track_history);
                nodes_touched_ += stats.nodes_touched;
                for (PlayerId p : kPlayers) {
                    record_value(p, stats.root_value_p1);
                    apply_regret_update(tables_, p, config_.minimizer, config_.track_raw_regret);
                }
            }
            if (config_.track_history) ++tables_.history_iterations;
            end_of_iteration_discount(tables_, t, config_.schedule);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " at iteration " + std::to_string(t));
        }
        iteration_ = t;
        strategies_fresh_ = false;
    }

    std::int64_t iteration() const { return iteration_; }
    std::int64_t nodes_touched() const { return nodes_touched_; }
    const SolveConfig& config() const { return config_; }
    const RegretTables& tables() const { return tables_; }
    const InfosetIndex& index() const { return *index_; }
    const Game& game() const { return *game_; }
    const std::optional<PureSwitch>& first_pure_switch() const { return pure_switch_; }

    /// Strategies that iteration() + 1 will play.
    StrategyProfile current_profile() {
        if (!strategies_fresh_) {
            refresh(PlayerId::p1);
            refresh(PlayerId::p2);
            strategies_fresh_ = true;
        }
        return current_strategy_profile(*index_, tables_);
    }

    StrategyProfile average_profile() const { return average_strategy(*index_, tables_); }

    IterateHistorySummary history_summary() const {
        if (!config_.track_history) throw ContractViolation("history tracking is disabled for this solver");
        return {tables_.history_iterations, detail::normalize_sums(*index_, tables_.uniform_sum),
                tables_.realized_value_sum};
    }

    std::span<const double> regrets(PlayerId p, int infoset) const {
        return RegretTables::slice(tables_.regret[seat(p)], *index_, p, infoset);
    }
    std::span<const double> raw_regrets(PlayerId p, int infoset) const {
        return RegretTables::slice(tables_.raw_regret[seat(p)], *index_, p, infoset);
    }
    std::span<const double> strategy_sums(PlayerId p, int infoset) const {
        return RegretTables::slice(tables_.strategy_sum[seat(p)], *index_, p, infoset);
    }
    std::span<const double> last_instantaneous(PlayerId p, int infoset) const {
        return RegretTables::slice(tables_.instantaneous[seat(p)], *index_, p, infoset);
    }

  private:
    void refresh(PlayerId p) {
        compute_current_strategies(*index_, tables_, p, config_.minimizer, config_.optimistic);
    }

    void record_value(PlayerId p, double root_value_p1) {
        if (!std::isfinite(root_value_p1)) throw NumericError("non-finite root value");
        if (config_.track_history) tables_.realized_value_sum[seat(p)] += p == PlayerId::p1 ? root_value_p1 : -root_value_p1;
    }

    // First iteration whose P1 root-infoset strategy is pure.
    void track_pure_switch(std::int64_t t) {
        if (!config_.track_pure_switch || pure_switch_ || index_->count(PlayerId::p1) == 0) return;
        auto sigma = RegretTables::slice(tables_.current[0], *index_, PlayerId::p1, 0);
        for (std::size_t a = 0; a < sigma.size(); ++a) {
            if (sigma[a] == 1.0) {
                pure_switch_ = PureSwitch{t, static_cast<int>(a)};
                return;
            }
        }
    }

    const Game* game_;
    const InfosetIndex* index_;
    SolveConfig config_;
    FlatTree tree_;
    RegretTables tables_;
    std::int64_t iteration_ = 0;
    std::int64_t nodes_touched_ = 0;
    bool strategies_fresh_ = false;
    std::optional<PureSwitch> pure_switch_;
};

struct SolveResult {
    StrategyProfile average;
    std::vector<ConvergenceRecord> records;
    std::optional<PureSwitch> first_pure_switch;
};

inline ConvergenceRecord evaluate_checkpoint(const Game& game, const InfosetIndex& index, const StrategyProfile& avg,
                                             std::int64_t iteration, std::int64_t nodes, double elapsed_ms) {
    const auto e = measure_exploitability(game, index, avg);
    return {iteration, nodes, elapsed_ms, e.br_vs_p1, e.br_vs_p2, e.average()};
}

/// Runs config.iterations iterations, recording exploitability of the
/// weighted average profile at every scheduled checkpoint. `observer` is
/// called after each iteration.
inline SolveResult run(const Game& game, const InfosetIndex& index, const SolveConfig& config,
                       const std::function<void(const CfrSolver&)>& observer = {}) {
    CfrSolver solver(game, index, config);
    SolveResult result;
    const auto start = std::chrono::steady_clock::now();
    for (std::int64_t t = 1; t <= config.iterations; ++t) {
        solver.step();
        if (observer) observer(solver);
        if (config.eval.includes(t, config.iterations)) {
            const double ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            result.records.push_back(
                evaluate_checkpoint(game, index, solver.average_profile(), t, solver.nodes_touched(), ms));
        }
    }
    result.average = solver.average_profile();
    result.first_pure_switch = solver.first_pure_switch();
    return result;
}

}  // namespace regret_forge
