#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regret_forge/cfr.hpp"
#include "regret_forge/errors.hpp"
#include "regret_forge/evaluator.hpp"
#include "regret_forge/flat_tree.hpp"
#include "regret_forge/game.hpp"
#include "regret_forge/regret_minimizers.hpp"
#include "regret_forge/rng.hpp"

namespace regret_forge {

enum class MccfrVariant { vanilla, discounted, initial_discount };

inline std::string_view to_string(MccfrVariant v) {
    switch (v) {
        case MccfrVariant::vanilla: return "mccfr";
        case MccfrVariant::discounted: return "mccfr-discount";
        case MccfrVariant::initial_discount: return "mccfr-initial-discount";
    }
    return "?";
}

inline constexpr std::array<std::string_view, 3> kMccfrPresets = {"mccfr", "mccfr-discount",
                                                                  "mccfr-initial-discount"};

inline std::optional<MccfrVariant> parse_mccfr_variant(std::string_view name) {
    if (name == "mccfr") return MccfrVariant::vanilla;
    if (name == "mccfr-discount") return MccfrVariant::discounted;
    if (name == "mccfr-initial-discount") return MccfrVariant::initial_discount;
    return std::nullopt;
}

inline constexpr double kInitialDiscountFactor = 0.1;

struct MccfrConfig {
    MccfrVariant variant = MccfrVariant::vanilla;
    std::uint64_t seed = 0;
    std::int64_t period_nodes = 100'000;
    std::int64_t max_nodes = 10'000'000;
    /// Checkpoints at nodes-touched thresholds: powers of two or every N nodes.
    EvalSchedule eval;

    void validate() const {
        if (period_nodes < 1) throw ConfigError("period length must be >= 1 node");
        if (max_nodes < 1) throw ConfigError("node budget must be >= 1");
        if (eval.kind == EvalSchedule::Kind::every && eval.every < 1) {
            throw ConfigError("evaluation interval must be >= 1 node");
        }
    }
};

/// Multiplies every regret and strategy-sum entry by `factor`.
inline void scale_accumulators(RegretTables& tables, double factor) {
    for (std::size_t s = 0; s < 2; ++s) {
        for (double& r : tables.regret[s]) r *= factor;
        for (double& x : tables.strategy_sum[s]) x *= factor;
    }
}

/// External-sampling Monte Carlo CFR with plain regret matching and
/// nodes-touched period discounting.
class MccfrSolver {
  public:
    MccfrSolver(const Game& game, const InfosetIndex& index, MccfrConfig config)
        : game_(&game), index_(&index), config_(config), tree_(game, index), tables_(index), rng_(config.seed) {
        config_.validate();
        scratch_.resize(index.max_actions() * (max_depth(0) + 1));
    }

    /// One sampled traversal for `player`, followed by any discount events
    /// for periods that ended during it. Returns the sampled root value.
    double traverse(PlayerId player) {
        const double v = sample(player);
        apply_period_discounts();
        return v;
    }

    /// The sampled traversal alone, leaving period discounts pending.
    double sample(PlayerId player) {
        updating_ = player;
        const double v = visit(0, 0);
        if (!std::isfinite(v)) throw NumericError("non-finite sampled value after " + std::to_string(nodes_) + " nodes");
        return v;
    }

    /// Applies the multiplier of every period that has ended but not yet
    /// been discounted.
    void apply_period_discounts() {
        const std::int64_t ended = nodes_ / config_.period_nodes;
        while (periods_ < ended) {
            ++periods_;
            if (config_.variant == MccfrVariant::discounted) {
                const auto n = static_cast<double>(periods_);
                scale_accumulators(tables_, n / (n + 1.0));
            } else if (config_.variant == MccfrVariant::initial_discount && periods_ == 1) {
                scale_accumulators(tables_, kInitialDiscountFactor);
            }
        }
    }

    void iterate() {
        traverse(PlayerId::p1);
        traverse(PlayerId::p2);
        ++iteration_;
    }

    std::int64_t nodes_touched() const { return nodes_; }
    std::int64_t iteration() const { return iteration_; }
    std::int64_t periods_completed() const { return periods_; }
    const MccfrConfig& config() const { return config_; }
    const RegretTables& tables() const { return tables_; }
    Rng& rng() { return rng_; }

    std::span<const double> regrets(PlayerId p, int infoset) const {
        return RegretTables::slice(tables_.regret[seat(p)], *index_, p, infoset);
    }
    std::span<const double> strategy_sums(PlayerId p, int infoset) const {
        return RegretTables::slice(tables_.strategy_sum[seat(p)], *index_, p, infoset);
    }

    /// Regret-matching strategy every infoset would play right now.
    StrategyProfile current_profile() const {
        StrategyProfile profile(*index_);
        for (PlayerId p : kPlayers) {
            for (std::size_t i = 0; i < index_->count(p); ++i) {
                rm_strategy(regrets(p, static_cast<int>(i)), profile.at(p, static_cast<int>(i)));
            }
        }
        return profile;
    }

    StrategyProfile average_profile() const { return average_strategy(*index_, tables_); }

  private:
    std::size_t max_depth(std::uint32_t id) const {
        const auto& node = tree_.nodes[id];
        std::size_t d = 0;
        for (std::uint32_t a = 0; a < node.num_children; ++a) {
            d = std::max(d, 1 + max_depth(tree_.children[node.first_child + a]));
        }
        return d;
    }

    double visit(std::uint32_t id, std::size_t depth) {
        ++nodes_;
        const auto& node = tree_.nodes[id];
        const double sign = updating_ == PlayerId::p1 ? 1.0 : -1.0;
        if (node.kind == NodeKind::terminal) return sign * node.payoff_p1;

        const std::uint32_t first = node.first_child;
        const std::uint32_t n = node.num_children;
        if (node.kind == NodeKind::chance) {
            const auto a = rng_.sample(std::span<const double>(tree_.chance_probs).subspan(first, n));
            return visit(tree_.children[first + a], depth + 1);
        }

        const auto s = seat(node.player);
        double* regret = tables_.regret[s].data() + node.slot;
        double* sigma = scratch_.data() + depth * index_->max_actions();
        rm_strategy(std::span<const double>(regret, n), std::span<double>(sigma, n));

        if (node.player != updating_) {
            // Opponent reach is realized by sampling, so adding sigma unweighted
            // keeps each iterate's weight proportional to its own reach.
            double* ssum = tables_.strategy_sum[s].data() + node.slot;
            for (std::uint32_t a = 0; a < n; ++a) ssum[a] += sigma[a];
            const auto a = rng_.sample(std::span<const double>(sigma, n));
            return visit(tree_.children[first + a], depth + 1);
        }

        double values[kMaxInlineActions];
        std::vector<double> spill;
        double* v_a = values;
        if (n > kMaxInlineActions) {
            spill.resize(n);
            v_a = spill.data();
        }
        double v = 0.0;
        for (std::uint32_t a = 0; a < n; ++a) {
            v_a[a] = visit(tree_.children[first + a], depth + 1);
            v += sigma[a] * v_a[a];
        }
        for (std::uint32_t a = 0; a < n; ++a) regret[a] += v_a[a] - v;
        return v;
    }

    static constexpr std::uint32_t kMaxInlineActions = 16;

    const Game* game_;
    const InfosetIndex* index_;
    MccfrConfig config_;
    FlatTree tree_;
    RegretTables tables_;
    Rng rng_;
    std::vector<double> scratch_;
    PlayerId updating_ = PlayerId::p1;
    std::int64_t nodes_ = 0;
    std::int64_t iteration_ = 0;
    std::int64_t periods_ = 0;
};

struct MccfrResult {
    StrategyProfile average;
    std::vector<ConvergenceRecord> records;
    /// Nodes-touched threshold that triggered each record; equal across runs
    /// sharing a schedule, so records of different seeds can be matched.
    std::vector<std::int64_t> thresholds;
};

namespace detail {

inline std::int64_t next_threshold(const EvalSchedule& eval, std::int64_t after) {
    if (eval.kind == EvalSchedule::Kind::every) return (after / eval.every + 1) * eval.every;
    std::int64_t t = 1;
    while (t <= after) t <<= 1;
    return t;
}

}  // namespace detail

/// Alternating sampled iterations until config.max_nodes nodes are touched.
/// A checkpoint is recorded at the end of the first iteration that reaches
/// each threshold, and always at the end of the budget.
inline MccfrResult run_mccfr(const Game& game, const InfosetIndex& index, const MccfrConfig& config) {
    MccfrSolver solver(game, index, config);
    MccfrResult result;
    const auto start = std::chrono::steady_clock::now();
    std::int64_t threshold = std::min(detail::next_threshold(config.eval, 0), config.max_nodes);
    while (true) {
        solver.iterate();
        const std::int64_t nodes = solver.nodes_touched();
        const bool done = nodes >= config.max_nodes;
        if (nodes >= threshold || done) {
            std::int64_t reached = threshold;
            while (true) {
                const auto next = std::min(detail::next_threshold(config.eval, reached), config.max_nodes);
                if (next > nodes || next == reached) break;
                reached = next;
            }
            const double ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            result.records.push_back(
                evaluate_checkpoint(game, index, solver.average_profile(), solver.iteration(), nodes, ms));
            result.thresholds.push_back(done ? config.max_nodes : reached);
            threshold = std::min(detail::next_threshold(config.eval, reached), config.max_nodes);
        }
        if (done) break;
    }
    result.average = solver.average_profile();
    return result;
}

}  // namespace regret_forge
