#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "regret_forge/errors.hpp"
#include "regret_forge/game.hpp"

namespace regret_forge {

/// One evaluation checkpoint of a solve run.
struct ConvergenceRecord {
    std::int64_t iteration = 0;
    std::int64_t nodes_touched = 0;
    double elapsed_ms = 0.0;
    double br_vs_p1 = 0.0;  // best-response value of P2 against P1's strategy
    double br_vs_p2 = 0.0;  // best-response value of P1 against P2's strategy
    double exploit_avg = 0.0;
};

struct BestResponse {
    std::vector<int> actions;  // chosen action per infoset of the responding player
    double value = 0.0;
};

namespace detail {

class BestResponseSolver {
  public:
    BestResponseSolver(const Game& game, const InfosetIndex& index, const StrategyProfile& profile, PlayerId player)
        : game_(game), index_(index), profile_(profile), player_(player),
          reach_(game.size(), 0.0), memo_(game.size(), 0.0), done_(game.size(), 0),
          choice_(index.count(player), -1) {}

    BestResponse solve() {
        compute_reach();
        BestResponse out;
        out.value = value(game_.root());
        for (std::size_t i = 0; i < choice_.size(); ++i) {
            if (choice_[i] < 0) decide(static_cast<int>(i));
        }
        out.actions = choice_;
        return out;
    }

  private:
    // Opponent-and-chance reach of every node.
    void compute_reach() {
        std::vector<NodeId> stack{game_.root()};
        reach_[static_cast<std::size_t>(game_.root())] = 1.0;
        while (!stack.empty()) {
            const NodeId id = stack.back();
            stack.pop_back();
            const Node& node = game_.node(id);
            const double r = reach_[static_cast<std::size_t>(id)];
            for (std::size_t a = 0; a < node.children.size(); ++a) {
                double p = 1.0;
                if (node.kind == NodeKind::chance) {
                    p = node.chance_probs[a];
                } else if (node.player != player_) {
                    p = profile_.at(node.player, index_.infoset_of(id))[a];
                }
                reach_[static_cast<std::size_t>(node.children[a])] = r * p;
                stack.push_back(node.children[a]);
            }
        }
    }

    // Reach-weighted value of the subtree under the best response.
    double value(NodeId id) {
        const auto k = static_cast<std::size_t>(id);
        if (done_[k]) return memo_[k];
        const Node& node = game_.node(id);
        double v = 0.0;
        if (node.is_terminal()) {
            v = reach_[k] * node.payoff[seat(player_)];
        } else if (node.kind == NodeKind::decision && node.player == player_) {
            v = value(node.children[static_cast<std::size_t>(decide(index_.infoset_of(id)))]);
        } else {
            for (NodeId c : node.children) v += value(c);
        }
        done_[k] = 1;
        memo_[k] = v;
        return v;
    }

    int decide(int infoset) {
        auto& chosen = choice_[static_cast<std::size_t>(infoset)];
        if (chosen >= 0) return chosen;
        const auto& info = index_.info(player_, infoset);
        int best = 0;
        double best_value = -kHuge;
        for (std::size_t a = 0; a < info.num_actions; ++a) {
            double q = 0.0;
            for (NodeId h : info.members) q += value(game_.node(h).children[a]);
            if (q > best_value) {
                best_value = q;
                best = static_cast<int>(a);
            }
        }
        chosen = best;
        return best;
    }

    static constexpr double kHuge = 1e300;

    const Game& game_;
    const InfosetIndex& index_;
    const StrategyProfile& profile_;
    PlayerId player_;
    std::vector<double> reach_;
    std::vector<double> memo_;
    std::vector<std::uint8_t> done_;
    std::vector<int> choice_;
};

}  // namespace detail

/// Exact best response of `player` to the other player's strategy in
/// `profile`. Ties go to the lowest action index.
inline BestResponse best_response(const Game& game, const InfosetIndex& index, const StrategyProfile& profile,
                                  PlayerId player) {
    if (player == PlayerId::chance) throw ContractViolation("best_response: chance cannot respond");
    return detail::BestResponseSolver(game, index, profile, player).solve();
}

/// Replaces `player`'s part of `profile` with a pure strategy.
inline StrategyProfile with_pure_strategy(StrategyProfile profile, const InfosetIndex& index, PlayerId player,
                                          const std::vector<int>& actions) {
    for (std::size_t i = 0; i < index.count(player); ++i) {
        auto& v = profile.at(player, static_cast<int>(i));
        std::fill(v.begin(), v.end(), 0.0);
        v[static_cast<std::size_t>(actions[i])] = 1.0;
    }
    return profile;
}

struct Exploitability {
    double br_vs_p1 = 0.0;
    double br_vs_p2 = 0.0;
    /// Half the Nash gap: the mean of the two players' exploitabilities.
    double average() const { return 0.5 * (br_vs_p1 + br_vs_p2); }
};

inline Exploitability measure_exploitability(const Game& game, const InfosetIndex& index,
                                             const StrategyProfile& profile) {
    return {best_response(game, index, profile, PlayerId::p2).value,
            best_response(game, index, profile, PlayerId::p1).value};
}

inline double exploitability(const Game& game, const InfosetIndex& index, const StrategyProfile& profile) {
    return measure_exploitability(game, index, profile).average();
}

/// What overall regret needs from a run: the reach-weighted uniform average
/// of the iterates and the running sum of realized values u_i(sigma^t).
struct IterateHistorySummary {
    std::int64_t iterations = 0;
    StrategyProfile uniform_average;
    std::array<double, 2> realized_value_sum{};
};

/// R_i^T = max over sigma' of sum_t u_i(sigma', sigma_-i^t) - sum_t u_i(sigma^t).
inline double overall_regret(const Game& game, const InfosetIndex& index, const IterateHistorySummary& summary,
                             PlayerId player) {
    if (summary.iterations <= 0 || !is_valid_profile(summary.uniform_average, index, 1e-6)) {
        throw ContractViolation("overall_regret: iterate history summary missing");
    }
    const double br = best_response(game, index, summary.uniform_average, player).value;
    return static_cast<double>(summary.iterations) * br - summary.realized_value_sum[seat(player)];
}

/// Chips to milli-big-blinds.
inline double to_mbb(double value_chips, double big_blind) {
    if (!(big_blind > 0.0)) throw ContractViolation("to_mbb: big blind must be positive");
    return value_chips / big_blind * 1000.0;
}

}  // namespace regret_forge
