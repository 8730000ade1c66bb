#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "regret_forge/errors.hpp"

namespace regret_forge {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class PlayerId : std::uint8_t { p1 = 0, p2 = 1, chance = 2 };

inline constexpr std::array<PlayerId, 2> kPlayers = {PlayerId::p1, PlayerId::p2};

constexpr std::size_t seat(PlayerId p) { return static_cast<std::size_t>(p); }

constexpr PlayerId opponent_of(PlayerId p) {
    return p == PlayerId::p1 ? PlayerId::p2 : PlayerId::p1;
}

inline std::string_view to_string(PlayerId p) {
    switch (p) {
        case PlayerId::p1: return "P1";
        case PlayerId::p2: return "P2";
        case PlayerId::chance: return "chance";
    }
    return "?";
}

enum class NodeKind : std::uint8_t { decision, chance, terminal };

struct Node {
    NodeKind kind = NodeKind::terminal;
    PlayerId player = PlayerId::chance;
    // Observation history of the acting player; equal keys mean one infoset.
    std::string infoset_key;
    std::vector<std::string> actions;
    std::vector<NodeId> children;
    std::vector<double> chance_probs;
    std::array<double, 2> payoff{};

    std::size_t num_actions() const { return children.size(); }
    bool is_terminal() const { return kind == NodeKind::terminal; }
};

class Game;

/// Incrementally assembles a game tree. The first node added is the root.
class GameBuilder {
  public:
    NodeId add_decision(PlayerId player, std::string infoset_key, std::vector<std::string> actions) {
        Node n;
        n.kind = NodeKind::decision;
        n.player = player;
        n.infoset_key = std::move(infoset_key);
        n.children.assign(actions.size(), kNoNode);
        n.actions = std::move(actions);
        return push(std::move(n));
    }

    NodeId add_chance(std::vector<std::string> outcomes, std::vector<double> probs) {
        Node n;
        n.kind = NodeKind::chance;
        n.player = PlayerId::chance;
        n.children.assign(outcomes.size(), kNoNode);
        n.actions = std::move(outcomes);
        n.chance_probs = std::move(probs);
        return push(std::move(n));
    }

    NodeId add_terminal(double payoff_p1) { return add_terminal(payoff_p1, -payoff_p1); }

    NodeId add_terminal(double payoff_p1, double payoff_p2) {
        Node n;
        n.kind = NodeKind::terminal;
        n.payoff = {payoff_p1, payoff_p2};
        return push(std::move(n));
    }

    void set_child(NodeId parent, std::size_t action, NodeId child) {
        auto& n = nodes_.at(static_cast<std::size_t>(parent));
        if (action >= n.children.size()) {
            throw GameError("set_child: action index out of range");
        }
        n.children[action] = child;
    }

    std::size_t size() const { return nodes_.size(); }

    Game build(std::string name) &&;

  private:
    NodeId push(Node n) {
        nodes_.push_back(std::move(n));
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    std::vector<Node> nodes_;
};

/// Immutable extensive-form game for two players plus chance. Root is node 0.
class Game {
  public:
    Game() = default;

    const std::string& name() const { return name_; }
    NodeId root() const { return 0; }
    std::size_t size() const { return nodes_.size(); }
    const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    std::span<const Node> nodes() const { return nodes_; }

    /// max u_i(z) - min u_i(z) over terminals.
    double payoff_range(PlayerId p) const {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& n : nodes_) {
            if (!n.is_terminal()) continue;
            lo = std::min(lo, n.payoff[seat(p)]);
            hi = std::max(hi, n.payoff[seat(p)]);
        }
        return hi >= lo ? hi - lo : 0.0;
    }

    /// Delta: the larger of the two players' payoff ranges.
    double payoff_range() const {
        return std::max(payoff_range(PlayerId::p1), payoff_range(PlayerId::p2));
    }

  private:
    friend class GameBuilder;
    std::string name_;
    std::vector<Node> nodes_;
};

inline Game GameBuilder::build(std::string name) && {
    Game g;
    g.name_ = std::move(name);
    g.nodes_ = std::move(nodes_);
    return g;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
    empty_game,
    dangling_child,
    shared_or_cyclic,
    unreachable_node,
    no_actions,
    action_name_count,
    bad_chance_probs,
    probability_sum,
    nonfinite_payoff,
    zero_sum,
    infoset_player_mismatch,
    infoset_action_mismatch,
};

struct Violation {
    ViolationKind kind;
    std::string path;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(ViolationKind k) const {
        return std::any_of(violations.begin(), violations.end(),
                           [k](const Violation& v) { return v.kind == k; });
    }
    std::string summary() const {
        std::string out;
        for (const auto& v : violations) {
            out += v.path.empty() ? std::string("/") : v.path;
            out += ": ";
            out += v.message;
            out += '\n';
        }
        return out;
    }
};

/// Checks every structural invariant of a game. Never throws on malformed input.
inline ValidationReport validate_game(const Game& game) {
    ValidationReport report;
    const auto n = static_cast<NodeId>(game.size());
    if (n == 0) {
        report.violations.push_back({ViolationKind::empty_game, "", "game has no nodes"});
        return report;
    }

    struct KeyInfo {
        PlayerId player;
        std::vector<std::string> actions;
        std::string first_path;
    };
    std::unordered_map<std::string, KeyInfo> keys;
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);

    auto add = [&](ViolationKind k, const std::string& path, std::string msg) {
        report.violations.push_back({k, path, std::move(msg)});
    };

    // Explicit stack keeps validation safe on adversarially deep or cyclic input.
    std::vector<std::pair<NodeId, std::string>> stack{{0, ""}};
    while (!stack.empty()) {
        auto [id, path] = std::move(stack.back());
        stack.pop_back();
        auto& mark = seen[static_cast<std::size_t>(id)];
        if (mark) {
            add(ViolationKind::shared_or_cyclic, path, "node reached twice (not a tree)");
            continue;
        }
        mark = 1;
        const Node& node = game.node(id);

        if (node.is_terminal()) {
            if (!std::isfinite(node.payoff[0]) || !std::isfinite(node.payoff[1])) {
                add(ViolationKind::nonfinite_payoff, path, "terminal payoff is not finite");
            } else if (node.payoff[0] + node.payoff[1] != 0.0) {
                add(ViolationKind::zero_sum, path,
                    "u1 + u2 = " + std::to_string(node.payoff[0] + node.payoff[1]) + " != 0");
            }
            continue;
        }
        if (node.children.empty()) {
            add(ViolationKind::no_actions, path, "non-terminal node has no actions");
            continue;
        }
        if (node.actions.size() != node.children.size()) {
            add(ViolationKind::action_name_count, path, "action names do not match children");
        }
        if (node.kind == NodeKind::chance) {
            if (node.chance_probs.size() != node.children.size()) {
                add(ViolationKind::bad_chance_probs, path, "chance probability count mismatch");
            } else {
                double sum = 0.0;
                bool bad = false;
                for (double p : node.chance_probs) {
                    if (!(p >= 0.0) || !std::isfinite(p)) bad = true;
                    sum += p;
                }
                if (bad) add(ViolationKind::bad_chance_probs, path, "negative or non-finite chance probability");
                if (std::abs(sum - 1.0) > 1e-12) {
                    add(ViolationKind::probability_sum, path,
                        "chance probabilities sum to " + std::to_string(sum));
                }
            }
        } else {
            if (node.player == PlayerId::chance) {
                add(ViolationKind::infoset_player_mismatch, path, "decision node owned by chance");
            }
            auto [it, inserted] = keys.try_emplace(node.infoset_key, KeyInfo{node.player, node.actions, path});
            if (!inserted) {
                if (it->second.player != node.player) {
                    add(ViolationKind::infoset_player_mismatch, path,
                        "infoset '" + node.infoset_key + "' shared by both players");
                } else if (it->second.actions != node.actions) {
                    add(ViolationKind::infoset_action_mismatch, path,
                        "infoset '" + node.infoset_key + "' has action set differing from " +
                            (it->second.first_path.empty() ? std::string("/") : it->second.first_path));
                }
            }
        }
        for (std::size_t a = node.children.size(); a-- > 0;) {
            const NodeId c = node.children[a];
            std::string child_path = path + "/" + (a < node.actions.size() ? node.actions[a] : std::to_string(a));
            if (c < 0 || c >= n || c == id) {
                add(ViolationKind::dangling_child, child_path, "child index invalid");
                continue;
            }
            stack.emplace_back(c, std::move(child_path));
        }
    }
    for (NodeId id = 0; id < n; ++id) {
        if (!seen[static_cast<std::size_t>(id)]) {
            add(ViolationKind::unreachable_node, "#" + std::to_string(id), "node unreachable from root");
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Infoset index

struct InfosetInfo {
    std::string key;
    std::size_t num_actions = 0;
    std::vector<NodeId> members;
};

/// Dense per-player infoset ids in depth-first discovery order, plus a flat
/// action-slot layout used by the solver tables.
class InfosetIndex {
  public:
    std::span<const InfosetInfo> infosets(PlayerId p) const { return infosets_[seat(p)]; }
    const InfosetInfo& info(PlayerId p, int id) const { return infosets_[seat(p)][static_cast<std::size_t>(id)]; }
    std::size_t count(PlayerId p) const { return infosets_[seat(p)].size(); }
    std::size_t total_count() const { return count(PlayerId::p1) + count(PlayerId::p2); }

    /// Infoset id of a decision node, -1 for chance and terminal nodes.
    int infoset_of(NodeId node) const { return node_infoset_[static_cast<std::size_t>(node)]; }

    std::optional<int> find(PlayerId p, std::string_view key) const {
        const auto& ids = by_key_[seat(p)];
        auto it = ids.find(std::string(key));
        if (it == ids.end()) return std::nullopt;
        return it->second;
    }

    /// Offset of infoset `id`'s first action in the player's flat slot array.
    std::size_t offset(PlayerId p, int id) const { return offsets_[seat(p)][static_cast<std::size_t>(id)]; }
    std::size_t slot_count(PlayerId p) const { return slots_[seat(p)]; }

    /// Largest |A(I)| over all infosets of both players.
    std::size_t max_actions() const { return max_actions_; }

  private:
    friend InfosetIndex enumerate_infosets(const Game& game);

    std::array<std::vector<InfosetInfo>, 2> infosets_;
    std::array<std::unordered_map<std::string, int>, 2> by_key_;
    std::array<std::vector<std::size_t>, 2> offsets_;
    std::array<std::size_t, 2> slots_{};
    std::vector<int> node_infoset_;
    std::size_t max_actions_ = 0;
};

/// Assigns infoset ids by depth-first discovery. Throws GameError when two
/// nodes sharing a key disagree on their action count.
inline InfosetIndex enumerate_infosets(const Game& game) {
    InfosetIndex index;
    index.node_infoset_.assign(game.size(), -1);
    if (game.size() == 0) return index;

    std::vector<NodeId> stack{game.root()};
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        const Node& node = game.node(id);
        if (node.kind == NodeKind::decision) {
            if (node.player == PlayerId::chance) throw GameError("decision node owned by chance");
            const auto s = seat(node.player);
            auto [it, inserted] = index.by_key_[s].try_emplace(node.infoset_key, static_cast<int>(index.infosets_[s].size()));
            if (inserted) {
                index.infosets_[s].push_back({node.infoset_key, node.num_actions(), {}});
            }
            auto& info = index.infosets_[s][static_cast<std::size_t>(it->second)];
            if (info.num_actions != node.num_actions()) {
                throw GameError("infoset '" + node.infoset_key + "' has inconsistent action counts (" +
                                std::to_string(info.num_actions) + " vs " +
                                std::to_string(node.num_actions()) + ")");
            }
            info.members.push_back(id);
            index.node_infoset_[static_cast<std::size_t>(id)] = it->second;
        }
        for (std::size_t a = node.children.size(); a-- > 0;) stack.push_back(node.children[a]);
    }

    for (std::size_t s = 0; s < 2; ++s) {
        std::size_t off = 0;
        for (const auto& info : index.infosets_[s]) {
            index.offsets_[s].push_back(off);
            off += info.num_actions;
            index.max_actions_ = std::max(index.max_actions_, info.num_actions);
        }
        index.slots_[s] = off;
    }
    return index;
}

// ---------------------------------------------------------------------------
// Strategies

/// Behavioral strategy for both players: one probability vector per infoset.
class StrategyProfile {
  public:
    StrategyProfile() = default;

    /// Uniform over every infoset of `index`.
    explicit StrategyProfile(const InfosetIndex& index) {
        for (PlayerId p : kPlayers) {
            auto& pol = policy_[seat(p)];
            for (const auto& info : index.infosets(p)) {
                pol.emplace_back(info.num_actions, 1.0 / static_cast<double>(info.num_actions));
            }
        }
    }

    std::vector<double>& at(PlayerId p, int infoset) { return policy_[seat(p)][static_cast<std::size_t>(infoset)]; }
    const std::vector<double>& at(PlayerId p, int infoset) const {
        return policy_[seat(p)][static_cast<std::size_t>(infoset)];
    }
    std::size_t count(PlayerId p) const { return policy_[seat(p)].size(); }

    bool operator==(const StrategyProfile&) const = default;

  private:
    std::array<std::vector<std::vector<double>>, 2> policy_;
};

/// True when `profile` covers `index` and each vector is a distribution within `tol`.
inline bool is_valid_profile(const StrategyProfile& profile, const InfosetIndex& index, double tol = 1e-9) {
    for (PlayerId p : kPlayers) {
        if (profile.count(p) != index.count(p)) return false;
        for (std::size_t i = 0; i < index.count(p); ++i) {
            const auto& v = profile.at(p, static_cast<int>(i));
            if (v.size() != index.info(p, static_cast<int>(i)).num_actions) return false;
            double sum = 0.0;
            for (double x : v) {
                if (!(x >= -tol)) return false;
                sum += x;
            }
            if (std::abs(sum - 1.0) > tol) return false;
        }
    }
    return true;
}

namespace detail {

inline double expected_value_p1(const Game& game, const InfosetIndex& index, const StrategyProfile& profile,
                                NodeId id) {
    const Node& node = game.node(id);
    switch (node.kind) {
        case NodeKind::terminal: return node.payoff[0];
        case NodeKind::chance: {
            double v = 0.0;
            for (std::size_t a = 0; a < node.children.size(); ++a) {
                if (node.chance_probs[a] == 0.0) continue;
                v += node.chance_probs[a] * expected_value_p1(game, index, profile, node.children[a]);
            }
            return v;
        }
        case NodeKind::decision: {
            const auto& sigma = profile.at(node.player, index.infoset_of(id));
            double v = 0.0;
            for (std::size_t a = 0; a < node.children.size(); ++a) {
                if (sigma[a] == 0.0) continue;
                v += sigma[a] * expected_value_p1(game, index, profile, node.children[a]);
            }
            return v;
        }
    }
    return 0.0;
}

}  // namespace detail

/// Exact expected payoff u_player(profile), by recursive weighted sum over the tree.
inline double expected_value(const Game& game, const InfosetIndex& index, const StrategyProfile& profile,
                             PlayerId player) {
    if (player == PlayerId::chance) throw ContractViolation("expected_value: chance has no payoff");
    const double v1 = detail::expected_value_p1(game, index, profile, game.root());
    return player == PlayerId::p1 ? v1 : -v1;
}

/// Number of terminal nodes reachable from the root.
inline std::size_t terminal_count(const Game& game) {
    return static_cast<std::size_t>(
        std::count_if(game.nodes().begin(), game.nodes().end(), [](const Node& n) { return n.is_terminal(); }));
}

}  // namespace regret_forge
