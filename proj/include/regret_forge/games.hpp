#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "regret_forge/errors.hpp"
#include "regret_forge/game.hpp"

namespace regret_forge {

/// Row player's payoff matrix; the column player receives the negation.
struct MatrixGameSpec {
    std::vector<std::vector<double>> payoffs;
};

/// One decision by P1 between fixed payoffs. P2 never acts.
struct BanditSpec {
    std::vector<double> payoffs;
};

/// Simultaneous one-shot matrix game. P2's single infoset hides P1's row.
inline Game build_matrix_game(const MatrixGameSpec& spec) {
    const auto& m = spec.payoffs;
    if (m.empty() || m.front().empty()) throw ConfigError("matrix game: empty payoff matrix");
    const std::size_t cols = m.front().size();
    for (const auto& row : m) {
        if (row.size() != cols) throw ConfigError("matrix game: rows have different lengths");
        for (double x : row) {
            if (!std::isfinite(x)) throw ConfigError("matrix game: non-finite payoff");
        }
    }
    std::vector<std::string> row_names, col_names;
    for (std::size_t r = 0; r < m.size(); ++r) row_names.push_back("r" + std::to_string(r));
    for (std::size_t c = 0; c < cols; ++c) col_names.push_back("c" + std::to_string(c));

    GameBuilder b;
    const NodeId root = b.add_decision(PlayerId::p1, "P1:", row_names);
    for (std::size_t r = 0; r < m.size(); ++r) {
        const NodeId col_node = b.add_decision(PlayerId::p2, "P2:", col_names);
        b.set_child(root, r, col_node);
        for (std::size_t c = 0; c < cols; ++c) b.set_child(col_node, c, b.add_terminal(m[r][c]));
    }
    return std::move(b).build("matrix");
}

inline Game build_bandit(const BanditSpec& spec) {
    if (spec.payoffs.size() < 2) throw ConfigError("bandit: at least two actions are required");
    std::vector<std::string> names;
    for (std::size_t a = 0; a < spec.payoffs.size(); ++a) names.push_back("a" + std::to_string(a));
    GameBuilder b;
    const NodeId root = b.add_decision(PlayerId::p1, "P1:", names);
    for (std::size_t a = 0; a < spec.payoffs.size(); ++a) {
        if (!std::isfinite(spec.payoffs[a])) throw ConfigError("bandit: non-finite payoff");
        b.set_child(root, a, b.add_terminal(spec.payoffs[a]));
    }
    return std::move(b).build("bandit");
}

namespace detail {

inline std::string goofspiel_card(int rank) { return rank == 1 ? "A" : std::to_string(rank); }

}  // namespace detail

/// Goofspiel with `cards` cards per hand and the prize deck revealed in
/// ascending order. Each round P1 commits a bid, then P2 bids without seeing
/// it; both bids are public afterwards. Tied bids split the prize.
inline Game build_goofspiel(int cards) {
    if (cards < 1 || cards > 9) throw ConfigError("goofspiel: card count must be in [1, 9]");
    GameBuilder b;
    const unsigned full = (1u << cards) - 1u;

    std::function<NodeId(unsigned, unsigned, int, double, const std::string&)> round =
        [&](unsigned hand1, unsigned hand2, int prize, double diff, const std::string& history) -> NodeId {
        if (prize > cards) return b.add_terminal(diff);

        std::vector<int> bids1, bids2;
        std::vector<std::string> names1, names2;
        for (int r = 1; r <= cards; ++r) {
            if (hand1 & (1u << (r - 1))) {
                bids1.push_back(r);
                names1.push_back(detail::goofspiel_card(r));
            }
            if (hand2 & (1u << (r - 1))) {
                bids2.push_back(r);
                names2.push_back(detail::goofspiel_card(r));
            }
        }
        const NodeId p1_node = b.add_decision(PlayerId::p1, "P1|" + history, names1);
        for (std::size_t i = 0; i < bids1.size(); ++i) {
            const NodeId p2_node = b.add_decision(PlayerId::p2, "P2|" + history, names2);
            b.set_child(p1_node, i, p2_node);
            for (std::size_t j = 0; j < bids2.size(); ++j) {
                const int x = bids1[i], y = bids2[j];
                const double gain = x > y ? prize : (x < y ? -prize : 0.0);
                const std::string next = history + detail::goofspiel_card(x) + detail::goofspiel_card(y) + ",";
                b.set_child(p2_node, j,
                            round(hand1 & ~(1u << (x - 1)), hand2 & ~(1u << (y - 1)), prize + 1, diff + gain, next));
            }
        }
        return p1_node;
    };
    round(full, full, 1, 0.0, "");
    return std::move(b).build("goofspiel" + std::to_string(cards));
}

inline Game build_goofspiel5() { return build_goofspiel(5); }

/// Standard three-card Kuhn poker: ante 1, one bet of size 1.
inline Game build_kuhn() {
    static constexpr std::array<char, 3> kCards = {'J', 'Q', 'K'};
    GameBuilder b;
    std::vector<std::string> deals;
    std::vector<std::pair<int, int>> hands;
    for (int c1 = 0; c1 < 3; ++c1) {
        for (int c2 = 0; c2 < 3; ++c2) {
            if (c1 == c2) continue;
            deals.push_back(std::string{kCards[c1], kCards[c2]});
            hands.emplace_back(c1, c2);
        }
    }
    const NodeId root = b.add_chance(deals, std::vector<double>(deals.size(), 1.0 / 6.0));

    for (std::size_t d = 0; d < hands.size(); ++d) {
        const auto [c1, c2] = hands[d];
        const double showdown = c1 > c2 ? 1.0 : -1.0;
        const std::string k1 = std::string("P1:") + kCards[c1] + ":";
        const std::string k2 = std::string("P2:") + kCards[c2] + ":";

        const NodeId n0 = b.add_decision(PlayerId::p1, k1, {"p", "b"});
        b.set_child(root, d, n0);
        // P1 passes
        const NodeId np = b.add_decision(PlayerId::p2, k2 + "p", {"p", "b"});
        b.set_child(n0, 0, np);
        b.set_child(np, 0, b.add_terminal(showdown));
        const NodeId npb = b.add_decision(PlayerId::p1, k1 + "pb", {"p", "b"});
        b.set_child(np, 1, npb);
        b.set_child(npb, 0, b.add_terminal(-1.0));
        b.set_child(npb, 1, b.add_terminal(2.0 * showdown));
        // P1 bets
        const NodeId nb = b.add_decision(PlayerId::p2, k2 + "b", {"p", "b"});
        b.set_child(n0, 1, nb);
        b.set_child(nb, 0, b.add_terminal(1.0));
        b.set_child(nb, 1, b.add_terminal(2.0 * showdown));
    }
    return std::move(b).build("kuhn");
}

/// Leduc hold'em: two each of J, Q, K; ante 1; bets of 2 then 4 with at most
/// two bets (bet + raise) per round; P1 acts first in both rounds. A private
/// card pairing the board wins, otherwise the higher rank; equal ranks split.
inline Game build_leduc() {
    static constexpr std::array<char, 3> kRanks = {'J', 'Q', 'K'};
    GameBuilder b;

    struct Deal {
        int c1, c2, board;
    };

    auto showdown = [](const Deal& d) {
        if (d.c1 == d.board) return 1;
        if (d.c2 == d.board) return -1;
        return d.c1 > d.c2 ? 1 : (d.c1 < d.c2 ? -1 : 0);
    };

    std::function<NodeId(const Deal&, int, std::array<int, 2>, int, int, bool, const std::string&, std::string)>
        betting;
    std::function<NodeId(const Deal&, std::array<int, 2>, const std::string&)> deal_board;

    auto key = [](PlayerId p, const Deal& d, const std::string& hist) {
        const int own = p == PlayerId::p1 ? d.c1 : d.c2;
        return std::string(p == PlayerId::p1 ? "P1:" : "P2:") + kRanks[own] + ":" + hist;
    };

    // `round_hist` is this round's action string; `hist` is the observable
    // history before it (round one actions, "/", board rank).
    betting = [&](const Deal& d, int round, std::array<int, 2> contrib, int bets, int to_act, bool facing,
                  const std::string& hist, std::string round_hist) -> NodeId {
        const PlayerId actor = to_act == 0 ? PlayerId::p1 : PlayerId::p2;
        const int bet_size = round == 0 ? 2 : 4;
        const std::string full = hist + round_hist;

        auto after_round = [&](std::array<int, 2> c) -> NodeId {
            if (round == 0) return deal_board(d, c, full + "/");
            const int w = showdown(d);
            return b.add_terminal(w > 0 ? c[1] : (w < 0 ? -c[0] : 0.0));
        };

        if (!facing) {
            const NodeId n = b.add_decision(actor, key(actor, d, full), {"c", "r"});
            // check: the round closes when the second player checks behind
            if (to_act == 1) {
                b.set_child(n, 0, after_round(contrib));
            } else {
                b.set_child(n, 0, betting(d, round, contrib, bets, 1, false, hist, round_hist + "c"));
            }
            auto raised = contrib;
            raised[static_cast<std::size_t>(to_act)] += bet_size;
            b.set_child(n, 1, betting(d, round, raised, bets + 1, 1 - to_act, true, hist, round_hist + "r"));
            return n;
        }

        std::vector<std::string> acts = {"f", "c"};
        if (bets < 2) acts.push_back("r");
        const NodeId n = b.add_decision(actor, key(actor, d, full), acts);
        const auto me = static_cast<std::size_t>(to_act);
        const auto other = 1 - me;
        // folding forfeits what the folder put in
        b.set_child(n, 0, b.add_terminal(to_act == 0 ? -contrib[0] : contrib[1]));
        auto called = contrib;
        called[me] = called[other];
        b.set_child(n, 1, after_round(called));
        if (bets < 2) {
            auto raised = contrib;
            raised[me] = raised[other] + bet_size;
            b.set_child(n, 2, betting(d, round, raised, bets + 1, 1 - to_act, true, hist, round_hist + "r"));
        }
        return n;
    };

    deal_board = [&](const Deal& d, std::array<int, 2> contrib, const std::string& hist) -> NodeId {
        std::array<int, 3> left = {2, 2, 2};
        --left[static_cast<std::size_t>(d.c1)];
        --left[static_cast<std::size_t>(d.c2)];
        std::vector<std::string> names;
        std::vector<double> probs;
        std::vector<int> ranks;
        for (int r = 0; r < 3; ++r) {
            if (left[static_cast<std::size_t>(r)] == 0) continue;
            names.emplace_back(1, kRanks[static_cast<std::size_t>(r)]);
            probs.push_back(left[static_cast<std::size_t>(r)] / 4.0);
            ranks.push_back(r);
        }
        const NodeId n = b.add_chance(names, probs);
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            const Deal next{d.c1, d.c2, ranks[i]};
            b.set_child(n, i, betting(next, 1, contrib, 0, 0, false, hist + kRanks[static_cast<std::size_t>(ranks[i])] + ":", ""));
        }
        return n;
    };

    std::vector<std::string> names;
    for (char r : kRanks) names.emplace_back(1, r);
    const NodeId root = b.add_chance(names, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    for (int c1 = 0; c1 < 3; ++c1) {
        std::vector<double> probs;
        for (int c2 = 0; c2 < 3; ++c2) probs.push_back(c2 == c1 ? 1.0 / 5.0 : 2.0 / 5.0);
        const NodeId second = b.add_chance(names, probs);
        b.set_child(root, static_cast<std::size_t>(c1), second);
        for (int c2 = 0; c2 < 3; ++c2) {
            b.set_child(second, static_cast<std::size_t>(c2),
                        betting(Deal{c1, c2, -1}, 0, {1, 1}, 0, 0, false, "", ""));
        }
    }
    return std::move(b).build("leduc");
}

/// Reads a whitespace- or comma-separated matrix, one row per line.
inline MatrixGameSpec read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open matrix file '" + path + "'");
    MatrixGameSpec spec;
    std::string line;
    while (std::getline(in, line)) {
        for (char& ch : line) {
            if (ch == ',' || ch == ';' || ch == '[' || ch == ']') ch = ' ';
        }
        std::istringstream row(line);
        std::vector<double> values;
        std::string tok;
        while (row >> tok) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("matrix file '" + path + "': bad number '" + tok + "'");
            }
        }
        if (!values.empty()) spec.payoffs.push_back(std::move(values));
    }
    return spec;
}

inline BanditSpec parse_bandit_payoffs(const std::string& list) {
    BanditSpec spec;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            spec.payoffs.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("bandit: bad payoff '" + tok + "'");
        }
    }
    return spec;
}

}  // namespace regret_forge
