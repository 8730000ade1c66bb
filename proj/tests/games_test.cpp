#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <string>

#include "regret_forge/errors.hpp"
#include "regret_forge/game.hpp"
#include "regret_forge/games.hpp"

using namespace regret_forge;

namespace {

// Follows named actions from the root; chance nodes must be resolved by name too.
NodeId walk(const Game& g, const std::vector<std::string>& path) {
    NodeId id = g.root();
    for (const auto& name : path) {
        const auto& node = g.node(id);
        auto it = std::find(node.actions.begin(), node.actions.end(), name);
        if (it == node.actions.end()) throw std::runtime_error("no action " + name);
        id = node.children[static_cast<std::size_t>(it - node.actions.begin())];
    }
    return id;
}

std::string card(int rank) { return rank == 1 ? "A" : std::to_string(rank); }

// Number of decision points each seat faces in one Leduc betting round, and
// the number of action sequences that close the round with a call or check.
struct RoundShape {
    std::array<int, 2> decisions{};
    int continuing = 0;
};

void count_round(int to_act, bool facing, int bets, bool first_checked, RoundShape& shape) {
    ++shape.decisions[static_cast<std::size_t>(to_act)];
    if (!facing) {
        if (first_checked) {
            ++shape.continuing;
        } else {
            count_round(1 - to_act, false, bets, true, shape);
        }
        count_round(1 - to_act, true, bets + 1, first_checked, shape);
        return;
    }
    ++shape.continuing;  // call
    if (bets < 2) count_round(1 - to_act, true, bets + 1, first_checked, shape);
}

}  // namespace

TEST(MatrixGame, CounterexampleRange) {
    const Game g = build_matrix_game({{{1, 0.9}, {-0.7, 1}}});
    EXPECT_TRUE(validate_game(g).ok());
    EXPECT_DOUBLE_EQ(g.payoff_range(), 1.7);
}

TEST(MatrixGame, SingleCellHasValueZero) {
    const Game g = build_matrix_game({{{0}}});
    const auto index = enumerate_infosets(g);
    EXPECT_EQ(index.info(PlayerId::p1, 0).num_actions, 1u);
    EXPECT_EQ(index.info(PlayerId::p2, 0).num_actions, 1u);
    EXPECT_EQ(expected_value(g, index, StrategyProfile(index), PlayerId::p1), 0.0);
}

TEST(MatrixGame, ColumnChooserCannotSeeRow) {
    const Game g = build_matrix_game({{{1, -1}, {-1, 1}}});
    const auto index = enumerate_infosets(g);
    EXPECT_EQ(index.count(PlayerId::p2), 1u);
    EXPECT_EQ(index.info(PlayerId::p2, 0).members.size(), 2u);
}

TEST(MatrixGame, UniformValueIsMean) {
    const std::vector<std::vector<double>> m = {{3, -1, 2}, {0, 5, -4}};
    const Game g = build_matrix_game({m});
    const auto index = enumerate_infosets(g);
    EXPECT_NEAR(expected_value(g, index, StrategyProfile(index), PlayerId::p1), 5.0 / 6.0, 1e-15);
}

TEST(MatrixGame, RejectsBadSpecs) {
    EXPECT_THROW(build_matrix_game({}), ConfigError);
    EXPECT_THROW(build_matrix_game({{{}}}), ConfigError);
    EXPECT_THROW(build_matrix_game({{{1, 2}, {3}}}), ConfigError);
    EXPECT_THROW(build_matrix_game({{{1, std::nan("")}}}), ConfigError);
}

TEST(MatrixGame, ReadsFile) {
    const auto path = std::filesystem::temp_directory_path() / "regret_forge_matrix.txt";
    {
        std::ofstream out(path);
        out << "[[1, 0.9],\n [-0.7, 1]]\n";
    }
    const auto spec = read_matrix_file(path.string());
    ASSERT_EQ(spec.payoffs.size(), 2u);
    EXPECT_EQ(spec.payoffs[1], (std::vector<double>{-0.7, 1}));
    std::filesystem::remove(path);
    EXPECT_THROW(read_matrix_file(path.string()), ConfigError);
}

TEST(Bandit, Structure) {
    const Game g = build_bandit({{0, 1, -1e6}});
    const auto index = enumerate_infosets(g);
    EXPECT_TRUE(validate_game(g).ok());
    EXPECT_EQ(index.count(PlayerId::p1), 1u);
    EXPECT_EQ(index.count(PlayerId::p2), 0u);
    EXPECT_EQ(terminal_count(g), 3u);
    EXPECT_THROW(build_bandit({{1}}), ConfigError);
    EXPECT_EQ(parse_bandit_payoffs("0,1,-1000000").payoffs, (std::vector<double>{0, 1, -1e6}));
    EXPECT_THROW(parse_bandit_payoffs("0,x"), ConfigError);
}

TEST(Goofspiel, MirrorBidsSplitEveryPrize) {
    const Game g = build_goofspiel5();
    std::vector<std::string> path;
    for (int r = 1; r <= 5; ++r) {
        path.push_back(card(r));
        path.push_back(card(r));
    }
    const auto& leaf = g.node(walk(g, path));
    ASSERT_EQ(leaf.kind, NodeKind::terminal);
    EXPECT_EQ(leaf.payoff[0], 0.0);
}

TEST(Goofspiel, FixedLinePlaysOut) {
    // P1 bids 2,3,4,5,A against P2's A,2,3,4,5: P1 takes prizes 1-4 (10),
    // P2 takes prize 5.
    const Game g = build_goofspiel5();
    const std::array<int, 5> p1 = {2, 3, 4, 5, 1};
    const std::array<int, 5> p2 = {1, 2, 3, 4, 5};
    std::vector<std::string> path;
    double oracle = 0.0;
    for (int r = 0; r < 5; ++r) {
        path.push_back(card(p1[static_cast<std::size_t>(r)]));
        path.push_back(card(p2[static_cast<std::size_t>(r)]));
        const int prize = r + 1;
        if (p1[static_cast<std::size_t>(r)] > p2[static_cast<std::size_t>(r)]) oracle += prize;
        if (p1[static_cast<std::size_t>(r)] < p2[static_cast<std::size_t>(r)]) oracle -= prize;
    }
    EXPECT_EQ(oracle, 5.0);
    EXPECT_EQ(g.node(walk(g, path)).payoff[0], 5.0);
}

TEST(Goofspiel, TerminalCountMatchesExhaustivePlay) {
    // Every terminal is one ordering of P1's hand paired with one of P2's.
    std::array<int, 5> hand = {1, 2, 3, 4, 5};
    std::size_t orders = 0;
    do {
        ++orders;
    } while (std::next_permutation(hand.begin(), hand.end()));
    const Game g = build_goofspiel5();
    EXPECT_EQ(terminal_count(g), orders * orders);
}

TEST(Goofspiel, SymmetricUnderSeatSwap) {
    const Game g = build_goofspiel5();
    const auto index = enumerate_infosets(g);
    EXPECT_EQ(index.count(PlayerId::p1), index.count(PlayerId::p2));
    std::vector<double> payoffs, negated;
    for (const auto& node : g.nodes()) {
        if (node.kind != NodeKind::terminal) continue;
        payoffs.push_back(node.payoff[0]);
        negated.push_back(-node.payoff[0]);
    }
    std::sort(payoffs.begin(), payoffs.end());
    std::sort(negated.begin(), negated.end());
    EXPECT_EQ(payoffs, negated);
}

TEST(Goofspiel, MirrorStrategyValueIsZero) {
    const Game g = build_goofspiel5();
    const auto index = enumerate_infosets(g);
    StrategyProfile profile(index);
    // At every infoset bid the card whose rank equals the current prize.
    for (PlayerId p : kPlayers) {
        for (std::size_t i = 0; i < index.count(p); ++i) {
            const auto& info = index.info(p, static_cast<int>(i));
            const auto& node = g.node(info.members.front());
            const auto round = static_cast<int>(std::count(info.key.begin(), info.key.end(), ','));
            auto& v = profile.at(p, static_cast<int>(i));
            std::fill(v.begin(), v.end(), 0.0);
            auto it = std::find(node.actions.begin(), node.actions.end(), card(round + 1));
            v[it == node.actions.end() ? 0 : static_cast<std::size_t>(it - node.actions.begin())] = 1.0;
        }
    }
    EXPECT_EQ(expected_value(g, index, profile, PlayerId::p1), 0.0);
}

TEST(Kuhn, CallingWithKingAfterBet) {
    // P1 holds K, passes, P2 bets, P1 calls: +2 against Q or J.
    const Game g = build_kuhn();
    EXPECT_EQ(g.node(walk(g, {"KQ", "p", "b", "b"})).payoff[0], 2.0);
    EXPECT_EQ(g.node(walk(g, {"KJ", "p", "b", "b"})).payoff[0], 2.0);
    EXPECT_EQ(g.node(walk(g, {"QK", "p", "b", "b"})).payoff[0], -2.0);
    EXPECT_EQ(g.node(walk(g, {"QK", "b", "p"})).payoff[0], 1.0);
}

TEST(Kuhn, Sizes) {
    const Game g = build_kuhn();
    EXPECT_TRUE(validate_game(g).ok());
    EXPECT_EQ(terminal_count(g), 30u);
    EXPECT_DOUBLE_EQ(g.payoff_range(), 4.0);
}

TEST(Leduc, InfosetCountMatchesBettingEnumeration) {
    RoundShape round;
    count_round(0, false, 0, false, round);
    // ranks for the private card, and for private card x board in round two
    const std::array<int, 2> expected = {
        3 * round.decisions[0] + 9 * round.continuing * round.decisions[0],
        3 * round.decisions[1] + 9 * round.continuing * round.decisions[1]};
    const auto index = enumerate_infosets(build_leduc());
    EXPECT_EQ(static_cast<int>(index.count(PlayerId::p1)), expected[0]);
    EXPECT_EQ(static_cast<int>(index.count(PlayerId::p2)), expected[1]);
    EXPECT_EQ(expected[0], 144);
}

TEST(Leduc, ChanceAndPayoffs) {
    const Game g = build_leduc();
    EXPECT_TRUE(validate_game(g).ok()) << validate_game(g).summary();
    // P1 J, P2 Q, board J: P1 pairs. Round one: check, check; round two: raise, call.
    EXPECT_EQ(g.node(walk(g, {"J", "Q", "c", "c", "J", "r", "c"})).payoff[0], 5.0);
    // P1 raises, P2 re-raises, P1 folds: loses ante plus the first bet.
    EXPECT_EQ(g.node(walk(g, {"K", "K", "r", "r", "f"})).payoff[0], -3.0);
    // Same ranks split the pot.
    EXPECT_EQ(g.node(walk(g, {"K", "K", "c", "c", "J", "c", "c"})).payoff[0], 0.0);
    const auto& second = g.node(walk(g, {"J"}));
    EXPECT_DOUBLE_EQ(second.chance_probs[0], 0.2);
    EXPECT_DOUBLE_EQ(second.chance_probs[1], 0.4);
    const auto& board = g.node(walk(g, {"J", "Q", "c", "c"}));
    EXPECT_EQ(board.actions, (std::vector<std::string>{"J", "Q", "K"}));
    EXPECT_EQ(board.chance_probs, (std::vector<double>{0.25, 0.25, 0.5}));
}

TEST(BuiltinGames, AllValidate) {
    for (const Game& g : {build_kuhn(), build_leduc(), build_goofspiel5(), build_bandit({{0, 1, -1e6}}),
                          build_matrix_game({{{1, 0.9}, {-0.7, 1}}})}) {
        EXPECT_TRUE(validate_game(g).ok()) << g.name() << "\n" << validate_game(g).summary();
    }
}
