#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <functional>
#include <random>
#include <string>

#include "regret_forge/cfr.hpp"
#include "regret_forge/errors.hpp"
#include "regret_forge/evaluator.hpp"
#include "regret_forge/game.hpp"
#include "regret_forge/games.hpp"

using namespace regret_forge;

namespace {

// Kuhn poker written directly from the rules. A policy maps (card, history)
// to the probability of betting/calling; cards are 0=J, 1=Q, 2=K.
using KuhnPolicy = std::function<double(int, const std::string&)>;

double kuhn_value(const KuhnPolicy& p1, const KuhnPolicy& p2) {
    double total = 0.0;
    for (int c1 = 0; c1 < 3; ++c1) {
        for (int c2 = 0; c2 < 3; ++c2) {
            if (c1 == c2) continue;
            const double sd = c1 > c2 ? 1.0 : -1.0;
            const double b0 = p1(c1, "");
            const double bp = p2(c2, "p");
            const double bb = p2(c2, "b");
            const double cpb = p1(c1, "pb");
            const double pass_line = (1 - bp) * sd + bp * ((1 - cpb) * -1.0 + cpb * 2 * sd);
            const double bet_line = (1 - bb) * 1.0 + bb * 2 * sd;
            total += ((1 - b0) * pass_line + b0 * bet_line) / 6.0;
        }
    }
    return total;
}

const std::array<std::string, 2> kP1Histories = {"", "pb"};
const std::array<std::string, 2> kP2Histories = {"p", "b"};

// Pure strategy number `bits` over the player's six (card, history) infosets.
KuhnPolicy pure_policy(int bits, const std::array<std::string, 2>& histories) {
    return [bits, histories](int card, const std::string& h) {
        const int slot = card * 2 + (h == histories[0] ? 0 : 1);
        return static_cast<double>((bits >> slot) & 1);
    };
}

// Library profile expressed as a rules-level policy.
KuhnPolicy from_profile(const InfosetIndex& index, const StrategyProfile& profile, PlayerId p) {
    return [&index, profile, p](int card, const std::string& h) {
        static constexpr std::array<char, 3> kCards = {'J', 'Q', 'K'};
        const std::string key = std::string(p == PlayerId::p1 ? "P1:" : "P2:") + kCards[static_cast<std::size_t>(card)] +
                                ":" + h;
        return profile.at(p, *index.find(p, key))[1];
    };
}

double kuhn_best_response_oracle(const KuhnPolicy& opponent, PlayerId responder) {
    double best = -1e300;
    for (int bits = 0; bits < 64; ++bits) {
        const double v = responder == PlayerId::p1 ? kuhn_value(pure_policy(bits, kP1Histories), opponent)
                                                   : -kuhn_value(opponent, pure_policy(bits, kP2Histories));
        best = std::max(best, v);
    }
    return best;
}

const KuhnPolicy kUniform = [](int, const std::string&) { return 0.5; };

}  // namespace

TEST(KuhnOracle, UniformValueMatchesTree) {
    const Game g = build_kuhn();
    const auto index = enumerate_infosets(g);
    EXPECT_NEAR(expected_value(g, index, StrategyProfile(index), PlayerId::p1), kuhn_value(kUniform, kUniform), 1e-15);
}

TEST(BestResponse, KuhnAgainstUniformMatchesPureEnumeration) {
    const Game g = build_kuhn();
    const auto index = enumerate_infosets(g);
    const StrategyProfile uniform(index);
    EXPECT_NEAR(best_response(g, index, uniform, PlayerId::p1).value,
                kuhn_best_response_oracle(kUniform, PlayerId::p1), 1e-12);
    EXPECT_NEAR(best_response(g, index, uniform, PlayerId::p2).value,
                kuhn_best_response_oracle(kUniform, PlayerId::p2), 1e-12);
    EXPECT_GT(exploitability(g, index, uniform), 0.0);
}

TEST(BestResponse, KuhnAgainstRandomStrategiesMatchesPureEnumeration) {
    const Game g = build_kuhn();
    const auto index = enumerate_infosets(g);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 25; ++k) {
        StrategyProfile profile(index);
        for (PlayerId p : kPlayers) {
            for (std::size_t i = 0; i < index.count(p); ++i) {
                const double b = u(rng);
                profile.at(p, static_cast<int>(i)) = {1 - b, b};
            }
        }
        for (PlayerId p : kPlayers) {
            const auto opponent = from_profile(index, profile, opponent_of(p));
            EXPECT_NEAR(best_response(g, index, profile, p).value, kuhn_best_response_oracle(opponent, p), 1e-12);
        }
    }
}

TEST(BestResponse, ReturnedPureStrategyAchievesValue) {
    const Game g = build_leduc();
    const auto index = enumerate_infosets(g);
    const StrategyProfile uniform(index);
    for (PlayerId p : kPlayers) {
        const auto br = best_response(g, index, uniform, p);
        const auto pure = with_pure_strategy(uniform, index, p, br.actions);
        EXPECT_NEAR(expected_value(g, index, pure, p), br.value, 1e-12);
    }
}

TEST(BestResponse, DominatesRandomStrategies) {
    const Game g = build_leduc();
    const auto index = enumerate_infosets(g);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const StrategyProfile fixed(index);
    const double br = best_response(g, index, fixed, PlayerId::p2).value;
    for (int k = 0; k < 100; ++k) {
        StrategyProfile profile(index);
        for (std::size_t i = 0; i < index.count(PlayerId::p2); ++i) {
            auto& v = profile.at(PlayerId::p2, static_cast<int>(i));
            double total = 0.0;
            for (double& x : v) total += (x = u(rng));
            for (double& x : v) x /= total;
        }
        EXPECT_LE(expected_value(g, index, profile, PlayerId::p2), br + 1e-12);
    }
}

TEST(BestResponse, MatrixRowValuesAgainstUniformColumns) {
    const Game g = build_matrix_game({{{1, 0.9}, {-0.7, 1}}});
    const auto index = enumerate_infosets(g);
    const auto br = best_response(g, index, StrategyProfile(index), PlayerId::p1);
    EXPECT_NEAR(br.value, 0.95, 1e-15);
    EXPECT_EQ(br.actions, (std::vector<int>{0}));
    auto second_row = with_pure_strategy(StrategyProfile(index), index, PlayerId::p1, {1});
    EXPECT_NEAR(expected_value(g, index, second_row, PlayerId::p1), 0.15, 1e-15);
}

TEST(BestResponse, TiesGoToLowestIndex) {
    const Game g = build_matrix_game({{{1, 1}, {1, 1}}});
    const auto index = enumerate_infosets(g);
    EXPECT_EQ(best_response(g, index, StrategyProfile(index), PlayerId::p1).actions, (std::vector<int>{0}));
    EXPECT_EQ(best_response(g, index, StrategyProfile(index), PlayerId::p2).actions, (std::vector<int>{0}));
}

TEST(Exploitability, CounterexampleEquilibriumIsZero) {
    // Indifference: rows mix (17/18, 1/18) and columns (1/18, 17/18); value 163/180.
    const Game g = build_matrix_game({{{1, 0.9}, {-0.7, 1}}});
    const auto index = enumerate_infosets(g);
    StrategyProfile nash(index);
    nash.at(PlayerId::p1, 0) = {17.0 / 18.0, 1.0 / 18.0};
    nash.at(PlayerId::p2, 0) = {1.0 / 18.0, 17.0 / 18.0};
    EXPECT_NEAR(exploitability(g, index, nash), 0.0, 1e-12);
    EXPECT_NEAR(best_response(g, index, nash, PlayerId::p1).value, 163.0 / 180.0, 1e-12);
    EXPECT_NEAR(best_response(g, index, nash, PlayerId::p2).value, -163.0 / 180.0, 1e-12);
}

TEST(Exploitability, MatchingPenniesUniformIsZero) {
    const Game g = build_matrix_game({{{1, -1}, {-1, 1}}});
    const auto index = enumerate_infosets(g);
    EXPECT_NEAR(exploitability(g, index, StrategyProfile(index)), 0.0, 1e-15);
}

TEST(Exploitability, KuhnNashComponentGivesGameValue) {
    // A known Kuhn equilibrium with alpha = 0 (P1 never bluffs with J).
    const Game g = build_kuhn();
    const auto index = enumerate_infosets(g);
    StrategyProfile nash(index);
    auto set = [&](PlayerId p, const std::string& key, double bet) {
        nash.at(p, *index.find(p, key)) = {1 - bet, bet};
    };
    set(PlayerId::p1, "P1:J:", 0);
    set(PlayerId::p1, "P1:Q:", 0);
    set(PlayerId::p1, "P1:K:", 0);
    set(PlayerId::p1, "P1:J:pb", 0);
    set(PlayerId::p1, "P1:Q:pb", 1.0 / 3.0);
    set(PlayerId::p1, "P1:K:pb", 1);
    set(PlayerId::p2, "P2:J:p", 1.0 / 3.0);
    set(PlayerId::p2, "P2:Q:p", 0);
    set(PlayerId::p2, "P2:K:p", 1);
    set(PlayerId::p2, "P2:J:b", 0);
    set(PlayerId::p2, "P2:Q:b", 1.0 / 3.0);
    set(PlayerId::p2, "P2:K:b", 1);
    EXPECT_NEAR(exploitability(g, index, nash), 0.0, 1e-12);
    EXPECT_NEAR(best_response(g, index, nash, PlayerId::p1).value, -1.0 / 18.0, 1e-12);
    EXPECT_NEAR(expected_value(g, index, nash, PlayerId::p1), -1.0 / 18.0, 1e-12);
}

TEST(Exploitability, NonNegativeAndBoundedByRange) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const Game& g : {build_kuhn(), build_leduc()}) {
        const auto index = enumerate_infosets(g);
        for (int k = 0; k < 10; ++k) {
            StrategyProfile profile(index);
            for (PlayerId p : kPlayers) {
                for (std::size_t i = 0; i < index.count(p); ++i) {
                    auto& v = profile.at(p, static_cast<int>(i));
                    double total = 0.0;
                    for (double& x : v) total += (x = u(rng));
                    for (double& x : v) x /= total;
                }
            }
            const double e = exploitability(g, index, profile);
            EXPECT_GE(e, -1e-9);
            EXPECT_LE(e, g.payoff_range());
        }
    }
}

TEST(OverallRegret, SingleIterationIsBestResponseMinusRealized) {
    const Game g = build_matrix_game({{{1, 0.9}, {-0.7, 1}}});
    const auto index = enumerate_infosets(g);
    const StrategyProfile uniform(index);
    IterateHistorySummary summary{1, uniform, {0.55, -0.55}};
    EXPECT_NEAR(overall_regret(g, index, summary, PlayerId::p1), 0.95 - 0.55, 1e-15);
}

TEST(OverallRegret, AlwaysBestRespondingIsZero) {
    const Game g = build_matrix_game({{{1, 0.9}, {-0.7, 1}}});
    const auto index = enumerate_infosets(g);
    StrategyProfile profile(index);
    profile.at(PlayerId::p2, 0) = {0.0, 1.0};  // P1's best reply is row 2, worth 1
    profile.at(PlayerId::p1, 0) = {0.0, 1.0};
    IterateHistorySummary summary{5, profile, {5.0, -5.0}};
    EXPECT_NEAR(overall_regret(g, index, summary, PlayerId::p1), 0.0, 1e-12);
}

TEST(OverallRegret, MissingHistoryIsContractViolation) {
    const Game g = build_kuhn();
    const auto index = enumerate_infosets(g);
    EXPECT_THROW(overall_regret(g, index, IterateHistorySummary{}, PlayerId::p1), ContractViolation);
    CfrSolver solver(g, index, preset_config("cfr"));
    solver.step();
    EXPECT_THROW(solver.history_summary(), ContractViolation);
}

TEST(OverallRegret, KuhnSixteenIterationsMatchesStoredIterates) {
    const Game g = build_kuhn();
    const auto index = enumerate_infosets(g);
    auto config = preset_config("cfr");
    config.updates = UpdateMode::simultaneous;
    config.track_history = true;
    CfrSolver solver(g, index, config);
    std::vector<StrategyProfile> iterates;
    for (int t = 0; t < 16; ++t) {
        iterates.push_back(solver.current_profile());
        solver.step();
    }
    const auto summary = solver.history_summary();
    for (PlayerId p : kPlayers) {
        // max over pure strategies of the summed payoff against each stored iterate
        double best = -1e300;
        for (int bits = 0; bits < 64; ++bits) {
            double total = 0.0;
            for (const auto& s : iterates) {
                const auto opp = from_profile(index, s, opponent_of(p));
                total += p == PlayerId::p1 ? kuhn_value(pure_policy(bits, kP1Histories), opp)
                                           : -kuhn_value(opp, pure_policy(bits, kP2Histories));
            }
            best = std::max(best, total);
        }
        double realized = 0.0;
        for (const auto& s : iterates) {
            const double v = kuhn_value(from_profile(index, s, PlayerId::p1), from_profile(index, s, PlayerId::p2));
            realized += p == PlayerId::p1 ? v : -v;
        }
        EXPECT_NEAR(overall_regret(g, index, summary, p), best - realized, 1e-9);
    }
}

TEST(ToMbb, Conversions) {
    EXPECT_DOUBLE_EQ(to_mbb(0.1, 100), 1.0);
    EXPECT_EQ(to_mbb(0.0, 7), 0.0);
    EXPECT_DOUBLE_EQ(to_mbb(-2.5, 100), -25.0);
    EXPECT_THROW(to_mbb(1.0, 0.0), ContractViolation);
    EXPECT_THROW(to_mbb(1.0, -2.0), ContractViolation);
}
