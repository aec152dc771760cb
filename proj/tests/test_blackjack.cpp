#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "sopt/blackjack.hpp"

using namespace sopt;
using namespace sopt::bj;

namespace {

int oracle_value(const std::vector<int>& cards) {
    int aces = 0, base = 0;
    for (int c : cards) {
        base += c;
        aces += c == 1;
    }
    int best = -1;
    for (int k = 0; k <= aces; ++k)
        if (base + 10 * k <= 21) best = std::max(best, base + 10 * k);
    return best >= 0 ? best : base;
}

void multisets(int len, int min_card, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& f) {
    if (!cur.empty()) f(cur);
    if (static_cast<int>(cur.size()) == len) return;
    for (int c = min_card; c <= 10; ++c) {
        cur.push_back(c);
        multisets(len, c, cur, f);
        cur.pop_back();
    }
}

bool mask_has(const ActionMask& m, Action a) { return m[static_cast<std::size_t>(a)]; }

Rules fixture_rules() {
    Rules r;
    r.penetration = 0.0;  // never reshuffle a loaded fixture
    return r;
}

SubHand sub(std::vector<int> cards, bool doubled = false, bool surrendered = false, bool from_split = false) {
    SubHand h;
    h.cards = std::move(cards);
    h.doubled = doubled;
    h.surrendered = surrendered;
    h.from_split = from_split;
    return h;
}

}  // namespace

TEST(BjHand, Examples) {
    EXPECT_EQ(hand_value({1, 10}), 21);
    EXPECT_EQ(hand_value({1, 10, 5}), 16);
    EXPECT_EQ(hand_value({5, 6}), 11);
    EXPECT_EQ(hand_value({1, 1}), 12);
}

TEST(BjHand, BruteForceOracleUpToEightCards) {
    std::vector<int> cur;
    long n = 0;
    multisets(8, 1, cur, [&](const std::vector<int>& cards) {
        ++n;
        ASSERT_EQ(hand_value(cards), oracle_value(cards));
    });
    EXPECT_GT(n, 40000);
}

TEST(BjSettle, TableCases) {
    const Rules r;
    EXPECT_EQ(settle(sub({10, 10}), {10, 9}, r), 1.0);
    EXPECT_EQ(settle(sub({1, 10}), {10, 10}, r), 1.5);
    EXPECT_EQ(settle(sub({5, 6, 10}, true), {10, 7}, r), 2.0);
    EXPECT_EQ(settle(sub({6, 5, 10}, true), {10, 5, 10}, r), 2.0);
    EXPECT_EQ(settle(sub({10, 3, 10}, true), {10, 7}, r), -2.0);
    EXPECT_EQ(settle(sub({10, 6, 10}), {10, 7}, r), -1.0);
    EXPECT_EQ(settle(sub({10, 6}, false, true), {10, 7}, r), -0.5);
    EXPECT_EQ(settle(sub({10, 6}, false, true), {10, 6, 10}, r), -0.5);
    EXPECT_EQ(settle(sub({10, 8}), {10, 8}, r), 0.0);
    EXPECT_EQ(settle(sub({10, 7}), {10, 8}, r), -1.0);
    // Natural vs dealer natural pushes.
    EXPECT_EQ(settle(sub({1, 10}), {10, 1}, r), 0.0);
    // Without a peek, final values are compared: a three-card 21 pushes a dealer natural.
    EXPECT_EQ(settle(sub({7, 7, 7}), {1, 10}, r), 0.0);
    // Two-card 21 after a split pays even money.
    EXPECT_EQ(settle(sub({1, 10}, false, false, true), {10, 7}, r), 1.0);
    EXPECT_THROW(settle(sub({10}), {10, 7}, r), std::invalid_argument);
}

TEST(BjSettle, DoubledLossFollowsRule) {
    Rules r;
    EXPECT_EQ(settle(sub({10, 5, 2}, true), {10, 8}, r), -2.0);
    r.doubled_loss = -1.0;
    EXPECT_EQ(settle(sub({10, 5, 2}, true), {10, 8}, r), -1.0);
}

TEST(BjLegal, Examples) {
    const auto m88 = legal_actions({8, 8}, false);
    for (auto a : {Action::Stay, Action::Hit, Action::Split, Action::Surrender, Action::Double})
        EXPECT_TRUE(mask_has(m88, a));
    const auto m3 = legal_actions({2, 3, 4}, false);
    EXPECT_TRUE(mask_has(m3, Action::Stay));
    EXPECT_TRUE(mask_has(m3, Action::Hit));
    EXPECT_FALSE(mask_has(m3, Action::Split) || mask_has(m3, Action::Surrender) || mask_has(m3, Action::Double));
    const auto m89 = legal_actions({8, 9}, false);
    EXPECT_FALSE(mask_has(m89, Action::Split));
    EXPECT_TRUE(mask_has(m89, Action::Surrender) && mask_has(m89, Action::Double));
    const auto after = legal_actions({8, 8}, true);
    EXPECT_FALSE(mask_has(after, Action::Split) || mask_has(after, Action::Surrender));
    EXPECT_TRUE(mask_has(after, Action::Double));
    const auto bust = legal_actions({10, 10, 5}, false);
    EXPECT_TRUE(std::none_of(bust.begin(), bust.end(), [](bool b) { return b; }));
}

TEST(BjFeatures, Decision) {
    EXPECT_EQ(decision_features({1, 6}, 10), (std::vector<double>{17.0 / 21, 1.0, 1.0}));
    EXPECT_EQ(decision_features({10, 6}, 2), (std::vector<double>{16.0 / 21, 0.2, 0.0}));
    EXPECT_EQ(decision_features({1, 10, 10}, 5), (std::vector<double>{1.0, 0.5, 0.0}));
}

TEST(BjFeatures, TrueCount) {
    History h;
    EXPECT_EQ(true_count(h, 8), 0.0);
    h.add(5);
    EXPECT_NEAR(true_count(h, 8), 1.0 / 415, 1e-15);
    History g;
    for (int i = 0; i < 10; ++i) g.add(5);
    for (int i = 0; i < 198; ++i) g.add(7);
    EXPECT_EQ(g.size, 208);
    EXPECT_NEAR(true_count(g, 8), 10.0 / 208, 1e-15);
    History full;
    for (int i = 0; i < 52; ++i) full.add(7);
    EXPECT_THROW(true_count(full, 1), std::domain_error);
}

TEST(BjFeatures, BetFeaturesInUnitInterval) {
    Shoe shoe(8, 3);
    for (int i = 0; i < 400; ++i) {
        shoe.observe(shoe.draw());
        const auto f = bet_features(shoe.history(), 8);
        ASSERT_EQ(f.size(), 11u);
        for (std::size_t j = 1; j < 11; ++j) {
            ASSERT_GE(f[j], 0.0);
            ASSERT_LE(f[j], 1.0);
        }
    }
}

TEST(BjShoe, CompositionAndDeterminism) {
    Shoe a(8, 11), b(8, 11);
    const auto cards = a.remaining_cards();
    EXPECT_EQ(cards, b.remaining_cards());
    ASSERT_EQ(cards.size(), 416u);
    for (int v = 1; v <= 9; ++v) EXPECT_EQ(std::count(cards.begin(), cards.end(), v), 32);
    EXPECT_EQ(std::count(cards.begin(), cards.end(), 10), 128);
    EXPECT_NE(cards, Shoe(8, 12).remaining_cards());
    a.reshuffle();
    EXPECT_EQ(a.seed(), 12u);
    EXPECT_EQ(a.remaining_cards(), Shoe(8, 12).remaining_cards());
}

TEST(BjShoe, CardConservationDuringPlay) {
    Shoe shoe(2, 5);
    Rng rng(5);
    const Rules rules = [] {
        Rules r;
        r.decks = 2;
        return r;
    }();
    const auto policy = purely_random_policy();
    for (int k = 0; k < 2000; ++k) {
        play_hand(shoe, policy, 1.0, rules, rng);
        const auto rem = shoe.remaining_cards();
        for (int v = 1; v <= 10; ++v) {
            const long left = std::count(rem.begin(), rem.end(), v);
            ASSERT_EQ(left + shoe.history().count[static_cast<std::size_t>(v)], v == 10 ? 32 : 8) << v;
        }
    }
}

TEST(BjDealer, FuzzStandsAtSeventeen) {
    Shoe shoe(8, 21);
    for (int t = 0; t < 1000000; ++t) {
        if (shoe.remaining() < 30) shoe.reshuffle();
        std::vector<int> d = {shoe.draw(), shoe.draw()};
        const std::size_t start = d.size();
        dealer_play(d, shoe);
        ASSERT_GE(hand_value(d), 17);
        for (std::size_t n = start; n < d.size(); ++n)
            ASSERT_LT(hand_value(std::vector<int>(d.begin(), d.begin() + n)), 17);
    }
}

TEST(BjDealer, SoftSeventeenStands) {
    Shoe shoe(1, 1);
    shoe.load({5});
    std::vector<int> d = {1, 6};
    dealer_play(d, shoe);
    EXPECT_EQ(d.size(), 2u);
}

TEST(BjNight, FixtureRoiExample) {
    Shoe shoe(8, 1);
    // Hands: 20 v 19 (+1), 17 v 20 (-1), natural v 20 (+1.5), 18 v 18 (0).
    shoe.load({10, 10, 10, 9, 10, 7, 10, 10, 1, 10, 10, 10, 10, 8, 10, 8});
    Rng rng(1);
    const auto pol = stand_threshold_policy(false);
    double paid = 0, wagered = 0;
    std::vector<double> s;
    for (int k = 0; k < 4; ++k) {
        const auto rec = play_hand(shoe, pol, 1.0, fixture_rules(), rng);
        paid += rec.payoff;
        wagered += rec.wagered;
        s.push_back(rec.settlements[0]);
    }
    EXPECT_EQ(s, (std::vector<double>{1, -1, 1.5, 0}));
    EXPECT_DOUBLE_EQ(paid / wagered, 0.375);
}

TEST(BjNight, AllPushFixture) {
    Shoe shoe(8, 1);
    std::vector<int> cards;
    for (int k = 0; k < 10; ++k) cards.insert(cards.end(), {10, 9, 10, 9});
    shoe.load(cards);
    Rng rng(1);
    double paid = 0;
    for (int k = 0; k < 10; ++k) paid += play_hand(shoe, stand_threshold_policy(false), 1.0, fixture_rules(), rng).payoff;
    EXPECT_EQ(paid, 0.0);
}

TEST(BjNight, SplitDoublesTheStake) {
    Shoe shoe(8, 1);
    // Player 8,8 vs dealer 10,7; split hands get 10 and 10.
    shoe.load({8, 8, 10, 7, 10, 10});
    Rng rng(1);
    const DecisionPolicy split_then_stay = [](const DecisionContext&, const ActionMask& m, Rng&) {
        return m[static_cast<std::size_t>(Action::Split)] ? Action::Split : Action::Stay;
    };
    const auto rec = play_hand(shoe, split_then_stay, 2.0, fixture_rules(), rng);
    ASSERT_EQ(rec.hands.size(), 2u);
    EXPECT_EQ(rec.wagered, 4.0);
    EXPECT_EQ(rec.payoff, 4.0);
    EXPECT_EQ(rec.net(), 2.0);
}

TEST(BjNight, StakeRules) {
    Rules r;
    // Shallow cut so the 50 hands never reach a fresh shoe.
    r.penetration = 0.1;
    const auto night = play_night(stand_threshold_policy(false), [](const History&, int) { return 1.0; }, 50, 7, r,
                                  true);
    ASSERT_EQ(night.stakes.size(), 50u);
    EXPECT_EQ(night.stakes[0], 1.0);
    for (std::size_t k = 1; k < night.stakes.size(); ++k) EXPECT_EQ(night.stakes[k], 10.0);

    const auto shape = NetworkShape::standard(11, 1, Activation::Sigmoid);
    const auto zero = network_bet(shape, std::vector<double>(shape.num_params(), 0.0), 2);
    const auto n2 = play_night(stand_threshold_policy(false), zero, 20, 7, r, true);
    EXPECT_EQ(n2.stakes[0], 1.0);
    for (std::size_t k = 1; k < n2.stakes.size(); ++k) EXPECT_EQ(n2.stakes[k], 5.5);
    EXPECT_EQ(stake_from_propensity(1.0), 10.0);
    EXPECT_EQ(stake_from_propensity(0.0), 1.0);

    // Every reshuffle restarts at the table minimum.
    const Rules deep;
    const auto long_night = play_night(stand_threshold_policy(false), [](const History&, int) { return 1.0; }, 400, 7,
                                       deep, true);
    int minimum = 0;
    for (double s : long_night.stakes) {
        ASSERT_TRUE(s == 1.0 || s == 10.0);
        minimum += s == 1.0;
    }
    EXPECT_GE(minimum, 2);
}

TEST(BjNight, UnitBetRoiBoundsWithoutDoubleOrSplit) {
    Rules r;
    const auto night = play_night(random_stay_hit_policy(), unit_bet(), 3000, 9, r, true);
    for (double n : night.nets) {
        ASSERT_GE(n, -1.0);
        ASSERT_LE(n, 1.5);
    }
    EXPECT_EQ(night.wins + night.losses + night.pushes, 3000);
}

TEST(BjNight, SettlementTotality) {
    const std::set<double> allowed = {2, 1.5, 1, -2, -1, -0.5, 0};
    Shoe shoe(8, 13);
    Rng rng(13);
    const Rules r;
    for (int k = 0; k < 20000; ++k) {
        const auto rec = play_hand(shoe, purely_random_policy(), 1.0, r, rng);
        for (double s : rec.settlements) ASSERT_EQ(allowed.count(s), 1u) << s;
    }
}

TEST(BjNight, Deterministic) {
    const Rules r;
    const auto a = play_night(purely_random_policy(), unit_bet(), 500, 4, r);
    const auto b = play_night(purely_random_policy(), unit_bet(), 500, 4, r);
    EXPECT_EQ(a.roi, b.roi);
    EXPECT_EQ(a.hit_rate, b.hit_rate);
}

TEST(BjPolicies, Thresholds) {
    Rng rng(1);
    const auto s17 = stand_threshold_policy(false), h17 = stand_threshold_policy(true);
    const std::vector<int> h16 = {10, 6}, h17c = {10, 7}, soft17 = {1, 6};
    const ActionMask m = legal_actions(h16, false);
    for (int up = 1; up <= 10; ++up) {
        EXPECT_EQ(s17({&h16, up, false}, m, rng), Action::Hit);
        EXPECT_EQ(s17({&h17c, up, false}, m, rng), Action::Stay);
    }
    EXPECT_EQ(s17({&soft17, 5, false}, m, rng), Action::Stay);
    EXPECT_EQ(h17({&soft17, 5, false}, m, rng), Action::Hit);
}

TEST(BjPolicies, PurelyRandomUniformOverLegal) {
    Rng rng(2);
    const auto pol = purely_random_policy();
    const std::vector<int> cards = {8, 8};
    const auto m = legal_actions(cards, false);
    std::array<int, kNumActions> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(pol({&cards, 10, false}, m, rng))];
    for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.2, 0.01);
}

TEST(BjPolicies, BasicStrategyChart) {
    const auto bs = BasicStrategy::load(default_chart_path());
    EXPECT_EQ(bs.decide({8, 8}, 10, legal_actions({8, 8}, false)), Action::Split);
    EXPECT_EQ(bs.decide({10, 6}, 10, legal_actions({10, 6}, false)), Action::Surrender);
    EXPECT_EQ(bs.decide({10, 6}, 10, legal_actions({10, 6}, true)), Action::Hit);
    EXPECT_EQ(bs.decide({6, 5}, 6, legal_actions({6, 5}, false)), Action::Double);
    EXPECT_EQ(bs.decide({10, 7}, 1, legal_actions({10, 7}, false)), Action::Stay);
    EXPECT_EQ(bs.decide({10, 2}, 2, legal_actions({10, 2}, false)), Action::Hit);
    EXPECT_THROW(bs.code("H99", 5), std::runtime_error);
    EXPECT_THROW(BasicStrategy::parse("H10 D D D\n"), std::runtime_error);
}

TEST(BjPolicies, BasicStrategyCoversEveryLegalState) {
    const auto bs = BasicStrategy::load(default_chart_path());
    std::vector<int> cur;
    multisets(6, 1, cur, [&](const std::vector<int>& cards) {
        if (cards.size() < 2 || hand_value(cards) > 21) return;
        for (bool split : {false, true}) {
            const auto m = legal_actions(cards, split);
            for (int up = 1; up <= 10; ++up) {
                const Action a = bs.decide(cards, up, m);
                ASSERT_TRUE(m[static_cast<std::size_t>(a)]);
            }
        }
    });
}

TEST(BjPolicies, NetworkPolicyRespectsMask) {
    const auto shape = NetworkShape::standard(3, 5, Activation::Identity);
    std::vector<double> th(shape.num_params(), 0.0);
    th[th.size() - 5 + 2] = 50.0;  // strongly prefer Split
    const auto pol = network_policy(shape, th);
    Rng rng(1);
    const std::vector<int> c89 = {8, 9}, c88 = {8, 8};
    EXPECT_EQ(pol({&c88, 10, false}, legal_actions(c88, false), rng), Action::Split);
    EXPECT_NE(pol({&c89, 10, false}, legal_actions(c89, false), rng), Action::Split);
    EXPECT_THROW(network_policy(shape, std::vector<double>(3, 0.0)), ShapeError);
}
