#include <gtest/gtest.h>

#include <map>
#include <set>

#include "sopt/tictactoe.hpp"

using namespace sopt;
using namespace sopt::ttt;

namespace {

// Independent line scanner over explicit cell triples (0-based).
const int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6}, {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};

int scan_winner(const Board& m) {
    for (const auto& l : kLines) {
        const int s = m[l[0]] + m[l[1]] + m[l[2]];
        if (s == 3) return 1;
        if (s == -3) return -1;
    }
    return 0;
}

int scan_status(const Board& m) {
    if (const int w = scan_winner(m)) return w;
    for (const auto& l : kLines) {
        bool has_o = false, has_x = false;
        for (int c : l) {
            has_o |= m[c] == 1;
            has_x |= m[c] == -1;
        }
        if (!(has_o && has_x)) return NonTerminal;
    }
    return Draw;
}

// Positions reachable when play stops only at a win or a full board.
void enumerate(Board& m, bool o_turn, std::set<Board>& seen) {
    if (!seen.insert(m).second) return;
    if (scan_winner(m) != 0) return;
    for (int c = 0; c < 9; ++c) {
        if (m[c] != 0) continue;
        m[c] = o_turn ? 1 : -1;
        enumerate(m, !o_turn, seen);
        m[c] = 0;
    }
}

double oracle_win_prob(Board& m, bool o_turn) {
    const int w = scan_winner(m);
    if (w != 0) return w == 1 ? 1.0 : 0.0;
    std::vector<int> empty;
    for (int c = 0; c < 9; ++c)
        if (m[c] == 0) empty.push_back(c);
    if (empty.empty()) return 0.0;
    double p = 0;
    for (int c : empty) {
        m[c] = o_turn ? 1 : -1;
        p += oracle_win_prob(m, !o_turn);
        m[c] = 0;
    }
    return p / empty.size();
}

std::vector<double> biased_theta(Variant v, int cell_1based, double value) {
    std::vector<double> th(player_shape(v).num_params(), 0.0);
    th[th.size() - 9 + cell_1based - 1] = value;
    return th;
}

}  // namespace

TEST(TttBoard, StateMatrixColumnsSumToThree) {
    for (int j = 0; j < 8; ++j) {
        int s = 0;
        for (int i = 0; i < 9; ++i) s += kStateMatrix[i][j];
        EXPECT_EQ(s, 3);
    }
}

TEST(TttBoard, Examples) {
    EXPECT_EQ(game_status(Board{1, 1, 1, 0, 0, 0, 0, 0, 0}), OWins);
    EXPECT_EQ(line_sums(Board{1, 1, 1, 0, 0, 0, 0, 0, 0})[0], 3);
    EXPECT_EQ(game_status(Board{}), NonTerminal);
    EXPECT_EQ(game_status(Board{-1, 0, 0, 0, -1, 0, 0, 0, -1}), XWins);
}

TEST(TttBoard, ExhaustiveOracleEquivalence) {
    std::set<Board> seen;
    Board m{};
    enumerate(m, true, seen);
    EXPECT_EQ(seen.size(), 5478u);
    std::map<int, int> counts;
    for (const auto& b : seen) {
        ASSERT_EQ(game_status(b), scan_status(b));
        ++counts[game_status(b)];
        int o = 0, x = 0;
        for (int c : b) {
            o += c == 1;
            x += c == -1;
        }
        ASSERT_TRUE(o - x == 0 || o - x == 1);
    }
    EXPECT_GT(counts[Draw], 0);
}

TEST(TttBoard, LegalActions) {
    EXPECT_EQ(legal_actions(Board{}), (std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9}));
    EXPECT_TRUE(legal_actions(Board{1, -1, 1, 1, -1, -1, -1, 1, 1}).empty());
    EXPECT_EQ(legal_actions(Board{0, 0, 0, 0, 1, 0, 0, 0, 0}), (std::vector<int>{1, 2, 3, 4, 6, 7, 8, 9}));
}

TEST(TttPlayer, Shapes) {
    EXPECT_EQ(player_shape(Variant::I).num_inputs(), 9u);
    EXPECT_EQ(player_shape(Variant::II).num_inputs(), 17u);
    EXPECT_EQ(player_shape(Variant::II).num_outputs(), 9u);
    const Board m{1, 0, -1, 0, 1, 0, 0, 0, 0};
    const auto f = features(m, Variant::II);
    ASSERT_EQ(f.size(), 17u);
    EXPECT_EQ(f[9 + 6], 2);  // main diagonal
}

TEST(TttPlayer, Examples) {
    EXPECT_EQ(player_action(Board{}, std::vector<double>(player_shape(Variant::I).num_params(), 0.0), Variant::I), 1);
    EXPECT_EQ(player_action(Board{}, biased_theta(Variant::I, 5, 10), Variant::I), 5);
    EXPECT_EQ(player_action(Board{}, biased_theta(Variant::II, 7, 10), Variant::II), 7);
    // Favored cell occupied: next best (lowest index among ties) is taken instead.
    EXPECT_EQ(player_action(Board{-1, 0, 0, 0, 0, 0, 0, 0, 0}, biased_theta(Variant::I, 1, 10), Variant::I), 2);
    EXPECT_THROW(player_action(Board{1, -1, 1, 1, -1, -1, -1, 1, 1}, biased_theta(Variant::I, 1, 1), Variant::I),
                 NoValidAction);
}

TEST(TttPlayer, MaskingFuzz) {
    Rng r(1);
    const auto shape = player_shape(Variant::II);
    for (int t = 0; t < 100000; ++t) {
        Board m{};
        const int filled = static_cast<int>(r.below(9));
        for (int i = 0; i < filled; ++i) {
            const auto legal = legal_actions(m);
            m[legal[r.below(legal.size())] - 1] = i % 2 == 0 ? 1 : -1;
        }
        std::vector<double> th(shape.num_params());
        for (auto& x : th) x = r.normal(0, 2);
        const int a = player_action(m, th, Variant::II);
        ASSERT_GE(a, 1);
        ASSERT_LE(a, 9);
        ASSERT_EQ(m[a - 1], 0);
    }
}

TEST(TttOpponent, Examples) {
    Rng r(2);
    EXPECT_EQ(opponent_action(Board{1, -1, 1, 1, -1, -1, 0, 1, 1}, r), 7);
    std::vector<int> counts(9, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[opponent_action(Board{}, r) - 1];
    for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 1.0 / 9, 0.005);
    Rng a(3), b(3);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(opponent_action(Board{}, a), opponent_action(Board{}, b));
}

TEST(TttGames, ReplayedLogsAreLegalAndConsistent) {
    const auto res = play_games(random_player(), seed_range(1, 5000));
    for (const auto& g : res.games) {
        Board m{};
        ASSERT_LE(g.player.size() + g.opponent.size(), 9u);
        ASSERT_TRUE(g.player.size() == g.opponent.size() || g.player.size() == g.opponent.size() + 1);
        std::size_t pi = 0, oi = 0;
        const std::size_t plies = g.player.size() + g.opponent.size();
        for (std::size_t ply = 0; ply < plies; ++ply) {
            ASSERT_EQ(scan_status(m), NonTerminal);
            const int a = ply % 2 == 0 ? g.player[pi++] : g.opponent[oi++];
            ASSERT_EQ(m[a - 1], 0);
            m[a - 1] = ply % 2 == 0 ? 1 : -1;
        }
        ASSERT_EQ(scan_status(m), g.rho);
    }
}

TEST(TttGames, QuickWinWhenOpponentNeverBlocks) {
    // Player takes the top row in order; find a seed where the opponent never touches it.
    const PlayerFn top_row = [](const Board& m, Rng&) {
        for (int c : {1, 2, 3, 4, 5, 6, 7, 8, 9})
            if (m[c - 1] == 0) return c;
        return 0;
    };
    bool found = false;
    for (std::uint64_t s = 1; s < 200 && !found; ++s) {
        const auto g = play_game(top_row, s);
        if (g.player == std::vector<int>{1, 2, 3}) {
            EXPECT_EQ(g.rho, OWins);
            EXPECT_EQ(g.opponent.size(), 2u);
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(TttGames, ExactEnumerationMatchesOracle) {
    Board m{};
    const double oracle = oracle_win_prob(m, true);
    EXPECT_NEAR(exact_random_win_probability(), oracle, 1e-12);
    EXPECT_NEAR(oracle, 0.584921, 5e-7);
}

TEST(TttGames, RandomVsRandomMatchesExact) {
    const auto res = play_games(random_player(), seed_range(1, 100000), false);
    EXPECT_NEAR(res.win_fraction, exact_random_win_probability(), 0.01);
}

TEST(TttGames, FormatLog) {
    GameLog g{42, 1, {5, 1, 9}, {2, 3}};
    EXPECT_EQ(format_log(7, g), "7,42,1,5 1 9,2 3");
}

TEST(TttTestSet, FirstCandidateAcceptedWithEmptyTrain) {
    const auto t = build_test_set({}, 1, random_player(), 1000);
    ASSERT_EQ(t.seeds.size(), 1u);
    EXPECT_EQ(t.seeds[0], 1000u);
    EXPECT_TRUE(t.complete);
}

TEST(TttTestSet, DistinctAndDisjointFromTraining) {
    const auto player = random_player();
    const auto train = play_games(player, seed_range(1, 300)).games;
    const auto t = build_test_set(train, 500, player, 1);
    ASSERT_EQ(t.seeds.size(), 500u);
    std::set<std::vector<int>> train_seqs, test_seqs;
    for (const auto& g : train) train_seqs.insert(g.opponent);
    for (auto s : t.seeds) {
        EXPECT_GT(s, 300u);
        const auto seq = play_game(player, s).opponent;
        EXPECT_EQ(train_seqs.count(seq), 0u);
        EXPECT_TRUE(test_seqs.insert(seq).second);
    }
    // Skipped seeds are exactly the duplicates.
    EXPECT_GE(t.candidates_tried, 500u);
}

TEST(TttTestSet, Deterministic) {
    const auto player = network_player(biased_theta(Variant::I, 5, 1.0), Variant::I);
    const auto train = play_games(player, seed_range(1, 50)).games;
    const auto a = build_test_set(train, 60, player, 1, true);
    const auto b = build_test_set(train, 60, player, 1, true);
    EXPECT_EQ(a.seeds, b.seeds);
}

TEST(TttTestSet, CapExceededThrowsUnlessPartial) {
    // A deterministic player leaves only the opponent's choices, far fewer than 10,000 sequences.
    const auto player = network_player(std::vector<double>(player_shape(Variant::I).num_params(), 0.0), Variant::I);
    EXPECT_THROW(build_test_set({}, 1000, player, 1), SearchCapExceeded);
    const auto t = build_test_set({}, 1000, player, 1, true);
    EXPECT_FALSE(t.complete);
    EXPECT_EQ(t.candidates_tried, 10000u);
    EXPECT_LT(t.seeds.size(), 1000u);
}

// Opponent sequences have at most 9 + 72 + 504 + 3024 possible values.
TEST(TttTestSet, SequenceSpaceIsBounded) {
    const auto res = play_games(random_player(), seed_range(1, 20000));
    std::set<std::vector<int>> seqs;
    for (const auto& g : res.games) seqs.insert(g.opponent);
    EXPECT_LE(seqs.size(), 3609u);
}
