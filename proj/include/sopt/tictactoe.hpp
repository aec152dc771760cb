#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sopt/network.hpp"
#include "sopt/rng.hpp"

namespace sopt::ttt {

/// Row-major 3x3 grid: O = +1 (player, moves first), X = -1, empty = 0.
using Board = std::array<int, 9>;

/// 9x8 line-membership matrix: rows, columns, main diagonal, anti-diagonal.
extern const std::array<std::array<int, 8>, 9> kStateMatrix;

/// m' S.
std::array<int, 8> line_sums(const Board& m);

enum Outcome : int { XWins = -1, Draw = 0, OWins = 1, NonTerminal = 2 };

/// +1 / -1 for a completed line, 0 once every line holds both tokens.
int game_status(const Board& m);

/// 1-based indices of empty cells.
std::vector<int> legal_actions(const Board& m);

enum class Variant { I, II };

/// 9 -> 3 -> 3 -> 9 for variant I, 17 -> 3 -> 3 -> 9 for variant II.
NetworkShape player_shape(Variant v);
std::vector<double> features(const Board& m, Variant v);

/// Argmax of the masked softmax (lowest index on ties), 1-based.
int player_action(const Board& m, const std::vector<double>& theta, Variant v);

/// Uniform over legal cells, 1-based.
int opponent_action(const Board& m, Rng& rng);

/// Chooses the next O move; called only when a legal move exists.
using PlayerFn = std::function<int(const Board&, Rng&)>;

PlayerFn network_player(std::vector<double> theta, Variant v);
PlayerFn random_player();

struct GameLog {
    std::uint64_t seed = 0;
    int rho = 0;
    std::vector<int> player;
    std::vector<int> opponent;
};

/// One game. The opponent (and a random player) draw from Rng(seed).
GameLog play_game(const PlayerFn& player, std::uint64_t seed);

struct GamesResult {
    double win_fraction = 0.0;
    std::vector<GameLog> games;
};

GamesResult play_games(const PlayerFn& player, const std::vector<std::uint64_t>& seeds, bool keep_logs = true);

/// Seeds 1..k (the training convention used by the harness).
std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count);

struct TestSet {
    std::vector<std::uint64_t> seeds;
    /// False when the candidate cap ran out before `target` seeds were found.
    bool complete = true;
    std::uint64_t candidates_tried = 0;
};

struct SearchCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scan seeds from `seed_start`, skipping training seeds and any seed whose opponent
/// sequence repeats a training or already accepted sequence. At most 10 x target
/// candidates are tried; running out throws unless `allow_partial` is set.
TestSet build_test_set(const std::vector<GameLog>& train, std::size_t target, const PlayerFn& player,
                       std::uint64_t seed_start, bool allow_partial = false);

/// Exact first-mover win probability when both sides pick uniformly among empty cells.
double exact_random_win_probability();

std::string format_log(std::size_t game_id, const GameLog& g);

}  // namespace sopt::ttt
