#include "sopt/tictactoe.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace sopt::ttt {

const std::array<std::array<int, 8>, 9> kStateMatrix = {{
    {1, 0, 0, 1, 0, 0, 1, 0},
    {1, 0, 0, 0, 1, 0, 0, 0},
    {1, 0, 0, 0, 0, 1, 0, 1},
    {0, 1, 0, 1, 0, 0, 0, 0},
    {0, 1, 0, 0, 1, 0, 1, 1},
    {0, 1, 0, 0, 0, 1, 0, 0},
    {0, 0, 1, 1, 0, 0, 0, 1},
    {0, 0, 1, 0, 1, 0, 0, 0},
    {0, 0, 1, 0, 0, 1, 1, 0},
}};

std::array<int, 8> line_sums(const Board& m) {
    std::array<int, 8> s{};
    for (int i = 0; i < 9; ++i)
        for (int c = 0; c < 8; ++c) s[c] += m[i] * kStateMatrix[i][c];
    return s;
}

int game_status(const Board& m) {
    const auto s = line_sums(m);
    for (int v : s)
        if (v == 3) return OWins;
    for (int v : s)
        if (v == -3) return XWins;
    int both = 0;
    for (int c = 0; c < 8; ++c) {
        bool plus = false, minus = false;
        for (int i = 0; i < 9; ++i) {
            if (!kStateMatrix[i][c]) continue;
            plus |= m[i] == 1;
            minus |= m[i] == -1;
        }
        both += plus && minus;
    }
    return both == 8 ? Draw : NonTerminal;
}

std::vector<int> legal_actions(const Board& m) {
    std::vector<int> a;
    for (int i = 0; i < 9; ++i)
        if (m[i] == 0) a.push_back(i + 1);
    return a;
}

NetworkShape player_shape(Variant v) {
    return NetworkShape::standard(v == Variant::I ? 9 : 17, 9, Activation::Identity);
}

std::vector<double> features(const Board& m, Variant v) {
    std::vector<double> f(m.begin(), m.end());
    if (v == Variant::II)
        for (int s : line_sums(m)) f.push_back(s);
    return f;
}

int player_action(const Board& m, const std::vector<double>& theta, Variant v) {
    const auto logits = forward(player_shape(v), theta, features(m, v));
    std::vector<bool> valid(9);
    for (int i = 0; i < 9; ++i) valid[i] = m[i] == 0;
    return static_cast<int>(argmax_valid(logits, valid)) + 1;
}

int opponent_action(const Board& m, Rng& rng) {
    const auto a = legal_actions(m);
    if (a.empty()) throw NoValidAction("no empty cell");
    return a[rng.below(a.size())];
}

PlayerFn network_player(std::vector<double> theta, Variant v) {
    if (theta.size() != player_shape(v).num_params()) throw ShapeError("tic-tac-toe theta has wrong length");
    return [theta = std::move(theta), v](const Board& m, Rng&) { return player_action(m, theta, v); };
}

PlayerFn random_player() {
    return [](const Board& m, Rng& rng) { return opponent_action(m, rng); };
}

GameLog play_game(const PlayerFn& player, std::uint64_t seed) {
    Rng rng(seed);
    Board m{};
    GameLog g;
    g.seed = seed;
    for (int ply = 0; ply < 9; ++ply) {
        const bool o_turn = ply % 2 == 0;
        const int a = o_turn ? player(m, rng) : opponent_action(m, rng);
        if (a < 1 || a > 9 || m[a - 1] != 0) throw std::logic_error("illegal move");
        m[a - 1] = o_turn ? 1 : -1;
        (o_turn ? g.player : g.opponent).push_back(a);
        const int st = game_status(m);
        if (st != NonTerminal) {
            g.rho = st;
            return g;
        }
    }
    g.rho = Draw;  // unreachable: a full board is always terminal
    return g;
}

GamesResult play_games(const PlayerFn& player, const std::vector<std::uint64_t>& seeds, bool keep_logs) {
    GamesResult r;
    std::size_t wins = 0;
    for (auto s : seeds) {
        auto g = play_game(player, s);
        wins += g.rho == OWins;
        if (keep_logs) r.games.push_back(std::move(g));
    }
    r.win_fraction = seeds.empty() ? 0.0 : static_cast<double>(wins) / static_cast<double>(seeds.size());
    return r;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
    std::vector<std::uint64_t> s(count);
    for (std::size_t i = 0; i < count; ++i) s[i] = first + i;
    return s;
}

TestSet build_test_set(const std::vector<GameLog>& train, std::size_t target, const PlayerFn& player,
                       std::uint64_t seed_start, bool allow_partial) {
    std::set<std::vector<int>> seen;
    std::set<std::uint64_t> train_seeds;
    for (const auto& g : train) {
        seen.insert(g.opponent);
        train_seeds.insert(g.seed);
    }
    TestSet t;
    const std::uint64_t cap = 10 * static_cast<std::uint64_t>(target);
    for (std::uint64_t s = seed_start; t.seeds.size() < target && t.candidates_tried < cap; ++s) {
        if (train_seeds.count(s)) continue;
        ++t.candidates_tried;
        if (seen.insert(play_game(player, s).opponent).second) t.seeds.push_back(s);
    }
    t.complete = t.seeds.size() == target;
    if (!t.complete && !allow_partial)
        throw SearchCapExceeded("found " + std::to_string(t.seeds.size()) + " distinct opponent sequences of " +
                                std::to_string(target) + " requested");
    return t;
}

namespace {
double win_prob(Board& m, bool o_turn) {
    const int st = game_status(m);
    if (st != NonTerminal) return st == OWins ? 1.0 : 0.0;
    const auto a = legal_actions(m);
    double p = 0.0;
    for (int c : a) {
        m[c - 1] = o_turn ? 1 : -1;
        p += win_prob(m, !o_turn);
        m[c - 1] = 0;
    }
    return p / static_cast<double>(a.size());
}
}  // namespace

double exact_random_win_probability() {
    Board m{};
    return win_prob(m, true);
}

std::string format_log(std::size_t game_id, const GameLog& g) {
    std::ostringstream os;
    os << game_id << ',' << g.seed << ',' << g.rho << ',';
    for (std::size_t i = 0; i < g.player.size(); ++i) os << (i ? " " : "") << g.player[i];
    os << ',';
    for (std::size_t i = 0; i < g.opponent.size(); ++i) os << (i ? " " : "") << g.opponent[i];
    return os.str();
}

}  // namespace sopt::ttt
