#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sopt/network.hpp"
#include "sopt/rng.hpp"

namespace sopt::bj {

enum class Action { Stay = 0, Hit = 1, Split = 2, Surrender = 3, Double = 4 };
inline constexpr std::size_t kNumActions = 5;
const char* action_name(Action a);

/// Sum of cards, plus 10 when an ace can count as 11 without busting.
int hand_value(const std::vector<int>& cards);
bool usable_ace(const std::vector<int>& cards);

struct Rules {
    int decks = 8;
    double penetration = 0.5;
    /// Settlement for a doubled hand that loses to a standing dealer.
    double doubled_loss = -2.0;
    /// Whether a two-card 21 on a split hand pays as a natural.
    bool split_natural = false;
    /// Split aces receive one card each and stand.
    bool split_aces_one_card = false;
    bool allow_surrender = true;
    /// Dealer checks for a natural before the player acts; the hand ends at once.
    bool dealer_peek = false;
    /// A hand reaching 21 stands automatically.
    bool stand_on_21 = true;
};

/// Card counts seen since the last shuffle.
struct History {
    std::array<int, 11> count{};  // index 1..10
    int size = 0;
    int running_count = 0;
    void add(int card);
    void clear() { *this = History{}; }
};

int hilo_value(int card);

/// RC / (52 D0 - |history|). Throws when the shoe is exhausted.
double true_count(const History& h, int decks);

/// [TC/3, a_2..a_9, a_10, a_ace]; 11 entries.
std::vector<double> bet_features(const History& h, int decks);

class Shoe {
public:
    Shoe(int decks, std::uint64_t seed);
    int draw();
    int remaining() const { return static_cast<int>(cards_.size() - pos_); }
    std::uint64_t seed() const { return seed_; }
    /// Reshuffle with the next seed (seed + 1) and clear the history.
    void reshuffle();
    const History& history() const { return hist_; }
    /// Record a dealt card as observed by the player.
    void observe(int card) { hist_.add(card); }
    /// Cards still in the shoe, in dealing order.
    std::vector<int> remaining_cards() const { return {cards_.begin() + static_cast<long>(pos_), cards_.end()}; }
    int decks() const { return decks_; }
    /// Replace the shoe contents with a fixed sequence (fixtures).
    void load(std::vector<int> cards);

private:
    void shuffle();
    int decks_;
    std::uint64_t seed_;
    std::vector<int> cards_;
    std::size_t pos_ = 0;
    History hist_;
};

struct DecisionContext {
    const std::vector<int>* cards;
    int upcard;
    bool after_split;
};

using ActionMask = std::array<bool, kNumActions>;

ActionMask legal_actions(const std::vector<int>& cards, bool after_split, bool allow_surrender = true);

/// (value/21, upcard/10, usable ace).
std::vector<double> decision_features(const std::vector<int>& cards, int upcard);

using DecisionPolicy = std::function<Action(const DecisionContext&, const ActionMask&, Rng&)>;
/// Betting propensity in [0, 1] given the history before the hand.
using BetPolicy = std::function<double(const History&, int decks)>;

struct SubHand {
    std::vector<int> cards;
    bool doubled = false;
    bool surrendered = false;
    bool from_split = false;
    std::vector<Action> actions;
};

struct HandRecord {
    std::vector<SubHand> hands;
    std::vector<int> dealer;  // up, hole, extras
    double stake = 1.0;       // per initial hand
    std::vector<double> settlements;
    double payoff = 0.0;      // sum of settlement * stake
    double wagered = 0.0;     // stake * number of sub-hands
    double net() const { return payoff / stake; }
};

/// Settlement multiplier for a finished sub-hand against the dealer's cards.
double settle(const SubHand& hand, const std::vector<int>& dealer, const Rules& rules);

struct NightResult {
    double roi = 0.0;
    double hit_rate = 0.0;       // wins / (wins + losses); pushes excluded
    double win_rate = 0.0;       // wins / hands
    int hands = 0;
    int wins = 0, losses = 0, pushes = 0;
    std::vector<double> stakes;
    std::vector<double> nets;
};

/// Dealer draws to 17 and stands on soft 17.
void dealer_play(std::vector<int>& dealer, Shoe& shoe);

/// One hand from a shoe; reshuffles first when the shoe is below penetration.
HandRecord play_hand(Shoe& shoe, const DecisionPolicy& decide, double stake, const Rules& rules, Rng& rng);

/// K hands from a fresh shoe seeded with `seed`.
NightResult play_night(const DecisionPolicy& decide, const BetPolicy& bet, int hands, std::uint64_t seed,
                       const Rules& rules, bool keep_log = false);

double stake_from_propensity(double bet);

// Decision policies.
DecisionPolicy network_policy(const NetworkShape& shape, std::vector<double> theta);
DecisionPolicy stand_threshold_policy(bool hit_soft17);  // S17 (false) or H17 (true)
DecisionPolicy purely_random_policy();
DecisionPolicy random_stay_hit_policy();

/// Chart-driven basic strategy loaded from a text file.
class BasicStrategy {
public:
    static BasicStrategy load(const std::string& path);
    static BasicStrategy parse(const std::string& text);
    Action decide(const std::vector<int>& cards, int upcard, const ActionMask& legal) const;
    DecisionPolicy policy() const;
    /// Chart code at a row ("H16", "S18", "P8") and upcard (2..11, 11 = ace).
    std::string code(const std::string& row, int upcard) const;

private:
    std::vector<std::pair<std::string, std::array<std::string, 10>>> rows_;
    const std::array<std::string, 10>* find(const std::string& row) const;
};

/// Path of the chart shipped with the project.
std::string default_chart_path();

// Bet policies.
BetPolicy unit_bet();
BetPolicy threshold_bet(double x);
/// variant 1 uses only TC/3; variant 2 all 11 features. Sigmoid output.
BetPolicy network_bet(const NetworkShape& shape, std::vector<double> theta, int variant);

}  // namespace sopt::bj
