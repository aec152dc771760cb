#include "sopt/blackjack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef SOPT_DATA_DIR
#define SOPT_DATA_DIR "data"
#endif

namespace sopt::bj {

const char* action_name(Action a) {
    switch (a) {
        case Action::Stay: return "stay";
        case Action::Hit: return "hit";
        case Action::Split: return "split";
        case Action::Surrender: return "surrender";
        case Action::Double: return "double";
    }
    return "?";
}

int hand_value(const std::vector<int>& cards) {
    int sum = 0;
    bool ace = false;
    for (int c : cards) {
        sum += c;
        ace = ace || c == 1;
    }
    return (ace && sum + 10 <= 21) ? sum + 10 : sum;
}

bool usable_ace(const std::vector<int>& cards) {
    int sum = 0;
    bool ace = false;
    for (int c : cards) {
        sum += c;
        ace = ace || c == 1;
    }
    return ace && sum + 10 <= 21;
}

int hilo_value(int card) {
    if (card >= 2 && card <= 6) return 1;
    if (card >= 7 && card <= 9) return 0;
    return -1;
}

void History::add(int card) {
    ++count[static_cast<std::size_t>(card)];
    ++size;
    running_count += hilo_value(card);
}

double true_count(const History& h, int decks) {
    const int left = 52 * decks - h.size;
    if (left <= 0) throw std::domain_error("true count of an exhausted shoe");
    return static_cast<double>(h.running_count) / static_cast<double>(left);
}

std::vector<double> bet_features(const History& h, int decks) {
    std::vector<double> a(11);
    a[0] = true_count(h, decks) / 3.0;
    const double per_rank = 4.0 * decks;
    for (int i = 2; i <= 9; ++i) a[static_cast<std::size_t>(i - 1)] = 1.0 - h.count[static_cast<std::size_t>(i)] / per_rank;
    a[9] = 1.0 - h.count[10] / (16.0 * decks);
    a[10] = 1.0 - h.count[1] / per_rank;
    return a;
}

Shoe::Shoe(int decks, std::uint64_t seed) : decks_(decks), seed_(seed) {
    if (decks < 1) throw std::invalid_argument("shoe needs at least one deck");
    shuffle();
}

void Shoe::shuffle() {
    cards_.clear();
    cards_.reserve(static_cast<std::size_t>(52 * decks_));
    for (int d = 0; d < decks_; ++d)
        for (int suit = 0; suit < 4; ++suit)
            for (int r = 1; r <= 13; ++r) cards_.push_back(std::min(r, 10));
    Rng rng(seed_);
    for (std::size_t i = cards_.size() - 1; i > 0; --i) std::swap(cards_[i], cards_[rng.below(i + 1)]);
    pos_ = 0;
    hist_.clear();
}

void Shoe::reshuffle() {
    ++seed_;
    shuffle();
}

void Shoe::load(std::vector<int> cards) {
    cards_ = std::move(cards);
    pos_ = 0;
    hist_.clear();
}

int Shoe::draw() {
    if (pos_ >= cards_.size()) throw std::runtime_error("shoe exhausted");
    return cards_[pos_++];
}

ActionMask legal_actions(const std::vector<int>& cards, bool after_split, bool allow_surrender) {
    ActionMask m{};
    if (hand_value(cards) > 21) return m;
    m[static_cast<std::size_t>(Action::Stay)] = true;
    m[static_cast<std::size_t>(Action::Hit)] = true;
    if (cards.size() == 2) {
        m[static_cast<std::size_t>(Action::Double)] = true;
        if (!after_split) {
            m[static_cast<std::size_t>(Action::Surrender)] = allow_surrender;
            if (cards[0] == cards[1]) m[static_cast<std::size_t>(Action::Split)] = true;
        }
    }
    return m;
}

std::vector<double> decision_features(const std::vector<int>& cards, int upcard) {
    return {hand_value(cards) / 21.0, hand_value({upcard}) / 10.0, usable_ace(cards) ? 1.0 : 0.0};
}

double settle(const SubHand& h, const std::vector<int>& dealer, const Rules& rules) {
    if (h.cards.size() < 2 || dealer.size() < 2) throw std::invalid_argument("settle: hand not played out");
    if (h.surrendered) return -0.5;
    const int p = hand_value(h.cards);
    const int d = hand_value(dealer);
    const int d2 = hand_value({dealer[0], dealer[1]});
    const bool valid = p <= 21;
    if (h.doubled && valid && (p > d || d > 21)) return 2.0;
    if (h.cards.size() == 2 && p == 21 && (!h.from_split || rules.split_natural) && d2 != 21) return 1.5;
    if (!h.doubled && valid && (p > d || d > 21)) return 1.0;
    if (!valid) return h.doubled ? -2.0 : -1.0;
    if (p < d && d <= 21) return h.doubled ? rules.doubled_loss : -1.0;
    return 0.0;
}

void dealer_play(std::vector<int>& dealer, Shoe& shoe) {
    while (hand_value(dealer) < 17) dealer.push_back(shoe.draw());
}

namespace {

bool needs_shuffle(const Shoe& shoe, const Rules& rules) {
    return shoe.remaining() < rules.penetration * 52.0 * shoe.decks();
}

void play_sub_hand(SubHand& h, int upcard, Shoe& shoe, const DecisionPolicy& decide, Rng& rng,
                   std::vector<SubHand>& pending, const Rules& rules) {
    if (rules.split_aces_one_card && h.from_split && h.cards[0] == 1) return;
    for (;;) {
        if (rules.stand_on_21 && hand_value(h.cards) == 21) return;
        const auto mask = legal_actions(h.cards, h.from_split, rules.allow_surrender);
        if (!std::any_of(mask.begin(), mask.end(), [](bool b) { return b; })) return;
        const Action a = decide(DecisionContext{&h.cards, upcard, h.from_split}, mask, rng);
        if (!mask[static_cast<std::size_t>(a)]) throw std::logic_error("policy chose an illegal action");
        h.actions.push_back(a);
        switch (a) {
            case Action::Stay: return;
            case Action::Hit: h.cards.push_back(shoe.draw()); break;
            case Action::Double:
                h.doubled = true;
                h.cards.push_back(shoe.draw());
                return;
            case Action::Surrender: h.surrendered = true; return;
            case Action::Split: {
                SubHand second;
                second.cards = {h.cards[1], shoe.draw()};
                second.from_split = true;
                h.cards = {h.cards[0], shoe.draw()};
                h.from_split = true;
                pending.push_back(std::move(second));
                break;
            }
        }
    }
}

}  // namespace

HandRecord play_hand(Shoe& shoe, const DecisionPolicy& decide, double stake, const Rules& rules, Rng& rng) {
    if (needs_shuffle(shoe, rules)) shoe.reshuffle();
    HandRecord rec;
    rec.stake = stake;
    SubHand first;
    first.cards.push_back(shoe.draw());
    first.cards.push_back(shoe.draw());
    rec.dealer.push_back(shoe.draw());
    rec.dealer.push_back(shoe.draw());
    const int up = rec.dealer[0];

    std::vector<SubHand> pending;
    if (!(rules.dealer_peek && hand_value(rec.dealer) == 21))
        play_sub_hand(first, up, shoe, decide, rng, pending, rules);
    rec.hands.push_back(std::move(first));
    for (std::size_t i = 0; i < pending.size(); ++i) {
        SubHand h = std::move(pending[i]);
        play_sub_hand(h, up, shoe, decide, rng, pending, rules);
        rec.hands.push_back(std::move(h));
    }
    dealer_play(rec.dealer, shoe);

    for (const auto& h : rec.hands) {
        const double s = settle(h, rec.dealer, rules);
        rec.settlements.push_back(s);
        rec.payoff += s * stake;
        rec.wagered += stake;
        for (int c : h.cards) shoe.observe(c);
    }
    for (int c : rec.dealer) shoe.observe(c);
    return rec;
}

double stake_from_propensity(double bet) { return 1.0 + 9.0 * std::clamp(bet, 0.0, 1.0); }

NightResult play_night(const DecisionPolicy& decide, const BetPolicy& bet, int hands, std::uint64_t seed,
                       const Rules& rules, bool keep_log) {
    Shoe shoe(rules.decks, seed);
    Rng rng = Rng(seed).substream(1);
    NightResult r;
    double paid = 0.0, wagered = 0.0;
    for (int k = 0; k < hands; ++k) {
        if (needs_shuffle(shoe, rules)) shoe.reshuffle();
        const auto& h = shoe.history();
        const double stake = h.size == 0 ? 1.0 : stake_from_propensity(bet(h, rules.decks));
        const HandRecord rec = play_hand(shoe, decide, stake, rules, rng);
        paid += rec.payoff;
        wagered += rec.wagered;
        const double net = rec.net();
        if (net > 0) ++r.wins;
        else if (net < 0) ++r.losses;
        else ++r.pushes;
        if (keep_log) {
            r.stakes.push_back(stake);
            r.nets.push_back(net);
        }
    }
    r.hands = hands;
    r.roi = wagered > 0 ? paid / wagered : 0.0;
    r.win_rate = hands > 0 ? static_cast<double>(r.wins) / hands : 0.0;
    r.hit_rate = (r.wins + r.losses) > 0 ? static_cast<double>(r.wins) / (r.wins + r.losses) : 0.0;
    return r;
}

DecisionPolicy network_policy(const NetworkShape& shape, std::vector<double> theta) {
    if (shape.num_inputs() != 3 || shape.num_outputs() != kNumActions)
        throw ShapeError("decision network must map 3 inputs to 5 logits");
    if (theta.size() != shape.num_params()) throw ShapeError("decision parameters have wrong length");
    return [shape, theta = std::move(theta)](const DecisionContext& ctx, const ActionMask& mask, Rng&) {
        const auto logits = forward(shape, theta.data(), decision_features(*ctx.cards, ctx.upcard));
        return static_cast<Action>(argmax_valid(logits, std::vector<bool>(mask.begin(), mask.end())));
    };
}

DecisionPolicy stand_threshold_policy(bool hit_soft17) {
    return [hit_soft17](const DecisionContext& ctx, const ActionMask&, Rng&) {
        const int v = hand_value(*ctx.cards);
        if (v < 17) return Action::Hit;
        if (hit_soft17 && v == 17 && usable_ace(*ctx.cards)) return Action::Hit;
        return Action::Stay;
    };
}

DecisionPolicy purely_random_policy() {
    return [](const DecisionContext&, const ActionMask& mask, Rng& rng) {
        std::array<Action, kNumActions> opts{};
        std::size_t n = 0;
        for (std::size_t i = 0; i < kNumActions; ++i)
            if (mask[i]) opts[n++] = static_cast<Action>(i);
        return opts[rng.below(n)];
    };
}

DecisionPolicy random_stay_hit_policy() {
    return [](const DecisionContext&, const ActionMask&, Rng& rng) {
        return rng.below(2) == 0 ? Action::Stay : Action::Hit;
    };
}

BasicStrategy BasicStrategy::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open strategy chart " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

BasicStrategy BasicStrategy::parse(const std::string& text) {
    BasicStrategy bs;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::array<std::string, 10> cells;
        for (auto& c : cells)
            if (!(ls >> c)) throw std::runtime_error("strategy chart row " + key + " has fewer than 10 cells");
        bs.rows_.emplace_back(key, cells);
    }
    return bs;
}

const std::array<std::string, 10>* BasicStrategy::find(const std::string& row) const {
    for (const auto& r : rows_)
        if (r.first == row) return &r.second;
    return nullptr;
}

std::string BasicStrategy::code(const std::string& row, int upcard) const {
    const auto* r = find(row);
    if (!r) throw std::runtime_error("strategy chart has no row " + row);
    const int col = (upcard == 1 || upcard == 11) ? 9 : upcard - 2;
    if (col < 0 || col > 9) throw std::invalid_argument("bad dealer upcard");
    return (*r)[static_cast<std::size_t>(col)];
}

Action BasicStrategy::decide(const std::vector<int>& cards, int upcard, const ActionMask& legal) const {
    auto ok = [&](Action a) { return legal[static_cast<std::size_t>(a)]; };
    if (ok(Action::Split)) {
        const std::string row = cards[0] == 1 ? "PA" : "P" + std::to_string(cards[0]);
        const std::string c = code(row, upcard);
        if (c == "P") return Action::Split;
        if (c == "Rp") return ok(Action::Surrender) ? Action::Surrender : Action::Split;
        if (c == "S") return Action::Stay;
    }
    const int v = hand_value(cards);
    std::string row;
    if (usable_ace(cards))
        row = "S" + std::to_string(std::max(v, 12));
    else
        row = "H" + std::to_string(std::clamp(v, 4, 21));
    const std::string c = code(row, upcard);
    if (c == "H") return Action::Hit;
    if (c == "S") return Action::Stay;
    if (c == "D") return ok(Action::Double) ? Action::Double : Action::Hit;
    if (c == "Ds") return ok(Action::Double) ? Action::Double : Action::Stay;
    if (c == "Rh") return ok(Action::Surrender) ? Action::Surrender : Action::Hit;
    if (c == "Rs") return ok(Action::Surrender) ? Action::Surrender : Action::Stay;
    throw std::runtime_error("strategy chart code '" + c + "' not valid at row " + row);
}

DecisionPolicy BasicStrategy::policy() const {
    return [bs = *this](const DecisionContext& ctx, const ActionMask& mask, Rng&) {
        return bs.decide(*ctx.cards, ctx.upcard, mask);
    };
}

std::string default_chart_path() { return std::string(SOPT_DATA_DIR) + "/basic_strategy_s17_das.txt"; }

BetPolicy unit_bet() {
    return [](const History&, int) { return 0.0; };
}

BetPolicy threshold_bet(double x) {
    return [x](const History& h, int decks) {
        const double tc = true_count(h, decks);
        return tc > x ? tc / 3.0 : 0.0;
    };
}

BetPolicy network_bet(const NetworkShape& shape, std::vector<double> theta, int variant) {
    const std::size_t want = variant == 1 ? 1 : 11;
    if (shape.num_inputs() != want || shape.num_outputs() != 1)
        throw ShapeError("bet network input/output size does not match the variant");
    if (theta.size() != shape.num_params()) throw ShapeError("bet parameters have wrong length");
    return [shape, theta = std::move(theta), variant](const History& h, int decks) {
        auto f = bet_features(h, decks);
        if (variant == 1) f.resize(1);
        return forward(shape, theta.data(), f)[0];
    };
}

}  // namespace sopt::bj
