#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ibench/agent.hpp"
#include "ibench/poker/cards.hpp"
#include "ibench/poker/hand_eval.hpp"

namespace ibench::poker {

enum class ActionType : std::uint8_t { Fold, Check, Call, Raise, AllIn };

std::string_view to_string(ActionType a);  // "FOLD", "CHECK", ...
std::optional<ActionType> action_type_from_string(std::string_view s);

// amount is the TOTAL wager for the current betting round. FOLD/CHECK carry
// 0, CALL carries the current highest bet, RAISE must exceed it.
struct PokerAction {
  ActionType type = ActionType::Fold;
  long long amount = 0;
};

struct Violation {
  std::string reason;
};

enum class Stage : std::uint8_t { Preflop, Flop, Turn, River, Showdown, Done };

std::string_view to_string(Stage s);

struct HistoryEntry {
  Stage stage = Stage::Preflop;
  int seat = 0;
  ActionType action = ActionType::Fold;
  long long amount = 0;
  bool auto_action = false;  // engine-imposed fold after repeated failures
  std::string reasoning;
};

// One pot layer and the seats eligible to win it.
struct Pot {
  long long amount = 0;
  std::vector<int> eligible;
};

struct TableRules {
  long long small_blind = 50;
  long long big_blind = 100;
  // Default: a raise must add at least the previous full raise increment.
  std::optional<long long> fixed_min_raise;
};

struct HandResult {
  std::vector<long long> payouts;  // net chips per seat over the hand
  std::vector<long long> stacks_after;
  std::vector<long long> contributions;  // chips each seat put in (post refund)
  bool reached_showdown = false;
  std::string note;  // e.g. "Everyone folded. Player 3 wins."
  struct PotAward {
    long long amount = 0;
    std::vector<int> winners;
  };
  std::vector<PotAward> awards;
};

// No-limit hold'em single-hand state machine. Actions are validated and
// applied one at a time; agents live outside the engine.
class HandEngine {
 public:
  HandEngine(const TableRules& rules, std::vector<long long> stacks,
             std::vector<bool> dealt_in, int button, std::mt19937_64& rng);

  Stage stage() const { return stage_; }
  bool hand_over() const { return stage_ == Stage::Done; }
  int to_act() const;
  int num_seats() const { return static_cast<int>(seats_.size()); }
  int button() const { return button_; }
  int small_blind_seat() const { return sb_seat_; }
  int big_blind_seat() const { return bb_seat_; }
  const TableRules& rules() const { return rules_; }

  long long current_bet() const { return current_bet_; }
  long long to_call(int seat) const;
  long long pot_total() const;
  long long stack(int seat) const { return seats_[seat].stack; }
  std::vector<long long> stacks() const;
  long long street_contribution(int seat) const { return seats_[seat].street; }
  long long total_contribution(int seat) const { return seats_[seat].total; }
  bool dealt_in(int seat) const { return seats_[seat].in_hand; }
  bool folded(int seat) const { return seats_[seat].folded; }
  bool all_in(int seat) const { return seats_[seat].all_in; }
  std::span<const Card> community() const { return community_; }
  const std::array<Card, 2>& hole(int seat) const { return hole_[seat]; }
  const std::vector<HistoryEntry>& history() const { return history_; }

  // Live side-pot layering from contributions so far.
  std::vector<Pot> pots() const;

  // Normalizes a legal action (CALL coerced to the current bet, shoves
  // converted to ALL_IN) or explains the violation.
  std::variant<PokerAction, Violation> validate_action(int seat,
                                                       PokerAction proposed) const;

  // `action` must come from validate_action.
  void apply_action(int seat, PokerAction action, bool auto_action = false,
                    std::string reasoning = {});

  // Agent-facing observation for the seat to act.
  nlohmann::ordered_json observation(int seat) const;

  const HandResult& result() const;  // valid once hand_over()
  bool vpip(int seat) const { return seats_[seat].vpip; }

 private:
  struct SeatState {
    long long stack = 0;
    long long street = 0;  // contributed this betting round
    long long total = 0;   // contributed this hand
    bool in_hand = false;
    bool folded = false;
    bool all_in = false;
    bool can_raise = true;
    bool need_action = false;
    bool vpip = false;
  };

  int next_in_hand(int seat) const;
  int next_active(int seat) const;  // in hand, not folded
  int count_active() const;
  int count_live() const;  // active and not all-in
  void post_blind(int seat, long long amount);
  void pay(int seat, long long chips);
  void reopen_betting(int raiser);
  void set_to_act_after(int seat);
  void advance(int last_actor);
  void start_street(Stage next);
  void deal_community(int n);
  void run_out_board();
  void return_uncalled_bet();
  void finish_fold_win(int winner);
  void finish_showdown();
  void close_out();
  long long min_raise_target() const;

  TableRules rules_;
  std::vector<SeatState> seats_;
  std::vector<std::array<Card, 2>> hole_;
  std::vector<Card> deck_;
  std::size_t deck_pos_ = 0;
  std::vector<Card> community_;
  Stage stage_ = Stage::Preflop;
  int button_ = 0;
  int sb_seat_ = 0;
  int bb_seat_ = 0;
  int to_act_ = -1;
  long long current_bet_ = 0;
  long long min_raise_inc_ = 0;
  std::vector<HistoryEntry> history_;
  std::vector<long long> stacks_at_start_;
  HandResult result_;
};

// call / (pot + call). Throws MetricError when both are zero.
double pot_odds(long long call_amount, long long pot);

// Parses {action, amount, reasoning} out of an agent reply, tolerating
// surrounding prose and code fences.
struct ParsedPokerReply {
  PokerAction action;
  std::string reasoning;
};
std::optional<ParsedPokerReply> parse_poker_reply(std::string_view reply);

extern const std::string kPokerSystemPrompt;

struct DecisionOutcome {
  PokerAction action;
  bool auto_fold = false;
  std::string reasoning;
  std::int64_t latency_ms = 0;
};

// One decision with the retry policy: first parse/validation failure gets a
// re-prompt, the second failure (or a transport failure) folds automatically.
DecisionOutcome act_with_retry(Agent& agent, const HandEngine& engine, int seat);

using StepObserver = std::function<void(const HandEngine&)>;

struct HandStats {
  std::vector<int> decisions;
  std::vector<int> auto_folds;
  std::vector<std::int64_t> latency_ms;
};

// Drives a full hand: blinds and cards are posted by the engine constructor,
// agents act in turn until settlement. The observer (when set) runs after
// every applied action.
HandStats run_hand(HandEngine& engine, std::span<Agent* const> seat_agents,
                   const StepObserver& observer = {});

}  // namespace ibench::poker
