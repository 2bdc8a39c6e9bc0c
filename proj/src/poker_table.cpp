#include "ibench/poker/table.hpp"

#include <algorithm>
#include <cctype>

namespace ibench::poker {

namespace {

const char* kActionNames[] = {"FOLD", "CHECK", "CALL", "RAISE", "ALL_IN"};
const char* kStageNames[] = {"preflop", "flop", "turn", "river", "showdown", "done"};

}  // namespace

std::string_view to_string(ActionType a) { return kActionNames[static_cast<int>(a)]; }
std::string_view to_string(Stage s) { return kStageNames[static_cast<int>(s)]; }

std::optional<ActionType> action_type_from_string(std::string_view s) {
  std::string upper;
  for (const char c : s) {
    upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  for (int i = 0; i < 5; ++i) {
    if (upper == kActionNames[i]) return static_cast<ActionType>(i);
  }
  if (upper == "ALLIN" || upper == "ALL IN") return ActionType::AllIn;
  return std::nullopt;
}

HandEngine::HandEngine(const TableRules& rules, std::vector<long long> stacks,
                       std::vector<bool> dealt_in, int button, std::mt19937_64& rng)
    : rules_(rules), button_(button) {
  const int n = static_cast<int>(stacks.size());
  if (n < 2 || dealt_in.size() != stacks.size()) {
    throw ConfigError("HandEngine: need at least two seats");
  }
  seats_.resize(n);
  hole_.resize(n);
  int players = 0;
  for (int s = 0; s < n; ++s) {
    seats_[s].stack = stacks[s];
    seats_[s].in_hand = dealt_in[s];
    if (dealt_in[s]) {
      if (stacks[s] <= 0) throw ConfigError("HandEngine: dealt-in seat with no chips");
      ++players;
    }
  }
  if (players < 2) throw ConfigError("HandEngine: need two seats with chips");
  if (button < 0 || button >= n || !seats_[button].in_hand) {
    throw ConfigError("HandEngine: button must be a dealt-in seat");
  }
  stacks_at_start_ = std::move(stacks);

  const bool heads_up = players == 2;
  sb_seat_ = heads_up ? button_ : next_in_hand(button_);
  bb_seat_ = next_in_hand(sb_seat_);
  post_blind(sb_seat_, rules_.small_blind);
  post_blind(bb_seat_, rules_.big_blind);

  deck_ = standard_deck();
  shuffle_deck(deck_, rng);
  const int first = next_in_hand(button_);
  int seat = first;
  do {
    hole_[seat] = {deck_[deck_pos_], deck_[deck_pos_ + 1]};
    deck_pos_ += 2;
    seat = next_in_hand(seat);
  } while (seat != first);

  current_bet_ = rules_.big_blind;
  min_raise_inc_ = rules_.big_blind;
  for (auto& st : seats_) {
    st.need_action = st.in_hand && !st.all_in;
  }
  set_to_act_after(bb_seat_);
  if (to_act_ < 0) advance(bb_seat_);  // both blinds all-in: straight to the board
}

int HandEngine::next_in_hand(int seat) const {
  const int n = num_seats();
  for (int i = 1; i <= n; ++i) {
    const int s = (seat + i) % n;
    if (seats_[s].in_hand) return s;
  }
  throw EpisodeError("no seats in hand");
}

int HandEngine::next_active(int seat) const {
  const int n = num_seats();
  for (int i = 1; i <= n; ++i) {
    const int s = (seat + i) % n;
    if (seats_[s].in_hand && !seats_[s].folded) return s;
  }
  throw EpisodeError("no active seats");
}

int HandEngine::count_active() const {
  int c = 0;
  for (const auto& st : seats_) c += (st.in_hand && !st.folded) ? 1 : 0;
  return c;
}

int HandEngine::count_live() const {
  int c = 0;
  for (const auto& st : seats_) c += (st.in_hand && !st.folded && !st.all_in) ? 1 : 0;
  return c;
}

void HandEngine::post_blind(int seat, long long amount) {
  pay(seat, std::min(amount, seats_[seat].stack));
}

void HandEngine::pay(int seat, long long chips) {
  auto& st = seats_[seat];
  if (chips < 0 || chips > st.stack) throw EpisodeError("pay: bad chip amount");
  st.stack -= chips;
  st.street += chips;
  st.total += chips;
  if (st.stack == 0) st.all_in = true;
}

int HandEngine::to_act() const {
  if (stage_ == Stage::Done || to_act_ < 0) throw EpisodeError("no seat to act");
  return to_act_;
}

long long HandEngine::to_call(int seat) const {
  return std::max<long long>(0, current_bet_ - seats_[seat].street);
}

long long HandEngine::pot_total() const {
  long long sum = 0;
  for (const auto& st : seats_) sum += st.total;
  return sum;
}

std::vector<long long> HandEngine::stacks() const {
  std::vector<long long> out;
  out.reserve(seats_.size());
  for (const auto& st : seats_) out.push_back(st.stack);
  return out;
}

std::vector<Pot> HandEngine::pots() const {
  std::vector<long long> levels;
  for (const auto& st : seats_) {
    if (st.total > 0) levels.push_back(st.total);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<Pot> out;
  long long prev = 0;
  for (const long long level : levels) {
    Pot pot;
    for (int s = 0; s < num_seats(); ++s) {
      const auto& st = seats_[s];
      pot.amount += std::max<long long>(0, std::min(st.total, level) - prev);
      if (st.in_hand && !st.folded && st.total >= level) pot.eligible.push_back(s);
    }
    if (pot.amount > 0) {
      if (!out.empty() && out.back().eligible == pot.eligible) {
        out.back().amount += pot.amount;
      } else {
        out.push_back(std::move(pot));
      }
    }
    prev = level;
  }
  return out;
}

long long HandEngine::min_raise_target() const {
  return current_bet_ + rules_.fixed_min_raise.value_or(min_raise_inc_);
}

std::variant<PokerAction, Violation> HandEngine::validate_action(
    int seat, PokerAction proposed) const {
  if (stage_ == Stage::Done) return Violation{"the hand is over"};
  if (seat != to_act_) return Violation{"acting out of turn"};
  const auto& st = seats_[seat];

  switch (proposed.type) {
    case ActionType::Fold:
      return PokerAction{ActionType::Fold, 0};

    case ActionType::Check:
      if (st.street != current_bet_) {
        return Violation{"CHECK is only allowed when no bet is faced; " +
                         std::to_string(to_call(seat)) + " to call"};
      }
      return PokerAction{ActionType::Check, 0};

    case ActionType::Call: {
      if (st.street == current_bet_) return PokerAction{ActionType::Check, 0};
      const long long needed = current_bet_ - st.street;
      if (needed >= st.stack) {
        return PokerAction{ActionType::AllIn, st.street + st.stack};
      }
      return PokerAction{ActionType::Call, current_bet_};
    }

    case ActionType::Raise: {
      if (!st.can_raise) {
        return Violation{"betting is not reopened; you may only call or fold"};
      }
      const long long total = proposed.amount;
      if (total <= current_bet_) {
        return Violation{"RAISE amount must exceed the current bet of " +
                         std::to_string(current_bet_)};
      }
      const long long needed = total - st.street;
      if (needed >= st.stack) {
        return PokerAction{ActionType::AllIn, st.street + st.stack};
      }
      if (total < min_raise_target()) {
        return Violation{"raise to " + std::to_string(total) +
                         " is below the minimum raise to " +
                         std::to_string(min_raise_target())};
      }
      return PokerAction{ActionType::Raise, total};
    }

    case ActionType::AllIn: {
      if (st.stack <= 0) return Violation{"no chips behind"};
      const long long total = st.street + st.stack;
      if (total > current_bet_ && !st.can_raise) {
        return Violation{"betting is not reopened; you may only call or fold"};
      }
      return PokerAction{ActionType::AllIn, total};
    }
  }
  return Violation{"unknown action"};
}

void HandEngine::reopen_betting(int raiser) {
  for (int s = 0; s < num_seats(); ++s) {
    if (s == raiser) continue;
    auto& st = seats_[s];
    if (st.in_hand && !st.folded && !st.all_in) {
      st.need_action = true;
      st.can_raise = true;
    }
  }
}

void HandEngine::apply_action(int seat, PokerAction action, bool auto_action,
                              std::string reasoning) {
  if (stage_ == Stage::Done) throw EpisodeError("action on a finished hand");
  if (seat != to_act_) throw EpisodeError("action out of turn");
  auto& st = seats_[seat];
  long long paid = 0;

  switch (action.type) {
    case ActionType::Fold:
      st.folded = true;
      st.need_action = false;
      break;
    case ActionType::Check:
      st.need_action = false;
      break;
    case ActionType::Call:
      paid = action.amount - st.street;
      pay(seat, paid);
      st.need_action = false;
      break;
    case ActionType::Raise: {
      paid = action.amount - st.street;
      const long long increment = action.amount - current_bet_;
      pay(seat, paid);
      current_bet_ = action.amount;
      min_raise_inc_ = increment;
      reopen_betting(seat);
      st.need_action = false;
      break;
    }
    case ActionType::AllIn: {
      paid = st.stack;
      pay(seat, paid);
      const long long total = st.street;
      if (total > current_bet_) {
        const long long increment = total - current_bet_;
        const long long required = rules_.fixed_min_raise.value_or(min_raise_inc_);
        current_bet_ = total;
        if (increment >= required) {
          min_raise_inc_ = increment;
          reopen_betting(seat);
        } else {
          // short all-in: players who already acted face the higher bet but
          // may not re-raise
          for (int s = 0; s < num_seats(); ++s) {
            if (s == seat) continue;
            auto& other = seats_[s];
            if (other.in_hand && !other.folded && !other.all_in &&
                !other.need_action) {
              other.need_action = true;
              other.can_raise = false;
            }
          }
        }
      }
      st.need_action = false;
      break;
    }
  }

  if (stage_ == Stage::Preflop && paid > 0 && action.type != ActionType::Fold &&
      action.type != ActionType::Check) {
    st.vpip = true;  // voluntary chips beyond the posted blind
  }

  history_.push_back({stage_, seat, action.type, action.amount, auto_action,
                      std::move(reasoning)});
  advance(seat);
}

void HandEngine::set_to_act_after(int seat) {
  const int n = num_seats();
  for (int i = 1; i <= n; ++i) {
    const int s = (seat + i) % n;
    if (seats_[s].need_action) {
      to_act_ = s;
      return;
    }
  }
  to_act_ = -1;
}

void HandEngine::advance(int last_actor) {
  if (count_active() == 1) {
    finish_fold_win(next_active(last_actor));
    return;
  }
  set_to_act_after(last_actor);
  if (to_act_ >= 0) return;

  // street complete
  if (stage_ == Stage::River) {
    finish_showdown();
  } else if (count_live() <= 1) {
    run_out_board();
    finish_showdown();
  } else {
    start_street(static_cast<Stage>(static_cast<int>(stage_) + 1));
  }
}

void HandEngine::start_street(Stage next) {
  stage_ = next;
  deal_community(next == Stage::Flop ? 3 : 1);
  current_bet_ = 0;
  min_raise_inc_ = rules_.big_blind;
  for (auto& st : seats_) {
    st.street = 0;
    st.can_raise = true;
    st.need_action = st.in_hand && !st.folded && !st.all_in;
  }
  set_to_act_after(button_);
}

void HandEngine::deal_community(int n) {
  for (int i = 0; i < n; ++i) community_.push_back(deck_[deck_pos_++]);
}

void HandEngine::run_out_board() {
  stage_ = Stage::Showdown;
  deal_community(5 - static_cast<int>(community_.size()));
}

void HandEngine::return_uncalled_bet() {
  int top_seat = -1;
  long long m1 = 0;
  long long m2 = 0;
  bool unique = true;
  for (int s = 0; s < num_seats(); ++s) {
    const long long t = seats_[s].total;
    if (t > m1) {
      m2 = m1;
      m1 = t;
      top_seat = s;
      unique = true;
    } else if (t == m1 && t > 0) {
      unique = false;
    } else if (t > m2) {
      m2 = t;
    }
  }
  if (top_seat >= 0 && unique && m1 > m2) {
    const long long refund = m1 - m2;
    seats_[top_seat].total -= refund;
    seats_[top_seat].stack += refund;
    if (seats_[top_seat].stack > 0) seats_[top_seat].all_in = false;
  }
}

void HandEngine::finish_fold_win(int winner) {
  return_uncalled_bet();
  const long long pot = pot_total();
  seats_[winner].stack += pot;
  result_.awards.push_back({pot, {winner}});
  result_.reached_showdown = false;
  result_.note = "Everyone folded. Player " + std::to_string(winner + 1) + " wins.";
  close_out();
}

void HandEngine::finish_showdown() {
  stage_ = Stage::Showdown;
  return_uncalled_bet();

  std::vector<HandRank> ranks(seats_.size());
  for (int s = 0; s < num_seats(); ++s) {
    if (!seats_[s].in_hand || seats_[s].folded) continue;
    std::array<Card, 7> seven;
    seven[0] = hole_[s][0];
    seven[1] = hole_[s][1];
    std::copy(community_.begin(), community_.end(), seven.begin() + 2);
    ranks[s] = evaluate_hand(seven);
  }

  for (const Pot& pot : pots()) {
    HandRank best;
    bool first = true;
    for (const int s : pot.eligible) {
      if (first || ranks[s] > best) {
        best = ranks[s];
        first = false;
      }
    }
    std::vector<int> winners;
    for (const int s : pot.eligible) {
      if (ranks[s] == best) winners.push_back(s);
    }
    // split equally, odd chips to the earliest winners left of the button
    std::sort(winners.begin(), winners.end(), [&](int a, int b) {
      const int n = num_seats();
      return (a - button_ - 1 + 2 * n) % n < (b - button_ - 1 + 2 * n) % n;
    });
    const long long share = pot.amount / static_cast<long long>(winners.size());
    long long odd = pot.amount % static_cast<long long>(winners.size());
    for (const int s : winners) {
      seats_[s].stack += share + (odd > 0 ? 1 : 0);
      if (odd > 0) --odd;
    }
    result_.awards.push_back({pot.amount, winners});
  }

  result_.reached_showdown = true;
  result_.note = "Showdown.";
  close_out();
}

// The pots are paid out; contributions are consumed so that stacks alone
// carry the chips from here on.
void HandEngine::close_out() {
  stage_ = Stage::Done;
  to_act_ = -1;
  result_.stacks_after = stacks();
  result_.payouts.resize(seats_.size());
  result_.contributions.resize(seats_.size());
  for (int s = 0; s < num_seats(); ++s) {
    result_.payouts[s] = seats_[s].stack - stacks_at_start_[s];
    result_.contributions[s] = seats_[s].total;
    seats_[s].total = 0;
    seats_[s].street = 0;
  }
}

const HandResult& HandEngine::result() const {
  if (stage_ != Stage::Done) throw EpisodeError("result requested before the hand is over");
  return result_;
}

nlohmann::ordered_json HandEngine::observation(int seat) const {
  nlohmann::ordered_json j;
  j["stage"] = to_string(stage_);
  j["hole_cards"] = {to_string(hole_[seat][0]), to_string(hole_[seat][1])};
  auto board = nlohmann::ordered_json::array();
  for (const Card c : community_) board.push_back(to_string(c));
  j["community"] = std::move(board);
  j["pot"] = pot_total();
  j["current_bet"] = current_bet_;
  const long long call = std::min(to_call(seat), seats_[seat].stack);
  j["to_call"] = to_call(seat);
  j["stacks"] = stacks();
  j["pot_odds"] = call == 0 ? 0.0 : pot_odds(call, pot_total());
  auto recent = nlohmann::ordered_json::array();
  const std::size_t start = history_.size() > 12 ? history_.size() - 12 : 0;
  for (std::size_t i = start; i < history_.size(); ++i) {
    const auto& h = history_[i];
    recent.push_back({{"stage", to_string(h.stage)},
                      {"seat", h.seat},
                      {"action", to_string(h.action)},
                      {"amount", h.amount}});
  }
  j["recent_actions"] = std::move(recent);
  return j;
}

double pot_odds(long long call_amount, long long pot) {
  if (call_amount < 0 || pot < 0) throw MetricError("pot_odds: negative input");
  if (call_amount == 0 && pot == 0) throw MetricError("pot_odds undefined for 0/0");
  if (call_amount == 0) return 0.0;
  return static_cast<double>(call_amount) / static_cast<double>(pot + call_amount);
}

std::optional<ParsedPokerReply> parse_poker_reply(std::string_view reply) {
  // find a balanced {...} block, skipping over quoted strings
  for (std::size_t open = reply.find('{'); open != std::string_view::npos;
       open = reply.find('{', open + 1)) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < reply.size(); ++i) {
      const char c = reply[i];
      if (in_string) {
        if (c == '\\') {
          ++i;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') in_string = true;
      if (c == '{') ++depth;
      if (c == '}') {
        --depth;
        if (depth == 0) {
          const auto j =
              nlohmann::json::parse(reply.substr(open, i - open + 1), nullptr, false);
          if (!j.is_object() || !j.contains("action") || !j["action"].is_string()) {
            break;  // try the next '{'
          }
          const auto type = action_type_from_string(j["action"].get<std::string>());
          if (!type) return std::nullopt;
          ParsedPokerReply out;
          out.action.type = *type;
          if (j.contains("amount")) {
            if (j["amount"].is_number()) {
              out.action.amount = static_cast<long long>(j["amount"].get<double>());
            } else if (j["amount"].is_string()) {
              try {
                out.action.amount = std::stoll(j["amount"].get<std::string>());
              } catch (...) {
                return std::nullopt;
              }
            }
          }
          if (j.contains("reasoning") && j["reasoning"].is_string()) {
            out.reasoning = j["reasoning"].get<std::string>();
          }
          return out;
        }
      }
    }
  }
  return std::nullopt;
}

const std::string kPokerSystemPrompt =
    "You are a world-class professional Texas Hold'em poker player.\n"
    "You play aggressively but mathematically. You calculate pot odds, implied odds, "
    "and range advantages. Your goal is to maximize your stack.\n"
    "If you have a strong hand or good situation, value bet or raise. If you have a "
    "weak hand and bad odds, fold. Occasionally bluff if the spot is perfect.\n"
    "\n"
    "Response MUST be a JSON object with:\n"
    "- action: \"FOLD\", \"CHECK\", \"CALL\", \"RAISE\", or \"ALL_IN\"\n"
    "- amount: The TOTAL amount you want to wager for this round.\n"
    "    - If CHECK or FOLD, amount is 0.\n"
    "    - If CALL, amount matches the current highest bet.\n"
    "    - If RAISE, amount must be higher than current bet.\n"
    "- reasoning: A short, sharp professional thought process (max 20 words).\n";

DecisionOutcome act_with_retry(Agent& agent, const HandEngine& engine, int seat) {
  std::vector<ChatMessage> msgs{
      {ChatRole::System, kPokerSystemPrompt},
      {ChatRole::User, engine.observation(seat).dump() +
                           "\nRespond with a single JSON object."}};
  DecisionOutcome out;
  for (int attempt = 0; attempt < 2; ++attempt) {
    AgentReply reply;
    try {
      reply = agent.reply(msgs);
    } catch (const InfraError&) {
      break;  // unreachable or timed out: fold
    }
    out.latency_ms += reply.latency_ms;
    msgs.push_back({ChatRole::Assistant, reply.content});

    const auto parsed = parse_poker_reply(reply.content);
    if (!parsed) {
      msgs.push_back({ChatRole::User,
                      "Your reply was not a valid JSON action object. Respond with "
                      "exactly one JSON object: {\"action\": ..., \"amount\": ..., "
                      "\"reasoning\": ...}."});
      continue;
    }
    const auto validated = engine.validate_action(seat, parsed->action);
    if (const auto* violation = std::get_if<Violation>(&validated)) {
      msgs.push_back({ChatRole::User,
                      "Illegal action: " + violation->reason + ". Choose a legal action."});
      continue;
    }
    out.action = std::get<PokerAction>(validated);
    out.reasoning = parsed->reasoning;
    return out;
  }
  out.action = {ActionType::Fold, 0};
  out.auto_fold = true;
  out.reasoning.clear();
  return out;
}

HandStats run_hand(HandEngine& engine, std::span<Agent* const> seat_agents,
                   const StepObserver& observer) {
  const std::size_t n = static_cast<std::size_t>(engine.num_seats());
  if (seat_agents.size() != n) throw ConfigError("run_hand: one agent per seat");
  HandStats stats;
  stats.decisions.assign(n, 0);
  stats.auto_folds.assign(n, 0);
  stats.latency_ms.assign(n, 0);
  if (observer) observer(engine);
  while (!engine.hand_over()) {
    const int seat = engine.to_act();
    DecisionOutcome decision = act_with_retry(*seat_agents[seat], engine, seat);
    ++stats.decisions[seat];
    if (decision.auto_fold) ++stats.auto_folds[seat];
    stats.latency_ms[seat] += decision.latency_ms;
    engine.apply_action(seat, decision.action, decision.auto_fold,
                        std::move(decision.reasoning));
    if (observer) observer(engine);
  }
  return stats;
}

}  // namespace ibench::poker
