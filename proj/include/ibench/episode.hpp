#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ibench/common.hpp"

namespace ibench {

// Closed answer set: {yes,no,both,irrelevant} for queries,
// {correct,incorrect} for final guesses.
enum class Verdict { Yes, No, Both, Irrelevant, Correct, Incorrect };

enum class Actor { Player, Judge, Environment };

enum class TurnKind { Query, FinalGuess, GameAction, Observation };

enum class Outcome { Solved, SolvedAtBudget, Exhausted, Aborted };

std::string_view to_string(Verdict v);
std::string_view to_string(Actor a);
std::string_view to_string(TurnKind k);
std::string_view to_string(Outcome o);
std::optional<Verdict> verdict_from_string(std::string_view s);
std::optional<Actor> actor_from_string(std::string_view s);
std::optional<TurnKind> turn_kind_from_string(std::string_view s);
std::optional<Outcome> outcome_from_string(std::string_view s);

bool is_query_verdict(Verdict v);  // yes/no/both/irrelevant
bool is_final_verdict(Verdict v);  // correct/incorrect

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t total() const { return prompt_tokens + completion_tokens; }
  bool operator==(const TokenUsage&) const = default;
};

struct EpisodeConfig {
  std::int64_t budget_b = 20;       // max total action cost, in turns
  std::int64_t cost_per_action = 1;
  double discount_gamma = 1.0;      // in (0,1]
  std::uint64_t seed = 0;
};

// Throws ConfigError listing every violated invariant.
void validate(const EpisodeConfig& cfg);

struct TurnRecord {
  int index_t = 1;  // 1-based protocol turn number
  Actor actor = Actor::Player;
  TurnKind action_kind = TurnKind::Query;
  std::string content;
  std::optional<Verdict> verdict;
  std::int64_t cost = 0;
  std::int64_t latency_ms = 0;
  std::optional<TokenUsage> token_usage;
  // The one zero-cost final answer granted after budget exhaustion.
  bool forced = false;
};

struct Transcript {
  std::string instance_id;
  EpisodeConfig config;
  std::vector<TurnRecord> turns;
  Outcome outcome = Outcome::Aborted;
  std::optional<std::string> final_answer;

  std::int64_t total_cost() const;
  bool solved() const {
    return outcome == Outcome::Solved || outcome == Outcome::SolvedAtBudget;
  }

  nlohmann::ordered_json to_json() const;
  std::string to_jsonl() const;  // one JSON object, one line, no trailing \n
  static Transcript from_json(const nlohmann::json& j);
};

nlohmann::ordered_json to_json(const TurnRecord& t);
TurnRecord turn_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const EpisodeConfig& c);
EpisodeConfig episode_config_from_json(const nlohmann::json& j);

// The generic horizon-T interaction state machine: history, budget
// accounting, termination. Single-owner; distinct episodes are independent.
class EpisodeState {
 public:
  explicit EpisodeState(const EpisodeConfig& cfg);

  const EpisodeConfig& config() const { return cfg_; }
  std::int64_t remaining_budget() const { return remaining_; }
  bool terminal() const { return terminal_; }
  Outcome outcome() const;  // throws EpisodeError unless terminal
  const std::vector<TurnRecord>& turns() const { return turns_; }
  int next_index() const { return next_index_; }
  std::mt19937_64& rng() { return rng_; }

  // Appends one turn. Terminal afterwards iff the verdict is Correct or the
  // budget is exhausted. Throws EpisodeError on any violation (turn after
  // terminal, over-budget cost, zero-cost player action, verdict/kind
  // mismatch).
  void apply_turn(TurnRecord turn);

  // The one forced zero-cost final answer granted after exhaustion. If its
  // verdict is Correct the outcome becomes SolvedAtBudget.
  void grant_forced_final(TurnRecord turn);

  // Terminates the episode as Aborted, recording `note` as an
  // environment observation.
  void abort(std::string note);

  void set_final_answer(std::string answer) { final_answer_ = std::move(answer); }

  Transcript finalize(std::string instance_id) const;  // requires terminal

 private:
  EpisodeConfig cfg_;
  std::vector<TurnRecord> turns_;
  std::int64_t remaining_ = 0;
  int next_index_ = 1;
  bool terminal_ = false;
  bool forced_used_ = false;
  Outcome outcome_ = Outcome::Aborted;
  std::optional<std::string> final_answer_;
  std::mt19937_64 rng_;
};

EpisodeState new_episode(const EpisodeConfig& cfg);

// Sum of gamma^(t-1) * r_t. Throws ConfigError unless gamma is in (0,1].
double discounted_return(std::span<const double> rewards, double gamma);

}  // namespace ibench
