#include "ibench/episode.hpp"

#include <numeric>

namespace ibench {

namespace {

const char* kVerdictNames[] = {"yes", "no", "both", "irrelevant", "correct", "incorrect"};
const char* kActorNames[] = {"player", "judge", "environment"};
const char* kKindNames[] = {"query", "final_guess", "game_action", "observation"};
const char* kOutcomeNames[] = {"solved", "solved_at_budget", "exhausted", "aborted"};

template <typename E, std::size_t N>
std::optional<E> enum_from_string(const char* const (&names)[N], std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (s == names[i]) return static_cast<E>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Verdict v) { return kVerdictNames[static_cast<int>(v)]; }
std::string_view to_string(Actor a) { return kActorNames[static_cast<int>(a)]; }
std::string_view to_string(TurnKind k) { return kKindNames[static_cast<int>(k)]; }
std::string_view to_string(Outcome o) { return kOutcomeNames[static_cast<int>(o)]; }

std::optional<Verdict> verdict_from_string(std::string_view s) {
  return enum_from_string<Verdict>(kVerdictNames, s);
}
std::optional<Actor> actor_from_string(std::string_view s) {
  return enum_from_string<Actor>(kActorNames, s);
}
std::optional<TurnKind> turn_kind_from_string(std::string_view s) {
  return enum_from_string<TurnKind>(kKindNames, s);
}
std::optional<Outcome> outcome_from_string(std::string_view s) {
  return enum_from_string<Outcome>(kOutcomeNames, s);
}

bool is_query_verdict(Verdict v) {
  return v == Verdict::Yes || v == Verdict::No || v == Verdict::Both ||
         v == Verdict::Irrelevant;
}

bool is_final_verdict(Verdict v) {
  return v == Verdict::Correct || v == Verdict::Incorrect;
}

void validate(const EpisodeConfig& cfg) {
  std::string problems;
  if (cfg.budget_b < 1) problems += "budget_B must be >= 1; ";
  if (cfg.cost_per_action < 1) problems += "cost_per_action must be >= 1; ";
  if (!(cfg.discount_gamma > 0.0) || cfg.discount_gamma > 1.0) {
    problems += "discount_gamma must be in (0,1]; ";
  }
  if (!problems.empty()) throw ConfigError("invalid EpisodeConfig: " + problems);
}

std::int64_t Transcript::total_cost() const {
  std::int64_t sum = 0;
  for (const auto& t : turns) sum += t.cost;
  return sum;
}

nlohmann::ordered_json to_json(const EpisodeConfig& c) {
  return nlohmann::ordered_json{{"budget_B", c.budget_b},
                                {"cost_per_action", c.cost_per_action},
                                {"discount_gamma", c.discount_gamma},
                                {"seed", c.seed}};
}

EpisodeConfig episode_config_from_json(const nlohmann::json& j) {
  EpisodeConfig c;
  c.budget_b = j.at("budget_B").get<std::int64_t>();
  c.cost_per_action = j.at("cost_per_action").get<std::int64_t>();
  c.discount_gamma = j.at("discount_gamma").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

nlohmann::ordered_json to_json(const TurnRecord& t) {
  nlohmann::ordered_json j{{"index_t", t.index_t},
                           {"actor", to_string(t.actor)},
                           {"action_kind", to_string(t.action_kind)},
                           {"content", t.content}};
  if (t.verdict) j["verdict"] = to_string(*t.verdict);
  j["cost"] = t.cost;
  j["latency_ms"] = t.latency_ms;
  if (t.token_usage) {
    j["token_usage"] = {{"prompt_tokens", t.token_usage->prompt_tokens},
                        {"completion_tokens", t.token_usage->completion_tokens}};
  }
  if (t.forced) j["forced"] = true;
  return j;
}

TurnRecord turn_from_json(const nlohmann::json& j) {
  TurnRecord t;
  t.index_t = j.at("index_t").get<int>();
  auto actor = actor_from_string(j.at("actor").get<std::string>());
  auto kind = turn_kind_from_string(j.at("action_kind").get<std::string>());
  if (!actor || !kind) throw ConfigError("turn record: unknown actor or action_kind");
  t.actor = *actor;
  t.action_kind = *kind;
  t.content = j.at("content").get<std::string>();
  if (j.contains("verdict") && !j["verdict"].is_null()) {
    auto v = verdict_from_string(j["verdict"].get<std::string>());
    if (!v) throw ConfigError("turn record: unknown verdict");
    t.verdict = *v;
  }
  t.cost = j.at("cost").get<std::int64_t>();
  t.latency_ms = j.at("latency_ms").get<std::int64_t>();
  if (j.contains("token_usage") && !j["token_usage"].is_null()) {
    TokenUsage u;
    u.prompt_tokens = j["token_usage"].at("prompt_tokens").get<std::int64_t>();
    u.completion_tokens = j["token_usage"].at("completion_tokens").get<std::int64_t>();
    t.token_usage = u;
  }
  if (j.contains("forced")) t.forced = j["forced"].get<bool>();
  return t;
}

nlohmann::ordered_json Transcript::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = std::string(kSchemaVersion);
  j["instance_id"] = instance_id;
  j["config"] = ibench::to_json(config);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& t : turns) arr.push_back(ibench::to_json(t));
  j["turns"] = std::move(arr);
  j["outcome"] = to_string(outcome);
  if (final_answer) {
    j["final_answer"] = *final_answer;
  } else {
    j["final_answer"] = nullptr;
  }
  return j;
}

std::string Transcript::to_jsonl() const { return to_json().dump(); }

Transcript Transcript::from_json(const nlohmann::json& j) {
  const std::string version = j.value("schema_version", std::string());
  if (version != kSchemaVersion) {
    throw ConfigError("transcript schema_version mismatch: expected " +
                      std::string(kSchemaVersion) + ", got '" + version + "'");
  }
  Transcript t;
  t.instance_id = j.value("instance_id", std::string());
  t.config = episode_config_from_json(j.at("config"));
  for (const auto& turn : j.at("turns")) t.turns.push_back(turn_from_json(turn));
  auto outcome = outcome_from_string(j.at("outcome").get<std::string>());
  if (!outcome) throw ConfigError("transcript: unknown outcome");
  t.outcome = *outcome;
  if (j.contains("final_answer") && !j["final_answer"].is_null()) {
    t.final_answer = j["final_answer"].get<std::string>();
  }
  return t;
}

EpisodeState::EpisodeState(const EpisodeConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
  validate(cfg_);
  remaining_ = cfg_.budget_b;
}

EpisodeState new_episode(const EpisodeConfig& cfg) { return EpisodeState(cfg); }

Outcome EpisodeState::outcome() const {
  if (!terminal_) throw EpisodeError("outcome requested on a live episode");
  return outcome_;
}

void EpisodeState::apply_turn(TurnRecord turn) {
  if (terminal_) throw EpisodeError("turn after terminal rejected");
  if (turn.forced) {
    throw EpisodeError("forced final answers go through grant_forced_final");
  }
  if (turn.cost < 0) throw EpisodeError("negative turn cost");

  const bool player_action =
      turn.actor == Actor::Player && turn.action_kind != TurnKind::Observation;
  if (player_action && turn.cost <= 0) {
    throw EpisodeError("player actions must have positive cost");
  }
  if (turn.action_kind == TurnKind::Observation && turn.cost != 0) {
    throw EpisodeError("observation turns have cost 0");
  }
  if (turn.verdict) {
    if (turn.action_kind == TurnKind::Query && !is_query_verdict(*turn.verdict)) {
      throw EpisodeError("query turns only carry yes/no/both/irrelevant");
    }
    if (turn.action_kind == TurnKind::FinalGuess && !is_final_verdict(*turn.verdict)) {
      throw EpisodeError("final_guess turns only carry correct/incorrect");
    }
    if (turn.action_kind == TurnKind::GameAction ||
        turn.action_kind == TurnKind::Observation) {
      throw EpisodeError("verdicts attach only to query/final_guess turns");
    }
  }
  if (turn.cost > remaining_) throw EpisodeError("over-budget turn rejected");

  remaining_ -= turn.cost;
  if (turn.action_kind == TurnKind::FinalGuess) final_answer_ = turn.content;
  const bool correct = turn.verdict == Verdict::Correct;
  next_index_ = turn.index_t + 1;
  turns_.push_back(std::move(turn));

  if (correct) {
    terminal_ = true;
    outcome_ = Outcome::Solved;
  } else if (remaining_ == 0) {
    terminal_ = true;
    outcome_ = Outcome::Exhausted;
  }
}

void EpisodeState::grant_forced_final(TurnRecord turn) {
  if (!terminal_ || outcome_ != Outcome::Exhausted) {
    throw EpisodeError("forced final answer is only granted at exhaustion");
  }
  if (forced_used_) throw EpisodeError("forced final answer already used");
  if (turn.actor != Actor::Player || turn.action_kind != TurnKind::FinalGuess) {
    throw EpisodeError("forced turn must be a player final_guess");
  }
  if (turn.cost != 0) throw EpisodeError("forced final answer costs 0");
  if (!turn.verdict || !is_final_verdict(*turn.verdict)) {
    throw EpisodeError("forced final answer must carry correct/incorrect");
  }
  turn.forced = true;
  forced_used_ = true;
  final_answer_ = turn.content;
  const bool correct = turn.verdict == Verdict::Correct;
  next_index_ = turn.index_t + 1;
  turns_.push_back(std::move(turn));
  if (correct) outcome_ = Outcome::SolvedAtBudget;
}

void EpisodeState::abort(std::string note) {
  if (terminal_) throw EpisodeError("abort on a terminal episode");
  TurnRecord rec;
  rec.index_t = next_index_;
  rec.actor = Actor::Environment;
  rec.action_kind = TurnKind::Observation;
  rec.content = std::move(note);
  rec.cost = 0;
  turns_.push_back(std::move(rec));
  terminal_ = true;
  outcome_ = Outcome::Aborted;
}

Transcript EpisodeState::finalize(std::string instance_id) const {
  if (!terminal_) throw EpisodeError("finalize on a live episode");
  Transcript t;
  t.instance_id = std::move(instance_id);
  t.config = cfg_;
  t.turns = turns_;
  t.outcome = outcome_;
  t.final_answer = final_answer_;
  return t;
}

double discounted_return(std::span<const double> rewards, double gamma) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw ConfigError("discounted_return: gamma must be in (0,1]");
  }
  double sum = 0.0;
  double weight = 1.0;
  for (const double r : rewards) {
    sum += weight * r;
    weight *= gamma;
  }
  return sum;
}

}  // namespace ibench
