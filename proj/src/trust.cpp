#include "ibench/trust.hpp"

#include <cmath>
#include <sstream>

namespace ibench {

std::pair<double, double> stage_payoff(TrustAction a, TrustAction b,
                                       const PayoffMatrix& m) {
  return {m.payoff(a, b), m.payoff(b, a)};
}

std::vector<std::string> validate(const MatchConfig& config) {
  std::vector<std::string> problems;
  if (!(config.delta > 0.0) || !(config.delta < 1.0)) {
    problems.push_back("delta must be in (0,1)");
  }
  if (config.max_rounds < 1) problems.push_back("max_rounds must be >= 1");
  if (config.repeats < 1) problems.push_back("repeats must be >= 1");
  if (!config.payoffs.prisoners_dilemma_ordering()) {
    problems.push_back("payoffs must satisfy u(D,C) > u(C,C) > u(D,D) > u(C,D)");
  }
  if (config.forced_horizon && *config.forced_horizon < 1) {
    problems.push_back("forced_horizon must be >= 1");
  }
  return problems;
}

int sample_horizon(double delta, int max_rounds, std::mt19937_64& rng) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("delta must be in (0,1)");
  if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  int t = 1;
  while (t < max_rounds && uniform01(rng) < delta) ++t;
  return t;
}

double truncated_horizon_mean(double delta, int max_rounds) {
  return (1.0 - std::pow(delta, max_rounds)) / (1.0 - delta);
}

std::string trust_system_prompt(double delta) {
  std::ostringstream p;
  p << "You are an agent playing a repeated trust game.\n\n";
  p << "Each round, both players simultaneously choose one action:\n\n";
  p << "COOPERATE or DEFECT\n\n";
  p << "After each round, the game continues with probability delta = " << delta
    << " and ends with probability " << (1.0 - delta) << ".\n";
  p << "You know delta from the start.\n\n";
  p << "- Goal: maximize your expected discounted cumulative payoff under delta.\n\n";
  p << "- Output Requirement:\nReturn exactly one of the following strings and "
       "nothing else:\n\nCOOPERATE or DEFECT\n";
  return p.str();
}

namespace {

std::string round_prompt(int round, const std::vector<TrustAction>& mine,
                         const std::vector<TrustAction>& theirs) {
  std::string p = "Round " + std::to_string(round) + ".\n";
  if (mine.empty()) {
    p += "No rounds have been played yet.\n";
    p += "YOUR HISTORY: (empty)\nOPPONENT HISTORY: (empty)\n";
  } else {
    p += "YOUR HISTORY: " + actions_to_string(mine) + "\n";
    p += "OPPONENT HISTORY: " + actions_to_string(theirs) + "\n";
  }
  p += "Reply with exactly one of: COOPERATE or DEFECT.";
  return p;
}

// One re-prompt, then default to D with a flag. The conversation accumulates
// across rounds so agents see their own prior replies.
std::pair<TrustAction, bool> query_action(Agent& agent, std::vector<ChatMessage>& msgs,
                                          const std::string& round_prompt) {
  msgs.push_back({ChatRole::User, round_prompt});
  for (int attempt = 0; attempt < 2; ++attempt) {
    const AgentReply reply = agent.reply(msgs);
    msgs.push_back({ChatRole::Assistant, reply.content});
    if (const auto action = parse_trust_action(reply.content)) {
      return {*action, false};
    }
    if (attempt == 0) {
      msgs.push_back({ChatRole::User,
                      "Invalid reply. Return exactly one of the strings COOPERATE or "
                      "DEFECT and nothing else."});
    }
  }
  return {TrustAction::D, true};
}

}  // namespace

nlohmann::ordered_json MatchRecord::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = std::string(kSchemaVersion);
  j["seat_a"] = seat_a;
  j["seat_b"] = seat_b;
  j["realized_T"] = realized_rounds;
  j["actions_a"] = actions_a;
  j["actions_b"] = actions_b;
  j["payoffs_a"] = payoffs_a;
  j["payoffs_b"] = payoffs_b;
  j["total_a"] = total_a;
  j["total_b"] = total_b;
  if (!defaulted_a.empty()) j["defaulted_a"] = defaulted_a;
  if (!defaulted_b.empty()) j["defaulted_b"] = defaulted_b;
  return j;
}

MatchRecord MatchRecord::from_json(const nlohmann::json& j) {
  const std::string version = j.value("schema_version", std::string());
  if (version != kSchemaVersion) {
    throw ConfigError("match record schema_version mismatch: expected " +
                      std::string(kSchemaVersion) + ", got '" + version + "'");
  }
  MatchRecord r;
  r.seat_a = j.at("seat_a").get<std::string>();
  r.seat_b = j.at("seat_b").get<std::string>();
  r.realized_rounds = j.at("realized_T").get<int>();
  r.actions_a = j.at("actions_a").get<std::string>();
  r.actions_b = j.at("actions_b").get<std::string>();
  r.payoffs_a = j.at("payoffs_a").get<std::vector<double>>();
  r.payoffs_b = j.at("payoffs_b").get<std::vector<double>>();
  r.total_a = j.at("total_a").get<double>();
  r.total_b = j.at("total_b").get<double>();
  if (j.contains("defaulted_a")) r.defaulted_a = j["defaulted_a"].get<std::vector<int>>();
  if (j.contains("defaulted_b")) r.defaulted_b = j["defaulted_b"].get<std::vector<int>>();
  return r;
}

MatchRecord run_match(Agent& seat_a, Agent& seat_b, const MatchConfig& config) {
  {
    const auto problems = validate(config);
    if (!problems.empty()) throw ConfigError("run_match: " + problems.front());
  }
  std::mt19937_64 rng(config.seed);
  const int horizon = config.forced_horizon
                          ? std::min(*config.forced_horizon, config.max_rounds)
                          : sample_horizon(config.delta, config.max_rounds, rng);

  const std::string system = trust_system_prompt(config.delta);
  MatchRecord record;
  record.seat_a = seat_a.spec().id;
  record.seat_b = seat_b.spec().id;
  record.realized_rounds = horizon;

  std::vector<ChatMessage> msgs_a{{ChatRole::System, system}};
  std::vector<ChatMessage> msgs_b{{ChatRole::System, system}};
  std::vector<TrustAction> actions_a;
  std::vector<TrustAction> actions_b;
  for (int round = 1; round <= horizon; ++round) {
    // both prompts are built before either action exists this round
    const std::string prompt_a = round_prompt(round, actions_a, actions_b);
    const std::string prompt_b = round_prompt(round, actions_b, actions_a);
    const auto [act_a, defaulted_a] = query_action(seat_a, msgs_a, prompt_a);
    const auto [act_b, defaulted_b] = query_action(seat_b, msgs_b, prompt_b);
    actions_a.push_back(act_a);
    actions_b.push_back(act_b);
    if (defaulted_a) record.defaulted_a.push_back(round);
    if (defaulted_b) record.defaulted_b.push_back(round);
    const auto [pay_a, pay_b] = stage_payoff(act_a, act_b, config.payoffs);
    record.payoffs_a.push_back(pay_a);
    record.payoffs_b.push_back(pay_b);
    record.total_a += pay_a;
    record.total_b += pay_b;
  }
  record.actions_a = actions_to_string(actions_a);
  record.actions_b = actions_to_string(actions_b);
  return record;
}

std::vector<MatchRecord> run_tournament(const std::vector<AgentSpec>& models,
                                        const MatchConfig& config,
                                        unsigned parallelism) {
  if (models.size() < 2) throw ConfigError("run_tournament: need at least two models");
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      if (models[i].id == models[j].id) {
        throw ConfigError("run_tournament: duplicate model id '" + models[i].id + "'");
      }
    }
  }

  struct Slot {
    std::size_t a;
    std::size_t b;
    std::uint64_t seed;
  };
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      // order-normalized pair key keeps streams stable when models are added
      const std::uint64_t lo = std::min(fnv1a64(models[i].id), fnv1a64(models[j].id));
      const std::uint64_t hi = std::max(fnv1a64(models[i].id), fnv1a64(models[j].id));
      for (int r = 0; r < config.repeats; ++r) {
        slots.push_back({i, j,
                         seed_combine({config.seed, lo, hi,
                                       static_cast<std::uint64_t>(r), 0})});
        if (config.swap_seats) {
          slots.push_back({j, i,
                           seed_combine({config.seed, lo, hi,
                                         static_cast<std::uint64_t>(r), 1})});
        }
      }
    }
  }

  std::vector<std::unique_ptr<Agent>> agents;
  agents.reserve(models.size());
  for (const auto& spec : models) agents.push_back(make_agent(spec));

  std::vector<MatchRecord> records(slots.size());
  parallel_for(slots.size(), parallelism, [&](std::size_t k) {
    MatchConfig match_config = config;
    match_config.seed = slots[k].seed;
    records[k] = run_match(*agents[slots[k].a], *agents[slots[k].b], match_config);
  });
  return records;
}

namespace {

template <typename PerSide>
void for_each_side(std::string_view model, std::span<const MatchRecord> records,
                   PerSide&& fn) {
  for (const auto& r : records) {
    if (r.seat_a == model) fn(r, r.actions_a, r.actions_b, r.payoffs_a);
    if (r.seat_b == model) fn(r, r.actions_b, r.actions_a, r.payoffs_b);
  }
}

}  // namespace

long long rounds_played(std::string_view model, std::span<const MatchRecord> records) {
  long long rounds = 0;
  for_each_side(model, records,
                [&](const MatchRecord& r, const std::string&, const std::string&,
                    const std::vector<double>&) { rounds += r.realized_rounds; });
  return rounds;
}

double score(std::string_view model, std::span<const MatchRecord> records) {
  double total = 0.0;
  long long rounds = 0;
  for_each_side(model, records,
                [&](const MatchRecord& r, const std::string&, const std::string&,
                    const std::vector<double>& payoffs) {
                  for (const double p : payoffs) total += p;
                  rounds += r.realized_rounds;
                });
  if (rounds == 0) throw MetricError("score undefined: model played no rounds");
  return total / static_cast<double>(rounds);
}

double coop_rate(std::string_view model, std::span<const MatchRecord> records) {
  long long coop = 0;
  long long rounds = 0;
  for_each_side(model, records,
                [&](const MatchRecord&, const std::string& mine, const std::string&,
                    const std::vector<double>&) {
                  for (const char a : mine) coop += a == 'C' ? 1 : 0;
                  rounds += static_cast<long long>(mine.size());
                });
  if (rounds == 0) throw MetricError("coop_rate undefined: model played no rounds");
  return static_cast<double>(coop) / static_cast<double>(rounds);
}

std::optional<double> betrayal_rate(std::string_view model,
                                    std::span<const MatchRecord> records) {
  long long betrayals = 0;
  long long opportunities = 0;
  bool played = false;
  for_each_side(model, records,
                [&](const MatchRecord&, const std::string& mine,
                    const std::string& theirs, const std::vector<double>&) {
                  played = true;
                  for (std::size_t t = 1; t < mine.size(); ++t) {
                    if (theirs[t - 1] == 'C') {
                      ++opportunities;
                      if (mine[t] == 'D') ++betrayals;
                    }
                  }
                });
  if (!played) throw MetricError("betrayal_rate undefined: model played no rounds");
  if (opportunities == 0) return std::nullopt;
  return static_cast<double>(betrayals) / static_cast<double>(opportunities);
}

double discounted_objective_estimate(std::string_view model,
                                     std::span<const MatchRecord> records,
                                     double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("delta must be in (0,1)");
  return score(model, records) / (1.0 - delta);
}

}  // namespace ibench
