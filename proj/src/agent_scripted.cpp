#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "ibench/agent.hpp"
#include "ibench/strategies.hpp"

namespace ibench {

namespace detail {
std::unique_ptr<Agent> make_remote_agent(const AgentSpec& spec);  // agent_remote.cpp
}

namespace {

const char* kKindNames[] = {"remote", "scripted"};
const char* kStrategyNames[] = {"grim_trigger", "tit_for_tat",  "all_cooperate",
                                "all_defect",   "random_p",     "oracle_judge",
                                "fixed_script", "bit_probe",    "random_answer",
                                "poker_random"};
const char* kRoleNames[] = {"system", "user", "assistant"};

std::string_view find_line_after(std::string_view text, std::string_view tag) {
  for (const auto line : split_lines(text)) {
    const std::string_view t = trim(line);
    if (t.substr(0, tag.size()) == tag) return trim(t.substr(tag.size()));
  }
  return {};
}

const std::string* last_user_content(const std::vector<ChatMessage>& messages) {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == ChatRole::User) return &it->content;
  }
  return nullptr;
}

const std::string* system_content(const std::vector<ChatMessage>& messages) {
  for (const auto& m : messages) {
    if (m.role == ChatRole::System) return &m.content;
  }
  return nullptr;
}

// Opponent action history as embedded in the trust round prompt.
std::vector<TrustAction> opponent_history(const std::vector<ChatMessage>& messages) {
  const std::string* user = last_user_content(messages);
  if (!user) return {};
  const std::string_view line = find_line_after(*user, "OPPONENT HISTORY:");
  if (auto actions = actions_from_string(trim(line))) return *actions;
  return {};
}

class ScriptedAgent final : public Agent {
 public:
  using Agent::Agent;

  AgentReply reply(const std::vector<ChatMessage>& messages) override {
    AgentReply out;
    out.content = dispatch(messages);
    out.latency_ms = 0;  // pure function, no transport
    return out;
  }

 private:
  std::string dispatch(const std::vector<ChatMessage>& messages) const {
    switch (*spec_.strategy) {
      case Strategy::AllCooperate:
        return "COOPERATE";
      case Strategy::AllDefect:
        return "DEFECT";
      case Strategy::GrimTrigger: {
        const auto opp = opponent_history(messages);
        return grim_trigger_action(opp) == TrustAction::C ? "COOPERATE" : "DEFECT";
      }
      case Strategy::TitForTat: {
        const auto opp = opponent_history(messages);
        return tit_for_tat_action(opp) == TrustAction::C ? "COOPERATE" : "DEFECT";
      }
      case Strategy::RandomP: {
        // keyed by round index so the reply is a pure function of the history
        const std::size_t round = opponent_history(messages).size() + 1;
        std::mt19937_64 rng(seed_combine({spec_.seed, round}));
        return uniform01(rng) < spec_.p ? "COOPERATE" : "DEFECT";
      }
      case Strategy::OracleJudge: {
        const std::string* sys = system_content(messages);
        const std::string* req = last_user_content(messages);
        const Verdict v = oracle_judge_reply(sys ? *sys : "", req ? *req : "");
        std::string token(to_string(v));
        std::transform(token.begin(), token.end(), token.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        return token;
      }
      case Strategy::FixedScript: {
        const std::size_t turn = static_cast<std::size_t>(
            std::count_if(messages.begin(), messages.end(), [](const ChatMessage& m) {
              return m.role == ChatRole::Assistant;
            }));
        if (spec_.script.empty()) return "";
        return spec_.script[std::min(turn, spec_.script.size() - 1)];
      }
      case Strategy::BitProbe:
        return bit_probe(messages);
      case Strategy::RandomAnswer: {
        std::mt19937_64 rng(seed_combine({spec_.seed, 0x5eedull}));
        return uniform01(rng) < spec_.p ? spec_.correct_reply : spec_.wrong_reply;
      }
      case Strategy::PokerRandom:
        return poker_random(messages);
    }
    return "";
  }

  // Collect judge verdicts echoed into the player prompt, ask the next bit,
  // and guess once every bit is known.
  std::string bit_probe(const std::vector<ChatMessage>& messages) const {
    std::vector<bool> bits;
    for (const auto& m : messages) {
      if (m.role != ChatRole::User) continue;
      for (const auto line : split_lines(m.content)) {
        const std::string_view t = trim(line);
        if (t.substr(0, 6) != "Judge:") continue;
        const std::string_view token = trim(t.substr(6));
        if (token == "YES") bits.push_back(true);
        if (token == "NO") bits.push_back(false);
      }
    }
    const std::size_t next_bit = bits.size() + 1;
    if (next_bit <= static_cast<std::size_t>(spec_.key_length)) {
      return "Is bit " + std::to_string(next_bit) + " set?";
    }
    std::string guess;
    for (std::size_t i = 0; i < static_cast<std::size_t>(spec_.key_length); ++i) {
      guess.push_back(i < bits.size() && bits[i] ? '1' : '0');
    }
    return "FINAL: " + guess;
  }

  std::string poker_random(const std::vector<ChatMessage>& messages) const {
    // latest user message that carries an observation object
    const std::string* user = nullptr;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
      if (it->role == ChatRole::User && it->content.find('{') != std::string::npos) {
        user = &it->content;
        break;
      }
    }
    long long to_call = 0;
    long long current_bet = 0;
    long long pot = 0;
    if (user) {
      const std::size_t open = user->find('{');
      const std::size_t close = user->rfind('}');
      if (open != std::string::npos && close != std::string::npos && close > open) {
        const auto obs = nlohmann::json::parse(
            user->substr(open, close - open + 1), nullptr, false);
        if (obs.is_object()) {
          to_call = obs.value("to_call", 0LL);
          current_bet = obs.value("current_bet", 0LL);
          pot = obs.value("pot", 0LL);
        }
      }
    }
    std::mt19937_64 rng(seed_combine(
        {spec_.seed, fnv1a64(user ? *user : ""),
         static_cast<std::uint64_t>(messages.size())}));
    const std::uint64_t roll = rng_below(rng, 100);

    std::string action;
    long long amount = 0;
    if (to_call == 0) {
      if (roll < 55) {
        action = "CHECK";
      } else if (roll < 62) {
        action = "FOLD";  // open fold, legal if unusual
      } else if (roll < 94) {
        action = "RAISE";
        // 2*current_bet always clears the minimum re-raise increment
        amount = std::max<long long>(2 * current_bet, current_bet + 100) +
                 100 * static_cast<long long>(rng_below(rng, 4));
      } else {
        action = "ALL_IN";
      }
    } else {
      if (roll < 30) {
        action = "FOLD";
      } else if (roll < 72) {
        action = "CALL";
        amount = current_bet;
      } else if (roll < 93) {
        action = "RAISE";
        amount = std::max<long long>(2 * current_bet, current_bet + 100) +
                 100 * static_cast<long long>(rng_below(rng, 4));
      } else {
        action = "ALL_IN";
      }
    }
    nlohmann::ordered_json j{{"action", action},
                             {"amount", amount},
                             {"reasoning", "seeded random line, pot " + std::to_string(pot)}};
    return j.dump();
  }
};

}  // namespace

std::string_view to_string(ChatRole r) { return kRoleNames[static_cast<int>(r)]; }
std::string_view to_string(AgentKind k) { return kKindNames[static_cast<int>(k)]; }
std::string_view to_string(Strategy s) { return kStrategyNames[static_cast<int>(s)]; }

std::optional<AgentKind> agent_kind_from_string(std::string_view s) {
  for (int i = 0; i < 2; ++i) {
    if (s == kKindNames[i]) return static_cast<AgentKind>(i);
  }
  return std::nullopt;
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
  for (int i = 0; i < 10; ++i) {
    if (s == kStrategyNames[i]) return static_cast<Strategy>(i);
  }
  return std::nullopt;
}

std::vector<std::string> validate(const AgentSpec& spec) {
  std::vector<std::string> problems;
  if (spec.id.empty()) problems.push_back("agent id must not be empty");
  if (spec.kind == AgentKind::Remote && !spec.endpoint) {
    problems.push_back("agent '" + spec.id + "': remote agents require an endpoint");
  }
  if (spec.kind == AgentKind::Scripted && !spec.strategy) {
    problems.push_back("agent '" + spec.id + "': scripted agents require a strategy");
  }
  if (spec.endpoint && spec.endpoint->url.empty()) {
    problems.push_back("agent '" + spec.id + "': endpoint url must not be empty");
  }
  if (spec.temperature < 0) {
    problems.push_back("agent '" + spec.id + "': temperature must be >= 0");
  }
  if (spec.timeout_ms <= 0) {
    problems.push_back("agent '" + spec.id + "': timeout_ms must be positive");
  }
  if (spec.max_retries < 0) {
    problems.push_back("agent '" + spec.id + "': max_retries must be >= 0");
  }
  if (spec.p < 0 || spec.p > 1) {
    problems.push_back("agent '" + spec.id + "': p must be in [0,1]");
  }
  if (spec.strategy == Strategy::BitProbe && spec.key_length < 1) {
    problems.push_back("agent '" + spec.id + "': bit_probe requires key_length >= 1");
  }
  if (spec.strategy == Strategy::FixedScript && spec.script.empty()) {
    problems.push_back("agent '" + spec.id + "': fixed_script requires a script");
  }
  return problems;
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec) {
  const auto problems = validate(spec);
  if (!problems.empty()) {
    std::string all;
    for (const auto& p : problems) all += p + "; ";
    throw ConfigError("invalid AgentSpec: " + all);
  }
  if (spec.kind == AgentKind::Remote) return detail::make_remote_agent(spec);
  return std::make_unique<ScriptedAgent>(spec);
}

AgentReply next_reply(const AgentSpec& spec, const std::vector<ChatMessage>& messages) {
  if (messages.empty()) throw ConfigError("next_reply: messages must be non-empty");
  return make_agent(spec)->reply(messages);
}

}  // namespace ibench
