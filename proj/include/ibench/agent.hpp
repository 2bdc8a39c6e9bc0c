#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ibench/common.hpp"
#include "ibench/episode.hpp"

namespace ibench {

enum class ChatRole { System, User, Assistant };

struct ChatMessage {
  ChatRole role = ChatRole::User;
  std::string content;
};

std::string_view to_string(ChatRole r);

struct AgentReply {
  std::string content;
  std::int64_t latency_ms = 0;
  std::optional<TokenUsage> token_usage;
};

enum class AgentKind { Remote, Scripted };

enum class Strategy {
  GrimTrigger,
  TitForTat,
  AllCooperate,
  AllDefect,
  RandomP,
  OracleJudge,
  FixedScript,   // replays a list of replies, repeating the last entry
  BitProbe,      // asks each bit of a fixture key, then guesses
  RandomAnswer,  // emits correct_reply with probability p, else wrong_reply
  PokerRandom,   // samples a legal-ish poker action from the observation
};

std::string_view to_string(AgentKind k);
std::string_view to_string(Strategy s);
std::optional<AgentKind> agent_kind_from_string(std::string_view s);
std::optional<Strategy> strategy_from_string(std::string_view s);

struct EndpointSpec {
  std::string url;          // e.g. https://host:port/v1/chat/completions
  std::string model;
  std::string api_key_env;  // env var holding the bearer token; may be empty
  std::optional<int> requests_per_minute;  // client-side pacing
};

struct AgentSpec {
  std::string id;
  AgentKind kind = AgentKind::Scripted;
  std::optional<Strategy> strategy;  // required for scripted
  double temperature = 0.0;          // remote only
  int timeout_ms = 30000;
  int max_retries = 1;
  std::optional<EndpointSpec> endpoint;  // required for remote
  std::uint64_t seed = 0;

  // strategy knobs
  double p = 0.5;                      // RandomP / RandomAnswer
  std::vector<std::string> script;     // FixedScript
  int key_length = 0;                  // BitProbe
  std::string correct_reply;           // RandomAnswer
  std::string wrong_reply;             // RandomAnswer
};

// Returns every violated invariant (empty means valid).
std::vector<std::string> validate(const AgentSpec& spec);

// Transport failure after all retries; carries the attempt count.
class AgentFailure : public InfraError {
 public:
  AgentFailure(const std::string& what, int attempts)
      : InfraError(what), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class Agent {
 public:
  explicit Agent(AgentSpec spec) : spec_(std::move(spec)) {}
  virtual ~Agent() = default;
  const AgentSpec& spec() const { return spec_; }

  // Scripted agents are pure functions of (strategy, seed, messages) and may
  // be called concurrently. Remote agents are thread-safe; pacing and retry
  // policy are applied per call.
  virtual AgentReply reply(const std::vector<ChatMessage>& messages) = 0;

 protected:
  AgentSpec spec_;
};

std::unique_ptr<Agent> make_agent(const AgentSpec& spec);

// One-shot convenience around make_agent()->reply().
AgentReply next_reply(const AgentSpec& spec, const std::vector<ChatMessage>& messages);

}  // namespace ibench
