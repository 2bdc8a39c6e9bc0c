#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "ibench/agent.hpp"

namespace ibench {
namespace detail {

namespace {

struct ParsedUrl {
  std::string scheme_host_port;  // "https://host:443"
  std::string path;              // "/v1/chat/completions"
};

ParsedUrl parse_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint url must include a scheme: " + url);
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

class RemoteAgent final : public Agent {
 public:
  explicit RemoteAgent(AgentSpec spec) : Agent(std::move(spec)) {
    url_ = parse_url(spec_.endpoint->url);
    if (!spec_.endpoint->api_key_env.empty()) {
      if (const char* key = std::getenv(spec_.endpoint->api_key_env.c_str())) {
        api_key_ = key;
      }
    }
  }

  AgentReply reply(const std::vector<ChatMessage>& messages) override {
    if (messages.empty()) throw ConfigError("next_reply: messages must be non-empty");
    const std::string body = request_body(messages);
    const int max_attempts = 1 + spec_.max_retries;
    std::string last_error;
    const std::int64_t start = now_ms();
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
      pace();
      auto res = post(body);
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
      } else if (res->status == 200) {
        if (auto parsed = parse_response(res->body)) {
          parsed->latency_ms = now_ms() - start;
          return *parsed;
        }
        last_error = "malformed completion body";
      } else if (res->status == 429 || res->status >= 500) {
        last_error = "http status " + std::to_string(res->status);
      } else {
        // non-retryable client error (bad auth, bad request)
        throw AgentFailure("agent '" + spec_.id + "': http status " +
                               std::to_string(res->status) + " from " +
                               spec_.endpoint->url,
                           attempt);
      }
      if (attempt < max_attempts) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100 * attempt));
      }
    }
    throw AgentFailure("agent '" + spec_.id + "': " + last_error + " after " +
                           std::to_string(max_attempts) + " attempts",
                       max_attempts);
  }

 private:
  std::string request_body(const std::vector<ChatMessage>& messages) const {
    nlohmann::ordered_json j;
    j["model"] = spec_.endpoint->model;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : messages) {
      arr.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    j["messages"] = std::move(arr);
    j["temperature"] = spec_.temperature;
    return j.dump();
  }

  httplib::Result post(const std::string& body) {
    httplib::Client client(url_.scheme_host_port);
    client.set_connection_timeout(std::chrono::milliseconds(spec_.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(spec_.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(spec_.timeout_ms));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    return client.Post(url_.path, headers, body, "application/json");
  }

  std::optional<AgentReply> parse_response(const std::string& body) const {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (!j.is_object()) return std::nullopt;
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
      return std::nullopt;
    }
    const auto& msg = j["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content")) {
      return std::nullopt;
    }
    AgentReply out;
    out.content = msg["message"]["content"].get<std::string>();
    // usage is optional; when absent the reply simply carries no token counts
    if (j.contains("usage") && j["usage"].is_object()) {
      const auto& u = j["usage"];
      if (u.contains("prompt_tokens") && u.contains("completion_tokens")) {
        TokenUsage usage;
        usage.prompt_tokens = u["prompt_tokens"].get<std::int64_t>();
        usage.completion_tokens = u["completion_tokens"].get<std::int64_t>();
        out.token_usage = usage;
      }
    }
    return out;
  }

  // Client-side pacing toward the configured requests/minute.
  void pace() {
    if (!spec_.endpoint->requests_per_minute) return;
    const std::int64_t min_gap_ms = 60000 / *spec_.endpoint->requests_per_minute;
    std::unique_lock<std::mutex> lock(pace_mutex_);
    const std::int64_t now = now_ms();
    const std::int64_t wait = last_request_ms_ + min_gap_ms - now;
    if (wait > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(wait));
      last_request_ms_ = now + wait;
    } else {
      last_request_ms_ = now;
    }
  }

  ParsedUrl url_;
  std::string api_key_;
  std::mutex pace_mutex_;
  std::int64_t last_request_ms_ = 0;
};

}  // namespace

std::unique_ptr<Agent> make_remote_agent(const AgentSpec& spec) {
  return std::make_unique<RemoteAgent>(spec);
}

}  // namespace detail
}  // namespace ibench
