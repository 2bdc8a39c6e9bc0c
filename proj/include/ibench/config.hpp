#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ibench/agent.hpp"
#include "ibench/episode.hpp"
#include "ibench/poker/session.hpp"
#include "ibench/trust.hpp"

namespace ibench {

enum class Task { ProofsLogic, ProofsMath, PassAtK, NoInteraction, Poker, Trust };

std::string_view to_string(Task t);
std::optional<Task> task_from_string(std::string_view s);

// player | judge | seat | participant
struct BoundAgent {
  AgentSpec spec;
  std::string role;
};

struct RunConfig {
  Task task = Task::Trust;
  std::uint64_t seed = 0;
  std::string output_dir;  // may be overridden by --out
  unsigned parallelism = 1;
  std::vector<BoundAgent> agents;

  EpisodeConfig episode;      // proofs tasks
  std::string instances_path; // proofs / pass@k / no-interaction
  int k = 1;                  // pass@k attempts

  MatchConfig trust;
  struct PokerSection {
    int tables = 1;
    int hands_per_table = 1;
    poker::TableRules rules;
    long long start_stack = 10000;
    std::vector<std::uint64_t> table_seeds;  // derived from seed when empty
  } poker;

  nlohmann::ordered_json raw;  // config as loaded, for the run-directory copy

  std::vector<const BoundAgent*> with_role(std::string_view role) const;
};

struct ConfigResult {
  std::optional<RunConfig> config;           // set iff violations is empty
  std::vector<std::string> violations;       // every problem, not just the first
};

// Strict parse: unknown fields anywhere are violations, and all violations
// are reported together.
ConfigResult parse_config(const nlohmann::ordered_json& j, const std::string& source);
ConfigResult load_config(const std::filesystem::path& path);

std::string config_hash_hex(const nlohmann::ordered_json& raw);

}  // namespace ibench
