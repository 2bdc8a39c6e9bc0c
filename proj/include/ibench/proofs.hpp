#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibench/agent.hpp"
#include "ibench/episode.hpp"

namespace ibench {

struct ProofInstance {
  std::string id;
  enum class Domain { Logic, Math } domain = Domain::Logic;
  std::string problem;
  std::string hidden_solution;
  // Canonical final answer for exact grading; when present the engine grades
  // final guesses directly, otherwise the judge does.
  std::optional<std::string> final_answer_key;
};

std::string_view to_string(ProofInstance::Domain d);
std::optional<ProofInstance::Domain> domain_from_string(std::string_view s);
std::vector<std::string> validate(const ProofInstance& inst);

// JSONL file with fields (id, domain, problem, hidden_solution,
// final_answer_key). Throws ConfigError with the offending line number.
std::vector<ProofInstance> load_instances(const std::filesystem::path& path);

struct ProofRunResult {
  Transcript transcript;
  bool solved = false;
  int turns_used = 0;  // costed player turns only
  std::int64_t interactive_tokens = 0;  // prompt+completion over player turns
  bool usage_complete = false;          // every costed player turn had usage
};

struct PassAttempt {
  std::string answer;
  bool correct = false;
  std::int64_t tokens = 0;
};

struct PassKResult {
  std::string instance_id;
  std::vector<PassAttempt> attempts;
  int k = 0;
  bool any_correct() const;
};

// Leading tag line that marks a player reply as a final answer.
inline constexpr std::string_view kFinalTag = "FINAL:";

// True plus the answer payload if the reply's first non-empty line starts
// with kFinalTag (case-insensitive).
std::pair<bool, std::string> classify_final_guess(std::string_view reply);

// Case-insensitive extraction of exactly one standalone vocabulary token,
// anchored to its last occurrence. Zero or two-plus distinct tokens is a
// parse error (nullopt), which triggers one judge re-prompt upstream.
std::optional<Verdict> parse_verdict(std::string_view raw_judge_text);

// Alternating player/judge turns under the episode budget. A Correct verdict
// terminates immediately; exhaustion grants the forced zero-cost answer. A
// judge that cannot produce a vocabulary verdict after one re-prompt aborts
// the episode.
ProofRunResult run_proof_episode(Agent& player, Agent& judge,
                                 const ProofInstance& instance,
                                 const EpisodeConfig& config);

double accuracy(std::span<const ProofRunResult> results);

// Mean costed turns over solved runs only. Throws MetricError when nothing
// was solved (reported as N/A, never 0).
double avg_turns(std::span<const ProofRunResult> results);

// k* = argmin over k >= 1 of |k * mean_pass1 - mean_interactive|, ties broken
// toward smaller k.
int budget_matched_k(double mean_pass1_tokens, double mean_interactive_tokens);

// k independent single-shot attempts; scripted players get a per-attempt
// derived seed so attempts stay independent.
PassKResult run_pass_at_k(const AgentSpec& player, const ProofInstance& instance,
                          int k, Agent* grading_judge = nullptr);

// Single final guess with zero queries.
bool run_no_interaction_baseline(Agent& player, const ProofInstance& instance,
                                 Agent* grading_judge = nullptr);

// Exact match after canonicalization (trim, case-fold, whitespace squeeze,
// rational normalization: "28" == "28.0" == "56/2").
bool grade_exact(std::string_view answer, std::string_view key);
std::string canonical_answer(std::string_view s);

}  // namespace ibench
