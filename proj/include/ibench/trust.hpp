#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ibench/agent.hpp"
#include "ibench/strategies.hpp"

namespace ibench {

// Symmetric stage game; entry [my action][opponent action] is my payoff.
struct PayoffMatrix {
  double u[2][2] = {{2.0, -1.0}, {3.0, 0.0}};

  double payoff(TrustAction mine, TrustAction theirs) const {
    return u[static_cast<int>(mine)][static_cast<int>(theirs)];
  }
  // u(D,C) > u(C,C) > u(D,D) > u(C,D)
  bool prisoners_dilemma_ordering() const {
    return u[1][0] > u[0][0] && u[0][0] > u[1][1] && u[1][1] > u[0][1];
  }
};

std::pair<double, double> stage_payoff(TrustAction a, TrustAction b,
                                       const PayoffMatrix& m = PayoffMatrix{});

struct MatchConfig {
  double delta = 0.8;   // continue probability, in (0,1)
  int max_rounds = 35;  // hard cap on the geometric horizon
  std::uint64_t seed = 0;
  int repeats = 5;
  bool swap_seats = true;
  PayoffMatrix payoffs{};
  std::optional<int> forced_horizon;  // replay hook: overrides sampling
};

std::vector<std::string> validate(const MatchConfig& config);

// Geometric draw on {1,2,...} by sequential continue/stop flips, capped at
// max_rounds (excess mass folds into the cap).
int sample_horizon(double delta, int max_rounds, std::mt19937_64& rng);

// Closed-form mean of the capped horizon: (1 - delta^cap) / (1 - delta).
double truncated_horizon_mean(double delta, int max_rounds);

struct MatchRecord {
  std::string seat_a;
  std::string seat_b;
  std::string actions_a;  // e.g. "CDDDDD"
  std::string actions_b;
  int realized_rounds = 0;
  std::vector<double> payoffs_a;
  std::vector<double> payoffs_b;
  double total_a = 0.0;
  double total_b = 0.0;
  // rounds (1-based) whose reply stayed unparseable and defaulted to D
  std::vector<int> defaulted_a;
  std::vector<int> defaulted_b;

  nlohmann::ordered_json to_json() const;
  static MatchRecord from_json(const nlohmann::json& j);
};

// One repeated match. Both agents see the full joint history each round and
// move simultaneously (neither round-t prompt contains the other's round-t
// action). An unparseable reply gets one re-prompt, then defaults to D with
// a flag in the record.
MatchRecord run_match(Agent& seat_a, Agent& seat_b, const MatchConfig& config);

// Round-robin over unordered pairs, R repeats each; with swap_seats every
// repeat runs both seat orders. Per-match RNG streams derive from
// (tournament seed, pair ids, repeat, seat order) so the schedule is stable
// under adding models.
std::vector<MatchRecord> run_tournament(const std::vector<AgentSpec>& models,
                                        const MatchConfig& config,
                                        unsigned parallelism = 1);

// Average payoff per round over every match the model played.
double score(std::string_view model, std::span<const MatchRecord> records);

double coop_rate(std::string_view model, std::span<const MatchRecord> records);

// Defection probability immediately after opponent cooperation; nullopt when
// the opponent never cooperated (empty denominator).
std::optional<double> betrayal_rate(std::string_view model,
                                    std::span<const MatchRecord> records);

long long rounds_played(std::string_view model, std::span<const MatchRecord> records);

// Empirical estimate of the discounted objective: Score / (1 - delta). For a
// stationary strategy pair this converges to the analytic discounted return.
double discounted_objective_estimate(std::string_view model,
                                     std::span<const MatchRecord> records,
                                     double delta);

std::string trust_system_prompt(double delta);

}  // namespace ibench
