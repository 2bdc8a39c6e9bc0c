#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ibench/agent.hpp"
#include "ibench/poker/table.hpp"

namespace ibench::poker {

struct SessionConfig {
  int tables = 1;
  int hands_per_table = 1;
  TableRules rules;
  long long start_stack = 10000;
  std::vector<std::uint64_t> table_seeds;  // one per table
  unsigned parallelism = 1;
};

// mean +- sample standard deviation; stddev only meaningful when n >= 2
struct MetricSummary {
  double mean = 0.0;
  std::optional<double> stddev;
  int n = 0;
};

MetricSummary summarize(const std::vector<double>& values);

struct AgentTableStats {
  int hands = 0;
  int folds = 0;       // hands in which the seat folded
  int vpip_hands = 0;  // hands with voluntary preflop investment
  long long net_chips = 0;
  long long decisions = 0;
  std::int64_t latency_ms = 0;
  int auto_folds = 0;
};

struct SessionStats {
  std::vector<std::string> agent_ids;  // by seat
  // per_table[table][seat]
  std::vector<std::vector<AgentTableStats>> per_table;
  // across-table summaries, by seat
  std::vector<MetricSummary> avg_winnings_per_hand;
  std::vector<MetricSummary> vpip;
  std::vector<MetricSummary> fold_rate;
  std::vector<MetricSummary> mean_latency_ms;
  std::vector<std::string> events;  // stack resets etc., tagged by table/hand

  nlohmann::ordered_json to_json() const;
};

// Called with each finished hand's JSONL-able record.
using HandSink = std::function<void(int table, int hand, const nlohmann::ordered_json&)>;

// Fixed seats per table; per-table seeded deck streams; stats aggregated
// across tables with mean +- sample stddev. Seats with no chips sit out;
// when fewer than two stacks remain the table resets to the starting stacks.
SessionStats run_session(const SessionConfig& config,
                         const std::vector<AgentSpec>& seat_specs,
                         const HandSink& sink = {},
                         const StepObserver& observer = {});

}  // namespace ibench::poker
