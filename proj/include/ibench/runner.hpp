#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ibench/config.hpp"
#include "ibench/poker/session.hpp"

namespace ibench {

// Mean and sample (n-1) standard deviation per metric; stddev reported only
// when a metric has two or more values.
struct AggregateReport {
  std::vector<std::string> metric_order;
  std::map<std::string, poker::MetricSummary> metrics;
  std::string config_hash;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

// rows: (metric name, value); values of the same metric pool into one summary.
AggregateReport aggregate(const std::vector<std::pair<std::string, double>>& rows,
                          std::string config_hash, std::uint64_t seed);

struct ExecOptions {
  std::optional<std::string> out_override;
  std::optional<unsigned> parallel_override;
  std::optional<std::uint64_t> seed_override;
};

struct ExecResult {
  int exit_code = 0;  // 0 ok, 1 config error, 2 infrastructure failure
  std::filesystem::path run_dir;
  std::vector<std::string> notes;
};

// Runs the configured experiment into its output directory: config copy,
// per-episode JSONL records, the task report, aggregate.json/aggregate.csv,
// and manifest.json. Task-level losses are data; only infrastructure
// failures flip the exit code, and partial results are preserved.
ExecResult execute_run(RunConfig config, const ExecOptions& options = {});

}  // namespace ibench
