#include "ibench/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>
#include <sstream>

#include "ibench/proofs.hpp"

namespace ibench {

namespace {

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string zero_pad(long long value, int width) {
  std::ostringstream ss;
  ss.width(width);
  ss.fill('0');
  ss << value;
  return ss.str();
}

// Collects everything that belongs in the manifest while the task runs.
struct RunContext {
  std::filesystem::path dir;
  std::string config_hash;
  std::vector<std::string> files;
  std::vector<std::string> incomplete;
  std::vector<std::string> events;
  std::mutex mutex;

  void write(const std::string& relative, std::string_view content) {
    write_text_file(dir / relative, content);
    std::lock_guard<std::mutex> lock(mutex);
    files.push_back(relative);
  }
};

nlohmann::ordered_json json_or_null(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

void run_proofs(const RunConfig& cfg, RunContext& ctx,
                std::vector<std::pair<std::string, double>>& rows) {
  const auto instances = load_instances(cfg.instances_path);
  if (instances.empty()) throw ConfigError("no instances in " + cfg.instances_path);
  auto player = make_agent(cfg.with_role("player").front()->spec);
  auto judge = make_agent(cfg.with_role("judge").front()->spec);

  std::vector<std::optional<ProofRunResult>> results(instances.size());
  std::exception_ptr infra_failure;
  std::mutex failure_mutex;
  parallel_for(instances.size(), cfg.parallelism, [&](std::size_t i) {
    const auto& inst = instances[i];
    EpisodeConfig ep = cfg.episode;
    ep.seed = seed_combine({cfg.seed, fnv1a64(inst.id)});
    try {
      results[i] = run_proof_episode(*player, *judge, inst, ep);
    } catch (const InfraError&) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!infra_failure) infra_failure = std::current_exception();
    }
  });

  std::vector<ProofRunResult> finished;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!results[i]) {
      ctx.incomplete.push_back("episodes/" + instances[i].id + ".jsonl");
      continue;
    }
    ctx.write("episodes/" + instances[i].id + ".jsonl",
              results[i]->transcript.to_jsonl() + "\n");
    finished.push_back(*results[i]);
  }

  if (!finished.empty()) {
    const double acc = accuracy(finished);
    std::optional<double> turns;
    try {
      turns = avg_turns(finished);
    } catch (const MetricError&) {
      turns = std::nullopt;  // reported as N/A, never 0
    }
    int n_solved = 0;
    bool usage_complete = true;
    double token_sum = 0.0;
    for (const auto& r : finished) {
      n_solved += r.solved ? 1 : 0;
      usage_complete = usage_complete && r.usage_complete;
      token_sum += static_cast<double>(r.interactive_tokens);
      rows.emplace_back("solved", r.solved ? 1.0 : 0.0);
      if (r.solved) rows.emplace_back("turns_to_solve", r.turns_used);
    }
    nlohmann::ordered_json report;
    report["schema_version"] = std::string(kSchemaVersion);
    report["config_hash"] = ctx.config_hash;
    report["seed"] = cfg.seed;
    report["accuracy"] = acc;
    report["avg_turns"] = json_or_null(turns);
    report["n_solved"] = n_solved;
    report["n_total"] = static_cast<int>(finished.size());
    report["budget"] = cfg.episode.budget_b;
    // budget matching needs endpoint usage figures; scripted runs have none
    if (usage_complete) {
      report["mean_interactive_tokens"] = token_sum / static_cast<double>(finished.size());
    } else {
      report["mean_interactive_tokens"] = nullptr;
    }
    report["k_star"] = nullptr;     // needs a pass@1 token mean from a pass_at_k run
    report["pass_at_k"] = nullptr;  // not part of an interactive run
    ctx.write("report.json", report.dump(2) + "\n");
  }
  if (infra_failure) std::rethrow_exception(infra_failure);
}

void run_pass_k_task(const RunConfig& cfg, RunContext& ctx,
                     std::vector<std::pair<std::string, double>>& rows) {
  const auto instances = load_instances(cfg.instances_path);
  if (instances.empty()) throw ConfigError("no instances in " + cfg.instances_path);
  const AgentSpec player = cfg.with_role("player").front()->spec;
  std::unique_ptr<Agent> judge;
  if (const auto judges = cfg.with_role("judge"); !judges.empty()) {
    judge = make_agent(judges.front()->spec);
  }

  std::vector<std::optional<PassKResult>> results(instances.size());
  parallel_for(instances.size(), cfg.parallelism, [&](std::size_t i) {
    AgentSpec derived = player;
    derived.seed = seed_combine({cfg.seed, fnv1a64(instances[i].id), player.seed});
    results[i] = run_pass_at_k(derived, instances[i], cfg.k, judge.get());
  });

  int successes = 0;
  double token_sum = 0.0;
  long long attempts = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& r = *results[i];
    nlohmann::ordered_json j;
    j["schema_version"] = std::string(kSchemaVersion);
    j["instance_id"] = r.instance_id;
    j["k"] = r.k;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& a : r.attempts) {
      arr.push_back({{"answer", a.answer}, {"correct", a.correct}, {"tokens", a.tokens}});
      token_sum += static_cast<double>(a.tokens);
      ++attempts;
    }
    j["attempts"] = std::move(arr);
    ctx.write("attempts/" + r.instance_id + ".jsonl", j.dump() + "\n");
    successes += r.any_correct() ? 1 : 0;
    rows.emplace_back("pass_at_k", r.any_correct() ? 1.0 : 0.0);
  }

  nlohmann::ordered_json report;
  report["schema_version"] = std::string(kSchemaVersion);
  report["config_hash"] = ctx.config_hash;
  report["seed"] = cfg.seed;
  report["k"] = cfg.k;
  report["pass_at_k"] =
      static_cast<double>(successes) / static_cast<double>(instances.size());
  report["n_total"] = static_cast<int>(instances.size());
  report["mean_pass1_tokens"] =
      attempts == 0 ? 0.0 : token_sum / static_cast<double>(attempts);
  ctx.write("report.json", report.dump(2) + "\n");
}

void run_no_interaction_task(const RunConfig& cfg, RunContext& ctx,
                             std::vector<std::pair<std::string, double>>& rows) {
  const auto instances = load_instances(cfg.instances_path);
  if (instances.empty()) throw ConfigError("no instances in " + cfg.instances_path);
  auto player = make_agent(cfg.with_role("player").front()->spec);
  std::unique_ptr<Agent> judge;
  if (const auto judges = cfg.with_role("judge"); !judges.empty()) {
    judge = make_agent(judges.front()->spec);
  }

  std::vector<char> correct(instances.size(), 0);
  parallel_for(instances.size(), cfg.parallelism, [&](std::size_t i) {
    correct[i] = run_no_interaction_baseline(*player, instances[i], judge.get()) ? 1 : 0;
  });

  int solved = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    nlohmann::ordered_json j{{"schema_version", std::string(kSchemaVersion)},
                             {"instance_id", instances[i].id},
                             {"correct", correct[i] != 0}};
    ctx.write("baseline/" + instances[i].id + ".jsonl", j.dump() + "\n");
    solved += correct[i];
    rows.emplace_back("accuracy", correct[i] ? 1.0 : 0.0);
  }
  nlohmann::ordered_json report;
  report["schema_version"] = std::string(kSchemaVersion);
  report["config_hash"] = ctx.config_hash;
  report["seed"] = cfg.seed;
  report["accuracy"] = static_cast<double>(solved) / static_cast<double>(instances.size());
  report["n_solved"] = solved;
  report["n_total"] = static_cast<int>(instances.size());
  ctx.write("report.json", report.dump(2) + "\n");
}

void run_poker_task(const RunConfig& cfg, RunContext& ctx,
                    std::vector<std::pair<std::string, double>>& rows) {
  poker::SessionConfig session;
  session.tables = cfg.poker.tables;
  session.hands_per_table = cfg.poker.hands_per_table;
  session.rules = cfg.poker.rules;
  session.start_stack = cfg.poker.start_stack;
  session.parallelism = cfg.parallelism;
  session.table_seeds = cfg.poker.table_seeds;
  if (session.table_seeds.empty()) {
    for (int t = 0; t < session.tables; ++t) {
      session.table_seeds.push_back(
          seed_combine({cfg.seed, static_cast<std::uint64_t>(t)}));
    }
  }
  std::vector<AgentSpec> seats;
  for (const auto* a : cfg.with_role("seat")) seats.push_back(a->spec);

  const auto stats = poker::run_session(
      session, seats, [&](int table, int hand, const nlohmann::ordered_json& record) {
        ctx.write("hands/t" + zero_pad(table, 2) + "_h" + zero_pad(hand, 5) + ".jsonl",
                  record.dump() + "\n");
      });

  for (std::size_t s = 0; s < stats.agent_ids.size(); ++s) {
    for (const auto& table : stats.per_table) {
      const auto& a = table[s];
      if (a.hands == 0) continue;
      const std::string& id = stats.agent_ids[s];
      rows.emplace_back("winnings_per_hand/" + id,
                        static_cast<double>(a.net_chips) / a.hands);
      rows.emplace_back("vpip/" + id, static_cast<double>(a.vpip_hands) / a.hands);
      rows.emplace_back("fold_rate/" + id, static_cast<double>(a.folds) / a.hands);
    }
  }
  ctx.events.insert(ctx.events.end(), stats.events.begin(), stats.events.end());
  ctx.write("report.json", stats.to_json().dump(2) + "\n");
}

void run_trust_task(const RunConfig& cfg, RunContext& ctx,
                    std::vector<std::pair<std::string, double>>& rows) {
  MatchConfig match = cfg.trust;
  match.seed = cfg.seed;
  std::vector<AgentSpec> models;
  for (const auto* a : cfg.with_role("participant")) models.push_back(a->spec);

  const auto records = run_tournament(models, match, cfg.parallelism);
  for (std::size_t i = 0; i < records.size(); ++i) {
    ctx.write("matches/match_" + zero_pad(static_cast<long long>(i), 3) + ".jsonl",
              records[i].to_json().dump() + "\n");
  }

  nlohmann::ordered_json leaderboard = nlohmann::ordered_json::object();
  for (const auto& m : models) {
    const double s = score(m.id, records);
    const double c = coop_rate(m.id, records);
    const auto b = betrayal_rate(m.id, records);
    leaderboard[m.id] = {{"score", s},
                         {"coop_rate", c},
                         {"betrayal_rate", json_or_null(b)},
                         {"rounds", rounds_played(m.id, records)}};
    for (const auto& r : records) {
      if (r.seat_a == m.id && r.realized_rounds > 0) {
        rows.emplace_back("score/" + m.id, r.total_a / r.realized_rounds);
      }
      if (r.seat_b == m.id && r.realized_rounds > 0) {
        rows.emplace_back("score/" + m.id, r.total_b / r.realized_rounds);
      }
    }
  }
  nlohmann::ordered_json report;
  report["schema_version"] = std::string(kSchemaVersion);
  report["config_hash"] = ctx.config_hash;
  report["seed"] = cfg.seed;
  report["leaderboard"] = std::move(leaderboard);
  ctx.write("leaderboard.json", report.dump(2) + "\n");
}

}  // namespace

nlohmann::ordered_json AggregateReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = std::string(kSchemaVersion);
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  nlohmann::ordered_json ms = nlohmann::ordered_json::object();
  for (const auto& name : metric_order) {
    const auto& m = metrics.at(name);
    nlohmann::ordered_json entry{{"mean", m.mean}};
    if (m.stddev) entry["stddev"] = *m.stddev;
    entry["n"] = m.n;
    ms[name] = std::move(entry);
  }
  j["metrics"] = std::move(ms);
  return j;
}

std::string AggregateReport::to_csv() const {
  std::ostringstream csv;
  csv << "metric,mean,stddev,n\n";
  for (const auto& name : metric_order) {
    const auto& m = metrics.at(name);
    csv << name << ',' << m.mean << ',';
    if (m.stddev) csv << *m.stddev;
    csv << ',' << m.n << '\n';
  }
  return csv.str();
}

AggregateReport aggregate(const std::vector<std::pair<std::string, double>>& rows,
                          std::string config_hash, std::uint64_t seed) {
  if (rows.empty()) throw MetricError("aggregate over an empty record set");
  AggregateReport report;
  report.config_hash = std::move(config_hash);
  report.seed = seed;
  std::map<std::string, std::vector<double>> grouped;
  for (const auto& [metric, value] : rows) {
    if (!grouped.count(metric)) report.metric_order.push_back(metric);
    grouped[metric].push_back(value);
  }
  for (const auto& name : report.metric_order) {
    report.metrics[name] = poker::summarize(grouped[name]);
  }
  return report;
}

ExecResult execute_run(RunConfig config, const ExecOptions& options) {
  if (options.out_override) config.output_dir = *options.out_override;
  if (options.parallel_override) config.parallelism = *options.parallel_override;
  if (options.seed_override) {
    config.seed = *options.seed_override;
    config.raw["seed"] = *options.seed_override;
  }
  if (config.output_dir.empty()) {
    throw ConfigError("no output directory (set output_dir or pass --out)");
  }

  ExecResult result;
  result.run_dir = config.output_dir;
  RunContext ctx;
  ctx.dir = result.run_dir;
  ctx.config_hash = config_hash_hex(config.raw);
  const std::string started = iso8601_now();

  std::filesystem::create_directories(ctx.dir);
  ctx.write("config.json", config.raw.dump(2) + "\n");

  std::vector<std::pair<std::string, double>> rows;
  std::string status = "complete";
  try {
    switch (config.task) {
      case Task::ProofsLogic:
      case Task::ProofsMath:
        run_proofs(config, ctx, rows);
        break;
      case Task::PassAtK:
        run_pass_k_task(config, ctx, rows);
        break;
      case Task::NoInteraction:
        run_no_interaction_task(config, ctx, rows);
        break;
      case Task::Poker:
        run_poker_task(config, ctx, rows);
        break;
      case Task::Trust:
        run_trust_task(config, ctx, rows);
        break;
    }
  } catch (const InfraError& e) {
    status = "partial";
    result.exit_code = 2;
    result.notes.push_back(e.what());
    ctx.events.push_back(std::string("infrastructure failure: ") + e.what());
  }

  if (!rows.empty()) {
    const auto report = aggregate(rows, ctx.config_hash, config.seed);
    ctx.write("aggregate.json", report.to_json().dump(2) + "\n");
    ctx.write("aggregate.csv", report.to_csv());
  }

  nlohmann::ordered_json manifest;
  manifest["schema_version"] = std::string(kSchemaVersion);
  manifest["config_hash"] = ctx.config_hash;
  manifest["status"] = status;
  manifest["started_at"] = started;
  manifest["finished_at"] = iso8601_now();
  manifest["files"] = ctx.files;
  manifest["incomplete"] = ctx.incomplete;
  manifest["events"] = ctx.events;
  write_text_file(ctx.dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace ibench
