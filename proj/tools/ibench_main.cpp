#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ibench/config.hpp"
#include "ibench/replay.hpp"
#include "ibench/runner.hpp"

namespace {

int cmd_validate(const std::string& config_path) {
  const auto result = ibench::load_config(config_path);
  if (!result.violations.empty()) {
    for (const auto& v : result.violations) std::cerr << "config error: " << v << "\n";
    return 1;
  }
  std::cout << "ok: " << config_path << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const ibench::ExecOptions& options) {
  const auto loaded = ibench::load_config(config_path);
  if (!loaded.violations.empty()) {
    for (const auto& v : loaded.violations) std::cerr << "config error: " << v << "\n";
    return 1;
  }
  const auto result = ibench::execute_run(*loaded.config, options);
  for (const auto& note : result.notes) std::cerr << "note: " << note << "\n";
  std::cout << "run directory: " << result.run_dir.string() << "\n";
  return result.exit_code;
}

int cmd_replay(const std::string& path) {
  std::cout << ibench::render_file(path);
  return 0;
}

int cmd_report(const std::string& run_dir) {
  namespace fs = std::filesystem;
  for (const char* name : {"report.json", "leaderboard.json", "aggregate.json"}) {
    const fs::path p = fs::path(run_dir) / name;
    if (fs::exists(p)) {
      std::cout << "== " << name << " ==\n" << ibench::read_text_file(p);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted interactive-episode benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string replay_path;
  std::string report_dir;
  std::optional<std::string> out_dir;
  std::optional<unsigned> parallel;
  std::optional<std::uint64_t> seed_override;

  auto* run = app.add_subcommand("run", "Execute a configured experiment");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--parallel", parallel, "Worker count");
  run->add_option("--seed-override", seed_override, "Replace the configured seed");

  auto* validate = app.add_subcommand("validate", "Check a configuration file");
  validate->add_option("--config", config_path, "Run configuration (JSON)")->required();

  auto* replay = app.add_subcommand("replay", "Render a persisted record");
  replay->add_option("file", replay_path, "Transcript / match / hand JSONL file")
      ->required();

  auto* report = app.add_subcommand("report", "Print the reports of a finished run");
  report->add_option("dir", report_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ibench::ExecOptions options;
      options.out_override = out_dir;
      options.parallel_override = parallel;
      options.seed_override = seed_override;
      return cmd_run(config_path, options);
    }
    if (validate->parsed()) return cmd_validate(config_path);
    if (replay->parsed()) return cmd_replay(replay_path);
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const ibench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ibench::InfraError& e) {
    std::cerr << "infrastructure failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
