#pragma once

#include <string>
#include <vector>

#include "ibench/agent.hpp"
#include "ibench/episode.hpp"

namespace ibench::testing {

// One reference sub-match: action strings per seat and the printed totals.
struct TrustFixture {
  std::string actions_a;
  std::string actions_b;
  double total_a;
  double total_b;
};

// The ten replayed sub-matches (5 repeats x 2 seatings) of the reference
// two-model trace, delta=0.8, max_rounds=35.
inline std::vector<TrustFixture> trust_trace_fixtures() {
  return {
      {"CDDDDD", "DCDDDD", 2, 2},
      {"DCDCDC", "CDDDDD", 0, 8},
      {"CCCCCCCCCCCC", "CCCCCCCCCCCC", 24, 24},
      {"DDCDDDDDDDDD", "CDDCDDDDDDDD", 5, 1},
      {"CDDDD", "DDDDD", -1, 3},
      {"CCCCC", "CCCCC", 10, 10},
      {"CC", "CC", 4, 4},
      {"CC", "CC", 4, 4},
      {"CDDDDDDD", "DCDDDDDD", 2, 2},
      {"CCCCCCCC", "CCCCCCCC", 16, 16},
  };
}

// Verdict sequence of the reference 20-turn logic trace: sixteen queries, an
// incorrect final attempt at turn 17, two more queries, and a correct final
// attempt at turn 20.
inline std::vector<std::string> logic_trace_judge_script() {
  return {"YES", "NO", "NO",        "NO",  "NO",  "YES", "NO",
          "NO",  "NO", "YES",       "NO",  "NO",  "NO",  "NO",
          "YES", "YES", "INCORRECT", "YES", "YES", "CORRECT"};
}

inline std::vector<std::string> logic_trace_player_script() {
  std::vector<std::string> script;
  for (int t = 1; t <= 16; ++t) {
    script.push_back("Question " + std::to_string(t) + "?");
  }
  script.push_back("FINAL: first attempted explanation");
  script.push_back("Question 18?");
  script.push_back("Question 19?");
  script.push_back("FINAL: full correct explanation");
  return script;
}

inline AgentSpec scripted_spec(std::string id, Strategy strategy,
                               std::uint64_t seed = 0) {
  AgentSpec spec;
  spec.id = std::move(id);
  spec.kind = AgentKind::Scripted;
  spec.strategy = strategy;
  spec.seed = seed;
  return spec;
}

inline AgentSpec script_spec(std::string id, std::vector<std::string> script) {
  AgentSpec spec = scripted_spec(std::move(id), Strategy::FixedScript);
  spec.script = std::move(script);
  return spec;
}

}  // namespace ibench::testing
