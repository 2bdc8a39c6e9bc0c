#include "ibench/replay.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace ibench {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// integers print bare, everything else with enough digits to round-trip
std::string fmt_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

void check_schema(const nlohmann::json& j, const std::string& where) {
  const std::string version = j.value("schema_version", std::string());
  if (version != kSchemaVersion) {
    throw ConfigError(where + ": schema_version mismatch: expected " +
                      std::string(kSchemaVersion) + ", got '" + version + "'");
  }
}

}  // namespace

std::string render_transcript(const Transcript& t) {
  std::ostringstream out;
  if (!t.instance_id.empty()) out << "INSTANCE: " << t.instance_id << "\n";
  out << "BUDGET: " << t.config.budget_b << " turns\n\n";
  for (const auto& turn : t.turns) {
    if (turn.actor == Actor::Environment) {
      out << "[" << turn.content << "]\n\n";
      continue;
    }
    out << "Turn " << turn.index_t;
    if (turn.action_kind == TurnKind::FinalGuess) {
      out << " -- FINAL ATTEMPT";
      if (turn.forced) out << " (forced, zero cost)";
    }
    out << "\n";
    out << "Player: " << turn.content << "\n";
    if (turn.verdict) out << "Judge: " << upper(to_string(*turn.verdict)) << "\n";
    out << "\n";
  }
  out << "Outcome: " << to_string(t.outcome);
  if (t.final_answer) out << "\nFinal answer: " << *t.final_answer;
  out << "\n";
  return out.str();
}

std::string render_match(const MatchRecord& r) {
  std::ostringstream out;
  out << "Seat A_vs_B (A=" << r.seat_a << ", B=" << r.seat_b << "):\n";
  out << "rounds=" << r.realized_rounds << ", total_payoff(A,B)=("
      << fmt_number(r.total_a) << "," << fmt_number(r.total_b) << ").\n";
  out << "A: " << r.actions_a << "\n";
  out << "B: " << r.actions_b << "\n";
  if (!r.defaulted_a.empty() || !r.defaulted_b.empty()) {
    out << "(defaulted rounds:";
    for (const int t : r.defaulted_a) out << " A@" << t;
    for (const int t : r.defaulted_b) out << " B@" << t;
    out << ")\n";
  }
  return out.str();
}

std::string render_hand(const nlohmann::json& j) {
  check_schema(j, "hand record");
  std::ostringstream out;

  if (j.contains("seats")) {
    out << "SEATS:";
    int i = 1;
    for (const auto& id : j["seats"]) {
      out << (i == 1 ? " " : ", ") << "P" << i << "=" << id.get<std::string>();
      ++i;
    }
    out << ".\n\n";
  }

  const auto blinds = j.at("blinds");
  const long long sb = blinds[0].get<long long>();
  const long long bb = blinds[1].get<long long>();
  const auto community = j.at("community");
  const int n = static_cast<int>(j.at("payouts").size());

  // reconstruct per-street pots from the street-total amounts
  std::vector<long long> committed(n, 0);
  std::vector<long long> street(n, 0);
  if (j.contains("sb_seat")) street[j["sb_seat"].get<int>()] = sb;
  if (j.contains("bb_seat")) street[j["bb_seat"].get<int>()] = bb;

  std::string current_stage;
  auto board_prefix = [&](const std::string& stage) -> std::string {
    auto cards = [&](int count) {
      std::string s;
      for (int c = 0; c < count && c < static_cast<int>(community.size()); ++c) {
        if (!s.empty()) s += " ";
        s += community[c].get<std::string>();
      }
      return s;
    };
    long long pot = 0;
    for (int s = 0; s < n; ++s) pot += committed[s] + street[s];
    if (stage == "preflop") return "PREFLOP (pot starts at " + std::to_string(pot) + ")";
    if (stage == "flop") return "FLOP board: " + cards(3) + ", pot=" + std::to_string(pot);
    if (stage == "turn") return "TURN board: " + cards(4) + ", pot=" + std::to_string(pot);
    if (stage == "river") return "RIVER board: " + cards(5) + ", pot=" + std::to_string(pot);
    return upper(stage);
  };

  for (const auto& a : j.at("actions")) {
    const std::string stage = a.at("stage").get<std::string>();
    if (stage != current_stage) {
      for (int s = 0; s < n; ++s) {
        committed[s] += street[s];
        street[s] = 0;
      }
      current_stage = stage;
      out << board_prefix(stage) << "\n";
    }
    const int seat = a.at("seat").get<int>();
    const std::string action = a.at("action").get<std::string>();
    const long long amount = a.at("amount").get<long long>();
    if (amount > 0) street[seat] = amount;
    out << "P" << (seat + 1) << ": " << action;
    if (amount > 0) out << " " << amount;
    out << ".";
    if (a.value("auto", false)) out << " (auto)";
    if (a.contains("reasoning")) {
      out << " thinking: \"" << a["reasoning"].get<std::string>() << "\"";
    }
    out << "\n";
  }

  out << "\nRESULT\n" << j.value("note", std::string()) << "\n";
  const auto& payouts = j.at("payouts");
  out << "payouts:";
  for (int s = 0; s < n; ++s) {
    out << (s == 0 ? " " : ", ") << "P" << (s + 1) << " "
        << (payouts[s].get<long long>() >= 0 ? "+" : "")
        << payouts[s].get<long long>();
  }
  out << "\n";
  return out.str();
}

std::string render_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::ostringstream out;
  int line_no = 0;
  bool rendered = false;
  for (const auto line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": invalid JSON");
    }
    if (rendered) out << "\n";
    try {
      if (j.contains("turns")) {
        out << render_transcript(Transcript::from_json(j));
      } else if (j.contains("actions_a")) {
        out << render_match(MatchRecord::from_json(j));
      } else if (j.contains("actions")) {
        out << render_hand(j);
      } else {
        throw ConfigError("unrecognized record type");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    rendered = true;
  }
  if (!rendered) {
    throw ConfigError(path.string() + ": no records found");
  }
  return out.str();
}

}  // namespace ibench
