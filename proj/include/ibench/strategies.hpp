#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibench/episode.hpp"

namespace ibench {

enum class TrustAction : std::uint8_t { C = 0, D = 1 };

char to_char(TrustAction a);
std::string actions_to_string(std::span<const TrustAction> actions);  // "CDDDD"
std::optional<std::vector<TrustAction>> actions_from_string(std::string_view s);

// Accepts exactly "COOPERATE" or "DEFECT" (surrounding whitespace ignored).
std::optional<TrustAction> parse_trust_action(std::string_view reply);

// Cooperates until the opponent's first defection, then defects forever.
TrustAction grim_trigger_action(std::span<const TrustAction> opponent_history);

// Cooperates first, then repeats the opponent's previous action.
TrustAction tit_for_tat_action(std::span<const TrustAction> opponent_history);

// Deterministic judge for structured fixtures whose hidden truth carries a
// machine-checkable bitstring key. Queries of the form "is bit N set?" get
// Yes/No (N is 1-based from the left); a request starting with "FINAL GUESS:"
// is graded Correct iff the guessed bitstring equals the key; anything else
// is outside the fixture's predicate language and gets Irrelevant.
Verdict oracle_judge_reply(std::string_view hidden_truth, std::string_view request);

// First bitstring token found in the text, if any.
std::optional<std::string> extract_bitstring(std::string_view text);

}  // namespace ibench
