#include "ibench/strategies.hpp"

#include <algorithm>
#include <cctype>

#include "ibench/common.hpp"

namespace ibench {

char to_char(TrustAction a) { return a == TrustAction::C ? 'C' : 'D'; }

std::string actions_to_string(std::span<const TrustAction> actions) {
  std::string out;
  out.reserve(actions.size());
  for (const TrustAction a : actions) out.push_back(to_char(a));
  return out;
}

std::optional<std::vector<TrustAction>> actions_from_string(std::string_view s) {
  std::vector<TrustAction> out;
  out.reserve(s.size());
  for (const char c : s) {
    if (c == 'C') {
      out.push_back(TrustAction::C);
    } else if (c == 'D') {
      out.push_back(TrustAction::D);
    } else {
      return std::nullopt;
    }
  }
  return out;
}

std::optional<TrustAction> parse_trust_action(std::string_view reply) {
  const std::string_view t = trim(reply);
  if (t == "COOPERATE") return TrustAction::C;
  if (t == "DEFECT") return TrustAction::D;
  return std::nullopt;
}

TrustAction grim_trigger_action(std::span<const TrustAction> opponent_history) {
  const bool betrayed = std::any_of(opponent_history.begin(), opponent_history.end(),
                                    [](TrustAction a) { return a == TrustAction::D; });
  return betrayed ? TrustAction::D : TrustAction::C;
}

TrustAction tit_for_tat_action(std::span<const TrustAction> opponent_history) {
  if (opponent_history.empty()) return TrustAction::C;
  return opponent_history.back();
}

std::optional<std::string> extract_bitstring(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '0' || text[i] == '1') {
      const std::size_t start = i;
      while (i < text.size() && (text[i] == '0' || text[i] == '1')) ++i;
      // must stand alone, not be part of a longer number or word
      const bool left_ok =
          start == 0 || !std::isalnum(static_cast<unsigned char>(text[start - 1]));
      const bool right_ok =
          i == text.size() || !std::isalnum(static_cast<unsigned char>(text[i]));
      if (left_ok && right_ok) return std::string(text.substr(start, i - start));
    } else {
      ++i;
    }
  }
  return std::nullopt;
}

namespace {

// "is bit 3 set?" -> 3 (requires the words "bit" and "set")
std::optional<std::size_t> parse_bit_query(std::string_view query) {
  const std::string lower = to_lower(query);
  const std::size_t bit_pos = lower.find("bit");
  if (bit_pos == std::string::npos) return std::nullopt;
  if (lower.find("set") == std::string::npos) return std::nullopt;
  std::size_t i = bit_pos + 3;
  while (i < lower.size() && !std::isdigit(static_cast<unsigned char>(lower[i]))) {
    if (std::isalpha(static_cast<unsigned char>(lower[i]))) return std::nullopt;
    ++i;
  }
  if (i >= lower.size()) return std::nullopt;
  std::size_t n = 0;
  while (i < lower.size() && std::isdigit(static_cast<unsigned char>(lower[i]))) {
    n = n * 10 + static_cast<std::size_t>(lower[i] - '0');
    ++i;
  }
  return n;
}

}  // namespace

Verdict oracle_judge_reply(std::string_view hidden_truth, std::string_view request) {
  // within a full judge prompt, the key sits after the solution marker;
  // problem text above it may contain digits of its own
  constexpr std::string_view kMarker = "HIDDEN SOLUTION:";
  const std::size_t marker = hidden_truth.find(kMarker);
  const auto key = extract_bitstring(
      marker == std::string_view::npos ? hidden_truth
                                       : hidden_truth.substr(marker + kMarker.size()));
  if (!key) return Verdict::Irrelevant;  // fixture without a key answers nothing

  const std::string_view req = trim(request);
  constexpr std::string_view kFinalPrefix = "FINAL GUESS:";
  if (req.substr(0, kFinalPrefix.size()) == kFinalPrefix) {
    const std::string_view guess_text = req.substr(kFinalPrefix.size());
    const auto guess = extract_bitstring(guess_text);
    const bool correct =
        (guess && *guess == *key) || trim(guess_text) == *key;
    return correct ? Verdict::Correct : Verdict::Incorrect;
  }

  if (const auto bit = parse_bit_query(req)) {
    if (*bit < 1 || *bit > key->size()) return Verdict::Irrelevant;
    return (*key)[*bit - 1] == '1' ? Verdict::Yes : Verdict::No;
  }
  return Verdict::Irrelevant;
}

}  // namespace ibench
