#pragma once

#include <array>
#include <compare>
#include <span>
#include <string_view>

#include "ibench/poker/cards.hpp"

namespace ibench::poker {

enum class HandCategory : std::uint8_t {
  HighCard = 0,
  OnePair,
  TwoPair,
  ThreeOfAKind,
  Straight,
  Flush,
  FullHouse,
  FourOfAKind,
  StraightFlush,
};

std::string_view to_string(HandCategory c);

// Total order: category first, then the tiebreak ranks lexicographically.
struct HandRank {
  HandCategory category = HandCategory::HighCard;
  std::array<std::uint8_t, 5> tiebreak{};  // most significant first, zero padded
  auto operator<=>(const HandRank&) const = default;
};

// Rank of the best 5-card hand out of exactly 7 distinct cards. Direct
// 7-card evaluation; the test suite checks it against an exhaustive
// 21-subset brute force.
HandRank evaluate_hand(std::span<const Card> seven);

std::strong_ordering compare_hands(const HandRank& a, const HandRank& b);

}  // namespace ibench::poker
