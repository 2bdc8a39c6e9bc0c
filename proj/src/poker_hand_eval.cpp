#include "ibench/poker/hand_eval.hpp"

#include <algorithm>

#include "ibench/common.hpp"

namespace ibench::poker {

namespace {

const char* kCategoryNames[] = {
    "high_card",       "one_pair", "two_pair",       "three_of_a_kind", "straight",
    "flush",           "full_house", "four_of_a_kind", "straight_flush",
};

// Highest straight top rank in a rank bitmask, 0 if none. The wheel
// (A,2,3,4,5) counts with top rank 5.
std::uint8_t straight_high(std::uint32_t rank_mask) {
  for (std::uint8_t high = 14; high >= 6; --high) {
    const std::uint32_t run = 0x1Fu << (high - 4);
    if ((rank_mask & run) == run) return high;
  }
  const std::uint32_t wheel = (1u << 14) | (1u << 5) | (1u << 4) | (1u << 3) | (1u << 2);
  if ((rank_mask & wheel) == wheel) return 5;
  return 0;
}

// Ranks present in the mask, highest first, at most `n` of them.
void top_ranks(std::uint32_t rank_mask, int n, std::array<std::uint8_t, 5>& out,
               int& pos) {
  for (std::uint8_t r = 14; r >= 2 && n > 0; --r) {
    if (rank_mask & (1u << r)) {
      out[pos++] = r;
      --n;
    }
  }
}

}  // namespace

std::string_view to_string(HandCategory c) {
  return kCategoryNames[static_cast<int>(c)];
}

HandRank evaluate_hand(std::span<const Card> seven) {
  if (seven.size() != 7) throw ConfigError("evaluate_hand: need exactly 7 cards");
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = i + 1; j < 7; ++j) {
      if (seven[i] == seven[j]) throw ConfigError("evaluate_hand: duplicate card");
    }
  }

  int rank_count[15] = {};
  int suit_count[4] = {};
  std::uint32_t suit_mask[4] = {};
  std::uint32_t rank_mask = 0;
  for (const Card c : seven) {
    ++rank_count[c.rank];
    ++suit_count[static_cast<int>(c.suit)];
    suit_mask[static_cast<int>(c.suit)] |= 1u << c.rank;
    rank_mask |= 1u << c.rank;
  }

  int flush_suit = -1;
  for (int s = 0; s < 4; ++s) {
    if (suit_count[s] >= 5) flush_suit = s;
  }

  HandRank out;
  int pos = 0;

  if (flush_suit >= 0) {
    if (const std::uint8_t high = straight_high(suit_mask[flush_suit])) {
      out.category = HandCategory::StraightFlush;
      out.tiebreak[0] = high;
      return out;
    }
  }

  std::uint8_t quad = 0;
  std::uint8_t trips = 0;
  std::uint8_t second_trips = 0;
  std::uint8_t pair_hi = 0;
  std::uint8_t pair_lo = 0;
  for (std::uint8_t r = 14; r >= 2; --r) {
    if (rank_count[r] == 4 && quad == 0) quad = r;
    if (rank_count[r] == 3) {
      if (trips == 0) {
        trips = r;
      } else if (second_trips == 0) {
        second_trips = r;
      }
    }
    if (rank_count[r] == 2) {
      if (pair_hi == 0) {
        pair_hi = r;
      } else if (pair_lo == 0) {
        pair_lo = r;
      }
    }
  }

  if (quad) {
    out.category = HandCategory::FourOfAKind;
    out.tiebreak[0] = quad;
    pos = 1;
    top_ranks(rank_mask & ~(1u << quad), 1, out.tiebreak, pos);
    return out;
  }

  const std::uint8_t fh_pair = std::max(second_trips, pair_hi);
  if (trips && fh_pair) {
    out.category = HandCategory::FullHouse;
    out.tiebreak[0] = trips;
    out.tiebreak[1] = fh_pair;
    return out;
  }

  if (flush_suit >= 0) {
    out.category = HandCategory::Flush;
    top_ranks(suit_mask[flush_suit], 5, out.tiebreak, pos);
    return out;
  }

  if (const std::uint8_t high = straight_high(rank_mask)) {
    out.category = HandCategory::Straight;
    out.tiebreak[0] = high;
    return out;
  }

  if (trips) {
    out.category = HandCategory::ThreeOfAKind;
    out.tiebreak[0] = trips;
    pos = 1;
    top_ranks(rank_mask & ~(1u << trips), 2, out.tiebreak, pos);
    return out;
  }

  if (pair_hi && pair_lo) {
    out.category = HandCategory::TwoPair;
    out.tiebreak[0] = pair_hi;
    out.tiebreak[1] = pair_lo;
    pos = 2;
    top_ranks(rank_mask & ~(1u << pair_hi) & ~(1u << pair_lo), 1, out.tiebreak, pos);
    return out;
  }

  if (pair_hi) {
    out.category = HandCategory::OnePair;
    out.tiebreak[0] = pair_hi;
    pos = 1;
    top_ranks(rank_mask & ~(1u << pair_hi), 3, out.tiebreak, pos);
    return out;
  }

  out.category = HandCategory::HighCard;
  top_ranks(rank_mask, 5, out.tiebreak, pos);
  return out;
}

std::strong_ordering compare_hands(const HandRank& a, const HandRank& b) {
  return a <=> b;
}

}  // namespace ibench::poker
