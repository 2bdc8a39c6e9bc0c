#include "ibench/poker/cards.hpp"

#include <cctype>

#include "ibench/common.hpp"

namespace ibench::poker {

namespace {
constexpr std::string_view kRankChars = "23456789TJQKA";  // index = rank - 2
constexpr std::string_view kSuitChars = "SHDC";
}  // namespace

char rank_char(std::uint8_t rank) { return kRankChars[rank - 2]; }
char suit_char(Suit suit) { return kSuitChars[static_cast<int>(suit)]; }

std::string to_string(Card c) { return {rank_char(c.rank), suit_char(c.suit)}; }

std::optional<Card> card_from_string(std::string_view s) {
  if (s.size() != 2) return std::nullopt;
  const char r = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(s[1])));
  const auto rank_pos = kRankChars.find(r);
  const auto suit_pos = kSuitChars.find(u);
  if (rank_pos == std::string_view::npos || suit_pos == std::string_view::npos) {
    return std::nullopt;
  }
  return Card{static_cast<std::uint8_t>(rank_pos + 2), static_cast<Suit>(suit_pos)};
}

std::vector<Card> standard_deck() { return deck_from_rank(2); }

std::vector<Card> deck_from_rank(std::uint8_t min_rank) {
  std::vector<Card> deck;
  deck.reserve(static_cast<std::size_t>(15 - min_rank) * 4);
  for (std::uint8_t rank = min_rank; rank <= 14; ++rank) {
    for (int suit = 0; suit < 4; ++suit) {
      deck.push_back(Card{rank, static_cast<Suit>(suit)});
    }
  }
  return deck;
}

void shuffle_deck(std::vector<Card>& deck, std::mt19937_64& rng) {
  seeded_shuffle(deck, rng);
}

}  // namespace ibench::poker
