#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ibench::poker {

enum class Suit : std::uint8_t { Spades, Hearts, Diamonds, Clubs };

// rank 2..14, 14 = ace. Text form is rank char + suit letter, e.g. "QD".
struct Card {
  std::uint8_t rank = 2;
  Suit suit = Suit::Spades;
  auto operator<=>(const Card&) const = default;
};

char rank_char(std::uint8_t rank);
char suit_char(Suit suit);
std::string to_string(Card c);
std::optional<Card> card_from_string(std::string_view s);  // accepts "QD", "Qd", "qd"

std::vector<Card> standard_deck();                     // 52 cards
std::vector<Card> deck_from_rank(std::uint8_t min_rank);  // reduced decks for tests

void shuffle_deck(std::vector<Card>& deck, std::mt19937_64& rng);

}  // namespace ibench::poker
