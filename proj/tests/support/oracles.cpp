#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ibench::testing {

using poker::Card;
using poker::HandCategory;
using poker::HandRank;

HandRank rank_five_slow(std::array<Card, 5> cards) {
  std::array<int, 5> ranks{};
  for (int i = 0; i < 5; ++i) ranks[i] = cards[i].rank;
  std::sort(ranks.begin(), ranks.end(), std::greater<>());

  bool flush = true;
  for (int i = 1; i < 5; ++i) flush = flush && cards[i].suit == cards[0].suit;

  std::map<int, int> count_by_rank;
  for (const int r : ranks) ++count_by_rank[r];
  const bool distinct = count_by_rank.size() == 5;

  bool straight = false;
  int straight_high = 0;
  if (distinct) {
    if (ranks[0] - ranks[4] == 4) {
      straight = true;
      straight_high = ranks[0];
    } else if (ranks == std::array<int, 5>{14, 5, 4, 3, 2}) {
      straight = true;  // wheel
      straight_high = 5;
    }
  }

  // (count, rank) groups, biggest group first, then higher rank
  std::vector<std::pair<int, int>> groups;
  for (const auto& [rank, count] : count_by_rank) groups.push_back({count, rank});
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second > b.second;
  });

  HandRank out;
  auto fill = [&](std::initializer_list<int> values) {
    int i = 0;
    for (const int v : values) out.tiebreak[i++] = static_cast<std::uint8_t>(v);
  };

  if (straight && flush) {
    out.category = HandCategory::StraightFlush;
    fill({straight_high});
  } else if (groups[0].first == 4) {
    out.category = HandCategory::FourOfAKind;
    fill({groups[0].second, groups[1].second});
  } else if (groups[0].first == 3 && groups[1].first == 2) {
    out.category = HandCategory::FullHouse;
    fill({groups[0].second, groups[1].second});
  } else if (flush) {
    out.category = HandCategory::Flush;
    fill({ranks[0], ranks[1], ranks[2], ranks[3], ranks[4]});
  } else if (straight) {
    out.category = HandCategory::Straight;
    fill({straight_high});
  } else if (groups[0].first == 3) {
    out.category = HandCategory::ThreeOfAKind;
    fill({groups[0].second, groups[1].second, groups[2].second});
  } else if (groups[0].first == 2 && groups[1].first == 2) {
    out.category = HandCategory::TwoPair;
    fill({groups[0].second, groups[1].second, groups[2].second});
  } else if (groups[0].first == 2) {
    out.category = HandCategory::OnePair;
    fill({groups[0].second, groups[1].second, groups[2].second, groups[3].second});
  } else {
    out.category = HandCategory::HighCard;
    fill({ranks[0], ranks[1], ranks[2], ranks[3], ranks[4]});
  }
  return out;
}

HandRank best_five_of_seven_bruteforce(std::span<const Card> seven) {
  HandRank best;
  bool first = true;
  for (int a = 0; a < 7; ++a) {
    for (int b = a + 1; b < 7; ++b) {
      std::array<Card, 5> five;
      int k = 0;
      for (int i = 0; i < 7; ++i) {
        if (i != a && i != b) five[k++] = seven[i];
      }
      const HandRank r = rank_five_slow(five);
      if (first || r > best) {
        best = r;
        first = false;
      }
    }
  }
  return best;
}

std::vector<long long> settle_oracle(const std::vector<long long>& contributions,
                                     const std::vector<bool>& folded,
                                     const std::vector<poker::HandRank>& ranks,
                                     int button) {
  const int n = static_cast<int>(contributions.size());
  std::vector<long long> received(n, 0);

  std::vector<long long> levels;
  for (const long long c : contributions) {
    if (c > 0) levels.push_back(c);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  long long prev = 0;
  for (const long long level : levels) {
    const long long width = level - prev;
    std::vector<int> contributors;
    std::vector<int> eligible;
    for (int s = 0; s < n; ++s) {
      if (contributions[s] >= level) {
        contributors.push_back(s);
        if (!folded[s]) eligible.push_back(s);
      }
    }
    const long long layer_total = width * static_cast<long long>(contributors.size());
    if (eligible.empty()) {
      // nobody can win this layer: give every contributor its slice back
      for (const int s : contributors) received[s] += width;
    } else {
      poker::HandRank best = ranks[eligible.front()];
      for (const int s : eligible) best = std::max(best, ranks[s]);
      std::vector<int> winners;
      for (const int s : eligible) {
        if (ranks[s] == best) winners.push_back(s);
      }
      std::sort(winners.begin(), winners.end(), [&](int a, int b) {
        return (a - button - 1 + 2 * n) % n < (b - button - 1 + 2 * n) % n;
      });
      const long long share = layer_total / static_cast<long long>(winners.size());
      long long odd = layer_total % static_cast<long long>(winners.size());
      for (const int s : winners) {
        received[s] += share + (odd > 0 ? 1 : 0);
        if (odd > 0) --odd;
      }
    }
    prev = level;
  }

  std::vector<long long> net(n, 0);
  for (int s = 0; s < n; ++s) net[s] = received[s] - contributions[s];
  return net;
}

double truncated_geometric_mean_oracle(double delta, int max_rounds) {
  double mean = 0.0;
  double tail = 1.0;  // Pr(T >= t)
  for (int t = 1; t < max_rounds; ++t) {
    mean += t * tail * (1.0 - delta);
    tail *= delta;
  }
  mean += max_rounds * tail;  // all remaining mass sits at the cap
  return mean;
}

double chi_square_statistic(const std::vector<long long>& observed,
                            const std::vector<double>& expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double diff = static_cast<double>(observed[i]) - expected[i];
    stat += diff * diff / expected[i];
  }
  return stat;
}

}  // namespace ibench::testing
