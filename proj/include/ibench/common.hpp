#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ibench {

inline constexpr std::string_view kSchemaVersion = "1.0";

// Bad run configuration or malformed input files. Exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transport/environment problems: retries exhausted, unreachable endpoints,
// unwritable output directories. Task-level losses are data, not errors.
// Exit code 2.
class InfraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misuse of the episode state machine (turn after terminal, over-budget turn).
class EpisodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric was requested on an empty denominator (no solved episodes, no
// matches). Reported as N/A by callers, never as 0.
class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(std::string_view data);

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive combination of seed material into one 64-bit stream seed.
std::uint64_t seed_combine(std::initializer_list<std::uint64_t> parts);

// Unbiased draw in [0, n). Hand-rolled so streams are identical across
// standard libraries (std::uniform_int_distribution is implementation-defined).
std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n);

// 53-bit uniform in [0, 1).
double uniform01(std::mt19937_64& rng);

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);

// Maximal alphanumeric runs, lowercased ("Judge: BOTH!" -> {"judge","both"}).
std::vector<std::string> word_tokens(std::string_view s);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Runs fn(0..n-1) on up to `workers` threads. Rethrows the first exception.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ibench
