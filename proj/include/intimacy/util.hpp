#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace intimacy {

// Error taxonomy. Input/config problems map to CLI exit code 2,
// anything else that escapes maps to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct BackendError : Error {
  using Error::Error;
};
// Raised when a statistic has no defined value (e.g. zero variance).
struct UndefinedStatError : Error {
  using Error::Error;
};

// 64-bit FNV-1a. Stable across platforms, used for stub predictions,
// config fingerprints and feature hashing.
std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 14695981039346656037ull);

// Maps a 64-bit hash onto [0, 1) using the top 53 bits.
double hash_unit(std::uint64_t h);

// Shortest round-trip decimal representation (std::to_chars). All file
// output goes through this so reruns are byte-identical.
std::string format_double(double v);

// Strict full-field parse; throws ParseError on anything but a finite number.
double parse_double(std::string_view s);

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool valid_utf8(std::string_view s);

// Uniform integer in [0, n) drawn from a mt19937_64 stream by rejection
// sampling. std::uniform_int_distribution is implementation-defined, so
// splits would not be reproducible across standard libraries with it.
std::uint64_t bounded_rand(std::mt19937_64& gen, std::uint64_t n);

template <class T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded_rand(gen, i));
    std::swap(items[i - 1], items[j]);
  }
}

// k distinct indices from [0, population), ascending. Partial Fisher-Yates.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k,
                                        std::mt19937_64& gen);

}  // namespace intimacy
