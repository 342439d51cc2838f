#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "intimacy/dataset.hpp"
#include "intimacy/util.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("intimacy_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::filesystem::path fixtures_dir() {
  return std::filesystem::path(FIXTURES_DIR) / "fixtures";
}

// Synthetic English corpus with scores correlated to word choice, for
// training-loop tests.
inline std::vector<intimacy::LabeledExample> make_english_corpus(
    std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> intimate = {
      "miss you", "love you", "thinking of you", "my heart", "hold me",
      "our secret", "close to you"};
  static const std::vector<std::string> mundane = {
      "the bus is late", "printer broke", "new phone", "traffic again",
      "coffee time", "meeting at nine", "rainy day"};
  std::mt19937_64 gen(seed);
  std::vector<intimacy::LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool warm = intimacy::bounded_rand(gen, 2) == 0;
    const auto& pool = warm ? intimate : mundane;
    const auto& phrase = pool[intimacy::bounded_rand(gen, pool.size())];
    const double jitter =
        static_cast<double>(intimacy::bounded_rand(gen, 100)) / 100.0;
    intimacy::LabeledExample ex;
    ex.id = "primary:" + std::to_string(i);
    ex.text = phrase + " #" + std::to_string(i);
    ex.language = "english";
    ex.score = warm ? 3.8 + jitter : 1.0 + jitter;
    ex.source = intimacy::Source::primary;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace testutil
