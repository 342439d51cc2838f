#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>

#include "intimacy/augmentation.hpp"
#include "intimacy/dataset.hpp"
#include "intimacy/ensemble.hpp"
#include "intimacy/training.hpp"

namespace intimacy {

// Everything a run needs; a run is reproducible from its config alone.
// Command-line flags override individual keys, environment variables with
// the INTIMACY_ prefix sit between the two.
struct RunConfig {
  // paths
  std::string primary_path;
  std::string auxiliary_path;
  std::string test_path;
  std::string registry_path;  // empty = built-in default registry
  std::string checkpoints_dir = "checkpoints";
  std::string out_dir = "out";

  Mode mode = Mode::multilingual;
  std::string backend = "stub";        // stub | hashed
  std::string translator = "identity"; // identity | dictionary | http
  std::string translator_lexicon;      // dictionary translator
  std::string translator_endpoint;     // http translator
  std::string translation_cache;       // optional persistent cache file
  TranslateFailurePolicy on_translation_failure = TranslateFailurePolicy::abort;

  std::uint64_t seed = 42;
  std::size_t validation_count = 0;
  bool stratify_validation = false;

  EnsembleConfig ensemble;
  TrainConfig train;
  std::set<std::string> seen_languages;  // empty = default six

  ColumnNames columns;
  char delimiter = ',';

  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  const std::set<std::string>& effective_seen_languages() const;
  Registry effective_registry() const;

  // Stable hex digest of the serialized config; stamped into reports.
  std::string fingerprint() const;

  void validate() const;
};

}  // namespace intimacy
