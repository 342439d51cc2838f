#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

namespace intimacy {

class Translator {
 public:
  virtual ~Translator() = default;
  // Backend identification for provenance.
  virtual std::string name() const = 0;
  // Must return non-empty text for non-empty input; throws BackendError on
  // failure.
  virtual std::string translate(const std::string& text,
                                const std::string& source_language,
                                const std::string& target_language) = 0;
};

// Returns the input text unchanged. Deterministic test translator.
class IdentityTranslator : public Translator {
 public:
  std::string name() const override { return "identity"; }
  std::string translate(const std::string& text, const std::string&,
                        const std::string&) override;
};

// Whitespace-token lookup: known words are replaced, unknown ones pass
// through. Lexicon files are flat JSON objects {"word": "translation"}.
class DictionaryTranslator : public Translator {
 public:
  explicit DictionaryTranslator(std::map<std::string, std::string> lexicon);
  static DictionaryTranslator from_file(const std::filesystem::path& path);

  std::string name() const override { return "dictionary"; }
  std::string translate(const std::string& text, const std::string&,
                        const std::string&) override;

 private:
  std::map<std::string, std::string> lexicon_;
};

// Persistent (text, source, target) -> translation map. Safe for concurrent
// readers and writers.
class TranslationCache {
 public:
  TranslationCache() = default;
  TranslationCache(TranslationCache&& other) noexcept
      : entries_(std::move(other.entries_)) {}

  static TranslationCache load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::optional<std::string> get(const std::string& text,
                                 const std::string& source,
                                 const std::string& target) const;
  void put(const std::string& text, const std::string& source,
           const std::string& target, const std::string& translation);
  std::size_t size() const;

 private:
  // source -> target -> text -> translation
  std::map<std::string, std::map<std::string, std::map<std::string, std::string>>>
      entries_;
  mutable std::mutex mutex_;
};

// Wraps another translator with a TranslationCache.
class CachingTranslator : public Translator {
 public:
  CachingTranslator(Translator& inner, TranslationCache& cache)
      : inner_(inner), cache_(cache) {}

  std::string name() const override { return inner_.name() + "+cache"; }
  std::string translate(const std::string& text, const std::string& source,
                        const std::string& target) override;

 private:
  Translator& inner_;
  TranslationCache& cache_;
};

// Adapter for an external machine-translation service. POSTs
// {"text", "source", "target"} as JSON and expects {"translation": "..."};
// retries transient failures with exponential backoff.
class HttpTranslator : public Translator {
 public:
  struct Options {
    std::string host;             // e.g. "127.0.0.1"
    int port = 80;
    std::string path = "/translate";
    int max_retries = 3;
    int initial_backoff_ms = 100;
    int timeout_seconds = 10;
  };

  explicit HttpTranslator(Options options) : options_(std::move(options)) {}
  static Options parse_endpoint(const std::string& endpoint);

  std::string name() const override { return "http"; }
  std::string translate(const std::string& text, const std::string& source,
                        const std::string& target) override;

 private:
  Options options_;
};

}  // namespace intimacy
