#include "intimacy/translate.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "intimacy/util.hpp"

namespace intimacy {

std::string IdentityTranslator::translate(const std::string& text,
                                          const std::string&,
                                          const std::string&) {
  return text;
}

DictionaryTranslator::DictionaryTranslator(
    std::map<std::string, std::string> lexicon)
    : lexicon_(std::move(lexicon)) {}

DictionaryTranslator DictionaryTranslator::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lexicon file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("lexicon " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError("lexicon " + path.string() + ": expected a JSON object");
  }
  std::map<std::string, std::string> lexicon;
  for (const auto& [word, translation] : doc.items()) {
    lexicon[word] = translation.get<std::string>();
  }
  return DictionaryTranslator(std::move(lexicon));
}

std::string DictionaryTranslator::translate(const std::string& text,
                                            const std::string&,
                                            const std::string&) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string word;
  bool first = true;
  while (in >> word) {
    if (!first) out << ' ';
    auto it = lexicon_.find(word);
    out << (it != lexicon_.end() ? it->second : word);
    first = false;
  }
  return out.str();
}

TranslationCache TranslationCache::load(const std::filesystem::path& path) {
  TranslationCache cache;
  std::ifstream in(path, std::ios::binary);
  if (!in) return cache;  // absent cache file starts empty
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("translation cache " + path.string() + ": " + e.what());
  }
  for (const auto& [source, targets] : doc.items()) {
    for (const auto& [target, texts] : targets.items()) {
      for (const auto& [text, translation] : texts.items()) {
        cache.entries_[source][target][text] = translation.get<std::string>();
      }
    }
  }
  return cache;
}

void TranslationCache::save(const std::filesystem::path& path) const {
  std::lock_guard<std::mutex> lock(mutex_);
  nlohmann::json doc(nlohmann::json::value_t::object);
  for (const auto& [source, targets] : entries_) {
    for (const auto& [target, texts] : targets) {
      for (const auto& [text, translation] : texts) {
        doc[source][target][text] = translation;
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write translation cache: " + path.string());
  out << doc.dump(2) << '\n';
}

std::optional<std::string> TranslationCache::get(const std::string& text,
                                                 const std::string& source,
                                                 const std::string& target) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto s = entries_.find(source);
  if (s == entries_.end()) return std::nullopt;
  auto t = s->second.find(target);
  if (t == s->second.end()) return std::nullopt;
  auto e = t->second.find(text);
  if (e == t->second.end()) return std::nullopt;
  return e->second;
}

void TranslationCache::put(const std::string& text, const std::string& source,
                           const std::string& target,
                           const std::string& translation) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_[source][target][text] = translation;
}

std::size_t TranslationCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::size_t n = 0;
  for (const auto& [source, targets] : entries_) {
    for (const auto& [target, texts] : targets) n += texts.size();
  }
  return n;
}

std::string CachingTranslator::translate(const std::string& text,
                                         const std::string& source,
                                         const std::string& target) {
  if (auto hit = cache_.get(text, source, target)) return *hit;
  std::string translation = inner_.translate(text, source, target);
  cache_.put(text, source, target, translation);
  return translation;
}

HttpTranslator::Options HttpTranslator::parse_endpoint(const std::string& endpoint) {
  // Accepts http://host[:port][/path]
  Options opts;
  std::string rest = endpoint;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) != 0) {
    throw ValidationError("translator endpoint must start with http://, got '" +
                          endpoint + "'");
  }
  rest = rest.substr(scheme.size());
  const auto slash = rest.find('/');
  if (slash != std::string::npos) {
    opts.path = rest.substr(slash);
    rest = rest.substr(0, slash);
  }
  const auto colon = rest.find(':');
  if (colon != std::string::npos) {
    opts.host = rest.substr(0, colon);
    try {
      opts.port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw ValidationError("bad port in translator endpoint '" + endpoint + "'");
    }
  } else {
    opts.host = rest;
  }
  if (opts.host.empty()) {
    throw ValidationError("empty host in translator endpoint '" + endpoint + "'");
  }
  return opts;
}

std::string HttpTranslator::translate(const std::string& text,
                                      const std::string& source,
                                      const std::string& target) {
  nlohmann::json body;
  body["text"] = text;
  body["source"] = source;
  body["target"] = target;
  const std::string payload = body.dump();

  int backoff_ms = options_.initial_backoff_ms;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    httplib::Client client(options_.host, options_.port);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);

    auto res = client.Post(options_.path, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status);
      continue;  // transient, retry
    }
    if (res->status != 200) {
      throw BackendError("http translator: status " +
                         std::to_string(res->status) + " from " + options_.host);
    }
    try {
      auto doc = nlohmann::json::parse(res->body);
      auto translation = doc.at("translation").get<std::string>();
      if (translation.empty() && !text.empty()) {
        throw BackendError("http translator: empty translation returned");
      }
      return translation;
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("http translator: bad response body: ") +
                         e.what());
    }
  }
  throw BackendError("http translator: giving up after " +
                     std::to_string(options_.max_retries + 1) + " attempts (" +
                     last_error + ")");
}

}  // namespace intimacy
