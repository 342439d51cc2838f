#include "intimacy/languages.hpp"

#include <algorithm>

namespace intimacy {

const std::vector<std::string>& canonical_languages() {
  static const std::vector<std::string> order = {
      "english", "spanish", "portuguese", "italian", "french",
      "chinese", "hindi",   "dutch",      "korean",  "arabic"};
  return order;
}

const std::set<std::string>& default_seen_languages() {
  static const std::set<std::string> seen = {"english", "spanish", "portuguese",
                                             "italian", "french",  "chinese"};
  return seen;
}

const std::set<std::string>& default_unseen_languages() {
  static const std::set<std::string> unseen = {"hindi", "dutch", "korean",
                                               "arabic"};
  return unseen;
}

bool is_known_language(const std::string& code) {
  const auto& order = canonical_languages();
  return std::find(order.begin(), order.end(), code) != order.end();
}

std::vector<std::string> report_language_order(
    const std::set<std::string>& present) {
  std::vector<std::string> out;
  for (const auto& lang : canonical_languages()) {
    if (present.count(lang)) out.push_back(lang);
  }
  for (const auto& lang : present) {
    if (!is_known_language(lang)) out.push_back(lang);
  }
  return out;
}

}  // namespace intimacy
