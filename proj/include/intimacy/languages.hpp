#pragma once

#include <set>
#include <string>
#include <vector>

namespace intimacy {

// The task's ten languages. Seen languages appear in training data, the
// unseen four occur only at test time and are scored zero-shot. The set is
// extensible: unknown codes are accepted everywhere and merely warned about
// at load time.
const std::vector<std::string>& canonical_languages();
const std::set<std::string>& default_seen_languages();
const std::set<std::string>& default_unseen_languages();
bool is_known_language(const std::string& code);

// Report row order: canonical languages first, anything else alphabetical.
std::vector<std::string> report_language_order(
    const std::set<std::string>& present);

}  // namespace intimacy
