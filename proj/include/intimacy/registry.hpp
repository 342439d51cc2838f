#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace intimacy {

enum class ModelKind { multilingual, language_specific };
std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& s);

// Ensemble operating modes. `augmented` adds translation of unseen-language
// inputs to English before scoring.
enum class Mode { multilingual, routed, augmented };
std::string to_string(Mode mode);
Mode parse_mode(const std::string& s);

inline constexpr double kMultilingualLearningRate = 8e-6;
inline constexpr double kLanguageSpecificLearningRate = 6e-6;

struct ModelSpec {
  std::string id;
  ModelKind kind = ModelKind::multilingual;
  std::optional<std::string> language;  // required iff language_specific
  std::string artifact_id;              // opaque, resolved by the backend
  double learning_rate = kMultilingualLearningRate;
};

// Immutable catalogue of ensemble members. Validated on construction:
// unique ids, at least one multilingual member, at most one specialist per
// language, non-empty artifact ids.
class Registry {
 public:
  explicit Registry(std::vector<ModelSpec> members);

  const std::vector<ModelSpec>& members() const { return members_; }
  std::vector<ModelSpec> multilingual_members() const;
  const ModelSpec* specialist_for(const std::string& language) const;
  const ModelSpec* find(const std::string& id) const;

 private:
  std::vector<ModelSpec> members_;
};

// Built-in registry: three multilingual members plus six language
// specialists (en/fr/zh/pt/es/it). data/registry_default.json carries the
// same content.
Registry default_registry();

Registry load_registry(const std::filesystem::path& path);
void save_registry(const std::filesystem::path& path, const Registry& registry);

// Ordered member set to query for an example of the given language.
//   multilingual: all multilingual members, registry order.
//   routed:       multilingual members plus the language's specialist last,
//                 if one exists.
//   augmented:    languages with a specialist keep the default seen-language
//                 policy (multilingual only); anything else routes to the
//                 English member set, which is what scoring sees after
//                 translation.
std::vector<ModelSpec> resolve(const std::string& language, Mode mode,
                               const Registry& registry);

}  // namespace intimacy
