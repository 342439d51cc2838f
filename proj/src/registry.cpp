#include "intimacy/registry.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "intimacy/util.hpp"

namespace intimacy {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::multilingual ? "multilingual" : "language_specific";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "multilingual") return ModelKind::multilingual;
  if (s == "language_specific") return ModelKind::language_specific;
  throw ParseError("unknown model kind: '" + s + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::multilingual: return "multilingual";
    case Mode::routed: return "routed";
    case Mode::augmented: return "augmented";
  }
  throw Error("unreachable mode value");
}

Mode parse_mode(const std::string& s) {
  if (s == "multilingual") return Mode::multilingual;
  if (s == "routed") return Mode::routed;
  if (s == "augmented") return Mode::augmented;
  throw ParseError("unknown mode: '" + s + "' (expected multilingual, routed or augmented)");
}

namespace {

// Spec ids end up in prediction-file member fields (id=score;...), so keep
// them to a charset that cannot collide with the separators.
bool valid_spec_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

Registry::Registry(std::vector<ModelSpec> members) : members_(std::move(members)) {
  std::set<std::string> ids;
  std::set<std::string> specialist_languages;
  std::size_t multilingual_count = 0;

  for (const auto& spec : members_) {
    if (!valid_spec_id(spec.id)) {
      throw ValidationError("registry: invalid member id '" + spec.id +
                            "' (allowed: [A-Za-z0-9_.-]+)");
    }
    if (!ids.insert(spec.id).second) {
      throw ValidationError("registry: duplicate member id '" + spec.id + "'");
    }
    if (spec.artifact_id.empty()) {
      throw ValidationError("registry: member '" + spec.id +
                            "' has an empty artifact_id");
    }
    if (spec.learning_rate <= 0.0) {
      throw ValidationError("registry: member '" + spec.id +
                            "' has a non-positive learning rate");
    }
    if (spec.kind == ModelKind::language_specific) {
      if (!spec.language || spec.language->empty()) {
        throw ValidationError("registry: language_specific member '" + spec.id +
                              "' needs a language");
      }
      if (!specialist_languages.insert(*spec.language).second) {
        throw ValidationError("registry: duplicate specialist for language '" +
                              *spec.language + "'");
      }
    } else {
      if (spec.language) {
        throw ValidationError("registry: multilingual member '" + spec.id +
                              "' must not set a language");
      }
      ++multilingual_count;
    }
  }
  if (multilingual_count == 0) {
    throw ValidationError("registry: at least one multilingual member is required");
  }
}

std::vector<ModelSpec> Registry::multilingual_members() const {
  std::vector<ModelSpec> out;
  for (const auto& spec : members_) {
    if (spec.kind == ModelKind::multilingual) out.push_back(spec);
  }
  return out;
}

const ModelSpec* Registry::specialist_for(const std::string& language) const {
  for (const auto& spec : members_) {
    if (spec.kind == ModelKind::language_specific && spec.language == language) {
      return &spec;
    }
  }
  return nullptr;
}

const ModelSpec* Registry::find(const std::string& id) const {
  for (const auto& spec : members_) {
    if (spec.id == id) return &spec;
  }
  return nullptr;
}

Registry default_registry() {
  std::vector<ModelSpec> members;
  auto multilingual = [&](std::string id, std::string artifact) {
    members.push_back({std::move(id), ModelKind::multilingual, std::nullopt,
                       std::move(artifact), kMultilingualLearningRate});
  };
  auto specialist = [&](std::string id, std::string language, std::string artifact) {
    members.push_back({std::move(id), ModelKind::language_specific,
                       std::move(language), std::move(artifact),
                       kLanguageSpecificLearningRate});
  };
  // Multilingual members in descending default ensemble weight order.
  multilingual("xlm-t", "cardiffnlp/twitter-xlm-roberta-base");
  multilingual("xlm-roberta", "xlm-roberta-base");
  multilingual("mbert", "bert-base-multilingual-cased");
  specialist("english-specialist", "english",
             "cardiffnlp/twitter-roberta-base-sentiment-latest");
  specialist("french-specialist", "french", "camembert-base");
  specialist("chinese-specialist", "chinese", "bert-base-chinese");
  specialist("portuguese-specialist", "portuguese",
             "neuralmind/bert-base-portuguese-cased");
  specialist("spanish-specialist", "spanish",
             "daveni/twitter-xlm-roberta-emotion-es");
  specialist("italian-specialist", "italian",
             "dbmdz/bert-base-italian-xxl-uncased");
  return Registry(std::move(members));
}

Registry load_registry(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open registry file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("registry " + path.string() + ": " + e.what());
  }

  if (!doc.is_object() || !doc.contains("members") || !doc["members"].is_array()) {
    throw ParseError("registry " + path.string() +
                     ": expected an object with a 'members' array");
  }
  std::vector<ModelSpec> members;
  for (const auto& item : doc["members"]) {
    ModelSpec spec;
    try {
      spec.id = item.at("id").get<std::string>();
      spec.kind = parse_model_kind(item.at("kind").get<std::string>());
      spec.artifact_id = item.value("artifact_id", std::string{});
      if (item.contains("language") && !item["language"].is_null()) {
        spec.language = to_lower_ascii(item["language"].get<std::string>());
      }
      spec.learning_rate = item.value(
          "learning_rate", spec.kind == ModelKind::multilingual
                               ? kMultilingualLearningRate
                               : kLanguageSpecificLearningRate);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("registry " + path.string() + ": bad member record: " +
                       e.what());
    }
    members.push_back(std::move(spec));
  }
  return Registry(std::move(members));
}

void save_registry(const std::filesystem::path& path, const Registry& registry) {
  nlohmann::ordered_json doc;
  doc["members"] = nlohmann::ordered_json::array();
  for (const auto& spec : registry.members()) {
    nlohmann::ordered_json m;
    m["id"] = spec.id;
    m["kind"] = to_string(spec.kind);
    if (spec.language) m["language"] = *spec.language;
    m["artifact_id"] = spec.artifact_id;
    m["learning_rate"] = spec.learning_rate;
    doc["members"].push_back(std::move(m));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write registry file: " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<ModelSpec> resolve(const std::string& language, Mode mode,
                               const Registry& registry) {
  std::vector<ModelSpec> out = registry.multilingual_members();
  switch (mode) {
    case Mode::multilingual:
      break;
    case Mode::routed:
      if (const ModelSpec* spec = registry.specialist_for(language)) {
        out.push_back(*spec);
      }
      break;
    case Mode::augmented:
      // Languages with their own specialist are the seen ones; they keep the
      // multilingual-only default. Everything else is scored through the
      // English route after translation.
      if (!registry.specialist_for(language)) {
        return resolve("english", Mode::routed, registry);
      }
      break;
  }
  return out;
}

}  // namespace intimacy
