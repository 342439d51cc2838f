#include "intimacy/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "intimacy/languages.hpp"
#include "intimacy/registry.hpp"
#include "intimacy/util.hpp"

namespace intimacy {

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }

  RunConfig config;
  try {
    if (doc.contains("paths")) {
      const auto& paths = doc["paths"];
      config.primary_path = paths.value("primary", config.primary_path);
      config.auxiliary_path = paths.value("auxiliary", config.auxiliary_path);
      config.test_path = paths.value("test", config.test_path);
      config.registry_path = paths.value("registry", config.registry_path);
      config.checkpoints_dir = paths.value("checkpoints", config.checkpoints_dir);
      config.out_dir = paths.value("out", config.out_dir);
    }
    if (doc.contains("mode")) config.mode = parse_mode(doc["mode"].get<std::string>());
    config.backend = doc.value("backend", config.backend);
    config.translator = doc.value("translator", config.translator);
    config.translator_lexicon = doc.value("translator_lexicon", config.translator_lexicon);
    config.translator_endpoint = doc.value("translator_endpoint", config.translator_endpoint);
    config.translation_cache = doc.value("translation_cache", config.translation_cache);
    if (doc.contains("on_translation_failure")) {
      const auto policy = doc["on_translation_failure"].get<std::string>();
      if (policy == "abort") {
        config.on_translation_failure = TranslateFailurePolicy::abort;
      } else if (policy == "passthrough") {
        config.on_translation_failure = TranslateFailurePolicy::passthrough;
      } else {
        throw ParseError("config: on_translation_failure must be abort or passthrough");
      }
    }
    config.seed = doc.value("seed", config.seed);
    config.validation_count = doc.value("validation_count", config.validation_count);
    config.stratify_validation = doc.value("stratify_validation", config.stratify_validation);

    if (doc.contains("ensemble")) {
      const auto& ens = doc["ensemble"];
      if (ens.contains("multilingual_weights")) {
        config.ensemble.multilingual_weights =
            ens["multilingual_weights"].get<std::vector<double>>();
      }
      config.ensemble.specialist_weight =
          ens.value("specialist_weight", config.ensemble.specialist_weight);
      if (ens.contains("augmented_seen_mode")) {
        config.ensemble.augmented_seen_mode =
            parse_mode(ens["augmented_seen_mode"].get<std::string>());
      }
    }
    if (doc.contains("train")) {
      const auto& train = doc["train"];
      config.train.learning_rate = train.value("learning_rate", config.train.learning_rate);
      config.train.epochs = train.value("epochs", config.train.epochs);
      config.train.batch_size = train.value("batch_size", config.train.batch_size);
      config.train.max_sequence_length =
          train.value("max_sequence_length", config.train.max_sequence_length);
    }
    if (doc.contains("seen_languages")) {
      for (const auto& lang : doc["seen_languages"]) {
        config.seen_languages.insert(to_lower_ascii(lang.get<std::string>()));
      }
    }
    if (doc.contains("columns")) {
      const auto& cols = doc["columns"];
      config.columns.text = cols.value("text", config.columns.text);
      config.columns.language = cols.value("language", config.columns.language);
      config.columns.label = cols.value("label", config.columns.label);
    }
    if (doc.contains("delimiter")) {
      const auto d = doc["delimiter"].get<std::string>();
      if (d == "\\t" || d == "tab") {
        config.delimiter = '\t';
      } else if (d.size() == 1) {
        config.delimiter = d[0];
      } else {
        throw ParseError("config: delimiter must be a single character or 'tab'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config;
}

std::string RunConfig::to_json_text() const {
  nlohmann::ordered_json doc;
  doc["paths"] = {{"primary", primary_path},   {"auxiliary", auxiliary_path},
                  {"test", test_path},         {"registry", registry_path},
                  {"checkpoints", checkpoints_dir}, {"out", out_dir}};
  doc["mode"] = to_string(mode);
  doc["backend"] = backend;
  doc["translator"] = translator;
  doc["translator_lexicon"] = translator_lexicon;
  doc["translator_endpoint"] = translator_endpoint;
  doc["translation_cache"] = translation_cache;
  doc["on_translation_failure"] =
      on_translation_failure == TranslateFailurePolicy::abort ? "abort"
                                                              : "passthrough";
  doc["seed"] = seed;
  doc["validation_count"] = validation_count;
  doc["stratify_validation"] = stratify_validation;
  doc["ensemble"] = {{"multilingual_weights", ensemble.multilingual_weights},
                     {"specialist_weight", ensemble.specialist_weight},
                     {"augmented_seen_mode", to_string(ensemble.augmented_seen_mode)}};
  doc["train"] = {{"learning_rate", train.learning_rate},
                  {"epochs", train.epochs},
                  {"batch_size", train.batch_size},
                  {"max_sequence_length", train.max_sequence_length}};
  doc["seen_languages"] = effective_seen_languages();
  doc["columns"] = {{"text", columns.text},
                    {"language", columns.language},
                    {"label", columns.label}};
  doc["delimiter"] = delimiter == '\t' ? std::string("tab") : std::string(1, delimiter);
  return doc.dump(2) + "\n";
}

const std::set<std::string>& RunConfig::effective_seen_languages() const {
  return seen_languages.empty() ? default_seen_languages() : seen_languages;
}

Registry RunConfig::effective_registry() const {
  return registry_path.empty() ? default_registry()
                               : load_registry(registry_path);
}

std::string RunConfig::fingerprint() const {
  // Identifies the experiment parameters. Output locations don't change what
  // is computed, so two runs of one experiment into different directories
  // stamp the same fingerprint.
  RunConfig canon = *this;
  canon.checkpoints_dir.clear();
  canon.out_dir.clear();
  const std::uint64_t h = fnv1a64(canon.to_json_text());
  std::ostringstream out;
  out << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) out << ((h >> shift) & 0xF);
  return out.str();
}

void RunConfig::validate() const {
  ensemble.validate();
  train.validate();
  if (backend != "stub" && backend != "hashed" && backend != "local") {
    throw ValidationError("config: unknown backend '" + backend + "'");
  }
  if (translator != "identity" && translator != "dictionary" && translator != "http") {
    throw ValidationError("config: unknown translator '" + translator + "'");
  }
  if (translator == "dictionary" && translator_lexicon.empty()) {
    throw ValidationError("config: dictionary translator needs translator_lexicon");
  }
  if (translator == "http" && translator_endpoint.empty()) {
    throw ValidationError("config: http translator needs translator_endpoint");
  }
  if (!effective_seen_languages().count("english")) {
    throw ValidationError("config: seen_languages must contain 'english'");
  }
}

}  // namespace intimacy
