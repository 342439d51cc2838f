#include "intimacy/augmentation.hpp"

#include "intimacy/util.hpp"

namespace intimacy {

std::vector<AugmentedExample> augment_examples(
    const std::vector<LabeledExample>& examples,
    const std::set<std::string>& seen_languages, Translator& translator,
    TranslateFailurePolicy on_failure) {
  if (seen_languages.empty() || !seen_languages.count("english")) {
    throw ValidationError(
        "augment: seen_languages must be non-empty and contain 'english'");
  }

  std::vector<AugmentedExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    if (seen_languages.count(ex.language)) {
      out.push_back({ex, false});
      continue;
    }
    try {
      std::string translated = translator.translate(ex.text, ex.language, "english");
      if (translated.empty()) {
        throw BackendError("translator '" + translator.name() +
                           "' returned empty text");
      }
      LabeledExample copy = ex;
      copy.text = std::move(translated);
      copy.language = "english";
      out.push_back({std::move(copy), true});
    } catch (const Error& e) {
      if (on_failure == TranslateFailurePolicy::abort) {
        throw BackendError("augment: row '" + ex.id + "': " + e.what());
      }
      out.push_back({ex, false});
    }
  }
  return out;
}

std::vector<PredictionRecord> predict_augmented(
    const std::vector<LabeledExample>& examples, const Registry& registry,
    const HandleMap& handles, const EnsembleConfig& config,
    const std::set<std::string>& seen_languages, Translator& translator,
    const PredictorBackend& backend, TranslateFailurePolicy on_failure) {
  config.validate();
  if (!registry.specialist_for("english")) {
    throw ValidationError(
        "predict_augmented: the registry has no English specialist");
  }

  const auto augmented = augment_examples(examples, seen_languages, translator,
                                          on_failure);

  EnsembleConfig seen_config = config;
  seen_config.mode = config.augmented_seen_mode;
  EnsembleConfig routed_config = config;
  routed_config.mode = Mode::routed;

  std::vector<PredictionRecord> records;
  records.reserve(augmented.size());
  for (std::size_t i = 0; i < augmented.size(); ++i) {
    const auto& row = augmented[i];
    PredictionRecord record;
    if (row.translated) {
      // The copy carries language "english", so routed resolution picks the
      // English specialist alongside the multilingual members.
      record = predict_example(row.example, routed_config, registry, handles,
                               backend);
      record.mode = Mode::augmented;
      record.language = examples[i].language;  // report the original language
    } else {
      record = predict_example(row.example, seen_config, registry, handles,
                               backend);
    }
    record.translated = row.translated;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace intimacy
