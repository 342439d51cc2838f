#pragma once

#include <set>
#include <string>
#include <vector>

#include "intimacy/dataset.hpp"
#include "intimacy/ensemble.hpp"
#include "intimacy/translate.hpp"

namespace intimacy {

// What to do when the translator fails on a row: abort the run, or keep the
// row untranslated and let the multilingual members score it zero-shot.
enum class TranslateFailurePolicy { abort, passthrough };

struct AugmentedExample {
  LabeledExample example;
  bool translated = false;
};

// Seen-language examples pass through unchanged; everything else is replaced
// by a copy with translated text and language "english". Gold scores and
// example count are never touched.
std::vector<AugmentedExample> augment_examples(
    const std::vector<LabeledExample>& examples,
    const std::set<std::string>& seen_languages, Translator& translator,
    TranslateFailurePolicy on_failure = TranslateFailurePolicy::abort);

// Translation-augmented scoring: translated rows go through the English
// routed path (multilingual members plus the English specialist); seen rows
// keep the configured seen-language mode. Records stay in input order and
// keep the original language code.
std::vector<PredictionRecord> predict_augmented(
    const std::vector<LabeledExample>& examples, const Registry& registry,
    const HandleMap& handles, const EnsembleConfig& config,
    const std::set<std::string>& seen_languages, Translator& translator,
    const PredictorBackend& backend,
    TranslateFailurePolicy on_failure = TranslateFailurePolicy::abort);

}  // namespace intimacy
