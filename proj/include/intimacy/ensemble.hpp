#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "intimacy/dataset.hpp"
#include "intimacy/registry.hpp"
#include "intimacy/training.hpp"

namespace intimacy {

// Weighting scheme for combining member predictions. The paper's ordering
// (tweet-pretrained multilingual member heaviest, then the general
// multilingual members) fixes the defaults; exact values are tunable.
struct EnsembleConfig {
  Mode mode = Mode::multilingual;
  // Aligned positionally to the registry's multilingual members.
  std::vector<double> multilingual_weights = {0.5, 0.3, 0.2};
  // Share of the total weight the specialist takes in routed scoring; the
  // multilingual block keeps the remaining 1 - specialist_weight.
  double specialist_weight = 0.3;
  // Path used for seen-language rows in augmented mode.
  Mode augmented_seen_mode = Mode::multilingual;

  void validate() const;
};

struct MemberPrediction {
  std::string spec_id;
  double score;  // raw, unclamped
};

struct PredictionRecord {
  std::string example_id;
  std::string language;  // the example's original language
  // Effective path used for this row. In augmented runs seen-language rows
  // record their seen-path mode; translated rows record `augmented`.
  Mode mode = Mode::multilingual;
  bool translated = false;
  std::vector<MemberPrediction> members;  // resolution order
  std::vector<double> weights;            // normalized, aligned to members
  double combined = 0.0;
};

// Weighted average with the weight vector normalized to sum 1.
double combine(std::span<const double> predictions,
               std::span<const double> weights);

// Normalized weight vector for a resolved member set: the multilingual block
// scaled to 1 - specialist_weight when a specialist is present, 1 otherwise.
std::vector<double> effective_weights(const EnsembleConfig& config,
                                      std::size_t multilingual_count,
                                      bool has_specialist);

using HandleMap = std::map<std::string, RegressorHandle>;

// One record per example: member predictions in resolution order, the
// normalized weights used and the combined score. Missing handles are a hard
// error; a silently shrunken ensemble would skew every score after it.
PredictionRecord predict_example(const LabeledExample& example,
                                 const EnsembleConfig& config,
                                 const Registry& registry,
                                 const HandleMap& handles,
                                 const PredictorBackend& backend);

// Batched equivalent for multilingual/routed modes: one predict call per
// member over all rows that resolve to it. Identical records to mapping
// predict_example over the corpus. Augmented mode lives in augmentation.hpp.
std::vector<PredictionRecord> predict_corpus(
    const std::vector<LabeledExample>& examples, const EnsembleConfig& config,
    const Registry& registry, const HandleMap& handles,
    const PredictorBackend& backend);

// Tab-separated prediction file, rows in input order, bit-stable.
void write_predictions(const std::filesystem::path& path,
                       const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

}  // namespace intimacy
