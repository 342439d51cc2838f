#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "intimacy/dataset.hpp"
#include "intimacy/registry.hpp"

namespace intimacy {

struct TrainConfig {
  // 0 means "use the member's default" (8e-6 multilingual, 6e-6 specialist).
  double learning_rate = 0.0;
  int epochs = 3;
  int batch_size = 16;
  std::uint64_t seed = 42;
  int max_sequence_length = 128;

  void validate() const;
  double resolved_learning_rate(const ModelSpec& spec) const;
};

struct EpochMetric {
  int epoch;  // 0 = before any update
  double train_mse;
  std::optional<double> validation_pearson;
};

struct TrainMetrics {
  double final_train_mse = 0.0;
  std::optional<double> best_validation_pearson;
  int best_epoch = 0;
  int epochs = 0;
  std::vector<EpochMetric> log;
};

// Handle to a fine-tuned scalar regressor. Predictions are raw, never
// clamped to [1, 5]. `state` is an opaque backend token.
struct RegressorHandle {
  std::string spec_id;
  std::string backend_name;
  TrainConfig config;  // with the learning rate resolved
  TrainMetrics metrics;
  std::shared_ptr<const void> state;
};

class PredictorBackend {
 public:
  virtual ~PredictorBackend() = default;

  virtual std::string name() const = 0;

  virtual RegressorHandle finetune(const ModelSpec& spec,
                                   const std::vector<LabeledExample>& train,
                                   const std::vector<LabeledExample>& validation,
                                   const TrainConfig& config) = 0;

  // |result| == |texts|, order-aligned, deterministic for a fixed handle.
  virtual std::vector<double> predict(
      const RegressorHandle& handle,
      const std::vector<std::string>& texts) const = 0;

  // Model artifacts only; checkpoint metadata is written by save_checkpoint.
  virtual void save_artifacts(const RegressorHandle& handle,
                              const std::filesystem::path& dir) const = 0;

  // Rebuilds a handle from a checkpoint directory. Stateless backends may
  // materialize a handle even when no artifacts exist on disk.
  virtual RegressorHandle load(const ModelSpec& spec,
                               const std::filesystem::path& dir,
                               const TrainConfig& config) = 0;
};

// Deterministic fake predictor: score = member-keyed hash of the text mapped
// into [1, 5]. Untrainable; finetune only fills in metrics. Enables full
// pipeline runs with no model downloads.
class StubBackend : public PredictorBackend {
 public:
  std::string name() const override { return "stub"; }
  RegressorHandle finetune(const ModelSpec& spec,
                           const std::vector<LabeledExample>& train,
                           const std::vector<LabeledExample>& validation,
                           const TrainConfig& config) override;
  std::vector<double> predict(const RegressorHandle& handle,
                              const std::vector<std::string>& texts) const override;
  void save_artifacts(const RegressorHandle&,
                      const std::filesystem::path&) const override {}
  RegressorHandle load(const ModelSpec& spec, const std::filesystem::path& dir,
                       const TrainConfig& config) override;

  static double stub_score(const std::string& spec_id, const std::string& text);
};

// Trainable local backend: hashed byte-trigram features into a linear head,
// optimized with Adam on mean squared error. Small enough to fine-tune on a
// CPU in milliseconds while exercising the full training loop (per-epoch
// metrics, checkpoint selection by validation Pearson).
class HashedLinearBackend : public PredictorBackend {
 public:
  static constexpr std::size_t kDim = 1u << 16;

  std::string name() const override { return "hashed"; }
  RegressorHandle finetune(const ModelSpec& spec,
                           const std::vector<LabeledExample>& train,
                           const std::vector<LabeledExample>& validation,
                           const TrainConfig& config) override;
  std::vector<double> predict(const RegressorHandle& handle,
                              const std::vector<std::string>& texts) const override;
  void save_artifacts(const RegressorHandle& handle,
                      const std::filesystem::path& dir) const override;
  RegressorHandle load(const ModelSpec& spec, const std::filesystem::path& dir,
                       const TrainConfig& config) override;
};

// Backend names accepted by configs: "stub", "hashed" (alias "local").
std::unique_ptr<PredictorBackend> make_backend(const std::string& name);

RegressorHandle finetune(const ModelSpec& spec,
                         const std::vector<LabeledExample>& train,
                         const std::vector<LabeledExample>& validation,
                         const TrainConfig& config, PredictorBackend& backend);

std::vector<double> predict_batch(const RegressorHandle& handle,
                                  const std::vector<std::string>& texts,
                                  const PredictorBackend& backend);

// Checkpoint directory layout: <dir>/<spec_id>/metadata.json plus
// train_log.tsv (one line per epoch) and backend artifacts, if any.
void save_checkpoint(const std::filesystem::path& checkpoints_dir,
                     const RegressorHandle& handle,
                     const PredictorBackend& backend);
RegressorHandle load_checkpoint(const std::filesystem::path& checkpoints_dir,
                                const ModelSpec& spec,
                                const TrainConfig& config,
                                PredictorBackend& backend);
bool checkpoint_exists(const std::filesystem::path& checkpoints_dir,
                       const std::string& spec_id);

}  // namespace intimacy
