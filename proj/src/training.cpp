#include "intimacy/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "intimacy/stats.hpp"
#include "intimacy/util.hpp"

namespace intimacy {

void TrainConfig::validate() const {
  if (learning_rate < 0.0) throw ValidationError("train: negative learning rate");
  if (epochs <= 0) throw ValidationError("train: epochs must be positive");
  if (batch_size <= 0) throw ValidationError("train: batch_size must be positive");
  if (max_sequence_length <= 0) {
    throw ValidationError("train: max_sequence_length must be positive");
  }
}

double TrainConfig::resolved_learning_rate(const ModelSpec& spec) const {
  return learning_rate > 0.0 ? learning_rate : spec.learning_rate;
}

namespace {

void check_train_inputs(const std::vector<LabeledExample>& train) {
  if (train.empty()) throw ValidationError("finetune: empty training data");
  for (const auto& ex : train) {
    if (!ex.score) {
      throw ValidationError("finetune: training example '" + ex.id +
                            "' has no score");
    }
  }
}

std::optional<double> validation_pearson(
    const PredictorBackend& backend, const RegressorHandle& handle,
    const std::vector<LabeledExample>& validation) {
  std::vector<std::string> texts;
  std::vector<double> gold;
  for (const auto& ex : validation) {
    if (!ex.score) continue;
    texts.push_back(ex.text);
    gold.push_back(*ex.score);
  }
  if (gold.size() < 2) return std::nullopt;
  const auto preds = backend.predict(handle, texts);
  return pearson_r_or_undefined(preds, gold);
}

double mse_against_gold(const std::vector<double>& preds,
                        const std::vector<double>& gold) {
  double acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i] - gold[i];
    acc += d * d;
  }
  return acc / static_cast<double>(preds.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// StubBackend

double StubBackend::stub_score(const std::string& spec_id,
                               const std::string& text) {
  // Keyed by member id so ensemble members disagree and weighting is
  // observable in tests.
  std::uint64_t h = fnv1a64(spec_id);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(text, h);
  return 1.0 + 4.0 * hash_unit(h);
}

RegressorHandle StubBackend::finetune(const ModelSpec& spec,
                                      const std::vector<LabeledExample>& train,
                                      const std::vector<LabeledExample>& validation,
                                      const TrainConfig& config) {
  config.validate();
  check_train_inputs(train);

  RegressorHandle handle;
  handle.spec_id = spec.id;
  handle.backend_name = name();
  handle.config = config;
  handle.config.learning_rate = config.resolved_learning_rate(spec);

  std::vector<std::string> texts;
  std::vector<double> gold;
  for (const auto& ex : train) {
    texts.push_back(ex.text);
    gold.push_back(*ex.score);
  }
  const double mse = mse_against_gold(predict(handle, texts), gold);
  const auto val_r = validation_pearson(*this, handle, validation);

  // Stubs are untrainable: every epoch reports the same numbers.
  handle.metrics.epochs = config.epochs;
  handle.metrics.final_train_mse = mse;
  handle.metrics.best_validation_pearson = val_r;
  handle.metrics.best_epoch = 0;
  for (int epoch = 0; epoch <= config.epochs; ++epoch) {
    handle.metrics.log.push_back({epoch, mse, val_r});
  }
  return handle;
}

std::vector<double> StubBackend::predict(const RegressorHandle& handle,
                                         const std::vector<std::string>& texts) const {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(stub_score(handle.spec_id, text));
  return out;
}

RegressorHandle StubBackend::load(const ModelSpec& spec,
                                  const std::filesystem::path&,
                                  const TrainConfig& config) {
  RegressorHandle handle;
  handle.spec_id = spec.id;
  handle.backend_name = name();
  handle.config = config;
  handle.config.learning_rate = config.resolved_learning_rate(spec);
  return handle;
}

// ---------------------------------------------------------------------------
// HashedLinearBackend

namespace {

struct LinearModel {
  std::vector<double> weights;  // kDim entries
  double bias = 0.0;
};

// Sparse L2-normalized byte-trigram counts. The sequence-length budget is
// applied as a byte budget (4 bytes per nominal token position).
std::vector<std::pair<std::uint32_t, double>> featurize(
    const std::string& text, int max_sequence_length, std::size_t dim) {
  const std::size_t budget =
      std::min(text.size(), static_cast<std::size_t>(max_sequence_length) * 4);
  std::vector<std::pair<std::uint32_t, double>> feats;
  if (budget == 0) return feats;

  std::vector<std::pair<std::uint32_t, double>> counts;
  const std::size_t n = budget >= 3 ? budget - 2 : 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string_view gram(text.data() + i, std::min<std::size_t>(3, budget - i));
    counts.emplace_back(static_cast<std::uint32_t>(fnv1a64(gram) % dim), 1.0);
  }
  std::sort(counts.begin(), counts.end());
  for (std::size_t i = 0; i < counts.size();) {
    std::size_t j = i;
    double c = 0.0;
    while (j < counts.size() && counts[j].first == counts[i].first) {
      c += counts[j].second;
      ++j;
    }
    feats.emplace_back(counts[i].first, c);
    i = j;
  }
  double norm = 0.0;
  for (const auto& [idx, v] : feats) norm += v * v;
  norm = std::sqrt(norm);
  for (auto& [idx, v] : feats) v /= norm;
  return feats;
}

double linear_predict(const LinearModel& model,
                      const std::vector<std::pair<std::uint32_t, double>>& feats) {
  double acc = model.bias;
  for (const auto& [idx, v] : feats) acc += model.weights[idx] * v;
  return acc;
}

struct AdamState {
  // Lazy Adam: first/second moments tracked per touched parameter only.
  std::vector<double> m, v;
  double m_bias = 0.0, v_bias = 0.0;
  std::int64_t step = 0;
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
};

}  // namespace

RegressorHandle HashedLinearBackend::finetune(
    const ModelSpec& spec, const std::vector<LabeledExample>& train,
    const std::vector<LabeledExample>& validation, const TrainConfig& config) {
  config.validate();
  check_train_inputs(train);

  RegressorHandle handle;
  handle.spec_id = spec.id;
  handle.backend_name = name();
  handle.config = config;
  handle.config.learning_rate = config.resolved_learning_rate(spec);
  const double lr = handle.config.learning_rate;

  std::vector<std::vector<std::pair<std::uint32_t, double>>> features;
  std::vector<double> gold;
  features.reserve(train.size());
  for (const auto& ex : train) {
    features.push_back(featurize(ex.text, config.max_sequence_length, kDim));
    gold.push_back(*ex.score);
  }

  auto model = std::make_shared<LinearModel>();
  model->weights.assign(kDim, 0.0);
  model->bias =
      std::accumulate(gold.begin(), gold.end(), 0.0) / static_cast<double>(gold.size());

  AdamState adam;
  adam.m.assign(kDim, 0.0);
  adam.v.assign(kDim, 0.0);

  auto train_mse = [&]() {
    double acc = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const double d = linear_predict(*model, features[i]) - gold[i];
      acc += d * d;
    }
    return acc / static_cast<double>(features.size());
  };
  auto epoch_handle = [&]() {
    RegressorHandle h = handle;
    h.state = std::make_shared<LinearModel>(*model);
    return h;
  };

  handle.metrics.epochs = config.epochs;
  handle.metrics.log.push_back(
      {0, train_mse(), validation_pearson(*this, epoch_handle(), validation)});

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  LinearModel best = *model;
  double best_val = -std::numeric_limits<double>::infinity();
  int best_epoch = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::mt19937_64 gen(config.seed + static_cast<std::uint64_t>(epoch));
    deterministic_shuffle(order, gen);

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      // Mean gradient of squared error over the batch.
      std::vector<std::pair<std::uint32_t, double>> grad;
      double grad_bias = 0.0;
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const auto& feats = features[order[k]];
        const double residual = linear_predict(*model, feats) - gold[order[k]];
        const double g = 2.0 * residual * scale;
        grad_bias += g;
        for (const auto& [idx, v] : feats) grad.emplace_back(idx, g * v);
      }
      std::sort(grad.begin(), grad.end());

      ++adam.step;
      const double bc1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(adam.step));
      const double bc2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(adam.step));
      auto adam_update = [&](double& w, double& m, double& v, double g) {
        m = AdamState::kBeta1 * m + (1.0 - AdamState::kBeta1) * g;
        v = AdamState::kBeta2 * v + (1.0 - AdamState::kBeta2) * g * g;
        w -= lr * (m / bc1) / (std::sqrt(v / bc2) + AdamState::kEps);
      };
      for (std::size_t i = 0; i < grad.size();) {
        std::size_t j = i;
        double g = 0.0;
        while (j < grad.size() && grad[j].first == grad[i].first) {
          g += grad[j].second;
          ++j;
        }
        const std::uint32_t idx = grad[i].first;
        adam_update(model->weights[idx], adam.m[idx], adam.v[idx], g);
        i = j;
      }
      adam_update(model->bias, adam.m_bias, adam.v_bias, grad_bias);
    }

    const double mse = train_mse();
    const auto val_r = validation_pearson(*this, epoch_handle(), validation);
    handle.metrics.log.push_back({epoch, mse, val_r});
    handle.metrics.final_train_mse = mse;
    if (val_r && *val_r > best_val) {
      best_val = *val_r;
      best = *model;
      best_epoch = epoch;
    }
  }

  // Checkpoint selection: best validation Pearson, falling back to the final
  // epoch when validation never produced a defined value.
  if (best_val > -std::numeric_limits<double>::infinity()) {
    handle.metrics.best_validation_pearson = best_val;
    handle.metrics.best_epoch = best_epoch;
    handle.state = std::make_shared<LinearModel>(std::move(best));
  } else {
    handle.metrics.best_epoch = config.epochs;
    handle.state = std::move(model);
  }
  return handle;
}

std::vector<double> HashedLinearBackend::predict(
    const RegressorHandle& handle, const std::vector<std::string>& texts) const {
  const auto* model = static_cast<const LinearModel*>(handle.state.get());
  if (!model) {
    throw BackendError("hashed backend: handle '" + handle.spec_id +
                       "' carries no model state");
  }
  std::vector<double> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    out.push_back(linear_predict(
        *model, featurize(text, handle.config.max_sequence_length, kDim)));
  }
  return out;
}

void HashedLinearBackend::save_artifacts(const RegressorHandle& handle,
                                         const std::filesystem::path& dir) const {
  const auto* model = static_cast<const LinearModel*>(handle.state.get());
  if (!model) {
    throw BackendError("hashed backend: cannot save an empty handle");
  }
  nlohmann::ordered_json doc;
  doc["dim"] = kDim;
  doc["bias"] = model->bias;
  auto weights = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < model->weights.size(); ++i) {
    if (model->weights[i] != 0.0) {
      weights.push_back({i, model->weights[i]});
    }
  }
  doc["weights"] = std::move(weights);
  std::ofstream out(dir / "weights.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (dir / "weights.json").string());
  out << doc.dump() << '\n';
}

RegressorHandle HashedLinearBackend::load(const ModelSpec& spec,
                                          const std::filesystem::path& dir,
                                          const TrainConfig& config) {
  const auto path = dir / "weights.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw BackendError("hashed backend: no checkpoint for '" + spec.id +
                       "' at " + path.string() + " (run the train command)");
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint " + path.string() + ": " + e.what());
  }
  if (doc.value("dim", std::size_t{0}) != kDim) {
    throw ValidationError("checkpoint " + path.string() +
                          ": feature dimension mismatch");
  }
  auto model = std::make_shared<LinearModel>();
  model->weights.assign(kDim, 0.0);
  model->bias = doc.at("bias").get<double>();
  for (const auto& entry : doc.at("weights")) {
    model->weights.at(entry.at(0).get<std::size_t>()) = entry.at(1).get<double>();
  }

  RegressorHandle handle;
  handle.spec_id = spec.id;
  handle.backend_name = name();
  handle.config = config;
  handle.config.learning_rate = config.resolved_learning_rate(spec);
  handle.state = std::move(model);
  return handle;
}

// ---------------------------------------------------------------------------

std::unique_ptr<PredictorBackend> make_backend(const std::string& name) {
  if (name == "stub") return std::make_unique<StubBackend>();
  if (name == "hashed" || name == "local") {
    return std::make_unique<HashedLinearBackend>();
  }
  throw ValidationError("unknown backend '" + name + "' (expected stub or hashed)");
}

RegressorHandle finetune(const ModelSpec& spec,
                         const std::vector<LabeledExample>& train,
                         const std::vector<LabeledExample>& validation,
                         const TrainConfig& config, PredictorBackend& backend) {
  return backend.finetune(spec, train, validation, config);
}

std::vector<double> predict_batch(const RegressorHandle& handle,
                                  const std::vector<std::string>& texts,
                                  const PredictorBackend& backend) {
  if (texts.empty()) return {};
  auto out = backend.predict(handle, texts);
  if (out.size() != texts.size()) {
    throw BackendError("backend '" + backend.name() +
                       "' returned a misaligned prediction batch");
  }
  return out;
}

namespace {

std::string metric_or_undefined(const std::optional<double>& v) {
  return v ? format_double(*v) : "undefined";
}

}  // namespace

void save_checkpoint(const std::filesystem::path& checkpoints_dir,
                     const RegressorHandle& handle,
                     const PredictorBackend& backend) {
  const auto dir = checkpoints_dir / handle.spec_id;
  std::filesystem::create_directories(dir);

  nlohmann::ordered_json meta;
  meta["spec_id"] = handle.spec_id;
  meta["backend"] = handle.backend_name;
  meta["config"] = {{"learning_rate", handle.config.learning_rate},
                    {"epochs", handle.config.epochs},
                    {"batch_size", handle.config.batch_size},
                    {"seed", handle.config.seed},
                    {"max_sequence_length", handle.config.max_sequence_length}};
  meta["metrics"] = {
      {"final_train_mse", handle.metrics.final_train_mse},
      {"best_validation_pearson",
       handle.metrics.best_validation_pearson
           ? nlohmann::ordered_json(*handle.metrics.best_validation_pearson)
           : nlohmann::ordered_json(nullptr)},
      {"best_epoch", handle.metrics.best_epoch},
      {"epochs", handle.metrics.epochs}};
  std::ofstream meta_out(dir / "metadata.json", std::ios::binary);
  if (!meta_out) throw IoError("cannot write " + (dir / "metadata.json").string());
  meta_out << meta.dump(2) << '\n';

  std::ofstream log_out(dir / "train_log.tsv", std::ios::binary);
  if (!log_out) throw IoError("cannot write " + (dir / "train_log.tsv").string());
  log_out << "epoch\ttrain_mse\tvalidation_pearson\n";
  for (const auto& m : handle.metrics.log) {
    log_out << m.epoch << '\t' << format_double(m.train_mse) << '\t'
            << metric_or_undefined(m.validation_pearson) << '\n';
  }

  backend.save_artifacts(handle, dir);
}

RegressorHandle load_checkpoint(const std::filesystem::path& checkpoints_dir,
                                const ModelSpec& spec, const TrainConfig& config,
                                PredictorBackend& backend) {
  return backend.load(spec, checkpoints_dir / spec.id, config);
}

bool checkpoint_exists(const std::filesystem::path& checkpoints_dir,
                       const std::string& spec_id) {
  return std::filesystem::exists(checkpoints_dir / spec_id / "metadata.json");
}

}  // namespace intimacy
