#include "intimacy/ensemble.hpp"

#include <fstream>
#include <sstream>

#include "intimacy/util.hpp"

namespace intimacy {

void EnsembleConfig::validate() const {
  if (multilingual_weights.empty()) {
    throw ValidationError("ensemble: multilingual_weights must not be empty");
  }
  for (double w : multilingual_weights) {
    if (!(w > 0.0)) {
      throw ValidationError("ensemble: weights must be positive, got " +
                            format_double(w));
    }
  }
  if (!(specialist_weight > 0.0) || !(specialist_weight < 1.0)) {
    throw ValidationError("ensemble: specialist_weight must lie in (0, 1), got " +
                          format_double(specialist_weight));
  }
  if (augmented_seen_mode == Mode::augmented) {
    throw ValidationError(
        "ensemble: augmented_seen_mode must be multilingual or routed");
  }
}

double combine(std::span<const double> predictions,
               std::span<const double> weights) {
  if (predictions.empty()) throw ValidationError("combine: empty input");
  if (predictions.size() != weights.size()) {
    throw ValidationError("combine: " + std::to_string(predictions.size()) +
                          " predictions vs " + std::to_string(weights.size()) +
                          " weights");
  }
  double weight_sum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw ValidationError("combine: weights must be positive, got " +
                            format_double(weights[i]));
    }
    weight_sum += weights[i];
    acc += weights[i] * predictions[i];
  }
  return acc / weight_sum;
}

std::vector<double> effective_weights(const EnsembleConfig& config,
                                      std::size_t multilingual_count,
                                      bool has_specialist) {
  config.validate();
  if (config.multilingual_weights.size() != multilingual_count) {
    throw ValidationError(
        "ensemble: " + std::to_string(config.multilingual_weights.size()) +
        " multilingual weights configured but the registry has " +
        std::to_string(multilingual_count) + " multilingual members");
  }
  double sum = 0.0;
  for (double w : config.multilingual_weights) sum += w;
  const double block = has_specialist ? 1.0 - config.specialist_weight : 1.0;

  std::vector<double> out;
  out.reserve(multilingual_count + (has_specialist ? 1 : 0));
  for (double w : config.multilingual_weights) out.push_back(w / sum * block);
  if (has_specialist) out.push_back(config.specialist_weight);
  return out;
}

namespace {

// Per-row scoring core: `row_mode` is what gets recorded, `routing_language`
// is the language used for member resolution (differs from the example's
// language only for translated rows).
PredictionRecord score_example(const LabeledExample& example, Mode row_mode,
                               const std::string& routing_language,
                               Mode routing_mode, const EnsembleConfig& config,
                               const Registry& registry, const HandleMap& handles,
                               const PredictorBackend& backend) {
  const auto specs = resolve(routing_language, routing_mode, registry);
  const std::size_t multilingual_count = registry.multilingual_members().size();
  const bool has_specialist = specs.size() > multilingual_count;

  PredictionRecord record;
  record.example_id = example.id;
  record.language = example.language;
  record.mode = row_mode;
  record.weights = effective_weights(config, multilingual_count, has_specialist);

  std::vector<double> predictions;
  for (const auto& spec : specs) {
    auto it = handles.find(spec.id);
    if (it == handles.end()) {
      throw ValidationError("ensemble: no handle for resolved member '" +
                            spec.id + "'");
    }
    const double score = predict_batch(it->second, {example.text}, backend).at(0);
    record.members.push_back({spec.id, score});
    predictions.push_back(score);
  }
  record.combined = combine(predictions, record.weights);
  return record;
}

// Augmented-mode policy for an untranslated example: seen languages (those
// with a specialist) take the configured seen path; unseen ones are scored
// through the English route.
PredictionRecord score_augmented_untranslated(
    const LabeledExample& example, const EnsembleConfig& config,
    const Registry& registry, const HandleMap& handles,
    const PredictorBackend& backend) {
  if (registry.specialist_for(example.language)) {
    return score_example(example, config.augmented_seen_mode, example.language,
                         config.augmented_seen_mode, config, registry, handles,
                         backend);
  }
  return score_example(example, Mode::augmented, "english", Mode::routed,
                       config, registry, handles, backend);
}

}  // namespace

PredictionRecord predict_example(const LabeledExample& example,
                                 const EnsembleConfig& config,
                                 const Registry& registry,
                                 const HandleMap& handles,
                                 const PredictorBackend& backend) {
  if (config.mode == Mode::augmented) {
    return score_augmented_untranslated(example, config, registry, handles,
                                        backend);
  }
  return score_example(example, config.mode, example.language, config.mode,
                       config, registry, handles, backend);
}

std::vector<PredictionRecord> predict_corpus(
    const std::vector<LabeledExample>& examples, const EnsembleConfig& config,
    const Registry& registry, const HandleMap& handles,
    const PredictorBackend& backend) {
  if (config.mode == Mode::augmented) {
    throw ValidationError(
        "predict_corpus handles multilingual/routed; use predict_augmented "
        "for augmented mode");
  }
  config.validate();

  // One batched predict call per member across all rows resolving to it.
  std::map<std::string, std::vector<std::size_t>> rows_per_member;
  std::vector<std::vector<ModelSpec>> resolved(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    resolved[i] = resolve(examples[i].language, config.mode, registry);
    for (const auto& spec : resolved[i]) rows_per_member[spec.id].push_back(i);
  }

  std::map<std::string, std::map<std::size_t, double>> scores;
  for (const auto& [spec_id, rows] : rows_per_member) {
    auto it = handles.find(spec_id);
    if (it == handles.end()) {
      throw ValidationError("ensemble: no handle for resolved member '" +
                            spec_id + "'");
    }
    std::vector<std::string> texts;
    texts.reserve(rows.size());
    for (auto r : rows) texts.push_back(examples[r].text);
    const auto preds = predict_batch(it->second, texts, backend);
    for (std::size_t k = 0; k < rows.size(); ++k) scores[spec_id][rows[k]] = preds[k];
  }

  const std::size_t multilingual_count = registry.multilingual_members().size();
  std::vector<PredictionRecord> records;
  records.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    PredictionRecord record;
    record.example_id = examples[i].id;
    record.language = examples[i].language;
    record.mode = config.mode;
    record.weights = effective_weights(config, multilingual_count,
                                       resolved[i].size() > multilingual_count);
    std::vector<double> predictions;
    for (const auto& spec : resolved[i]) {
      const double score = scores[spec.id][i];
      record.members.push_back({spec.id, score});
      predictions.push_back(score);
    }
    record.combined = combine(predictions, record.weights);
    records.push_back(std::move(record));
  }
  return records;
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<PredictionRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write predictions file: " + path.string());
  out << "example_id\tlanguage\tmode\ttranslated\tmembers\tweights\tcombined\n";
  for (const auto& r : records) {
    out << r.example_id << '\t' << r.language << '\t' << to_string(r.mode)
        << '\t' << (r.translated ? '1' : '0') << '\t';
    for (std::size_t i = 0; i < r.members.size(); ++i) {
      if (i > 0) out << ';';
      out << r.members[i].spec_id << '=' << format_double(r.members[i].score);
    }
    out << '\t';
    for (std::size_t i = 0; i < r.weights.size(); ++i) {
      if (i > 0) out << ';';
      out << format_double(r.weights[i]);
    }
    out << '\t' << format_double(r.combined) << '\n';
  }
  if (!out) throw IoError("failed writing predictions file: " + path.string());
}

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

}  // namespace

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open predictions file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty predictions file");
  }
  std::vector<PredictionRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_on(line, '\t');
    if (fields.size() != 7) {
      throw ParseError(path.string() + ": row " + std::to_string(row) +
                       ": expected 7 tab-separated fields, got " +
                       std::to_string(fields.size()));
    }
    PredictionRecord r;
    r.example_id = fields[0];
    r.language = fields[1];
    r.mode = parse_mode(fields[2]);
    if (fields[3] != "0" && fields[3] != "1") {
      throw ParseError(path.string() + ": row " + std::to_string(row) +
                       ": translated flag must be 0 or 1");
    }
    r.translated = fields[3] == "1";
    for (const auto& member : split_on(fields[4], ';')) {
      const auto eq = member.find('=');
      if (eq == std::string::npos) {
        throw ParseError(path.string() + ": row " + std::to_string(row) +
                         ": bad member entry '" + member + "'");
      }
      r.members.push_back(
          {member.substr(0, eq), parse_double(member.substr(eq + 1))});
    }
    for (const auto& w : split_on(fields[5], ';')) {
      r.weights.push_back(parse_double(w));
    }
    r.combined = parse_double(fields[6]);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace intimacy
