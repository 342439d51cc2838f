#include "intimacy/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "intimacy/languages.hpp"
#include "intimacy/util.hpp"

namespace intimacy {

std::string to_string(Source source) {
  switch (source) {
    case Source::primary: return "primary";
    case Source::auxiliary: return "auxiliary";
    case Source::test: return "test";
  }
  throw Error("unreachable source value");
}

Source parse_source(const std::string& s) {
  if (s == "primary") return Source::primary;
  if (s == "auxiliary") return Source::auxiliary;
  if (s == "test") return Source::test;
  throw ParseError("unknown source: '" + s + "'");
}

bool fields_equal(const LabeledExample& a, const LabeledExample& b) {
  return a.text == b.text && a.language == b.language && a.score == b.score &&
         a.source == b.source;
}

void SourceCounts::add(Source s) {
  switch (s) {
    case Source::primary: ++primary; break;
    case Source::auxiliary: ++auxiliary; break;
    case Source::test: ++test; break;
  }
}

namespace {

std::size_t require_column(const CsvRow& header, const std::string& name,
                           const std::filesystem::path& path) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw ParseError(path.string() + ": header is missing column '" + name + "'");
}

}  // namespace

std::vector<LabeledExample> load_corpus(const std::filesystem::path& path,
                                        Source source,
                                        ScoreRange expected_range,
                                        const ColumnNames& columns,
                                        CsvOptions csv) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path.string());

  CsvReader reader(in, csv);
  auto header = reader.next();
  if (!header) throw ParseError(path.string() + ": empty file, expected header");
  const std::size_t text_col = require_column(*header, columns.text, path);
  const std::size_t lang_col = require_column(*header, columns.language, path);
  const std::size_t label_col = require_column(*header, columns.label, path);

  const bool sentinel_valid_label = expected_range.contains(kUnannotatedSentinel);
  std::vector<LabeledExample> out;
  std::set<std::string> warned;
  std::size_t data_row = 0;

  while (auto row = reader.next()) {
    auto fail = [&](const std::string& why) -> ParseError {
      return ParseError(path.string() + ": row " +
                        std::to_string(reader.record_number()) + ": " + why);
    };
    if (row->size() != header->size()) {
      throw fail("expected " + std::to_string(header->size()) +
                 " fields, got " + std::to_string(row->size()));
    }

    LabeledExample ex;
    ex.text = (*row)[text_col];
    ex.language = to_lower_ascii(trim((*row)[lang_col]));
    ex.source = source;
    ex.id = to_string(source) + ":" + std::to_string(data_row);

    if (!valid_utf8(ex.text)) throw fail("text is not valid UTF-8");
    if (trim(ex.text).empty()) throw fail("empty text");
    if (ex.language.empty()) throw fail("empty language code");
    if (!is_known_language(ex.language) && warned.insert(ex.language).second) {
      std::cerr << "warning: " << path.string() << ": unknown language code '"
                << ex.language << "' (rows kept)\n";
    }

    double label;
    try {
      label = parse_double((*row)[label_col]);
    } catch (const ParseError& e) {
      throw fail(std::string("bad label: ") + e.what());
    }
    if (expected_range.contains(label)) {
      ex.score = label;
    } else if (!sentinel_valid_label && label == kUnannotatedSentinel) {
      ex.score = std::nullopt;
    } else {
      throw fail("label " + format_double(label) + " outside [" +
                 format_double(expected_range.lo) + ", " +
                 format_double(expected_range.hi) + "]");
    }

    out.push_back(std::move(ex));
    ++data_row;
  }
  return out;
}

std::vector<LabeledExample> load_auxiliary(const std::filesystem::path& path,
                                           const ColumnNames& columns,
                                           CsvOptions csv) {
  auto examples = load_corpus(path, Source::auxiliary, kAuxiliaryRawRange,
                              columns, csv);
  for (auto& ex : examples) {
    if (ex.score) ex.score = remap_score(*ex.score);
  }
  return examples;
}

void write_corpus(const std::filesystem::path& path,
                  const std::vector<LabeledExample>& examples,
                  const ColumnNames& columns, CsvOptions csv) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file: " + path.string());
  write_csv_row(out, {columns.text, columns.language, columns.label},
                csv.delimiter);
  for (const auto& ex : examples) {
    const std::string label =
        ex.score ? format_double(*ex.score) : format_double(kUnannotatedSentinel);
    write_csv_row(out, {ex.text, ex.language, label}, csv.delimiter);
  }
  if (!out) throw IoError("failed writing corpus file: " + path.string());
}

double remap_score(double s) {
  if (s < -1.0 || s > 1.0) {
    throw ValidationError("remap_score input " + format_double(s) +
                          " outside [-1, 1]");
  }
  return 2.0 * s + 3.0;
}

double remap_score_inverse(double s) {
  if (s < 1.0 || s > 5.0) {
    throw ValidationError("remap_score_inverse input " + format_double(s) +
                          " outside [1, 5]");
  }
  return (s - 3.0) / 2.0;
}

namespace {

void require_all_scored(const std::vector<LabeledExample>& examples,
                        const char* which) {
  for (const auto& ex : examples) {
    if (!ex.score) {
      throw ValidationError(std::string("make_splits: ") + which +
                            " example '" + ex.id + "' has no score");
    }
  }
}

// Largest-remainder allocation of the validation quota across languages.
std::vector<std::size_t> stratified_sample(
    const std::vector<LabeledExample>& primary, std::size_t validation_count,
    std::mt19937_64& gen) {
  std::map<std::string, std::vector<std::size_t>> by_language;
  for (std::size_t i = 0; i < primary.size(); ++i) {
    by_language[primary[i].language].push_back(i);
  }

  const double total = static_cast<double>(primary.size());
  std::vector<std::pair<std::string, double>> remainders;
  std::map<std::string, std::size_t> quota;
  std::size_t assigned = 0;
  for (const auto& [lang, idx] : by_language) {
    const double share =
        static_cast<double>(validation_count) * static_cast<double>(idx.size()) / total;
    const std::size_t base = std::min(static_cast<std::size_t>(share), idx.size());
    quota[lang] = base;
    assigned += base;
    remainders.emplace_back(lang, share - static_cast<double>(base));
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  for (std::size_t i = 0; assigned < validation_count; i = (i + 1) % remainders.size()) {
    const auto& lang = remainders[i].first;
    if (quota[lang] < by_language[lang].size()) {
      ++quota[lang];
      ++assigned;
    }
  }

  std::vector<std::size_t> chosen;
  for (const auto& [lang, idx] : by_language) {
    auto picks = sample_indices(idx.size(), quota[lang], gen);
    for (auto p : picks) chosen.push_back(idx[p]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

DatasetSplit make_splits(const std::vector<LabeledExample>& primary,
                         const std::vector<LabeledExample>& auxiliary,
                         std::size_t validation_count, std::uint64_t seed,
                         bool stratify_by_language) {
  if (validation_count >= primary.size()) {
    throw ValidationError(
        "make_splits: validation_count " + std::to_string(validation_count) +
        " must be smaller than primary corpus size " +
        std::to_string(primary.size()));
  }
  require_all_scored(primary, "primary");
  require_all_scored(auxiliary, "auxiliary");

  std::mt19937_64 gen(seed);
  std::vector<std::size_t> validation_idx =
      stratify_by_language ? stratified_sample(primary, validation_count, gen)
                           : sample_indices(primary.size(), validation_count, gen);

  std::vector<bool> in_validation(primary.size(), false);
  for (auto i : validation_idx) in_validation[i] = true;

  DatasetSplit split;
  split.seed = seed;
  split.stratified = stratify_by_language;
  for (std::size_t i = 0; i < primary.size(); ++i) {
    if (in_validation[i]) {
      split.validation.push_back(primary[i]);
      split.validation_provenance.add(primary[i].source);
    } else {
      split.train.push_back(primary[i]);
      split.train_provenance.add(primary[i].source);
    }
  }
  for (const auto& ex : auxiliary) {
    split.train.push_back(ex);
    split.train_provenance.add(ex.source);
  }
  return split;
}

std::vector<LabeledExample> filter_scored(
    const std::vector<LabeledExample>& examples) {
  std::vector<LabeledExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.score) out.push_back(ex);
  }
  return out;
}

void write_split(const std::filesystem::path& dir, const DatasetSplit& split,
                 const ColumnNames& columns, CsvOptions csv) {
  std::filesystem::create_directories(dir);
  write_corpus(dir / "train.csv", split.train, columns, csv);
  write_corpus(dir / "validation.csv", split.validation, columns, csv);
  write_corpus(dir / "test.csv", split.test, columns, csv);

  auto provenance = [](const SourceCounts& c) {
    nlohmann::ordered_json j;
    if (c.primary) j["primary"] = c.primary;
    if (c.auxiliary) j["auxiliary"] = c.auxiliary;
    if (c.test) j["test"] = c.test;
    return j;
  };

  nlohmann::ordered_json manifest;
  manifest["seed"] = split.seed;
  manifest["stratified"] = split.stratified;
  manifest["counts"] = {{"train", split.train.size()},
                        {"validation", split.validation.size()},
                        {"test", split.test.size()}};
  manifest["provenance"] = {{"train", provenance(split.train_provenance)},
                            {"validation", provenance(split.validation_provenance)},
                            {"test", provenance(split.test_provenance)}};
  manifest["files"] = {{"train", "train.csv"},
                       {"validation", "validation.csv"},
                       {"test", "test.csv"}};

  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

}  // namespace intimacy
