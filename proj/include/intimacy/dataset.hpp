#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "intimacy/csv.hpp"

namespace intimacy {

enum class Source { primary, auxiliary, test };
std::string to_string(Source source);
Source parse_source(const std::string& s);

// Inclusive label interval accepted by a corpus file.
struct ScoreRange {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

inline constexpr ScoreRange kIntimacyRange{1.0, 5.0};
inline constexpr ScoreRange kAuxiliaryRawRange{-1.0, 1.0};

// Label value marking unannotated rows. 0 lies outside the valid intimacy
// range, so scored and unannotated rows cannot collide.
inline constexpr double kUnannotatedSentinel = 0.0;

struct LabeledExample {
  // Row identity, "<source>:<row-index>", assigned at load time. Not part
  // of field equality; file round-trips preserve the spec fields below.
  std::string id;
  std::string text;                // raw tweet text, not normalized
  std::string language;            // lowercase code
  std::optional<double> score;     // absent for unannotated rows
  Source source = Source::primary;
};

bool fields_equal(const LabeledExample& a, const LabeledExample& b);

struct ColumnNames {
  std::string text = "text";
  std::string language = "language";
  std::string label = "label";
};

struct SourceCounts {
  std::size_t primary = 0;
  std::size_t auxiliary = 0;
  std::size_t test = 0;

  std::size_t total() const { return primary + auxiliary + test; }
  void add(Source s);
};

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;
  std::vector<LabeledExample> test;
  std::uint64_t seed = 0;
  bool stratified = false;
  SourceCounts train_provenance;
  SourceCounts validation_provenance;
  SourceCounts test_provenance;
};

// Loads a delimiter-separated corpus with a header row naming the text,
// language and label columns. Rows whose label equals the unannotated
// sentinel (and the sentinel lies outside expected_range) load with an
// absent score; labels outside expected_range otherwise are rejected with
// their row number. Unknown language codes produce a warning on stderr but
// the row is kept.
std::vector<LabeledExample> load_corpus(const std::filesystem::path& path,
                                        Source source,
                                        ScoreRange expected_range,
                                        const ColumnNames& columns = {},
                                        CsvOptions csv = {});

// Auxiliary question corpus: raw labels in [-1, 1], remapped to [1, 5] at
// load time so downstream code sees a single scale.
std::vector<LabeledExample> load_auxiliary(const std::filesystem::path& path,
                                           const ColumnNames& columns = {},
                                           CsvOptions csv = {});

void write_corpus(const std::filesystem::path& path,
                  const std::vector<LabeledExample>& examples,
                  const ColumnNames& columns = {}, CsvOptions csv = {});

// Affine bijection [-1, 1] -> [1, 5]: s -> 2s + 3.
double remap_score(double s);
// Inverse of remap_score: s -> (s - 3) / 2.
double remap_score_inverse(double s);

// validation = validation_count examples sampled from primary without
// replacement; train = remaining primary plus all auxiliary examples.
// Every input example must carry a score. With stratify_by_language the
// validation quota is allocated proportionally per language (largest
// remainder), still driven by the same seed.
DatasetSplit make_splits(const std::vector<LabeledExample>& primary,
                         const std::vector<LabeledExample>& auxiliary,
                         std::size_t validation_count, std::uint64_t seed,
                         bool stratify_by_language = false);

std::vector<LabeledExample> filter_scored(
    const std::vector<LabeledExample>& examples);

// Serializes a split as train/validation/test corpus files plus
// manifest.json (seed, counts, per-source provenance).
void write_split(const std::filesystem::path& dir, const DatasetSplit& split,
                 const ColumnNames& columns = {}, CsvOptions csv = {});

}  // namespace intimacy
