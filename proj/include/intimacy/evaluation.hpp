#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "intimacy/dataset.hpp"
#include "intimacy/ensemble.hpp"
#include "intimacy/stats.hpp"

namespace intimacy {

// r is nullopt when the statistic is undefined for the group (fewer than two
// rows or zero variance). Undefined groups still contribute their rows to the
// pooled aggregates.
struct GroupScore {
  std::optional<double> r;
  std::size_t n = 0;
};

struct EvaluationReport {
  // Canonical language order: the task's ten languages first, then others.
  std::vector<std::pair<std::string, GroupScore>> per_language;
  GroupScore seen;
  GroupScore unseen;
  GroupScore overall;
  Mode mode = Mode::multilingual;
  std::string config_fingerprint;
  // Aggregates are Pearson over the concatenated rows of a language group,
  // not the mean of per-language coefficients.
  std::string aggregate_semantics = "pooled";
};

// Scores predictions against gold. Rows are matched positionally and checked
// by example id; unannotated gold rows are dropped before any computation.
EvaluationReport evaluate(const std::vector<PredictionRecord>& predictions,
                          const std::vector<LabeledExample>& gold,
                          const std::set<std::string>& seen_languages);

enum class ReportFormat { table, json, csv };
ReportFormat parse_report_format(const std::string& s);

// Deterministic serialization. The table mirrors the language rows plus
// Overall/Seen/Unseen aggregate rows; csv column order is language, r, n.
std::string render_report(const EvaluationReport& report, ReportFormat format);

EvaluationReport report_from_json(const std::string& text);
EvaluationReport load_report(const std::filesystem::path& path);

void write_kde_csv(const std::filesystem::path& path,
                   const std::vector<std::pair<double, double>>& curve);
// Lightweight vector plot of a KDE curve; optional output, no plotting
// dependency.
void write_kde_svg(const std::filesystem::path& path,
                   const std::vector<std::pair<double, double>>& curve);

}  // namespace intimacy
