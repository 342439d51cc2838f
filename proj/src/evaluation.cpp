#include "intimacy/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "intimacy/languages.hpp"
#include "intimacy/util.hpp"

namespace intimacy {

namespace {

GroupScore score_group(const std::vector<double>& pred,
                       const std::vector<double>& gold) {
  GroupScore score;
  score.n = pred.size();
  score.r = pearson_r_or_undefined(pred, gold);
  return score;
}

}  // namespace

EvaluationReport evaluate(const std::vector<PredictionRecord>& predictions,
                          const std::vector<LabeledExample>& gold,
                          const std::set<std::string>& seen_languages) {
  if (predictions.size() != gold.size()) {
    throw ValidationError("evaluate: " + std::to_string(predictions.size()) +
                          " predictions vs " + std::to_string(gold.size()) +
                          " gold rows");
  }

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
      by_language;
  std::vector<double> pooled_pred, pooled_gold;
  std::vector<double> seen_pred, seen_gold, unseen_pred, unseen_gold;

  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& record = predictions[i];
    const auto& example = gold[i];
    if (record.example_id != example.id) {
      throw ValidationError("evaluate: row " + std::to_string(i) +
                            ": prediction for '" + record.example_id +
                            "' does not match gold example '" + example.id + "'");
    }
    if (!example.score) continue;  // unannotated, excluded from scoring

    auto& [pred, gld] = by_language[example.language];
    pred.push_back(record.combined);
    gld.push_back(*example.score);
    pooled_pred.push_back(record.combined);
    pooled_gold.push_back(*example.score);
    if (seen_languages.count(example.language)) {
      seen_pred.push_back(record.combined);
      seen_gold.push_back(*example.score);
    } else {
      unseen_pred.push_back(record.combined);
      unseen_gold.push_back(*example.score);
    }
  }

  EvaluationReport report;
  std::set<std::string> present;
  for (const auto& [language, _] : by_language) present.insert(language);
  for (const auto& language : report_language_order(present)) {
    const auto& [pred, gld] = by_language[language];
    report.per_language.emplace_back(language, score_group(pred, gld));
  }
  report.seen = score_group(seen_pred, seen_gold);
  report.unseen = score_group(unseen_pred, unseen_gold);
  report.overall = score_group(pooled_pred, pooled_gold);
  if (!predictions.empty()) report.mode = predictions.front().mode;
  return report;
}

ReportFormat parse_report_format(const std::string& s) {
  if (s == "table") return ReportFormat::table;
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw ParseError("unknown report format: '" + s +
                   "' (expected table, json or csv)");
}

namespace {

std::string r_cell(const GroupScore& score, bool fixed) {
  if (!score.r) return "undefined";
  if (!fixed) return format_double(*score.r);
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << *score.r;
  return out.str();
}

std::string render_table(const EvaluationReport& report) {
  std::size_t width = 10;  // fits "Language" and the aggregate labels
  for (const auto& [language, _] : report.per_language) {
    width = std::max(width, language.size());
  }
  std::ostringstream out;
  out << "# mode: " << to_string(report.mode) << '\n';
  if (!report.config_fingerprint.empty()) {
    out << "# config: " << report.config_fingerprint << '\n';
  }
  out << "# aggregates: " << report.aggregate_semantics
      << " Pearson r over concatenated group rows\n";
  auto row = [&](const std::string& label, const std::string& r,
                 const std::string& n) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << label
        << std::setw(11) << r << n << '\n';
  };
  row("Language", "r", "n");
  for (const auto& [language, score] : report.per_language) {
    row(language, r_cell(score, true), std::to_string(score.n));
  }
  row("Overall", r_cell(report.overall, true), std::to_string(report.overall.n));
  row("Seen", r_cell(report.seen, true), std::to_string(report.seen.n));
  row("Unseen", r_cell(report.unseen, true), std::to_string(report.unseen.n));
  return out.str();
}

nlohmann::ordered_json group_to_json(const GroupScore& score) {
  nlohmann::ordered_json j;
  j["r"] = score.r ? nlohmann::ordered_json(*score.r)
                   : nlohmann::ordered_json(nullptr);
  j["n"] = score.n;
  return j;
}

GroupScore group_from_json(const nlohmann::json& j) {
  GroupScore score;
  if (!j.at("r").is_null()) score.r = j["r"].get<double>();
  score.n = j.at("n").get<std::size_t>();
  return score;
}

std::string render_json(const EvaluationReport& report) {
  nlohmann::ordered_json doc;
  doc["mode"] = to_string(report.mode);
  doc["config_fingerprint"] = report.config_fingerprint;
  doc["aggregate_semantics"] = report.aggregate_semantics;
  doc["per_language"] = nlohmann::ordered_json::array();
  for (const auto& [language, score] : report.per_language) {
    nlohmann::ordered_json j;
    j["language"] = language;
    j["r"] = score.r ? nlohmann::ordered_json(*score.r)
                     : nlohmann::ordered_json(nullptr);
    j["n"] = score.n;
    doc["per_language"].push_back(std::move(j));
  }
  doc["seen"] = group_to_json(report.seen);
  doc["unseen"] = group_to_json(report.unseen);
  doc["overall"] = group_to_json(report.overall);
  return doc.dump(2) + "\n";
}

std::string render_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "language,r,n\n";
  auto row = [&](const std::string& label, const GroupScore& score) {
    out << label << ',' << r_cell(score, false) << ',' << score.n << '\n';
  };
  for (const auto& [language, score] : report.per_language) row(language, score);
  row("Overall", report.overall);
  row("Seen", report.seen);
  row("Unseen", report.unseen);
  return out.str();
}

}  // namespace

std::string render_report(const EvaluationReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::table: return render_table(report);
    case ReportFormat::json: return render_json(report);
    case ReportFormat::csv: return render_csv(report);
  }
  throw Error("unreachable report format");
}

EvaluationReport report_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report json: ") + e.what());
  }
  EvaluationReport report;
  try {
    report.mode = parse_mode(doc.at("mode").get<std::string>());
    report.config_fingerprint = doc.value("config_fingerprint", std::string{});
    report.aggregate_semantics = doc.value("aggregate_semantics", std::string{"pooled"});
    for (const auto& item : doc.at("per_language")) {
      report.per_language.emplace_back(item.at("language").get<std::string>(),
                                       group_from_json(item));
    }
    report.seen = group_from_json(doc.at("seen"));
    report.unseen = group_from_json(doc.at("unseen"));
    report.overall = group_from_json(doc.at("overall"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report json: ") + e.what());
  }
  return report;
}

EvaluationReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

void write_kde_csv(const std::filesystem::path& path,
                   const std::vector<std::pair<double, double>>& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write kde file: " + path.string());
  out << "x,density\n";
  for (const auto& [x, density] : curve) {
    out << format_double(x) << ',' << format_double(density) << '\n';
  }
}

void write_kde_svg(const std::filesystem::path& path,
                   const std::vector<std::pair<double, double>>& curve) {
  if (curve.size() < 2) throw ValidationError("kde svg: need at least 2 points");
  const double width = 640.0, height = 360.0, margin = 40.0;
  const double x_lo = curve.front().first, x_hi = curve.back().first;
  double d_hi = 0.0;
  for (const auto& [_, d] : curve) d_hi = std::max(d_hi, d);
  if (d_hi == 0.0) d_hi = 1.0;

  auto sx = [&](double x) {
    return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
  };
  auto sy = [&](double d) {
    return height - margin - d / d_hi * (height - 2 * margin);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write kde plot: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, d] : curve) {
    out << format_double(sx(x)) << ',' << format_double(sy(d)) << ' ';
  }
  out << "\"/>\n</svg>\n";
}

}  // namespace intimacy
