#include "intimacy/csv.hpp"

#include <fstream>

#include "intimacy/util.hpp"

namespace intimacy {

CsvReader::CsvReader(std::istream& in, CsvOptions options)
    : in_(in), options_(options) {}

std::optional<CsvRow> CsvReader::next() {
  if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
  ++record_number_;

  CsvRow row;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  for (;;) {
    int ci = in_.get();
    if (ci == std::char_traits<char>::eof()) {
      if (quoted) {
        throw ParseError("row " + std::to_string(record_number_) +
                         ": unterminated quoted field");
      }
      row.push_back(std::move(field));
      return row;
    }
    char c = static_cast<char>(ci);

    if (quoted) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }

    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == options_.delimiter) {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      row.push_back(std::move(field));
      return row;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
}

std::string csv_escape(const std::string& field, char delimiter) {
  const bool needs_quotes =
      field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
      std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

void write_csv_row(std::ostream& out, const CsvRow& row, char delimiter) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.put(delimiter);
    out << csv_escape(row[i], delimiter);
  }
  out.put('\n');
}

std::vector<CsvRow> read_csv_file(const std::filesystem::path& path,
                                  CsvOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  CsvReader reader(in, options);
  std::vector<CsvRow> rows;
  while (auto row = reader.next()) rows.push_back(std::move(*row));
  return rows;
}

}  // namespace intimacy
