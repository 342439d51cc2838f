#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace intimacy {

struct CsvOptions {
  char delimiter = ',';
};

using CsvRow = std::vector<std::string>;

// RFC-4180 style reader: quoted fields, "" escapes, CRLF line ends and
// newlines inside quoted fields. Delimiter is configurable (comma or tab).
class CsvReader {
 public:
  CsvReader(std::istream& in, CsvOptions options = {});

  // Next record, or nullopt at end of input. Throws ParseError on an
  // unterminated quoted field.
  std::optional<CsvRow> next();

  // 1-based number of the record last returned by next(); header is 1.
  std::size_t record_number() const { return record_number_; }

 private:
  std::istream& in_;
  CsvOptions options_;
  std::size_t record_number_ = 0;
};

std::string csv_escape(const std::string& field, char delimiter);
void write_csv_row(std::ostream& out, const CsvRow& row, char delimiter);

std::vector<CsvRow> read_csv_file(const std::filesystem::path& path,
                                  CsvOptions options = {});

}  // namespace intimacy
