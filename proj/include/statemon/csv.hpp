#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace statemon {

/// RFC 4180 record reader over an in-memory buffer. Handles quoted fields
/// (including embedded separators, doubled quotes and newlines), CRLF line
/// ends and a leading UTF-8 BOM. Blank lines are skipped.
class CsvReader {
 public:
  explicit CsvReader(std::string_view data);

  /// Reads the next record into `fields`; returns false at end of input.
  bool next(std::vector<std::string>& fields);

  /// 1-based line number where the last record started.
  std::size_t line() const { return record_line_; }

  /// Whether the last field read was quoted, per field index of the last record.
  bool was_quoted(std::size_t field) const {
    return field < quoted_.size() && quoted_[field];
  }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  std::vector<bool> quoted_;
};

/// Quotes a field when it contains a separator, quote or line break.
std::string csv_escape(std::string_view field);

std::string_view trim(std::string_view s);

}  // namespace statemon
