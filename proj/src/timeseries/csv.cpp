#include "statemon/csv.hpp"

namespace statemon {

CsvReader::CsvReader(std::string_view data) : data_(data) {
  if (data_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
}

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  quoted_.clear();
  // skip blank lines
  while (pos_ < data_.size() && (data_[pos_] == '\n' || data_[pos_] == '\r')) {
    if (data_[pos_] == '\n') ++line_;
    ++pos_;
  }
  if (pos_ >= data_.size()) return false;
  record_line_ = line_;

  std::string field;
  bool quoted = false;
  for (;;) {
    if (pos_ >= data_.size()) {
      fields.push_back(std::move(field));
      quoted_.push_back(quoted);
      return true;
    }
    const char c = data_[pos_];
    if (c == '"' && field.empty() && !quoted) {
      quoted = true;
      ++pos_;
      // quoted section
      for (;;) {
        if (pos_ >= data_.size()) break;
        const char q = data_[pos_];
        if (q == '"') {
          if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        if (q == '\n') ++line_;
        field.push_back(q);
        ++pos_;
      }
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      quoted_.push_back(quoted);
      field.clear();
      quoted = false;
      ++pos_;
      continue;
    }
    if (c == '\r' || c == '\n') {
      if (c == '\r' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '\n') ++pos_;
      ++pos_;
      ++line_;
      fields.push_back(std::move(field));
      quoted_.push_back(quoted);
      return true;
    }
    field.push_back(c);
    ++pos_;
  }
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace statemon
