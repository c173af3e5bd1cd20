#include <algorithm>
#include <cctype>
#include <charconv>

#include "statemon/csv.hpp"
#include "statemon/timeseries.hpp"

namespace statemon {

namespace {

std::optional<double> parse_decimal(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

bool header_matches(const std::vector<std::string>& fields,
                    std::initializer_list<std::string_view> expected) {
  if (fields.size() != expected.size()) return false;
  auto it = expected.begin();
  for (const auto& f : fields) {
    std::string lowered(trim(f));
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered != *it++) return false;
  }
  return true;
}

}  // namespace

Grid Grid::make(Timestamp start, Timestamp end, std::int64_t step_seconds) {
  if (step_seconds < 1) throw std::invalid_argument("grid step must be at least 1 s");
  if (end < start) throw std::invalid_argument("grid end precedes start");
  if ((end - start).count() % step_seconds != 0) {
    throw std::invalid_argument("grid span is not a whole number of steps");
  }
  return Grid{start, end, step_seconds};
}

Grid Grid::days(Timestamp start, int days, std::int64_t step_seconds) {
  return make(start, start + std::chrono::seconds{std::int64_t{86400} * days}, step_seconds);
}

std::size_t TimeSeries::missing_count() const {
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), is_missing));
}

SensorCsv parse_sensor_csv(std::string_view bytes) {
  CsvReader reader(bytes);
  std::vector<std::string> fields;
  if (!reader.next(fields) || !header_matches(fields, {"sensor_id", "timestamp", "value"})) {
    throw FormatError("unreadable header: expected 'sensor_id,timestamp,value'");
  }
  SensorCsv out;
  while (reader.next(fields)) {
    if (fields.size() != 3) {
      ++out.rejected_rows;
      continue;
    }
    const std::string_view sensor = trim(fields[0]);
    const auto at = parse_timestamp(fields[1]);
    const auto value = parse_decimal(fields[2]);
    if (sensor.empty() || !at || !value || !std::isfinite(*value)) {
      ++out.rejected_rows;
      continue;
    }
    out.samples.push_back({std::string(sensor), *at, *value});
  }
  if (out.samples.empty()) throw FormatError("zero valid rows");
  return out;
}

std::map<std::string, std::vector<RawSample>> group_by_sensor(std::span<const RawSample> samples) {
  std::map<std::string, std::vector<RawSample>> out;
  for (const auto& s : samples) out[s.sensor].push_back(s);
  return out;
}

MarkerCsv parse_marker_csv(std::string_view bytes, const Grid& grid) {
  CsvReader reader(bytes);
  std::vector<std::string> fields;
  if (!reader.next(fields) || !header_matches(fields, {"timestamp", "statespace", "marker"})) {
    throw FormatError("unknown marker column layout: expected 'timestamp,statespace,marker'");
  }
  struct Event {
    Timestamp at;
    std::size_t order;
    std::string marker;
  };
  std::map<std::string, std::vector<Event>> events;
  MarkerCsv out;
  std::size_t order = 0;
  while (reader.next(fields)) {
    if (fields.size() != 3) {
      ++out.rejected_rows;
      continue;
    }
    const auto at = parse_timestamp(fields[0]);
    const std::string_view space = trim(fields[1]);
    if (!at || space.empty() || fields[2].empty()) {
      ++out.rejected_rows;
      continue;
    }
    events[std::string(space)].push_back({*at, order++, fields[2]});
  }

  const std::size_t n = grid.cell_count();
  for (auto& [space, list] : events) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Event& a, const Event& b) { return a.at < b.at; });
    MarkerSeries series{space, grid, std::vector<std::optional<std::string>>(n)};
    std::size_t next = 0;
    const std::string* current = nullptr;
    for (std::size_t cell = 0; cell < n; ++cell) {
      const Timestamp t = grid.at(cell);
      while (next < list.size() && list[next].at <= t) current = &list[next++].marker;
      if (current) series.cells[cell] = *current;
    }
    out.by_statespace.emplace(space, std::move(series));
  }
  return out;
}

std::map<std::string, PlausibilityBounds> parse_bounds_csv(std::string_view bytes) {
  CsvReader reader(bytes);
  std::vector<std::string> fields;
  if (!reader.next(fields) || !header_matches(fields, {"sensor_id", "min", "max", "max_step"})) {
    throw FormatError("unreadable header: expected 'sensor_id,min,max,max_step'");
  }
  std::map<std::string, PlausibilityBounds> out;
  while (reader.next(fields)) {
    const std::string where = "bounds line " + std::to_string(reader.line());
    if (fields.size() != 4 || trim(fields[0]).empty()) {
      throw FormatError(where + ": expected 4 fields with a sensor id");
    }
    PlausibilityBounds b;
    b.sensor = std::string(trim(fields[0]));
    std::optional<double>* slots[] = {&b.min, &b.max, &b.max_step};
    for (int i = 0; i < 3; ++i) {
      if (trim(fields[i + 1]).empty()) continue;
      const auto v = parse_decimal(fields[i + 1]);
      if (!v || !std::isfinite(*v)) throw FormatError(where + ": invalid number");
      *slots[i] = *v;
    }
    if (b.min && b.max && *b.min > *b.max) throw FormatError(where + ": min exceeds max");
    if (b.max_step && *b.max_step < 0) throw FormatError(where + ": negative max_step");
    out[b.sensor] = b;
  }
  return out;
}

}  // namespace statemon
