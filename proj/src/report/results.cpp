#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>

#include "statemon/csv.hpp"
#include "statemon/report.hpp"

namespace statemon {

namespace {

constexpr std::string_view kStatePrefix = "state:";

std::string rules_series_name(const std::string& space) { return space + ":rules"; }

std::string format_percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", p);
  return buf;
}

std::vector<CategoryCount> tally(const std::map<std::string, std::size_t>& counts,
                                 std::size_t total) {
  std::vector<CategoryCount> out;
  for (const auto& [name, n] : counts) {
    out.push_back({name, n, total == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(total)});
  }
  return out;
}

std::map<std::string, std::string> parse_preamble(std::string_view line) {
  if (line.substr(0, 2) != "# ") throw FormatError("results file: missing '#' preamble");
  line.remove_prefix(2);
  std::map<std::string, std::string> out;
  while (!line.empty()) {
    const std::size_t comma = line.find(',');
    const std::string_view item = line.substr(0, comma);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw FormatError("results file: malformed preamble");
    out.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

const std::string& require(const std::map<std::string, std::string>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw FormatError("results file: preamble lacks '" + key + "'");
  return it->second;
}

TriState parse_cell(const std::string& text, std::size_t line) {
  const auto t = parse_tristate(text);
  if (!t) throw FormatError("results line " + std::to_string(line) + ": bad value '" + text + "'");
  return *t;
}

}  // namespace

std::string export_results_csv(const StateSpaceResult& result) {
  const bool with_markers = !result.observed_markers.empty();
  std::string out = "# statespace=" + result.statespace + ",mode=" +
                    std::string(to_string(result.mode)) +
                    ",step=" + std::to_string(result.grid.step_seconds) +
                    ",start=" + format_timestamp(result.grid.start) +
                    ",end=" + format_timestamp(result.grid.end) +
                    ",markers=" + (with_markers ? "yes" : "no") + "\n";
  out += "timestamp";
  for (const auto& s : result.per_state) out += "," + std::string(kStatePrefix) + s.state_id;
  out += ",space_rules,verdict,active,observed_marker\n";

  for (std::size_t i = 0; i < result.cell_count(); ++i) {
    out += format_timestamp(result.grid.at(i));
    for (const auto& s : result.per_state) {
      out += ',';
      out += to_string(s.series.cells[i]);
    }
    out += ',';
    out += to_string(result.space_rules_series.cells[i]);
    out += ',';
    out += to_string(result.verdict.cells[i]);
    out += ',';
    const ActiveSet& a = result.active[i];
    if (a.no_data) {
      out += "no-data";
    } else {
      for (std::size_t k = 0; k < a.states.size(); ++k) {
        if (k) out += '|';
        out += result.per_state[a.states[k]].state_id;
      }
    }
    out += ',';
    if (with_markers && result.observed_markers[i]) out += csv_escape(*result.observed_markers[i]);
    out += '\n';
  }
  return out;
}

StateSpaceResult read_results_csv(std::string_view bytes) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos) throw FormatError("results file: truncated");
  std::string_view first = bytes.substr(0, eol);
  if (!first.empty() && first.back() == '\r') first.remove_suffix(1);
  const auto meta = parse_preamble(first);

  StateSpaceResult r;
  r.statespace = require(meta, "statespace");
  const auto mode = parse_space_mode(require(meta, "mode"));
  if (!mode) throw FormatError("results file: unknown mode");
  r.mode = *mode;
  const std::string& step_text = require(meta, "step");
  std::int64_t step = 0;
  if (std::from_chars(step_text.data(), step_text.data() + step_text.size(), step).ec != std::errc{}) {
    throw FormatError("results file: bad step");
  }
  const auto start = parse_timestamp(require(meta, "start"));
  const auto end = parse_timestamp(require(meta, "end"));
  if (!start || !end) throw FormatError("results file: bad grid bounds");
  try {
    r.grid = Grid::make(*start, *end, step);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("results file: ") + e.what());
  }
  const std::string& markers_flag = require(meta, "markers");
  if (markers_flag != "yes" && markers_flag != "no") throw FormatError("results file: bad markers flag");
  const bool with_markers = markers_flag == "yes";

  CsvReader reader(bytes.substr(eol + 1));
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields.size() < 5 || fields.front() != "timestamp" ||
      fields[fields.size() - 4] != "space_rules" || fields[fields.size() - 3] != "verdict" ||
      fields[fields.size() - 2] != "active" || fields.back() != "observed_marker") {
    throw FormatError("results file: unexpected header");
  }
  const std::size_t k = fields.size() - 5;
  const std::size_t n = r.grid.cell_count();
  std::map<std::string, std::size_t> state_index;
  for (std::size_t s = 0; s < k; ++s) {
    const std::string& col = fields[1 + s];
    if (col.substr(0, kStatePrefix.size()) != kStatePrefix || col.size() == kStatePrefix.size()) {
      throw FormatError("results file: bad state column '" + col + "'");
    }
    const std::string id = col.substr(kStatePrefix.size());
    if (!state_index.emplace(id, s).second) throw FormatError("results file: duplicate state '" + id + "'");
    r.per_state.push_back({id, TriStateSeries{id, r.grid, std::vector<TriState>(n)}});
  }
  r.space_rules_series = {rules_series_name(r.statespace), r.grid, std::vector<TriState>(n)};
  r.verdict = {r.statespace, r.grid, std::vector<TriState>(n)};
  r.active.resize(n);
  if (with_markers) r.observed_markers.resize(n);

  std::size_t i = 0;
  while (reader.next(fields)) {
    const std::size_t line = reader.line() + 1;
    const std::string where = "results line " + std::to_string(line);
    if (i >= n) throw FormatError(where + ": more rows than grid cells");
    if (fields.size() != k + 5) throw FormatError(where + ": wrong field count");
    const auto at = parse_timestamp(fields[0]);
    if (!at || *at != r.grid.at(i)) throw FormatError(where + ": timestamp off the grid");
    for (std::size_t s = 0; s < k; ++s) r.per_state[s].series.cells[i] = parse_cell(fields[1 + s], line);
    r.space_rules_series.cells[i] = parse_cell(fields[k + 1], line);
    r.verdict.cells[i] = parse_cell(fields[k + 2], line);

    const std::string& active = fields[k + 3];
    if (active == "no-data") {
      r.active[i].no_data = true;
    } else if (!active.empty()) {
      std::string_view rest = active;
      while (true) {
        const std::size_t bar = rest.find('|');
        const auto it = state_index.find(std::string(rest.substr(0, bar)));
        if (it == state_index.end()) throw FormatError(where + ": unknown state in active set");
        r.active[i].states.push_back(it->second);
        if (bar == std::string_view::npos) break;
        rest.remove_prefix(bar + 1);
      }
    }
    const std::string& marker = fields[k + 4];
    if (!marker.empty()) {
      if (!with_markers) throw FormatError(where + ": marker present but preamble says markers=no");
      r.observed_markers[i] = marker;
    }
    ++i;
  }
  if (i != n) {
    throw FormatError("results file: " + std::to_string(i) + " rows for " + std::to_string(n) +
                      " grid cells");
  }
  return r;
}

Summary summarize(const StateSpaceResult& result, const PreprocessCounters& counters,
                  const Reconciliation* reconciliation, std::size_t dst_shifted_cells) {
  Summary s;
  s.statespace = result.statespace;
  s.mode = result.mode;
  s.total_cells = result.cell_count();
  s.preprocessing = counters;
  s.dst_shifted_cells = dst_shifted_cells;
  if (reconciliation) {
    s.mismatches = reconciliation->mismatches.size();
    s.examined_cells = reconciliation->examined;
  }

  std::map<std::string, std::size_t> verdicts;
  for (const TriState t : {TriState::Satisfied, TriState::Violated, TriState::NoData}) {
    verdicts[std::string(to_string(t))] = 0;
  }
  std::map<std::string, std::size_t> labels;
  for (std::size_t i = 0; i < s.total_cells; ++i) {
    ++verdicts[std::string(to_string(result.verdict.cells[i]))];
    ++labels[state_label(result, i)];
  }
  s.verdict = tally(verdicts, s.total_cells);
  s.labels = tally(labels, s.total_cells);
  return s;
}

std::string render_summary_text(const Summary& s) {
  std::string out = "statespace: " + s.statespace + " (" + std::string(to_string(s.mode)) + ")\n";
  out += "cells: " + std::to_string(s.total_cells) + "\n";
  auto section = [&out](const char* title, const std::vector<CategoryCount>& rows) {
    out += title;
    out += ":\n";
    for (const auto& c : rows) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "  %-24s %10zu %7s%%\n", c.category.c_str(), c.cells,
                    format_percent(c.percent).c_str());
      out += buf;
    }
  };
  section("verdict", s.verdict);
  section("carpet labels", s.labels);
  out += "marker mismatches: " + std::to_string(s.mismatches) + " (examined " +
         std::to_string(s.examined_cells) + " cells)\n";
  const auto& p = s.preprocessing;
  out += "preprocessing: rejected rows " + std::to_string(p.rejected_rows) + ", dropped samples " +
         std::to_string(p.dropped_samples) + ", outliers " + std::to_string(p.outliers) +
         ", interpolated " + std::to_string(p.interpolated) + ", missing cells " +
         std::to_string(p.missing_cells) + "\n";
  out += "dst-shifted cells: " + std::to_string(s.dst_shifted_cells) + "\n";
  return out;
}

std::string render_summary_csv(const Summary& s) {
  std::string out = "key,value\n";
  auto kv = [&out](const std::string& k, const std::string& v) {
    out += csv_escape(k) + "," + csv_escape(v) + "\n";
  };
  kv("statespace", s.statespace);
  kv("mode", std::string(to_string(s.mode)));
  kv("cells", std::to_string(s.total_cells));
  for (const auto& c : s.verdict) {
    kv("verdict." + c.category, std::to_string(c.cells));
    kv("verdict." + c.category + ".percent", format_percent(c.percent));
  }
  for (const auto& c : s.labels) {
    kv("label." + c.category, std::to_string(c.cells));
    kv("label." + c.category + ".percent", format_percent(c.percent));
  }
  kv("mismatches", std::to_string(s.mismatches));
  kv("examined_cells", std::to_string(s.examined_cells));
  kv("rejected_rows", std::to_string(s.preprocessing.rejected_rows));
  kv("dropped_samples", std::to_string(s.preprocessing.dropped_samples));
  kv("outliers", std::to_string(s.preprocessing.outliers));
  kv("interpolated", std::to_string(s.preprocessing.interpolated));
  kv("missing_cells", std::to_string(s.preprocessing.missing_cells));
  kv("dst_shifted_cells", std::to_string(s.dst_shifted_cells));
  return out;
}

}  // namespace statemon
