#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "statemon/report.hpp"

namespace statemon {

namespace {

constexpr std::array<std::string_view, 8> kStatePalette = {
    "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#bcbd22"};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string format_date(std::int64_t days_since_epoch) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{days_since_epoch}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_time_of_day(std::int64_t sod, bool with_seconds) {
  const int s = static_cast<int>(sod);
  char buf[32];
  if (with_seconds) {
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", s / 3600, (s / 60) % 60, s % 60);
  } else {
    std::snprintf(buf, sizeof buf, "%02d:%02d", s / 3600, (s / 60) % 60);
  }
  return buf;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::optional<CarpetKind> parse_carpet_kind(std::string_view text) {
  if (text == "states") return CarpetKind::States;
  if (text == "verdict") return CarpetKind::Verdict;
  return std::nullopt;
}

std::string state_label(const StateSpaceResult& result, std::size_t cell) {
  const ActiveSet& a = result.active[cell];
  if (a.no_data) return std::string(kNoData);
  if (a.states.empty()) return std::string(kUnsatisfied);
  if (a.states.size() >= 2) return std::string(kOverlap);
  return result.per_state[a.states.front()].state_id;
}

std::size_t CarpetGrid::filled_cells() const {
  std::size_t n = 0;
  for (const auto& row : cells) {
    n += static_cast<std::size_t>(std::count_if(row.begin(), row.end(),
                                                [](const auto& c) { return c.has_value(); }));
  }
  return n;
}

const LegendEntry* CarpetGrid::legend_for(std::string_view label) const {
  for (const auto& e : legend) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

CarpetGrid build_carpet(const StateSpaceResult& result, CarpetKind kind, const TimeZone& zone) {
  const std::int64_t step = result.grid.step_seconds;
  if (step <= 0 || 86400 % step != 0) {
    throw std::invalid_argument("carpet plots need a grid step that divides 24 h");
  }
  const std::size_t n = result.cell_count();
  CarpetGrid g;
  g.title = result.statespace + (kind == CarpetKind::States ? " states" : " verdict");

  if (kind == CarpetKind::States) {
    for (std::size_t s = 0; s < result.per_state.size(); ++s) {
      g.legend.push_back({result.per_state[s].state_id,
                          std::string(kStatePalette[s % kStatePalette.size()])});
    }
    g.legend.push_back({std::string(kUnsatisfied), std::string(kColorUnsatisfied)});
    g.legend.push_back({std::string(kNoData), std::string(kColorNoData)});
    g.legend.push_back({std::string(kOverlap), std::string(kOverlapFill)});
  } else {
    g.legend.push_back({std::string(to_string(TriState::Satisfied)), std::string(kColorSatisfied)});
    g.legend.push_back({std::string(to_string(TriState::Violated)), std::string(kColorUnsatisfied)});
    g.legend.push_back({std::string(to_string(TriState::NoData)), std::string(kColorNoData)});
  }

  const std::size_t rows = static_cast<std::size_t>(86400 / step);
  for (std::size_t r = 0; r < rows; ++r) {
    g.rows.push_back(format_time_of_day(static_cast<std::int64_t>(r) * step, step % 60 != 0));
  }
  if (n == 0) {
    g.cells.assign(rows, {});
    return g;
  }

  std::vector<int> offsets(n);
  for (std::size_t i = 0; i < n; ++i) offsets[i] = zone.to_local(result.grid.at(i)).utc_offset_seconds;
  g.utc_offset_seconds = *std::min_element(offsets.begin(), offsets.end());

  auto local_seconds = [&](std::size_t i) {
    return result.grid.at(i).time_since_epoch().count() + g.utc_offset_seconds;
  };
  const std::int64_t first_day = floor_div(local_seconds(0), 86400);
  const std::int64_t last_day = floor_div(local_seconds(n - 1), 86400);
  for (std::int64_t d = first_day; d <= last_day; ++d) g.columns.push_back(format_date(d));
  g.cells.assign(rows, std::vector<std::optional<std::string>>(g.columns.size()));

  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t local = local_seconds(i);
    const auto col = static_cast<std::size_t>(floor_div(local, 86400) - first_day);
    const auto row = static_cast<std::size_t>((local - floor_div(local, 86400) * 86400) / step);
    g.cells[row][col] = kind == CarpetKind::States
                            ? state_label(result, i)
                            : std::string(to_string(result.verdict.cells[i]));
    if (offsets[i] != g.utc_offset_seconds) ++g.dst_shifted_cells;
  }
  return g;
}

std::string render_svg(const CarpetGrid& grid) {
  constexpr int kCellW = 12;
  constexpr int kCellH = 5;
  constexpr int kLeft = 64;
  constexpr int kTop = 96;
  constexpr int kLegendGap = 24;
  constexpr int kSwatch = 12;

  const int cols = static_cast<int>(grid.columns.size());
  const int rows = static_cast<int>(grid.rows.size());
  const int plot_w = cols * kCellW;
  const int plot_h = rows * kCellH;
  const int legend_x = kLeft + plot_w + kLegendGap;
  const int width = legend_x + 200;
  const int height = std::max(kTop + plot_h + 16,
                              kTop + static_cast<int>(grid.legend.size()) * (kSwatch + 6) + 16);

  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  auto num = [](int v) { return std::to_string(v); };

  line(R"(<?xml version="1.0" encoding="UTF-8"?>)");
  line(R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width=")" + num(width) +
       R"(" height=")" + num(height) + R"(" viewBox="0 0 )" + num(width) + " " + num(height) +
       R"(" font-family="sans-serif" font-size="10">)");
  line("<title>" + xml_escape(grid.title) + "</title>");
  line(R"(<defs><pattern id="overlap" width="4" height="4" patternUnits="userSpaceOnUse" )"
       R"svg(patternTransform="rotate(45)"><rect width="4" height="4" fill="#ffffff"/>)svg"
       R"(<line x1="0" y1="0" x2="0" y2="4" stroke="#000000" stroke-width="2"/></pattern></defs>)");
  line(R"(<text x=")" + num(kLeft) + R"(" y="16" font-size="14">)" + xml_escape(grid.title) +
       "</text>");

  // Date labels: every column up to a month, weekly beyond that.
  const int col_every = cols <= 31 ? 1 : 7;
  line(R"(<g class="columns">)");
  for (int c = 0; c < cols; c += col_every) {
    const int x = kLeft + c * kCellW + kCellW / 2;
    line(R"(<text x=")" + num(x) + R"(" y=")" + num(kTop - 4) + R"(" transform="rotate(-90 )" +
         num(x) + " " + num(kTop - 4) + ")\">" + xml_escape(grid.columns[static_cast<std::size_t>(c)]) +
         "</text>");
  }
  line("</g>");

  // Time-of-day labels every three hours when the step allows it.
  const std::int64_t step = rows > 0 ? 86400 / rows : 86400;
  line(R"(<g class="rows">)");
  for (int r = 0; r < rows; ++r) {
    const std::int64_t sod = static_cast<std::int64_t>(r) * step;
    if (step <= 10800 && sod % 10800 != 0) continue;
    line(R"(<text x=")" + num(kLeft - 4) + R"(" y=")" + num(kTop + r * kCellH + kCellH) +
         R"(" text-anchor="end">)" + xml_escape(grid.rows[static_cast<std::size_t>(r)]) + "</text>");
  }
  line("</g>");

  line(R"(<g class="cells">)");
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const auto& label = grid.cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (!label) continue;
      const LegendEntry* e = grid.legend_for(*label);
      const std::string fill = e ? e->color : std::string(kColorNoData);
      line(R"(<rect class="cell" x=")" + num(kLeft + c * kCellW) + R"(" y=")" +
           num(kTop + r * kCellH) + R"(" width=")" + num(kCellW) + R"(" height=")" + num(kCellH) +
           R"(" fill=")" + fill + R"("/>)");
    }
  }
  line("</g>");

  line(R"(<g class="legend">)");
  for (std::size_t i = 0; i < grid.legend.size(); ++i) {
    const int y = kTop + static_cast<int>(i) * (kSwatch + 6);
    line(R"(<rect class="legend" x=")" + num(legend_x) + R"(" y=")" + num(y) + R"(" width=")" +
         num(kSwatch) + R"(" height=")" + num(kSwatch) + R"(" fill=")" + grid.legend[i].color +
         R"(" stroke="#000000" stroke-width="0.5"/>)");
    line(R"(<text x=")" + num(legend_x + kSwatch + 6) + R"(" y=")" + num(y + kSwatch - 2) + R"(">)" +
         xml_escape(grid.legend[i].label) + "</text>");
  }
  line("</g>");
  line("</svg>");
  return out;
}

}  // namespace statemon
