#pragma once

// Carpet plots, results CSV and summaries.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "statemon/statespace.hpp"

namespace statemon {

inline constexpr std::string_view kUnsatisfied = "UNSATISFIED";
inline constexpr std::string_view kNoData = "NO-DATA";
inline constexpr std::string_view kOverlap = "OVERLAP";

inline constexpr std::string_view kColorUnsatisfied = "#d62728";
inline constexpr std::string_view kColorNoData = "#9e9e9e";
inline constexpr std::string_view kColorSatisfied = "#2ca02c";
inline constexpr std::string_view kOverlapFill = "url(#overlap)";

enum class CarpetKind : std::uint8_t { States, Verdict };

std::optional<CarpetKind> parse_carpet_kind(std::string_view text);

/// Carpet label of one cell: the single active state id, OVERLAP,
/// UNSATISFIED or NO-DATA.
std::string state_label(const StateSpaceResult& result, std::size_t cell);

struct LegendEntry {
  std::string label;
  std::string color;  // "#rrggbb" or a pattern reference
};

struct CarpetGrid {
  std::string title;
  std::vector<std::string> columns;  // local dates, YYYY-MM-DD
  std::vector<std::string> rows;     // local time of day, HH:MM[:SS]
  std::vector<std::vector<std::optional<std::string>>> cells;  // [row][column]; nullopt = outside the grid
  std::vector<LegendEntry> legend;
  int utc_offset_seconds = 0;        // fixed offset used to place cells
  std::size_t dst_shifted_cells = 0;  // cells whose actual offset differs

  std::size_t filled_cells() const;
  const LegendEntry* legend_for(std::string_view label) const;
};

/// Columns are local dates in `zone`. Every cell is placed with the smallest
/// UTC offset seen over the grid, so each day keeps 86400/step rows; cells
/// whose own offset differs are counted in dst_shifted_cells. Throws
/// std::invalid_argument unless the step divides 24 h.
CarpetGrid build_carpet(const StateSpaceResult& result, CarpetKind kind,
                        const TimeZone& zone = TimeZone::utc());

/// Deterministic SVG 1.1. Cell rectangles carry class="cell", legend swatches
/// class="legend".
std::string render_svg(const CarpetGrid& grid);

/// `#` preamble, then `timestamp,state:<id>...,space_rules,verdict,active,observed_marker`.
/// The active column joins state ids with '|', is empty for no active state
/// and reads "no-data" when unknown.
std::string export_results_csv(const StateSpaceResult& result);

/// Inverse of export_results_csv. Throws FormatError on malformed input.
StateSpaceResult read_results_csv(std::string_view bytes);

struct CategoryCount {
  std::string category;
  std::size_t cells = 0;
  double percent = 0.0;
};

struct Summary {
  std::string statespace;
  SpaceMode mode = SpaceMode::Exclusive;
  std::size_t total_cells = 0;
  std::vector<CategoryCount> verdict;  // satisfied / violated / no-data
  std::vector<CategoryCount> labels;   // carpet labels, sorted by name
  std::size_t mismatches = 0;
  std::size_t examined_cells = 0;
  std::size_t dst_shifted_cells = 0;
  PreprocessCounters preprocessing;
};

Summary summarize(const StateSpaceResult& result, const PreprocessCounters& counters = {},
                  const Reconciliation* reconciliation = nullptr,
                  std::size_t dst_shifted_cells = 0);

std::string render_summary_text(const Summary& summary);
/// Two columns, `key,value`.
std::string render_summary_csv(const Summary& summary);

}  // namespace statemon
