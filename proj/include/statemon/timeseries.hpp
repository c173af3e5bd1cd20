#pragma once

// Sensor and marker ingestion onto an equidistant evaluation grid.
//
// Pipeline order per sensor: align_to_grid -> detect_outliers ->
// interpolate_gaps. Missing cells are NaN in TimeSeries::values; every present
// value is finite.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "statemon/time.hpp"

namespace statemon {

inline constexpr std::int64_t kDefaultStepSeconds = 900;
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

struct Grid {
  Timestamp start{};
  Timestamp end{};  // exclusive
  std::int64_t step_seconds = kDefaultStepSeconds;

  /// Throws std::invalid_argument unless step >= 1, start <= end and the span
  /// is a whole number of steps.
  static Grid make(Timestamp start, Timestamp end, std::int64_t step_seconds = kDefaultStepSeconds);
  /// `days` whole days of cells starting at `start`.
  static Grid days(Timestamp start, int days, std::int64_t step_seconds = kDefaultStepSeconds);

  std::size_t cell_count() const {
    return static_cast<std::size_t>((end - start).count() / step_seconds);
  }
  Timestamp at(std::size_t cell) const {
    return start + std::chrono::seconds{static_cast<std::int64_t>(cell) * step_seconds};
  }

  bool operator==(const Grid&) const = default;
};

struct RawSample {
  std::string sensor;
  Timestamp at{};
  double value = 0.0;
};

struct TimeSeries {
  std::string sensor;
  Grid grid;
  std::vector<double> values;  // NaN = missing; size == grid.cell_count()

  std::optional<double> at(std::size_t cell) const {
    return is_missing(values[cell]) ? std::nullopt : std::optional<double>(values[cell]);
  }
  std::size_t missing_count() const;
};

struct MarkerSeries {
  std::string statespace;
  Grid grid;
  std::vector<std::optional<std::string>> cells;
};

struct PlausibilityBounds {
  std::string sensor;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> max_step;
};

/// Malformed input that cannot be recovered row by row.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SensorCsv {
  std::vector<RawSample> samples;
  std::size_t rejected_rows = 0;
};

/// Header `sensor_id,timestamp,value`. Malformed rows (bad timestamp,
/// non-finite value, wrong field count) are counted and skipped; throws
/// FormatError on a bad header or when no row is valid.
SensorCsv parse_sensor_csv(std::string_view bytes);

/// Groups samples by sensor id, keeping input order within each group.
std::map<std::string, std::vector<RawSample>> group_by_sensor(std::span<const RawSample> samples);

/// Nearest-cell assignment within step/2 (ties to the earlier cell); when
/// several samples compete for a cell the closest wins (ties: earlier
/// timestamp, then smaller value). Samples with no cell in reach are dropped
/// and counted in `unassigned`. Throws std::invalid_argument if a sample
/// belongs to a different sensor.
TimeSeries align_to_grid(std::string_view sensor, std::span<const RawSample> samples,
                         const Grid& grid, std::size_t* unassigned = nullptr);

struct OutlierCounts {
  std::size_t out_of_range = 0;
  std::size_t step_jumps = 0;
  std::size_t total() const { return out_of_range + step_jumps; }
};

struct OutlierResult {
  TimeSeries series;
  OutlierCounts counts;
};

/// Range check, then a rate-of-change scan that compares each present value
/// with the previous value that survived.
OutlierResult detect_outliers(const TimeSeries& series, const PlausibilityBounds& bounds);

struct InterpolationResult {
  TimeSeries series;
  std::size_t filled = 0;
};

/// Linear fill of interior gaps of at most `max_gap_cells` cells.
InterpolationResult interpolate_gaps(const TimeSeries& series, std::size_t max_gap_cells = 1);

struct MarkerCsv {
  std::map<std::string, MarkerSeries> by_statespace;
  std::size_t rejected_rows = 0;
};

/// Header `timestamp,statespace,marker`. Each cell holds the latest marker at
/// or before the cell timestamp. Throws FormatError on an unknown layout.
MarkerCsv parse_marker_csv(std::string_view bytes, const Grid& grid);

/// Header `sensor_id,min,max,max_step`; empty fields are unset.
std::map<std::string, PlausibilityBounds> parse_bounds_csv(std::string_view bytes);

struct PreprocessCounters {
  std::size_t rejected_rows = 0;
  std::size_t dropped_samples = 0;  // outside the grid span
  std::size_t outliers = 0;
  std::size_t interpolated = 0;
  std::size_t missing_cells = 0;  // after interpolation

  PreprocessCounters& operator+=(const PreprocessCounters& other);
};

using Dataset = std::map<std::string, TimeSeries>;

struct PreprocessResult {
  Dataset dataset;
  PreprocessCounters counters;
};

/// Full per-sensor pipeline; sensors are processed in parallel.
PreprocessResult preprocess(const std::map<std::string, std::vector<RawSample>>& by_sensor,
                            const Grid& grid,
                            const std::map<std::string, PlausibilityBounds>& bounds,
                            std::size_t max_gap_cells = 1);

/// Serial version of preprocess(); kept as the reference for tests.
PreprocessResult preprocess_serial(const std::map<std::string, std::vector<RawSample>>& by_sensor,
                                   const Grid& grid,
                                   const std::map<std::string, PlausibilityBounds>& bounds,
                                   std::size_t max_gap_cells = 1);

}  // namespace statemon
