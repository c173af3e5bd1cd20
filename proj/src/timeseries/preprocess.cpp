#include <algorithm>
#include <cstdlib>
#include <exception>

#include "statemon/timeseries.hpp"

namespace statemon {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct SensorOutcome {
  TimeSeries series;
  PreprocessCounters counters;
};

SensorOutcome run_pipeline(const std::string& sensor, const std::vector<RawSample>& samples,
                           const Grid& grid,
                           const std::map<std::string, PlausibilityBounds>& bounds,
                           std::size_t max_gap_cells) {
  SensorOutcome out;
  TimeSeries aligned = align_to_grid(sensor, samples, grid, &out.counters.dropped_samples);

  if (const auto it = bounds.find(sensor); it != bounds.end()) {
    OutlierResult cleaned = detect_outliers(aligned, it->second);
    out.counters.outliers = cleaned.counts.total();
    aligned = std::move(cleaned.series);
  }
  InterpolationResult filled = interpolate_gaps(aligned, max_gap_cells);
  out.counters.interpolated = filled.filled;
  out.counters.missing_cells = filled.series.missing_count();
  out.series = std::move(filled.series);
  return out;
}

}  // namespace

TimeSeries align_to_grid(std::string_view sensor, std::span<const RawSample> samples,
                         const Grid& grid, std::size_t* unassigned) {
  const std::size_t n = grid.cell_count();
  const std::int64_t step = grid.step_seconds;
  TimeSeries out{std::string(sensor), grid, std::vector<double>(n, kMissing)};

  struct Best {
    std::int64_t twice_distance = -1;  // -1 = empty cell
    Timestamp at{};
  };
  std::vector<Best> best(n);

  for (const auto& s : samples) {
    if (s.sensor != sensor) {
      throw std::invalid_argument("align_to_grid: sample for sensor '" + s.sensor +
                                  "' in series '" + std::string(sensor) + "'");
    }
    if (n == 0 || s.at >= grid.end) {
      if (unassigned) ++*unassigned;
      continue;
    }
    const std::int64_t offset = (s.at - grid.start).count();
    const std::int64_t q = floor_div(offset, step);
    std::int64_t cell = -1;
    std::int64_t twice = 0;
    for (const std::int64_t k : {q, q + 1}) {
      if (k < 0 || k >= static_cast<std::int64_t>(n)) continue;
      const std::int64_t d = std::llabs(2 * (offset - k * step));
      if (d > step) continue;
      if (cell < 0 || d < twice) {
        cell = k;
        twice = d;
      }
    }
    if (cell < 0) {
      if (unassigned) ++*unassigned;
      continue;
    }

    Best& b = best[static_cast<std::size_t>(cell)];
    double& slot = out.values[static_cast<std::size_t>(cell)];
    const bool wins = b.twice_distance < 0 || twice < b.twice_distance ||
                      (twice == b.twice_distance &&
                       (s.at < b.at || (s.at == b.at && s.value < slot)));
    if (wins) {
      b = {twice, s.at};
      slot = s.value;
    }
  }
  return out;
}

OutlierResult detect_outliers(const TimeSeries& series, const PlausibilityBounds& bounds) {
  if (!bounds.sensor.empty() && bounds.sensor != series.sensor) {
    throw std::invalid_argument("detect_outliers: bounds for '" + bounds.sensor +
                                "' applied to '" + series.sensor + "'");
  }
  OutlierResult out{series, {}};
  auto& values = out.series.values;
  for (double& v : values) {
    if (is_missing(v)) continue;
    if ((bounds.min && v < *bounds.min) || (bounds.max && v > *bounds.max)) {
      v = kMissing;
      ++out.counts.out_of_range;
    }
  }
  if (bounds.max_step) {
    std::optional<double> previous;
    for (double& v : values) {
      if (is_missing(v)) continue;
      if (previous && std::abs(v - *previous) > *bounds.max_step) {
        v = kMissing;
        ++out.counts.step_jumps;
        continue;
      }
      previous = v;
    }
  }
  return out;
}

InterpolationResult interpolate_gaps(const TimeSeries& series, std::size_t max_gap_cells) {
  InterpolationResult out{series, 0};
  auto& v = out.series.values;
  const std::size_t n = v.size();
  std::size_t i = 0;
  while (i < n) {
    if (!is_missing(v[i])) {
      ++i;
      continue;
    }
    const std::size_t gap_begin = i;
    while (i < n && is_missing(v[i])) ++i;
    const std::size_t gap_len = i - gap_begin;
    if (gap_begin == 0 || i == n || gap_len > max_gap_cells) continue;
    const double left = v[gap_begin - 1];
    const double right = v[i];
    for (std::size_t k = 1; k <= gap_len; ++k) {
      v[gap_begin + k - 1] =
          left + (right - left) * static_cast<double>(k) / static_cast<double>(gap_len + 1);
    }
    out.filled += gap_len;
  }
  return out;
}

PreprocessCounters& PreprocessCounters::operator+=(const PreprocessCounters& other) {
  rejected_rows += other.rejected_rows;
  dropped_samples += other.dropped_samples;
  outliers += other.outliers;
  interpolated += other.interpolated;
  missing_cells += other.missing_cells;
  return *this;
}

PreprocessResult preprocess(const std::map<std::string, std::vector<RawSample>>& by_sensor,
                            const Grid& grid,
                            const std::map<std::string, PlausibilityBounds>& bounds,
                            std::size_t max_gap_cells) {
  std::vector<const std::pair<const std::string, std::vector<RawSample>>*> work;
  work.reserve(by_sensor.size());
  for (const auto& entry : by_sensor) work.push_back(&entry);

  std::vector<SensorOutcome> outcomes(work.size());
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(work.size());

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      const auto& [sensor, samples] = *work[static_cast<std::size_t>(i)];
      outcomes[static_cast<std::size_t>(i)] =
          run_pipeline(sensor, samples, grid, bounds, max_gap_cells);
    } catch (...) {
#pragma omp critical(statemon_preprocess_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  PreprocessResult result;
  for (std::size_t i = 0; i < work.size(); ++i) {
    result.counters += outcomes[i].counters;
    result.dataset.emplace(work[i]->first, std::move(outcomes[i].series));
  }
  return result;
}

PreprocessResult preprocess_serial(const std::map<std::string, std::vector<RawSample>>& by_sensor,
                                   const Grid& grid,
                                   const std::map<std::string, PlausibilityBounds>& bounds,
                                   std::size_t max_gap_cells) {
  PreprocessResult result;
  for (const auto& [sensor, samples] : by_sensor) {
    SensorOutcome o = run_pipeline(sensor, samples, grid, bounds, max_gap_cells);
    result.counters += o.counters;
    result.dataset.emplace(sensor, std::move(o.series));
  }
  return result;
}

}  // namespace statemon
