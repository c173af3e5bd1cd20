#include <algorithm>
#include <cstdint>

#include "eval/ops.hpp"
#include "statemon/evaluator.hpp"

namespace statemon {

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

bool uses_time_routines(const ResolvedSpec& spec) {
  return std::any_of(spec.document.elements.begin(), spec.document.elements.end(),
                     [](const ElementDef& e) { return std::holds_alternative<TimeRoutineDef>(e); });
}

}  // namespace

bool is_no_data(const Value& v) {
  if (const auto* t = std::get_if<TriState>(&v)) return *t == TriState::NoData;
  return std::isnan(std::get<double>(v));
}

std::size_t TriStateSeries::count(TriState t) const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), t));
}

MissingSensorsError::MissingSensorsError(std::vector<std::string> ids)
    : std::runtime_error("missing sensors: " + join_ids(ids)), ids_(std::move(ids)) {}

std::shared_ptr<const CalendarIndex> CalendarIndex::build(const Grid& grid, const TimeZone& zone) {
  auto index = std::make_shared<CalendarIndex>();
  index->grid = grid;
  index->zone = zone.name();
  const std::size_t n = grid.cell_count();
  index->seconds_of_day.resize(n);
  index->weekday.resize(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    const LocalTime local = zone.to_local(grid.at(static_cast<std::size_t>(i)));
    index->seconds_of_day[static_cast<std::size_t>(i)] = local.seconds_of_day;
    index->weekday[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(local.weekday);
  }
  return index;
}

EvalContext::EvalContext(const ResolvedSpec& spec, Dataset dataset, const Grid& grid,
                         TimeZone zone, EvalOptions options,
                         std::shared_ptr<const CalendarIndex> calendar)
    : spec_(&spec),
      dataset_(std::move(dataset)),
      grid_(grid),
      zone_(std::move(zone)),
      options_(options),
      calendar_(std::move(calendar)) {
  std::vector<std::string> missing;
  for (const auto& id : required_sensor_ids(spec)) {
    if (!dataset_.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) throw MissingSensorsError(std::move(missing));

  slots_.reserve(spec.sensor_table.size());
  for (const auto& id : spec.sensor_table) {
    const auto it = dataset_.find(id);
    if (it == dataset_.end()) {
      slots_.push_back(nullptr);
      continue;
    }
    const TimeSeries& series = it->second;
    if (!(series.grid == grid_) || series.values.size() != grid_.cell_count()) {
      throw GridMismatchError("sensor '" + id + "' is not aligned to the evaluation grid");
    }
    slots_.push_back(&series);
  }

  if (calendar_) {
    if (!(calendar_->grid == grid_) || calendar_->zone != zone_.name()) {
      throw GridMismatchError("calendar index built for a different grid or zone");
    }
  } else if (uses_time_routines(spec)) {
    calendar_ = CalendarIndex::build(grid_, zone_);
  } else {
    calendar_ = std::make_shared<CalendarIndex>(CalendarIndex{grid_, zone_.name(), {}, {}});
  }
}

const TimeSeries* EvalContext::sensor(std::string_view bms_id) const {
  const auto& table = spec_->sensor_table;
  const auto it = std::lower_bound(table.begin(), table.end(), bms_id);
  if (it == table.end() || *it != bms_id) return nullptr;
  return slots_[static_cast<std::size_t>(it - table.begin())];
}

}  // namespace statemon
