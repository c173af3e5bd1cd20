#pragma once

// Per-cell evaluation of rules, functions, time routines and characteristic
// predicates with three-valued no-data propagation.
//
// Two routes compute the same thing:
//   * eval_expr / eval_element_series_reference walk the expression tree one
//     cell at a time (serial reference);
//   * SeriesEvaluator / eval_element_series evaluate whole columns with
//     OpenMP-parallel kernels and memoize referenced elements.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "statemon/spec_language.hpp"
#include "statemon/time.hpp"
#include "statemon/timeseries.hpp"
#include "statemon/tristate.hpp"

namespace statemon {

inline constexpr double kDefaultEqEps = 1e-9;

/// Logical result, or numeric result where NaN means numeric no-data.
using Value = std::variant<TriState, double>;

bool is_no_data(const Value& v);

struct TriStateSeries {
  std::string element;
  Grid grid;
  std::vector<TriState> cells;

  std::size_t count(TriState t) const;
  bool operator==(const TriStateSeries&) const = default;
};

struct NumericSeries {
  std::string element;
  Grid grid;
  std::vector<double> values;  // NaN = no-data
};

using ElementSeries = std::variant<TriStateSeries, NumericSeries>;

/// Local wall-clock facts for every cell of a grid in one zone.
struct CalendarIndex {
  Grid grid;
  std::string zone;
  std::vector<std::int32_t> seconds_of_day;
  std::vector<std::uint8_t> weekday;  // Monday = 0

  static std::shared_ptr<const CalendarIndex> build(const Grid& grid, const TimeZone& zone);
};

struct EvalOptions {
  double eq_eps = kDefaultEqEps;
};

class MissingSensorsError : public std::runtime_error {
 public:
  explicit MissingSensorsError(std::vector<std::string> ids);
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

class GridMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable evaluation inputs. The ResolvedSpec must outlive the context.
class EvalContext {
 public:
  /// Throws MissingSensorsError when a required sensor is absent and
  /// GridMismatchError when a series is not on `grid`. A prebuilt calendar for
  /// the same grid and zone may be shared between contexts.
  EvalContext(const ResolvedSpec& spec, Dataset dataset, const Grid& grid,
              TimeZone zone = TimeZone::utc(), EvalOptions options = {},
              std::shared_ptr<const CalendarIndex> calendar = nullptr);

  const ResolvedSpec& spec() const { return *spec_; }
  const Grid& grid() const { return grid_; }
  const TimeZone& zone() const { return zone_; }
  const EvalOptions& options() const { return options_; }
  const Dataset& dataset() const { return dataset_; }
  const CalendarIndex& calendar() const { return *calendar_; }

  /// Series for a slot of ResolvedSpec::sensor_table, or nullptr if absent.
  const TimeSeries* sensor(std::size_t slot) const { return slots_[slot]; }
  const TimeSeries* sensor(std::string_view bms_id) const;

 private:
  const ResolvedSpec* spec_;
  Dataset dataset_;
  Grid grid_;
  TimeZone zone_;
  EvalOptions options_;
  std::shared_ptr<const CalendarIndex> calendar_;
  std::vector<const TimeSeries*> slots_;
};

// -- serial reference route -----------------------------------------------

Value eval_expr(const Expr& expr, const EvalContext& ctx, std::size_t cell);

/// Wall-clock membership test: [start, end) per window, wrapped windows split
/// at midnight, day filter applied to the local date of `at`.
bool eval_time_routine(const TimeRoutineDef& routine, Timestamp at, const TimeZone& zone);
bool time_routine_contains(const TimeRoutineDef& routine, int seconds_of_day, int weekday);

/// Piecewise-linear curve value, or nullopt outside [first.x, last.x].
std::optional<double> characteristic_curve(const CharacteristicDef& ch, double x);

/// Satisfied iff |y - f(x)| <= margin (plus `tolerance` for round-off);
/// no-data when x is outside the curve or either input is missing.
TriState eval_characteristic(const CharacteristicDef& ch, double x, double y,
                             double tolerance = kDefaultEqEps);

ElementSeries eval_element_series_reference(std::string_view name, const EvalContext& ctx);

// -- parallel column route ---------------------------------------------------

/// Column-at-a-time evaluator with per-element memoization. Not thread-safe
/// itself; the kernels inside parallelize over cells.
class SeriesEvaluator {
 public:
  explicit SeriesEvaluator(const EvalContext& ctx) : ctx_(&ctx) {}

  const std::vector<TriState>& rule(std::size_t position);
  const std::vector<double>& function(std::size_t position);

  std::vector<TriState> logical(const Expr& expr);
  std::vector<double> numeric(const Expr& expr);

  /// Throws std::invalid_argument for state spaces, characteristics and
  /// unknown names.
  ElementSeries element(std::string_view name);

  const EvalContext& context() const { return *ctx_; }

 private:
  const std::vector<TriState>& time_routine(std::size_t position);

  const EvalContext* ctx_;
  std::unordered_map<std::size_t, std::vector<TriState>> logical_cache_;
  std::unordered_map<std::size_t, std::vector<double>> numeric_cache_;
};

ElementSeries eval_element_series(std::string_view name, const EvalContext& ctx);

}  // namespace statemon
