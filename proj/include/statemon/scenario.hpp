#pragma once

// Synthetic room temperature control data: sensor readings, BMS markers and a
// matching specification, with optional injected faults.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "statemon/time.hpp"
#include "statemon/timeseries.hpp"

namespace statemon {

inline constexpr std::string_view kTemperatureSensor = "000-000-001";
inline constexpr std::string_view kPresenceSensor = "000-000-002";
inline constexpr std::string_view kSetpointSensor = "000-000-003";
inline constexpr std::string_view kWindowSensor = "000-000-004";
inline constexpr std::string_view kScenarioStateSpace = "RoomControl";

/// [start, end) in minutes of the day; must not wrap.
struct DailyInterval {
  int start_minute = 0;
  int end_minute = 0;
};

struct TimeInterval {
  Timestamp from{};
  Timestamp to{};  // exclusive
};

struct ScenarioConfig {
  int days = 1;
  std::int64_t step_seconds = kDefaultStepSeconds;
  Timestamp start = Timestamp{std::chrono::seconds{1294617600}};  // 2011-01-10T00:00:00Z
  double reference_value = 21.0;
  double night_value = 18.0;
  double frost_limit = 8.0;
  double antifreeze_target = 12.0;
  int night_start_minute = 22 * 60;
  int night_end_minute = 6 * 60;
  std::vector<DailyInterval> presence = {{8 * 60, 18 * 60}};
  std::vector<TimeInterval> window_open;  // adds the antifreeze mode
  std::uint64_t seed = 1;
  double tau_seconds = 120.0;  // first-order lag of the room temperature
  double noise = 0.1;          // uniform noise amplitude, K
};

enum class FaultKind : std::uint8_t { StuckMode, SetpointDrift, WrongMarker, SensorGap };

std::string_view to_string(FaultKind kind);
std::optional<FaultKind> parse_fault_kind(std::string_view text);

struct FaultInjection {
  FaultKind kind = FaultKind::StuckMode;
  TimeInterval window;
  double magnitude = 0.0;  // setpoint offset for SetpointDrift
};

struct ScenarioOutput {
  Grid grid;
  std::string sensor_csv;
  std::string marker_csv;
  std::string spec_text;
};

/// Deterministic for a given config and fault list. Throws
/// std::invalid_argument for an invalid config, a fault outside the span or
/// contradictory faults (same kind overlapping, stuck-mode over wrong-marker).
ScenarioOutput generate(const ScenarioConfig& config, const std::vector<FaultInjection>& faults = {});

/// The specification emitted by generate().
std::string scenario_spec(const ScenarioConfig& config);

}  // namespace statemon
