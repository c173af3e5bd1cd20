#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "statemon/scenario.hpp"

namespace statemon {

namespace {

enum class Mode : std::uint8_t { Main, Sleep, Night, Antifreeze };

constexpr std::array<std::string_view, 4> kMarkers = {"MAIN", "SLEEP", "NIGHT", "ANTIFREEZE"};

std::string_view marker_of(Mode m) { return kMarkers[static_cast<std::size_t>(m)]; }

// The marker a misconfigured BMS logs instead.
Mode wrong_marker(Mode m) {
  switch (m) {
    case Mode::Main: return Mode::Night;
    case Mode::Sleep: return Mode::Main;
    case Mode::Night: return Mode::Main;
    case Mode::Antifreeze: return Mode::Main;
  }
  return Mode::Main;
}

std::string number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string fixed3(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  return std::string(buf, ptr);
}

std::string hhmm(int minute) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minute / 60, minute % 60);
  return buf;
}

bool in_daily(int minute, int start, int end) {
  return start <= end ? (minute >= start && minute < end) : (minute >= start || minute < end);
}

bool contains(const TimeInterval& w, Timestamp t) { return t >= w.from && t < w.to; }

bool overlaps(const TimeInterval& a, const TimeInterval& b) {
  return a.from < b.to && b.from < a.to;
}

void validate(const ScenarioConfig& c, const std::vector<FaultInjection>& faults, const Grid& grid) {
  if (c.days < 1) throw std::invalid_argument("scenario needs at least one day");
  if (c.step_seconds < 1 || 86400 % c.step_seconds != 0) {
    throw std::invalid_argument("scenario step must divide 24 h");
  }
  auto valid_minute = [](int m) { return m >= 0 && m < 1440; };
  if (!valid_minute(c.night_start_minute) || !valid_minute(c.night_end_minute) ||
      c.night_start_minute == c.night_end_minute) {
    throw std::invalid_argument("invalid night window");
  }
  for (const auto& p : c.presence) {
    if (p.start_minute < 0 || p.end_minute > 1440 || p.start_minute >= p.end_minute) {
      throw std::invalid_argument("invalid presence window");
    }
    for (int m = p.start_minute; m < p.end_minute; ++m) {
      if (in_daily(m, c.night_start_minute, c.night_end_minute)) {
        throw std::invalid_argument("presence window overlaps the night window");
      }
    }
  }
  if (!(c.tau_seconds > 0) || !(c.noise >= 0)) throw std::invalid_argument("invalid plant model");

  // The clean run must stay inside the 0.5 K bands after a mode change.
  const double hi = std::max({c.reference_value + 2, c.night_value, c.antifreeze_target});
  const double lo = std::min({c.reference_value - 2, c.night_value, c.antifreeze_target});
  if (std::exp(-static_cast<double>(c.step_seconds) / c.tau_seconds) * (hi - lo) + c.noise >= 0.5) {
    throw std::invalid_argument("plant lag too slow for the grid step; lower tau_seconds");
  }

  for (const auto& w : c.window_open) {
    if (!(w.from < w.to) || w.from < grid.start || w.to > grid.end) {
      throw std::invalid_argument("window-open event outside the scenario span");
    }
  }
  for (std::size_t i = 0; i < faults.size(); ++i) {
    const auto& f = faults[i];
    if (!(f.window.from < f.window.to) || f.window.from < grid.start || f.window.to > grid.end) {
      throw std::invalid_argument("fault window outside the scenario span");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& g = faults[j];
      if (!overlaps(f.window, g.window)) continue;
      const bool stuck_vs_marker =
          (f.kind == FaultKind::StuckMode && g.kind == FaultKind::WrongMarker) ||
          (f.kind == FaultKind::WrongMarker && g.kind == FaultKind::StuckMode);
      if (f.kind == g.kind || stuck_vs_marker) {
        throw std::invalid_argument("contradictory faults: " + std::string(to_string(f.kind)) +
                                    " overlaps " + std::string(to_string(g.kind)));
      }
    }
  }
}

const FaultInjection* active_fault(const std::vector<FaultInjection>& faults, FaultKind kind,
                                   Timestamp t) {
  for (const auto& f : faults) {
    if (f.kind == kind && contains(f.window, t)) return &f;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::StuckMode: return "stuck-mode";
    case FaultKind::SetpointDrift: return "setpoint-drift";
    case FaultKind::WrongMarker: return "wrong-marker";
    case FaultKind::SensorGap: return "sensor-gap";
  }
  return "?";
}

std::optional<FaultKind> parse_fault_kind(std::string_view text) {
  for (const FaultKind k : {FaultKind::StuckMode, FaultKind::SetpointDrift, FaultKind::WrongMarker,
                            FaultKind::SensorGap}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string scenario_spec(const ScenarioConfig& c) {
  const bool antifreeze = !c.window_open.empty();
  std::string s;
  s += "// Room temperature control: main, sleep and night mode";
  s += antifreeze ? ", plus antifreeze while a window is open.\n\n" : ".\n\n";
  s += "constant referenceValue = " + number(c.reference_value) + ";\n";
  s += "constant nightValue = " + number(c.night_value) + ";\n";
  if (antifreeze) s += "constant frostLimit = " + number(c.frost_limit) + ";\n";
  s += "\ntimeroutine isNight {\n  daily " + hhmm(c.night_start_minute) + ".." +
       hhmm(c.night_end_minute) + ";\n}\n\n";
  s += "characteristic roomControlCurve {\n"
       "  x = \"" + std::string(kSetpointSensor) + "\";\n"
       "  y = \"" + std::string(kTemperatureSensor) + "\";\n"
       "  points { (10.0, 10.0) (30.0, 30.0) }\n"
       "  margin 0.5;\n}\n\n";
  s += "rule arePeoplePresent {\n  sensors {\n    I1 = \"" + std::string(kPresenceSensor) +
       "\";\n  }\n  I1 > 0\n}\n\n";
  s += "// Joined with `or` the two bounds would hold for every value, so they are\n"
       "// conjoined to get a +-3 K band around the reference value.\n";
  s += "rule referenceValueChange {\n  sensors {\n    I1 = \"" + std::string(kSetpointSensor) +
       "\";\n  }\n  (I1 >= referenceValue - 3)\n  and\n  (I1 <= referenceValue + 3)\n}\n\n";
  s += "rule satisfiesCharacteristic {\n  satisfies(roomControlCurve)\n}\n\n";
  s += "// Night value within a 0.5 K band instead of exact equality.\n";
  s += "rule isNightMode {\n  sensors {\n    I1 = \"" + std::string(kTemperatureSensor) +
       "\";\n  }\n  if isNight\n  then abs(I1 - nightValue) <= 0.5\n  else true\n}\n\n";
  s += "rule duringNight {\n  isNight\n}\n\n";
  s += "rule isDayTime {\n  not isNight\n}\n\n";
  s += "rule nobodyPresent {\n  sensors {\n    I1 = \"" + std::string(kPresenceSensor) +
       "\";\n  }\n  I1 = 0\n}\n\n";
  s += "rule temperaturePlausible {\n  sensors {\n    I1 = \"" + std::string(kTemperatureSensor) +
       "\";\n  }\n  I1 >= 0 and I1 <= 40\n}\n\n";
  if (antifreeze) {
    s += "rule windowOpen {\n  sensors {\n    I1 = \"" + std::string(kWindowSensor) +
         "\";\n  }\n  I1 > 0\n}\n\n";
    s += "rule windowClosed {\n  not windowOpen\n}\n\n";
    s += "rule aboveFrostLimit {\n  sensors {\n    I1 = \"" + std::string(kTemperatureSensor) +
         "\";\n  }\n  I1 >= frostLimit\n}\n\n";
  }
  const std::string closed = antifreeze ? "      windowClosed;\n" : "";
  s += "statespace " + std::string(kScenarioStateSpace) + " {\n  mode exclusive;\n";
  s += "  rules {\n    temperaturePlausible;\n  }\n";
  s += "  state MainMode marker \"MAIN\" {\n    rules {\n      arePeoplePresent;\n"
       "      referenceValueChange;\n      satisfiesCharacteristic;\n" + closed + "    }\n  }\n";
  s += "  state SleepMode marker \"SLEEP\" {\n    rules {\n      nobodyPresent;\n"
       "      isDayTime;\n" + closed + "    }\n  }\n";
  s += "  state NightMode marker \"NIGHT\" {\n    rules {\n      duringNight;\n"
       "      isNightMode;\n" + closed + "    }\n  }\n";
  if (antifreeze) {
    s += "  state AntifreezeMode marker \"ANTIFREEZE\" {\n    rules {\n      windowOpen;\n"
         "      aboveFrostLimit;\n    }\n  }\n";
  }
  s += "  transition MainMode -- SleepMode \"presence sensor\";\n";
  s += "  transition SleepMode -- NightMode \"night timer\";\n";
  s += "  transition MainMode -- NightMode \"night timer\";\n";
  if (antifreeze) {
    s += "  transition MainMode -- AntifreezeMode \"window contact\";\n";
    s += "  transition SleepMode -- AntifreezeMode \"window contact\";\n";
    s += "  transition NightMode -- AntifreezeMode \"window contact\";\n";
  }
  s += "}\n";
  return s;
}

ScenarioOutput generate(const ScenarioConfig& c, const std::vector<FaultInjection>& faults) {
  ScenarioOutput out;
  out.grid = Grid::days(c.start, c.days, c.step_seconds);
  validate(c, faults, out.grid);
  out.spec_text = scenario_spec(c);

  const bool antifreeze = !c.window_open.empty();
  const std::size_t n = out.grid.cell_count();
  const std::int64_t max_jitter = std::min<std::int64_t>(59, (c.step_seconds - 1) / 2);
  const double lag = std::exp(-static_cast<double>(c.step_seconds) / c.tau_seconds);

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> day_offset(-2.0, 2.0);
  std::uniform_real_distribution<double> noise(-c.noise, c.noise);
  std::uniform_int_distribution<std::int64_t> jitter(0, max_jitter);
  std::uniform_int_distribution<int> people(1, 5);

  std::vector<double> setpoint_of_day(static_cast<std::size_t>(c.days));
  for (auto& s : setpoint_of_day) s = c.reference_value + day_offset(rng);

  auto minute_of = [&](Timestamp t) {
    return static_cast<int>(((t - c.start).count() % 86400) / 60);
  };
  auto present_at = [&](Timestamp t) {
    const int minute = minute_of(t);
    return std::any_of(c.presence.begin(), c.presence.end(), [&](const DailyInterval& p) {
      return minute >= p.start_minute && minute < p.end_minute;
    });
  };
  auto schedule_mode = [&](Timestamp t) {
    for (const auto& w : c.window_open) {
      if (contains(w, t)) return Mode::Antifreeze;
    }
    if (in_daily(minute_of(t), c.night_start_minute, c.night_end_minute)) return Mode::Night;
    return present_at(t) ? Mode::Main : Mode::Sleep;
  };

  std::string sensors = "sensor_id,timestamp,value\n";
  std::string markers = "timestamp,statespace,marker\n";
  std::optional<std::string_view> last_marker;
  std::optional<Mode> stuck;
  double temperature = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const Timestamp t = out.grid.at(i);
    const auto day = static_cast<std::size_t>((t - c.start).count() / 86400);
    const double setpoint = setpoint_of_day[day];

    const Mode scheduled = schedule_mode(t);
    Mode mode = scheduled;
    if (active_fault(faults, FaultKind::StuckMode, t)) {
      if (!stuck) stuck = i == 0 ? scheduled : schedule_mode(out.grid.at(i - 1));
      mode = *stuck;
    } else {
      stuck.reset();
    }

    double target = setpoint;
    if (mode == Mode::Night) target = c.night_value;
    if (mode == Mode::Antifreeze) target = c.antifreeze_target;
    if (i == 0) temperature = target;
    // Every draw happens on every cell so faults never shift the random stream.
    temperature = target + (temperature - target) * lag + noise(rng);
    const std::int64_t jt = jitter(rng);
    const std::int64_t jp = jitter(rng);
    const std::int64_t js = jitter(rng);
    const std::int64_t jw = jitter(rng);
    const int count = people(rng);

    const bool present = present_at(t);
    double reported_setpoint = setpoint;
    if (const auto* f = active_fault(faults, FaultKind::SetpointDrift, t)) reported_setpoint += f->magnitude;

    auto row = [&](std::string_view sensor, std::int64_t late, double value) {
      sensors += sensor;
      sensors += ',';
      sensors += format_timestamp(t + std::chrono::seconds{late});
      sensors += ',';
      sensors += fixed3(value);
      sensors += '\n';
    };
    if (!active_fault(faults, FaultKind::SensorGap, t)) row(kTemperatureSensor, jt, temperature);
    row(kPresenceSensor, jp, present ? count : 0);
    row(kSetpointSensor, js, reported_setpoint);
    if (antifreeze) row(kWindowSensor, jw, scheduled == Mode::Antifreeze ? 1.0 : 0.0);

    Mode logged = mode;
    if (active_fault(faults, FaultKind::WrongMarker, t)) logged = wrong_marker(mode);
    const std::string_view marker = marker_of(logged);
    if (!last_marker || *last_marker != marker) {
      markers += format_timestamp(t) + "," + std::string(kScenarioStateSpace) + "," +
                 std::string(marker) + "\n";
      last_marker = marker;
    }
  }
  out.sensor_csv = std::move(sensors);
  out.marker_csv = std::move(markers);
  return out;
}

}  // namespace statemon
