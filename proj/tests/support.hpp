#pragma once

#include <doctest.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "statemon/evaluator.hpp"
#include "statemon/spec_language.hpp"
#include "statemon/timeseries.hpp"
#include "generators.hpp"

namespace testing {

inline constexpr const char* kRoomSpec = R"(
constant referenceValue = 21;

timeroutine isNight {
  daily 22:00..06:00;
}

characteristic roomControlCurve {
  x = "000-000-003";
  y = "000-000-001";
  points { (10, 10) (30, 30) }
  margin 0.5;
}

rule isNightMode {
  sensors {
    I1 = "000-000-001";
  }
  if isNight
  then I1 = 18.0
  else true
}

rule arePeoplePresent {
  sensors {
    I1 = "000-000-002";
  }
  I1 > 0
}

rule referenceValueChange {
  sensors {
    I1 = "000-000-003";
  }
  (I1 >= referenceValue - 3)
  or
  (I1 <= referenceValue + 3)
}

rule satisfiesCharacteristic {
  satisfies(roomControlCurve)
}

rule isMainMode {
  arePeoplePresent and
  referenceValueChange and
  satisfiesCharacteristic
}

rule isStatespaceSatisfied {
  isMainMode or
  isNightMode
}
)";


inline statemon::ResolvedSpec must_load(std::string_view text) {
  statemon::ResolveResult r = statemon::load_spec(text, "test.ens");
  std::string diags;
  for (const auto& d : r.diagnostics) diags += statemon::format_diagnostic(d, "test.ens") + "\n";
  INFO(diags);
  REQUIRE(r.spec.has_value());
  return std::move(*r.spec);
}

inline std::vector<statemon::Diagnostic> errors_of(std::string_view text) {
  std::vector<statemon::Diagnostic> out;
  for (auto& d : statemon::load_spec(text, "test.ens").diagnostics) {
    if (d.severity == statemon::Severity::Error) out.push_back(d);
  }
  return out;
}

inline statemon::Timestamp ts(std::string_view text) {
  const auto t = statemon::parse_timestamp(text);
  REQUIRE(t.has_value());
  return *t;
}

inline statemon::TimeSeries series(std::string sensor, const statemon::Grid& grid,
                                   std::vector<double> values) {
  REQUIRE(values.size() == grid.cell_count());
  return {std::move(sensor), grid, std::move(values)};
}

inline statemon::Dataset dataset(std::initializer_list<statemon::TimeSeries> list) {
  statemon::Dataset d;
  for (const auto& s : list) d.emplace(s.sensor, s);
  return d;
}


}  // namespace testing
