#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include <absl/time/time.h>

namespace statemon {

/// UTC instant with one-second resolution.
using Timestamp = std::chrono::sys_seconds;

/// ISO-8601 / RFC 3339 date-time. A trailing `Z` or numeric offset is applied;
/// a timestamp without offset is taken as UTC. Fractional seconds are truncated.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(Timestamp t);

struct LocalTime {
  int year = 1970;
  int month = 1;
  int day = 1;
  int seconds_of_day = 0;
  int weekday = 0;  // Monday = 0
  int utc_offset_seconds = 0;
};

/// An IANA time zone (DST aware), backed by the system zoneinfo database.
class TimeZone {
 public:
  static TimeZone utc();
  static std::optional<TimeZone> load(std::string_view name);

  LocalTime to_local(Timestamp t) const;
  const std::string& name() const { return name_; }

 private:
  TimeZone(absl::TimeZone zone, std::string name) : zone_(zone), name_(std::move(name)) {}

  absl::TimeZone zone_;
  std::string name_;
};

}  // namespace statemon
