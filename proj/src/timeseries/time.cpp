#include "statemon/time.hpp"

#include <absl/time/civil_time.h>

#include <array>
#include <cstdio>

namespace statemon {

namespace {

bool digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

// YYYY-MM-DD[T ]HH:MM:SS[.f+][Z|+HH:MM|+HHMM]
std::optional<Timestamp> parse_fast(std::string_view s) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (s.size() < 19 || !digits(s, 0, 4, year) || s[4] != '-' || !digits(s, 5, 2, month) ||
      s[7] != '-' || !digits(s, 8, 2, day) || (s[10] != 'T' && s[10] != ' ') ||
      !digits(s, 11, 2, hour) || s[13] != ':' || !digits(s, 14, 2, minute) || s[16] != ':' ||
      !digits(s, 17, 2, second)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t frac_begin = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == frac_begin) return std::nullopt;
  }
  int offset_seconds = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' || s[pos] == 'z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      int oh = 0, om = 0;
      if (!digits(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t mpos = pos + 3;
      if (mpos < s.size() && s[mpos] == ':') ++mpos;
      if (!digits(s, mpos, 2, om)) return std::nullopt;
      if (oh > 23 || om > 59) return std::nullopt;
      offset_seconds = sign * (oh * 3600 + om * 60);
      pos = mpos + 2;
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return std::nullopt;
  const sys_seconds t = sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
  return t - seconds{offset_seconds};
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (auto fast = parse_fast(text)) return fast;
  absl::Time t;
  std::string err;
  if (absl::ParseTime(absl::RFC3339_full, std::string(text), &t, &err)) {
    return Timestamp{std::chrono::seconds{absl::ToUnixSeconds(t)}};
  }
  return std::nullopt;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const sys_days day = floor<days>(t);
  const year_month_day ymd{day};
  const int sod = static_cast<int>((t - day).count());  // 0..86399
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), sod / 3600, (sod / 60) % 60, sod % 60);
  return buf.data();
}

TimeZone TimeZone::utc() { return TimeZone(absl::UTCTimeZone(), "UTC"); }

std::optional<TimeZone> TimeZone::load(std::string_view name) {
  if (name == "UTC" || name == "utc" || name == "Z") return utc();
  absl::TimeZone zone;
  if (!absl::LoadTimeZone(std::string(name), &zone)) return std::nullopt;
  return TimeZone(zone, std::string(name));
}

LocalTime TimeZone::to_local(Timestamp t) const {
  const absl::Time instant = absl::FromUnixSeconds(t.time_since_epoch().count());
  const absl::TimeZone::CivilInfo info = zone_.At(instant);
  LocalTime out;
  out.year = static_cast<int>(info.cs.year());
  out.month = info.cs.month();
  out.day = info.cs.day();
  out.seconds_of_day = info.cs.hour() * 3600 + info.cs.minute() * 60 + info.cs.second();
  out.weekday = static_cast<int>(absl::GetWeekday(info.cs));  // absl: Monday = 0
  out.utc_offset_seconds = info.offset;
  return out;
}

}  // namespace statemon
