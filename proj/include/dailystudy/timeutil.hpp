// Copyright 2026 The dailystudy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DAILYSTUDY_TIMEUTIL_HPP
#define DAILYSTUDY_TIMEUTIL_HPP

#include <chrono>
#include <cstdint>
#include <string>

namespace dailystudy {

// All wall-clock instants are UTC at second resolution.
using UtcTime = std::chrono::sys_seconds;
using LocalDay = std::chrono::local_days;

std::string format_utc(UtcTime t);          // "2021-03-01T10:00:00Z"
UtcTime parse_utc(const std::string& s);    // throws BadConfig on malformed input

std::string format_local_day(LocalDay d);   // "2021-03-01"
LocalDay parse_local_day(const std::string& s);

// Minutes past local midnight, e.g. 09:00 -> 540.
using MinutesOfDay = std::chrono::minutes;

MinutesOfDay parse_time_of_day(const std::string& hhmm);  // "09:00" -> 540min
std::string format_time_of_day(MinutesOfDay m);

struct LocalStamp {
  LocalDay day{};
  std::chrono::seconds time_of_day{};  // seconds past local midnight
};

// Wall-clock zone resolution. Supports fixed offsets ("UTC", "UTC-5",
// "UTC+05:30") and a small table of IANA zones with their current
// daylight-saving rules (US and EU zones used by the study population).
// The standard library's tz database is unavailable on this toolchain,
// so the rules are evaluated in-process.
class TimeZone {
 public:
  // Resolves a zone identifier; throws UnknownZone for anything else.
  static TimeZone of(const std::string& id);

  const std::string& id() const { return id_; }

  // Offset from UTC in effect at instant `t` (positive east of Greenwich).
  std::chrono::minutes offset_at(UtcTime t) const;

  LocalStamp to_local(UtcTime t) const;
  LocalDay local_day(UtcTime t) const { return to_local(t).day; }

  // UTC instant of the given local wall-clock time. During a DST gap the
  // first valid instant at or after the gap is returned; during a fold
  // the earlier of the two instants is returned.
  UtcTime at_local(LocalDay day, MinutesOfDay time_of_day) const;

  bool operator==(const TimeZone& other) const { return id_ == other.id_; }

 private:
  struct Rule {
    // nth weekday-of-month transition, evaluated per year.
    unsigned month = 0;   // 1..12
    int week = 0;         // 1..4, or 5 meaning "last"
    unsigned weekday = 0; // 0 = Sunday
    std::chrono::minutes at{};  // transition time
    enum class Basis { Standard, Daylight, Utc } basis = Basis::Standard;
  };

  std::string id_;
  std::chrono::minutes std_offset_{};
  std::chrono::minutes dst_offset_{};  // == std_offset_ when no DST
  bool has_dst_ = false;
  Rule dst_start_{};
  Rule dst_end_{};

  UtcTime transition_instant(int year, const Rule& rule) const;
  bool dst_active(UtcTime t) const;
};

}  // namespace dailystudy

#endif  // DAILYSTUDY_TIMEUTIL_HPP
