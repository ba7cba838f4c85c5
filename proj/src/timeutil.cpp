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

#include "dailystudy/timeutil.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "dailystudy/errors.hpp"

namespace dailystudy {

namespace chr = std::chrono;

std::string format_utc(UtcTime t) {
  auto days = chr::floor<chr::days>(t);
  chr::year_month_day ymd{days};
  chr::hh_mm_ss hms{t - days};
  char buf[72];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                long(hms.hours().count()), long(hms.minutes().count()),
                long(hms.seconds().count()));
  return buf;
}

UtcTime parse_utc(const std::string& s) {
  int y, mo, d, h, mi, sec;
  char z = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d%c", &y, &mo, &d, &h, &mi, &sec,
                  &z) != 7 ||
      z != 'Z') {
    fail(Err::BadConfig, "malformed UTC timestamp '" + s + "'");
  }
  chr::year_month_day ymd{chr::year{y}, chr::month{unsigned(mo)},
                          chr::day{unsigned(d)}};
  if (!ymd.ok()) fail(Err::BadConfig, "invalid calendar date '" + s + "'");
  return chr::sys_days{ymd} + chr::hours{h} + chr::minutes{mi} +
         chr::seconds{sec};
}

std::string format_local_day(LocalDay d) {
  chr::year_month_day ymd{chr::sys_days{d.time_since_epoch()}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

LocalDay parse_local_day(const std::string& s) {
  int y, mo, d;
  if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &mo, &d) != 3) {
    fail(Err::BadConfig, "malformed local day '" + s + "'");
  }
  chr::year_month_day ymd{chr::year{y}, chr::month{unsigned(mo)},
                          chr::day{unsigned(d)}};
  if (!ymd.ok()) fail(Err::BadConfig, "invalid calendar date '" + s + "'");
  return LocalDay{chr::sys_days{ymd}.time_since_epoch()};
}

MinutesOfDay parse_time_of_day(const std::string& hhmm) {
  int h, m;
  if (std::sscanf(hhmm.c_str(), "%d:%d", &h, &m) != 2 || h < 0 || h > 23 ||
      m < 0 || m > 59) {
    fail(Err::BadConfig, "malformed time of day '" + hhmm + "'");
  }
  return chr::minutes{h * 60 + m};
}

std::string format_time_of_day(MinutesOfDay m) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%02ld:%02ld", long(m.count() / 60),
                long(m.count() % 60));
  return buf;
}

namespace {

struct ZoneSpec {
  int std_minutes;
  int dst_minutes;
  bool us_rules;  // true: US DST rules; false: EU rules (when dst differs)
};

// Zones are listed with their post-2007 rules; the study population is
// predominantly US-based with a small European remainder.
const std::map<std::string, ZoneSpec>& zone_table() {
  static const std::map<std::string, ZoneSpec> table = {
      {"America/New_York", {-300, -240, true}},
      {"America/Chicago", {-360, -300, true}},
      {"America/Denver", {-420, -360, true}},
      {"America/Phoenix", {-420, -420, true}},
      {"America/Los_Angeles", {-480, -420, true}},
      {"Europe/London", {0, 60, false}},
      {"Europe/Berlin", {60, 120, false}},
  };
  return table;
}

bool parse_fixed_offset(const std::string& id, int* minutes) {
  if (id == "UTC") {
    *minutes = 0;
    return true;
  }
  if (id.rfind("UTC", 0) != 0 || id.size() < 5) return false;
  char sign = id[3];
  if (sign != '+' && sign != '-') return false;
  int h = 0, m = 0;
  const char* p = id.c_str() + 4;
  if (std::sscanf(p, "%d:%d", &h, &m) < 1) return false;
  if (h > 14 || m > 59) return false;
  *minutes = (h * 60 + m) * (sign == '-' ? -1 : 1);
  return true;
}

}  // namespace

TimeZone TimeZone::of(const std::string& id) {
  TimeZone tz;
  tz.id_ = id;
  int fixed;
  if (parse_fixed_offset(id, &fixed)) {
    tz.std_offset_ = chr::minutes{fixed};
    tz.dst_offset_ = tz.std_offset_;
    tz.has_dst_ = false;
    return tz;
  }
  auto it = zone_table().find(id);
  if (it == zone_table().end()) fail(Err::UnknownZone, id);
  const ZoneSpec& spec = it->second;
  tz.std_offset_ = chr::minutes{spec.std_minutes};
  tz.dst_offset_ = chr::minutes{spec.dst_minutes};
  tz.has_dst_ = spec.std_minutes != spec.dst_minutes;
  if (tz.has_dst_) {
    if (spec.us_rules) {
      // Second Sunday in March 02:00 standard; first Sunday in November
      // 02:00 daylight.
      tz.dst_start_ = {3, 2, 0, chr::minutes{120}, Rule::Basis::Standard};
      tz.dst_end_ = {11, 1, 0, chr::minutes{120}, Rule::Basis::Daylight};
    } else {
      // Last Sunday in March / October at 01:00 UTC.
      tz.dst_start_ = {3, 5, 0, chr::minutes{60}, Rule::Basis::Utc};
      tz.dst_end_ = {10, 5, 0, chr::minutes{60}, Rule::Basis::Utc};
    }
  }
  return tz;
}

UtcTime TimeZone::transition_instant(int year, const Rule& rule) const {
  chr::year y{year};
  chr::month m{rule.month};
  chr::weekday wd{rule.weekday};
  chr::sys_days day;
  if (rule.week == 5) {
    day = chr::sys_days{y / m / chr::weekday_last{wd}};
  } else {
    day = chr::sys_days{y / m / chr::weekday_indexed{wd, unsigned(rule.week)}};
  }
  UtcTime local_naive = chr::time_point_cast<chr::seconds>(day) + rule.at;
  switch (rule.basis) {
    case Rule::Basis::Standard: return local_naive - std_offset_;
    case Rule::Basis::Daylight: return local_naive - dst_offset_;
    case Rule::Basis::Utc: return local_naive;
  }
  return local_naive;
}

bool TimeZone::dst_active(UtcTime t) const {
  if (!has_dst_) return false;
  // Determine the year from the standard-time local date; transitions never
  // fall close enough to New Year for the approximation to matter in the
  // northern-hemisphere zones listed above.
  chr::year_month_day ymd{chr::floor<chr::days>(t + std_offset_)};
  int year = int(ymd.year());
  return t >= transition_instant(year, dst_start_) &&
         t < transition_instant(year, dst_end_);
}

std::chrono::minutes TimeZone::offset_at(UtcTime t) const {
  return dst_active(t) ? dst_offset_ : std_offset_;
}

LocalStamp TimeZone::to_local(UtcTime t) const {
  auto shifted = t + offset_at(t);
  auto days = chr::floor<chr::days>(shifted);
  LocalStamp out;
  out.day = LocalDay{days.time_since_epoch()};
  out.time_of_day = shifted - days;
  return out;
}

UtcTime TimeZone::at_local(LocalDay day, MinutesOfDay time_of_day) const {
  UtcTime naive = UtcTime{chr::duration_cast<chr::seconds>(
                      day.time_since_epoch())} + time_of_day;
  UtcTime via_std = naive - std_offset_;
  UtcTime via_dst = naive - dst_offset_;
  bool std_ok = offset_at(via_std) == std_offset_;
  bool dst_ok = has_dst_ && offset_at(via_dst) == dst_offset_;
  if (std_ok && dst_ok) return std::min(via_std, via_dst);  // fold: earliest
  if (std_ok) return via_std;
  if (dst_ok) return via_dst;
  // Nonexistent local time (spring-forward gap): return the instant the
  // clocks jump, the first valid time at or after the requested one.
  chr::year_month_day ymd{chr::floor<chr::days>(naive)};
  return transition_instant(int(ymd.year()), dst_start_);
}

}  // namespace dailystudy
