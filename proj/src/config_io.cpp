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

#include "dailystudy/config_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dailystudy/errors.hpp"
#include "dailystudy/timeutil.hpp"

namespace dailystudy {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

// Ordered (key, value) pairs; `scheme` and other keys may repeat.
std::vector<std::pair<std::string, std::string>> parse_lines(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(Err::BadConfig,
           "line " + std::to_string(lineno) + ": expected key = value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(Err::BadConfig, key + ": not an integer: " + value);
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(Err::BadConfig, key + ": not a number: " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(Err::BadConfig, key + ": not a boolean: " + value);
}

PaymentScheme parse_scheme(const std::string& value) {
  // "LC constant 88" or "HI increasing 40 5"
  std::istringstream in(value);
  std::string id, kind;
  in >> id >> kind;
  if (kind == "constant") {
    long amount = 0;
    if (!(in >> amount)) fail(Err::BadConfig, "scheme: missing amount");
    return PaymentScheme::constant(id, amount);
  }
  if (kind == "increasing") {
    long base = 0, increment = 0;
    if (!(in >> base >> increment)) {
      fail(Err::BadConfig, "scheme: missing base/increment");
    }
    return PaymentScheme::increasing(id, base, increment);
  }
  fail(Err::BadConfig, "scheme: kind must be constant or increasing");
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(Err::BadConfig, "cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

StudyConfig parse_study_config(const std::string& text) {
  StudyConfig c;
  bool saw_scheme = false;
  for (const auto& [key, value] : parse_lines(text)) {
    if (key == "duration_days") {
      c.duration_days = static_cast<int>(parse_int(key, value));
    } else if (key == "max_measurements") {
      c.max_measurements = static_cast<int>(parse_int(key, value));
    } else if (key == "enrollment_pay_cents") {
      c.enrollment_pay = parse_int(key, value);
    } else if (key == "morning_reminder") {
      c.morning_reminder = parse_time_of_day(value);
    } else if (key == "evening_reminder") {
      c.evening_reminder = parse_time_of_day(value);
    } else if (key == "required_correct_rounds") {
      c.required_correct_rounds = static_cast<int>(parse_int(key, value));
    } else if (key == "reengagement_enabled") {
      c.reengagement_enabled = parse_bool(key, value);
    } else if (key == "code_ttl_hours") {
      c.code_ttl = std::chrono::hours{parse_int(key, value)};
    } else if (key == "allowed_device_models") {
      c.allowed_device_models = value.empty() ? std::vector<std::string>{}
                                              : split(value, '|');
    } else if (key == "scheme") {
      if (!saw_scheme) {
        c.schemes.clear();
        saw_scheme = true;
      }
      c.schemes.push_back(parse_scheme(value));
    } else {
      fail(Err::BadConfig, "unknown study key: " + key);
    }
  }
  c.validate();
  return c;
}

SimConfig parse_sim_config(const std::string& text) {
  SimConfig c;
  bool saw_workers = false;
  for (const auto& [key, value] : parse_lines(text)) {
    if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "start") {
      c.start = parse_utc(value);
    } else if (key == "workers") {
      // "HI:44,HC:54,LC:89"
      if (!saw_workers) {
        c.workers_per_scheme.clear();
        saw_workers = true;
      }
      for (const auto& part : split(value, ',')) {
        const auto colon = part.rfind(':');
        if (colon == std::string::npos) {
          fail(Err::BadConfig, "workers: expected SCHEME:COUNT, got " + part);
        }
        c.workers_per_scheme[trim(part.substr(0, colon))] =
            static_cast<int>(parse_int(key, trim(part.substr(colon + 1))));
      }
    } else if (key == "duplicate_submission_rate") {
      c.duplicate_submission_rate = parse_double(key, value);
    } else if (key == "gateway_failure_rate") {
      c.gateway_failure_rate = parse_double(key, value);
    } else if (key == "worker_jitter") {
      c.worker_jitter = parse_double(key, value);
    } else if (key == "timezones") {
      // "America/New_York:0.30,Europe/London:0.10"
      c.timezones.clear();
      c.timezone_weights.clear();
      for (const auto& part : split(value, ',')) {
        const auto colon = part.rfind(':');
        if (colon == std::string::npos) {
          fail(Err::BadConfig, "timezones: expected ZONE:WEIGHT, got " + part);
        }
        c.timezones.push_back(trim(part.substr(0, colon)));
        c.timezone_weights.push_back(
            parse_double(key, trim(part.substr(colon + 1))));
      }
    } else if (key == "profile.p_abandon_after_first") {
      c.profile.p_abandon_after_first = parse_double(key, value);
    } else if (key == "profile.base_daily_completion") {
      c.profile.base_daily_completion = parse_double(key, value);
    } else if (key == "profile.notification_responsiveness") {
      c.profile.notification_responsiveness = parse_double(key, value);
    } else if (key == "profile.hazard_base") {
      c.profile.hazard_base = parse_double(key, value);
    } else if (key == "profile.hazard_step") {
      c.profile.hazard_step = parse_double(key, value);
    } else if (key == "profile.morning_share") {
      c.profile.morning_share = parse_double(key, value);
    } else if (key == "profile.scheme_sensitivity") {
      c.profile.scheme_sensitivity.clear();
      for (const auto& part : split(value, ',')) {
        const auto colon = part.rfind(':');
        if (colon == std::string::npos) {
          fail(Err::BadConfig,
               "scheme_sensitivity: expected SCHEME:MULT, got " + part);
        }
        c.profile.scheme_sensitivity[trim(part.substr(0, colon))] =
            parse_double(key, trim(part.substr(colon + 1)));
      }
    } else {
      fail(Err::BadConfig, "unknown sim key: " + key);
    }
  }
  c.validate();
  return c;
}

StudyConfig load_study_config(const std::filesystem::path& file) {
  return parse_study_config(read_file(file));
}

SimConfig load_sim_config(const std::filesystem::path& file) {
  return parse_sim_config(read_file(file));
}

std::string default_study_config_text() {
  return
      "# Study parameters. All keys shown with their defaults.\n"
      "duration_days = 31\n"
      "max_measurements = 31\n"
      "enrollment_pay_cents = 100\n"
      "morning_reminder = 09:00\n"
      "evening_reminder = 19:00\n"
      "required_correct_rounds = 5\n"
      "reengagement_enabled = false\n"
      "code_ttl_hours = 24\n"
      "# Pipe-separated client model allowlist; empty accepts any model.\n"
      "allowed_device_models =\n"
      "# Payment arms: `ID constant CENTS` or `ID increasing BASE INCREMENT`.\n"
      "scheme = LC constant 88\n"
      "scheme = HC constant 113\n"
      "scheme = HI increasing 40 5\n";
}

std::string default_sim_config_text() {
  return
      "# Simulator parameters. All keys shown with their defaults.\n"
      "seed = 42\n"
      "start = 2021-03-01T00:00:00Z\n"
      "workers = HC:54,HI:44,LC:89\n"
      "duplicate_submission_rate = 0\n"
      "gateway_failure_rate = 0\n"
      "worker_jitter = 0.08\n"
      "timezones = America/New_York:0.30,America/Chicago:0.20,"
      "America/Denver:0.08,America/Phoenix:0.05,America/Los_Angeles:0.22,"
      "Europe/London:0.10,Europe/Berlin:0.05\n"
      "# Calibrated behavior profile; see the calibrate tool.\n"
      "profile.p_abandon_after_first = 0.11\n"
      "profile.base_daily_completion = 0.65\n"
      "profile.notification_responsiveness = 0.90\n"
      "profile.hazard_base = 0.23\n"
      "profile.hazard_step = 0.10\n"
      "profile.morning_share = 0.60\n"
      "profile.scheme_sensitivity = HC:1.00,HI:1.04,LC:0.98\n";
}

}  // namespace dailystudy
