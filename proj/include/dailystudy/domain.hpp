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

#ifndef DAILYSTUDY_DOMAIN_HPP
#define DAILYSTUDY_DOMAIN_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dailystudy/payments.hpp"
#include "dailystudy/timeutil.hpp"

namespace dailystudy {

using nlohmann::json;

// Study-wide parameters shared by every module.
struct StudyConfig {
  int duration_days = 31;
  int max_measurements = 31;
  Cents enrollment_pay = 100;
  std::vector<PaymentScheme> schemes = default_schemes();
  MinutesOfDay morning_reminder{9 * 60};
  MinutesOfDay evening_reminder{19 * 60};
  int required_correct_rounds = 5;
  bool reengagement_enabled = false;
  std::chrono::hours code_ttl{24};
  // Client-reported device models accepted at enrollment; empty allows all.
  std::vector<std::string> allowed_device_models;

  void validate() const;
  const PaymentScheme& scheme(const std::string& id) const;
  payments::Params pay_params() const;
};

struct Demographics {
  std::string country;
  std::string dominant_hand;  // "left", "right", "ambidextrous"
  std::optional<double> height_cm;
  std::optional<double> weight_kg;
  std::string gender;

  void validate() const;
};

struct ConsentRecord {
  std::vector<bool> toggles;
  UtcTime at{};

  bool complete() const;  // all toggles present and true
};

enum class LifecycleState {
  CodeIssued,
  Enrolled,
  Active,
  Completed,
  Expired,
  Rejected,
};

const char* state_name(LifecycleState s);
LifecycleState state_from_name(const std::string& name);

inline bool is_terminal(LifecycleState s) {
  return s == LifecycleState::Completed || s == LifecycleState::Expired ||
         s == LifecycleState::Rejected;
}

struct Participant {
  std::string worker_id;  // empty until the HIT is approved
  std::string device_id;  // empty for reject-only records
  std::string timezone;   // frozen at enrollment
  std::string scheme_id;
  LifecycleState state = LifecycleState::CodeIssued;
  UtcTime enrolled_at{};
  Demographics demographics;
  ConsentRecord consent;
  int bonus_count = 0;  // bonus-paid measurements, enrollment excluded

  int total_measurements() const;  // enrollment included once enrolled
};

enum class EventKind {
  CodeIssued,
  EnrollmentApproved,
  EnrollmentRejected,
  MeasurementSubmitted,
  BonusPaid,
  NotificationScheduled,
  NotificationSent,
  NotificationCancelled,
  StudyEnded,
};

const char* kind_name(EventKind k);
EventKind kind_from_name(const std::string& name);

// Append-only record; the event log is the single source of truth and all
// participant state is derived by replaying these.
struct StudyEvent {
  std::uint64_t seq = 0;
  UtcTime at{};
  EventKind kind{};
  std::string worker_id;  // empty for device-scoped events (CodeIssued)
  json payload;
};

json event_to_json(const StudyEvent& e);
StudyEvent event_from_json(const json& j);

json demographics_to_json(const Demographics& d);
Demographics demographics_from_json(const json& j);
json consent_to_json(const ConsentRecord& c);
ConsentRecord consent_from_json(const json& j);
json participant_to_json(const Participant& p);
Participant participant_from_json(const json& j);

// Applies one event to a participant, returning the updated copy. Throws
// IllegalTransition when the event is not permitted in the current state.
// A participant still in Enrolled advances to Active implicitly on the
// first post-enrollment-day activity, so replays need no synthetic events.
Participant transition(const StudyConfig& config, const Participant& p,
                       const StudyEvent& event);

// 1-based study day of `t` for an enrolled participant, counted in local
// calendar days of the participant's timezone; enrollment day is day 1.
// Throws OutOfWindow past duration_days.
int study_day(const StudyConfig& config, const Participant& p, UtcTime t);

// Day index without the window check, for callers that handle expiry.
int raw_study_day(const Participant& p, UtcTime t);

}  // namespace dailystudy

#endif  // DAILYSTUDY_DOMAIN_HPP
