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

#include "dailystudy/domain.hpp"

#include <algorithm>

#include "dailystudy/errors.hpp"

namespace dailystudy {

void StudyConfig::validate() const {
  if (duration_days < 1) fail(Err::BadConfig, "duration_days must be >= 1");
  if (max_measurements < 1 || max_measurements > duration_days)
    fail(Err::BadConfig, "max_measurements must be in [1, duration_days]");
  if (enrollment_pay <= 0) fail(Err::BadConfig, "enrollment_pay must be > 0");
  if (morning_reminder >= evening_reminder)
    fail(Err::BadConfig, "morning reminder must precede evening reminder");
  if (required_correct_rounds < 1)
    fail(Err::BadConfig, "required_correct_rounds must be >= 1");
  if (schemes.empty()) fail(Err::BadConfig, "at least one payment scheme");
  for (const auto& s : schemes) s.validate();
}

const PaymentScheme& StudyConfig::scheme(const std::string& id) const {
  for (const auto& s : schemes) {
    if (s.id == id) return s;
  }
  fail(Err::BadConfig, "unknown payment scheme '" + id + "'");
}

payments::Params StudyConfig::pay_params() const {
  payments::Params p;
  p.enrollment_pay = enrollment_pay;
  p.max_measurements = max_measurements;
  return p;
}

void Demographics::validate() const {
  if (dominant_hand != "left" && dominant_hand != "right" &&
      dominant_hand != "ambidextrous") {
    fail(Err::ValidationError, "dominant_hand must be left/right/ambidextrous");
  }
  if (height_cm && *height_cm <= 0)
    fail(Err::ValidationError, "height must be positive");
  if (weight_kg && *weight_kg <= 0)
    fail(Err::ValidationError, "weight must be positive");
}

bool ConsentRecord::complete() const {
  return !toggles.empty() &&
         std::all_of(toggles.begin(), toggles.end(), [](bool b) { return b; });
}

const char* state_name(LifecycleState s) {
  switch (s) {
    case LifecycleState::CodeIssued: return "CodeIssued";
    case LifecycleState::Enrolled: return "Enrolled";
    case LifecycleState::Active: return "Active";
    case LifecycleState::Completed: return "Completed";
    case LifecycleState::Expired: return "Expired";
    case LifecycleState::Rejected: return "Rejected";
  }
  return "?";
}

LifecycleState state_from_name(const std::string& name) {
  for (LifecycleState s :
       {LifecycleState::CodeIssued, LifecycleState::Enrolled,
        LifecycleState::Active, LifecycleState::Completed,
        LifecycleState::Expired, LifecycleState::Rejected}) {
    if (name == state_name(s)) return s;
  }
  fail(Err::CorruptLog, "unknown lifecycle state '" + name + "'");
}

int Participant::total_measurements() const {
  bool enrolled = state == LifecycleState::Enrolled ||
                  state == LifecycleState::Active ||
                  state == LifecycleState::Completed ||
                  state == LifecycleState::Expired;
  return enrolled ? bonus_count + 1 : 0;
}

const char* kind_name(EventKind k) {
  switch (k) {
    case EventKind::CodeIssued: return "CodeIssued";
    case EventKind::EnrollmentApproved: return "EnrollmentApproved";
    case EventKind::EnrollmentRejected: return "EnrollmentRejected";
    case EventKind::MeasurementSubmitted: return "MeasurementSubmitted";
    case EventKind::BonusPaid: return "BonusPaid";
    case EventKind::NotificationScheduled: return "NotificationScheduled";
    case EventKind::NotificationSent: return "NotificationSent";
    case EventKind::NotificationCancelled: return "NotificationCancelled";
    case EventKind::StudyEnded: return "StudyEnded";
  }
  return "?";
}

EventKind kind_from_name(const std::string& name) {
  for (EventKind k :
       {EventKind::CodeIssued, EventKind::EnrollmentApproved,
        EventKind::EnrollmentRejected, EventKind::MeasurementSubmitted,
        EventKind::BonusPaid, EventKind::NotificationScheduled,
        EventKind::NotificationSent, EventKind::NotificationCancelled,
        EventKind::StudyEnded}) {
    if (name == kind_name(k)) return k;
  }
  fail(Err::CorruptLog, "unknown event kind '" + name + "'");
}

json event_to_json(const StudyEvent& e) {
  return json{{"seq", e.seq},
              {"at", format_utc(e.at)},
              {"kind", kind_name(e.kind)},
              {"worker_id", e.worker_id},
              {"payload", e.payload}};
}

StudyEvent event_from_json(const json& j) {
  StudyEvent e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.at = parse_utc(j.at("at").get<std::string>());
  e.kind = kind_from_name(j.at("kind").get<std::string>());
  e.worker_id = j.at("worker_id").get<std::string>();
  e.payload = j.at("payload");
  return e;
}

json demographics_to_json(const Demographics& d) {
  json j{{"country", d.country},
         {"dominant_hand", d.dominant_hand},
         {"gender", d.gender}};
  if (d.height_cm) j["height_cm"] = *d.height_cm;
  if (d.weight_kg) j["weight_kg"] = *d.weight_kg;
  return j;
}

Demographics demographics_from_json(const json& j) {
  Demographics d;
  d.country = j.value("country", "");
  d.dominant_hand = j.value("dominant_hand", "");
  d.gender = j.value("gender", "");
  if (j.contains("height_cm")) d.height_cm = j["height_cm"].get<double>();
  if (j.contains("weight_kg")) d.weight_kg = j["weight_kg"].get<double>();
  return d;
}

json consent_to_json(const ConsentRecord& c) {
  return json{{"toggles", c.toggles}, {"at", format_utc(c.at)}};
}

ConsentRecord consent_from_json(const json& j) {
  ConsentRecord c;
  c.toggles = j.at("toggles").get<std::vector<bool>>();
  c.at = parse_utc(j.at("at").get<std::string>());
  return c;
}

json participant_to_json(const Participant& p) {
  return json{{"worker_id", p.worker_id},
              {"device_id", p.device_id},
              {"timezone", p.timezone},
              {"scheme_id", p.scheme_id},
              {"state", state_name(p.state)},
              {"enrolled_at", format_utc(p.enrolled_at)},
              {"demographics", demographics_to_json(p.demographics)},
              {"consent", consent_to_json(p.consent)},
              {"bonus_count", p.bonus_count}};
}

Participant participant_from_json(const json& j) {
  Participant p;
  p.worker_id = j.at("worker_id").get<std::string>();
  p.device_id = j.at("device_id").get<std::string>();
  p.timezone = j.at("timezone").get<std::string>();
  p.scheme_id = j.at("scheme_id").get<std::string>();
  p.state = state_from_name(j.at("state").get<std::string>());
  p.enrolled_at = parse_utc(j.at("enrolled_at").get<std::string>());
  p.demographics = demographics_from_json(j.at("demographics"));
  p.consent = consent_from_json(j.at("consent"));
  p.bonus_count = j.at("bonus_count").get<int>();
  return p;
}

namespace {

[[noreturn]] void illegal(const Participant& p, const StudyEvent& e) {
  fail(Err::IllegalTransition,
       std::string(kind_name(e.kind)) + " not permitted in state " +
           state_name(p.state) + " for worker '" + p.worker_id + "'");
}

}  // namespace

int raw_study_day(const Participant& p, UtcTime t) {
  TimeZone tz = TimeZone::of(p.timezone);
  auto day_of = [&](UtcTime u) { return tz.local_day(u); };
  return int((day_of(t) - day_of(p.enrolled_at)).count()) + 1;
}

int study_day(const StudyConfig& config, const Participant& p, UtcTime t) {
  int day = raw_study_day(p, t);
  if (day > config.duration_days) {
    fail(Err::OutOfWindow, "day " + std::to_string(day) + " past " +
                               std::to_string(config.duration_days) +
                               "-day window");
  }
  return day;
}

Participant transition(const StudyConfig& config, const Participant& p,
                       const StudyEvent& event) {
  Participant next = p;

  // First post-enrollment-day activity promotes Enrolled to Active. Reminder
  // dispatches only ever happen from day 2 on, so NotificationSent implies
  // the first post-enrollment day has begun.
  if (next.state == LifecycleState::Enrolled) {
    bool day_two_begun = false;
    switch (event.kind) {
      case EventKind::MeasurementSubmitted:
        day_two_begun = event.payload.value("study_day", 1) >= 2;
        break;
      case EventKind::NotificationSent:
      case EventKind::StudyEnded:
        day_two_begun = true;
        break;
      default:
        break;
    }
    if (day_two_begun) next.state = LifecycleState::Active;
  }

  switch (event.kind) {
    case EventKind::CodeIssued:
      // Creates a participant; never applies to an existing one.
      illegal(p, event);

    case EventKind::EnrollmentApproved: {
      if (next.state != LifecycleState::CodeIssued) illegal(p, event);
      next.worker_id = event.worker_id;
      next.scheme_id = event.payload.at("scheme_id").get<std::string>();
      next.enrolled_at = event.at;
      next.state = LifecycleState::Enrolled;
      return next;
    }

    case EventKind::EnrollmentRejected: {
      if (next.state != LifecycleState::CodeIssued) illegal(p, event);
      next.worker_id = event.worker_id;
      next.state = LifecycleState::Rejected;
      return next;
    }

    case EventKind::MeasurementSubmitted: {
      if (next.state != LifecycleState::Enrolled &&
          next.state != LifecycleState::Active) {
        illegal(p, event);
      }
      bool enrollment = event.payload.value("enrollment", false);
      if (!enrollment) {
        if (next.bonus_count >= config.max_measurements - 1) illegal(p, event);
        next.bonus_count += 1;
        if (next.bonus_count == config.max_measurements - 1) {
          next.state = LifecycleState::Completed;
        }
      }
      return next;
    }

    case EventKind::BonusPaid: {
      // Payment confirmation may trail the submission that earned it, even
      // past completion or window expiry.
      if (next.state == LifecycleState::CodeIssued ||
          next.state == LifecycleState::Rejected) {
        illegal(p, event);
      }
      return next;
    }

    case EventKind::NotificationScheduled: {
      if (next.state != LifecycleState::Enrolled &&
          next.state != LifecycleState::Active) {
        illegal(p, event);
      }
      return next;
    }

    case EventKind::NotificationSent: {
      if (next.state != LifecycleState::Active) illegal(p, event);
      return next;
    }

    case EventKind::NotificationCancelled:
      // Cleanup is legal in any state; completion cancels same-day reminders
      // after the participant has already reached Completed.
      return next;

    case EventKind::StudyEnded: {
      if (next.state != LifecycleState::Active) illegal(p, event);
      next.state = LifecycleState::Expired;
      return next;
    }
  }
  illegal(p, event);
}

}  // namespace dailystudy
