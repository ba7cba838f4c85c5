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

#ifndef DAILYSTUDY_STORE_HPP_
#define DAILYSTUDY_STORE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dailystudy/domain.hpp"
#include "dailystudy/eventlog.hpp"
#include "dailystudy/measurements.hpp"
#include "dailystudy/notifications.hpp"
#include "dailystudy/payments.hpp"
#include "dailystudy/timeutil.hpp"

namespace dailystudy {

// A verification-code issuance awaiting (or past) HIT-side validation. Holds
// everything collected on-device before a worker identity exists.
struct PendingEnrollment {
  std::string device_id;
  std::string code;
  UtcTime issued_at{};
  UtcTime expires_at{};
  std::string timezone;
  std::string device_model;
  Demographics demographics;
  ConsentRecord consent;
  MeasurementRecord first_measurement;
  bool consumed = false;
  std::string consumed_by;  // worker_id that spent the code
};

// Store-side mirror of one confirmed bonus payment.
struct BonusRecord {
  int study_day = 0;
  Cents amount = 0;
  std::string idempotency_key;
  std::string receipt;
  UtcTime at{};
};

// Materialized view of the event log. All mutation goes through apply(), so
// the live store and a replayed store are identical by construction. The
// tables the JSON dump excludes (audit counters) are explicitly transient.
class StudyStore {
 public:
  explicit StudyStore(StudyConfig config);

  const StudyConfig& config() const { return config_; }

  // Runs every check apply() would run, without mutating. Throws
  // IllegalTransition/ValidationError; used to vet an event before it is
  // written to the log.
  void validate(const StudyEvent& e) const;

  // Applies one event. Equivalent to validate() followed by the state
  // mutation; throws without mutating on a bad event.
  void apply(const StudyEvent& e);

  // Canonical dump of all event-derived state, suitable for snapshots and
  // for field-identical replay comparison (std::map keeps key order stable).
  json to_json() const;
  static StudyStore from_json(StudyConfig config, const json& j);

  // Queries.
  std::uint64_t last_seq() const { return last_seq_; }
  const std::map<std::string, Participant>& participants() const {
    return participants_;
  }
  const Participant* find_participant(const std::string& worker_id) const;
  const Participant& participant(const std::string& worker_id) const;
  const std::map<std::string, PendingEnrollment>& codes() const {
    return codes_;
  }
  const PendingEnrollment* find_code(const std::string& code) const;
  std::optional<std::string> active_code_for_device(
      const std::string& device_id) const;
  const std::map<std::string, std::string>& device_of_worker() const {
    return device_of_worker_;
  }
  const std::map<std::string, std::string>& worker_of_device() const {
    return worker_of_device_;
  }
  std::string device_for(const std::string& worker_id) const;
  const std::map<std::string, std::map<int, MeasurementRecord>>&
  measurements() const {
    return measurements_;
  }
  const std::map<int, MeasurementRecord>* measurements_of(
      const std::string& worker_id) const;
  bool has_measurement(const std::string& worker_id, int study_day) const;
  const std::vector<BonusRecord>* bonuses_of(
      const std::string& worker_id) const;
  bool bonus_paid(const std::string& idempotency_key) const {
    return paid_keys_.count(idempotency_key) > 0;
  }
  const std::map<std::string, ScheduledNotification>& notifications() const {
    return notifications_;
  }
  const ScheduledNotification* find_notification(const std::string& id) const;
  // Pending notifications ordered by (fire_at, id).
  const std::set<std::pair<UtcTime, std::string>>& pending_notifications()
      const {
    return pending_by_time_;
  }
  std::vector<const ScheduledNotification*> pending_for_worker_day(
      const std::string& worker_id, LocalDay day) const;
  std::optional<std::string> assignment_decision(
      const std::string& assignment_id) const;
  std::string assignment_of(const std::string& worker_id) const;
  std::uint64_t next_notification_number() const {
    return max_notification_number_ + 1;
  }

  // Transient audit counter: same-day resubmissions acknowledged without
  // payment. Not part of the replayable state.
  int duplicate_day_attempts = 0;

 private:
  void apply_code_issued(const StudyEvent& e);
  void apply_enrollment_approved(const StudyEvent& e);
  void apply_enrollment_rejected(const StudyEvent& e);
  void apply_measurement_submitted(const StudyEvent& e);
  void apply_bonus_paid(const StudyEvent& e);
  void apply_notification_scheduled(const StudyEvent& e);
  void apply_notification_sent(const StudyEvent& e);
  void apply_notification_cancelled(const StudyEvent& e);
  void apply_study_ended(const StudyEvent& e);
  void resolve_notification(const std::string& id, NotificationStatus status,
                            bool delivered, int attempts);
  // The provisional participant used to run transition() for events on a
  // not-yet-enrolled worker (EnrollmentApproved/Rejected).
  Participant provisional_for(const StudyEvent& e) const;

  StudyConfig config_;
  std::uint64_t last_seq_ = 0;
  std::map<std::string, Participant> participants_;
  std::map<std::string, PendingEnrollment> codes_;
  std::map<std::string, std::string> active_code_of_device_;
  std::map<std::string, std::string> device_of_worker_;
  std::map<std::string, std::string> worker_of_device_;
  std::map<std::string, std::map<int, MeasurementRecord>> measurements_;
  std::map<std::string, std::vector<BonusRecord>> bonuses_;
  std::set<std::string> paid_keys_;
  std::map<std::string, ScheduledNotification> notifications_;
  std::set<std::pair<UtcTime, std::string>> pending_by_time_;
  std::map<std::string, std::string> assignment_decisions_;
  std::map<std::string, std::string> assignment_of_worker_;
  std::uint64_t max_notification_number_ = 0;
};

// Validates `e` against the store, appends it to the log (assigning the
// sequence number), applies it, and returns the event as written.
StudyEvent record_event(StudyStore& store, EventLog& log, StudyEvent e);

// Rebuilds a store from a log directory: snapshot (if any) plus tail.
StudyStore replay(const StudyConfig& config, EventLog& log);

}  // namespace dailystudy

#endif  // DAILYSTUDY_STORE_HPP_
