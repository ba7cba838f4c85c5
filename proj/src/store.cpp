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

#include "dailystudy/store.hpp"

#include <algorithm>

#include "dailystudy/errors.hpp"

namespace dailystudy {

namespace {

json pending_to_json(const PendingEnrollment& pe) {
  return json{{"device_id", pe.device_id},
              {"code", pe.code},
              {"issued_at", format_utc(pe.issued_at)},
              {"expires_at", format_utc(pe.expires_at)},
              {"timezone", pe.timezone},
              {"device_model", pe.device_model},
              {"demographics", demographics_to_json(pe.demographics)},
              {"consent", consent_to_json(pe.consent)},
              {"first_measurement", measurement_to_json(pe.first_measurement)},
              {"consumed", pe.consumed},
              {"consumed_by", pe.consumed_by}};
}

PendingEnrollment pending_from_json(const json& j) {
  PendingEnrollment pe;
  pe.device_id = j.at("device_id").get<std::string>();
  pe.code = j.at("code").get<std::string>();
  pe.issued_at = parse_utc(j.at("issued_at").get<std::string>());
  pe.expires_at = parse_utc(j.at("expires_at").get<std::string>());
  pe.timezone = j.at("timezone").get<std::string>();
  pe.device_model = j.at("device_model").get<std::string>();
  pe.demographics = demographics_from_json(j.at("demographics"));
  pe.consent = consent_from_json(j.at("consent"));
  pe.first_measurement = measurement_from_json(j.at("first_measurement"));
  pe.consumed = j.at("consumed").get<bool>();
  pe.consumed_by = j.at("consumed_by").get<std::string>();
  return pe;
}

json bonus_to_json(const BonusRecord& b) {
  return json{{"study_day", b.study_day},
              {"amount", b.amount},
              {"idempotency_key", b.idempotency_key},
              {"receipt", b.receipt},
              {"at", format_utc(b.at)}};
}

BonusRecord bonus_from_json(const json& j) {
  BonusRecord b;
  b.study_day = j.at("study_day").get<int>();
  b.amount = j.at("amount").get<Cents>();
  b.idempotency_key = j.at("idempotency_key").get<std::string>();
  b.receipt = j.at("receipt").get<std::string>();
  b.at = parse_utc(j.at("at").get<std::string>());
  return b;
}

std::uint64_t notification_number(const std::string& id) {
  // ids are "ntf-<n>"
  if (id.rfind("ntf-", 0) != 0) {
    fail(Err::ValidationError, "bad notification id: " + id);
  }
  return std::stoull(id.substr(4));
}

}  // namespace

StudyStore::StudyStore(StudyConfig config) : config_(std::move(config)) {
  config_.validate();
}

const Participant* StudyStore::find_participant(
    const std::string& worker_id) const {
  auto it = participants_.find(worker_id);
  return it == participants_.end() ? nullptr : &it->second;
}

const Participant& StudyStore::participant(const std::string& worker_id) const {
  const Participant* p = find_participant(worker_id);
  if (!p) fail(Err::UnknownWorker, "no participant " + worker_id);
  return *p;
}

const PendingEnrollment* StudyStore::find_code(const std::string& code) const {
  auto it = codes_.find(code);
  return it == codes_.end() ? nullptr : &it->second;
}

std::optional<std::string> StudyStore::active_code_for_device(
    const std::string& device_id) const {
  auto it = active_code_of_device_.find(device_id);
  if (it == active_code_of_device_.end()) return std::nullopt;
  return it->second;
}

std::string StudyStore::device_for(const std::string& worker_id) const {
  auto it = device_of_worker_.find(worker_id);
  if (it == device_of_worker_.end()) {
    fail(Err::UnknownWorker, "no device for worker " + worker_id);
  }
  return it->second;
}

const std::map<int, MeasurementRecord>* StudyStore::measurements_of(
    const std::string& worker_id) const {
  auto it = measurements_.find(worker_id);
  return it == measurements_.end() ? nullptr : &it->second;
}

bool StudyStore::has_measurement(const std::string& worker_id,
                                 int study_day) const {
  const auto* m = measurements_of(worker_id);
  return m && m->count(study_day) > 0;
}

const std::vector<BonusRecord>* StudyStore::bonuses_of(
    const std::string& worker_id) const {
  auto it = bonuses_.find(worker_id);
  return it == bonuses_.end() ? nullptr : &it->second;
}

const ScheduledNotification* StudyStore::find_notification(
    const std::string& id) const {
  auto it = notifications_.find(id);
  return it == notifications_.end() ? nullptr : &it->second;
}

std::vector<const ScheduledNotification*> StudyStore::pending_for_worker_day(
    const std::string& worker_id, LocalDay day) const {
  std::vector<const ScheduledNotification*> out;
  for (const auto& [id, n] : notifications_) {
    if (n.worker_id == worker_id && n.local_day == day &&
        n.status == NotificationStatus::Pending) {
      out.push_back(&n);
    }
  }
  return out;
}

std::optional<std::string> StudyStore::assignment_decision(
    const std::string& assignment_id) const {
  auto it = assignment_decisions_.find(assignment_id);
  if (it == assignment_decisions_.end()) return std::nullopt;
  return it->second;
}

std::string StudyStore::assignment_of(const std::string& worker_id) const {
  auto it = assignment_of_worker_.find(worker_id);
  if (it == assignment_of_worker_.end()) {
    fail(Err::UnknownWorker, "no assignment for worker " + worker_id);
  }
  return it->second;
}

Participant StudyStore::provisional_for(const StudyEvent& e) const {
  // EnrollmentApproved/Rejected act on a worker that may have no record yet
  // (or only a Rejected one from an earlier attempt, which a retry replaces).
  Participant p;
  p.worker_id = e.worker_id;
  p.state = LifecycleState::CodeIssued;
  if (e.kind == EventKind::EnrollmentApproved) {
    const PendingEnrollment* pe =
        find_code(e.payload.at("code").get<std::string>());
    if (pe) {
      p.device_id = pe->device_id;
      p.timezone = pe->timezone;
      p.demographics = pe->demographics;
      p.consent = pe->consent;
    }
  }
  return p;
}

void StudyStore::validate(const StudyEvent& e) const {
  if (e.seq != 0 && e.seq <= last_seq_) {
    fail(Err::ValidationError,
         "event seq " + std::to_string(e.seq) + " not ahead of store head " +
             std::to_string(last_seq_));
  }

  switch (e.kind) {
    case EventKind::CodeIssued: {
      const std::string code = e.payload.at("code").get<std::string>();
      if (codes_.count(code)) {
        fail(Err::ValidationError, "verification code reuse: " + code);
      }
      const std::string device = e.payload.at("device_id").get<std::string>();
      if (worker_of_device_.count(device)) {
        fail(Err::ValidationError,
             "device already associated with a worker: " + device);
      }
      ConsentRecord consent = consent_from_json(e.payload.at("consent"));
      if (!consent.complete()) {
        fail(Err::ConsentIncomplete, "consent toggles incomplete");
      }
      demographics_from_json(e.payload.at("demographics")).validate();
      return;
    }

    case EventKind::EnrollmentApproved: {
      const std::string code = e.payload.at("code").get<std::string>();
      const PendingEnrollment* pe = find_code(code);
      if (!pe) fail(Err::ValidationError, "unknown code: " + code);
      if (pe->consumed) {
        fail(Err::ValidationError, "code already consumed: " + code);
      }
      if (e.at > pe->expires_at) {
        fail(Err::ValidationError, "code expired: " + code);
      }
      const Participant* existing = find_participant(e.worker_id);
      if (existing && existing->state != LifecycleState::Rejected) {
        fail(Err::IllegalTransition,
             "worker already enrolled: " + e.worker_id);
      }
      if (device_of_worker_.count(e.worker_id)) {
        fail(Err::ValidationError,
             "worker already associated with a device: " + e.worker_id);
      }
      if (worker_of_device_.count(pe->device_id)) {
        fail(Err::ValidationError,
             "device already associated with a worker: " + pe->device_id);
      }
      const std::string asg =
          e.payload.at("assignment_id").get<std::string>();
      if (assignment_decisions_.count(asg)) {
        fail(Err::AlreadyResolved, "assignment already decided: " + asg);
      }
      config_.scheme(e.payload.at("scheme_id").get<std::string>());
      transition(config_, provisional_for(e), e);
      return;
    }

    case EventKind::EnrollmentRejected: {
      const std::string asg =
          e.payload.at("assignment_id").get<std::string>();
      if (assignment_decisions_.count(asg)) {
        fail(Err::AlreadyResolved, "assignment already decided: " + asg);
      }
      // An enrolled worker replaying a code on a fresh assignment gets that
      // assignment rejected without their participant record changing, so
      // no transition check in that case.
      const Participant* existing = find_participant(e.worker_id);
      if (!existing || existing->state == LifecycleState::Rejected) {
        transition(config_, provisional_for(e), e);
      }
      return;
    }

    case EventKind::MeasurementSubmitted: {
      const Participant& p = participant(e.worker_id);
      int day = e.payload.at("study_day").get<int>();
      if (day < 1 || day > config_.duration_days) {
        fail(Err::OutOfWindow, "study_day " + std::to_string(day));
      }
      bool enrollment = e.payload.value("enrollment", false);
      if (enrollment && day != 1) {
        fail(Err::ValidationError, "enrollment measurement must be day 1");
      }
      const auto* existing = measurements_of(e.worker_id);
      if (existing && !existing->empty()) {
        int last_day = existing->rbegin()->first;
        if (day <= last_day) {
          fail(Err::DuplicateDay,
               "study_day " + std::to_string(day) + " not after day " +
                   std::to_string(last_day) + " for " + e.worker_id);
        }
      }
      transition(config_, p, e);
      return;
    }

    case EventKind::BonusPaid: {
      const Participant& p = participant(e.worker_id);
      const std::string key =
          e.payload.at("idempotency_key").get<std::string>();
      if (paid_keys_.count(key)) {
        fail(Err::ValidationError, "bonus already recorded: " + key);
      }
      int day = e.payload.at("study_day").get<int>();
      if (!has_measurement(e.worker_id, day)) {
        fail(Err::ValidationError,
             "bonus without measurement: day " + std::to_string(day));
      }
      transition(config_, p, e);
      return;
    }

    case EventKind::NotificationScheduled: {
      const Participant& p = participant(e.worker_id);
      const std::string id =
          e.payload.at("notification_id").get<std::string>();
      if (notifications_.count(id)) {
        fail(Err::ValidationError, "notification id reuse: " + id);
      }
      notification_number(id);  // must parse
      notification_kind_from_name(e.payload.at("kind").get<std::string>());
      transition(config_, p, e);
      return;
    }

    case EventKind::NotificationSent:
    case EventKind::NotificationCancelled: {
      const Participant& p = participant(e.worker_id);
      const std::string id =
          e.payload.at("notification_id").get<std::string>();
      const ScheduledNotification* n = find_notification(id);
      if (!n) fail(Err::ValidationError, "unknown notification: " + id);
      if (n->worker_id != e.worker_id) {
        fail(Err::ValidationError, "notification " + id + " not for worker");
      }
      if (n->status != NotificationStatus::Pending) {
        fail(Err::ValidationError, "notification already resolved: " + id);
      }
      transition(config_, p, e);
      return;
    }

    case EventKind::StudyEnded: {
      transition(config_, participant(e.worker_id), e);
      return;
    }
  }
  fail(Err::ValidationError, "unhandled event kind");
}

void StudyStore::apply(const StudyEvent& e) {
  validate(e);
  switch (e.kind) {
    case EventKind::CodeIssued: apply_code_issued(e); break;
    case EventKind::EnrollmentApproved: apply_enrollment_approved(e); break;
    case EventKind::EnrollmentRejected: apply_enrollment_rejected(e); break;
    case EventKind::MeasurementSubmitted: apply_measurement_submitted(e); break;
    case EventKind::BonusPaid: apply_bonus_paid(e); break;
    case EventKind::NotificationScheduled:
      apply_notification_scheduled(e);
      break;
    case EventKind::NotificationSent: apply_notification_sent(e); break;
    case EventKind::NotificationCancelled:
      apply_notification_cancelled(e);
      break;
    case EventKind::StudyEnded: apply_study_ended(e); break;
  }
  if (e.seq != 0) last_seq_ = e.seq;
}

void StudyStore::apply_code_issued(const StudyEvent& e) {
  PendingEnrollment pe;
  pe.device_id = e.payload.at("device_id").get<std::string>();
  pe.code = e.payload.at("code").get<std::string>();
  pe.issued_at = e.at;
  pe.expires_at = parse_utc(e.payload.at("expires_at").get<std::string>());
  pe.timezone = e.payload.at("timezone").get<std::string>();
  pe.device_model = e.payload.at("device_model").get<std::string>();
  pe.demographics = demographics_from_json(e.payload.at("demographics"));
  pe.consent = consent_from_json(e.payload.at("consent"));
  pe.first_measurement =
      measurement_from_json(e.payload.at("first_measurement"));
  codes_[pe.code] = pe;
  active_code_of_device_[pe.device_id] = pe.code;
}

void StudyStore::apply_enrollment_approved(const StudyEvent& e) {
  Participant p = transition(config_, provisional_for(e), e);
  const std::string code = e.payload.at("code").get<std::string>();
  PendingEnrollment& pe = codes_.at(code);
  pe.consumed = true;
  pe.consumed_by = e.worker_id;
  p.device_id = pe.device_id;
  p.timezone = pe.timezone;
  p.demographics = pe.demographics;
  p.consent = pe.consent;
  participants_[e.worker_id] = p;
  device_of_worker_[e.worker_id] = pe.device_id;
  worker_of_device_[pe.device_id] = e.worker_id;
  const std::string asg = e.payload.at("assignment_id").get<std::string>();
  assignment_decisions_[asg] = "Approved";
  assignment_of_worker_[e.worker_id] = asg;
}

void StudyStore::apply_enrollment_rejected(const StudyEvent& e) {
  const Participant* existing = find_participant(e.worker_id);
  if (!existing || existing->state == LifecycleState::Rejected) {
    participants_[e.worker_id] = transition(config_, provisional_for(e), e);
  }
  const std::string asg = e.payload.at("assignment_id").get<std::string>();
  assignment_decisions_[asg] = "Rejected";
}

void StudyStore::apply_measurement_submitted(const StudyEvent& e) {
  Participant& p = participants_.at(e.worker_id);
  p = transition(config_, p, e);
  MeasurementRecord m;
  m.worker_id = e.worker_id;
  m.study_day = e.payload.at("study_day").get<int>();
  m.submitted_at = e.at;
  m.local_time_of_day =
      std::chrono::seconds(e.payload.at("local_tod").get<long>());
  m.scroll_rounds = rounds_from_json(e.payload.at("scroll_rounds"));
  m.swipe_rounds = rounds_from_json(e.payload.at("swipe_rounds"));
  m.bonus_paid = e.payload.at("bonus_cents").get<Cents>();
  m.duration_seconds = e.payload.at("duration_seconds").get<int>();
  measurements_[e.worker_id][m.study_day] = m;
}

void StudyStore::apply_bonus_paid(const StudyEvent& e) {
  Participant& p = participants_.at(e.worker_id);
  p = transition(config_, p, e);
  BonusRecord b;
  b.study_day = e.payload.at("study_day").get<int>();
  b.amount = e.payload.at("amount_cents").get<Cents>();
  b.idempotency_key = e.payload.at("idempotency_key").get<std::string>();
  b.receipt = e.payload.at("receipt").get<std::string>();
  b.at = e.at;
  bonuses_[e.worker_id].push_back(b);
  paid_keys_.insert(b.idempotency_key);
}

void StudyStore::apply_notification_scheduled(const StudyEvent& e) {
  Participant& p = participants_.at(e.worker_id);
  p = transition(config_, p, e);
  ScheduledNotification n;
  n.id = e.payload.at("notification_id").get<std::string>();
  n.worker_id = e.worker_id;
  n.kind = notification_kind_from_name(e.payload.at("kind").get<std::string>());
  n.fire_at = parse_utc(e.payload.at("fire_at").get<std::string>());
  n.local_day = parse_local_day(e.payload.at("local_day").get<std::string>());
  n.status = NotificationStatus::Pending;
  notifications_[n.id] = n;
  pending_by_time_.insert({n.fire_at, n.id});
  max_notification_number_ =
      std::max(max_notification_number_, notification_number(n.id));
}

void StudyStore::resolve_notification(const std::string& id,
                                      NotificationStatus status,
                                      bool delivered, int attempts) {
  ScheduledNotification& n = notifications_.at(id);
  pending_by_time_.erase({n.fire_at, n.id});
  n.status = status;
  n.delivered = delivered;
  n.attempts = attempts;
}

void StudyStore::apply_notification_sent(const StudyEvent& e) {
  Participant& p = participants_.at(e.worker_id);
  p = transition(config_, p, e);
  resolve_notification(e.payload.at("notification_id").get<std::string>(),
                       NotificationStatus::Sent,
                       e.payload.at("delivered").get<bool>(),
                       e.payload.at("attempts").get<int>());
}

void StudyStore::apply_notification_cancelled(const StudyEvent& e) {
  Participant& p = participants_.at(e.worker_id);
  p = transition(config_, p, e);
  bool suppressed = e.payload.value("suppressed", false);
  resolve_notification(e.payload.at("notification_id").get<std::string>(),
                       suppressed ? NotificationStatus::Suppressed
                                  : NotificationStatus::Cancelled,
                       false, e.payload.value("attempts", 0));
}

void StudyStore::apply_study_ended(const StudyEvent& e) {
  Participant& p = participants_.at(e.worker_id);
  p = transition(config_, p, e);
}

json StudyStore::to_json() const {
  json j;
  j["last_seq"] = last_seq_;
  j["max_notification_number"] = max_notification_number_;

  json parts = json::object();
  for (const auto& [id, p] : participants_) parts[id] = participant_to_json(p);
  j["participants"] = parts;

  json codes = json::object();
  for (const auto& [code, pe] : codes_) codes[code] = pending_to_json(pe);
  j["codes"] = codes;

  j["active_code_of_device"] = active_code_of_device_;
  j["device_of_worker"] = device_of_worker_;
  j["worker_of_device"] = worker_of_device_;

  json meas = json::object();
  for (const auto& [w, by_day] : measurements_) {
    json arr = json::array();
    for (const auto& [day, m] : by_day) arr.push_back(measurement_to_json(m));
    meas[w] = arr;
  }
  j["measurements"] = meas;

  json bon = json::object();
  for (const auto& [w, list] : bonuses_) {
    json arr = json::array();
    for (const auto& b : list) arr.push_back(bonus_to_json(b));
    bon[w] = arr;
  }
  j["bonuses"] = bon;

  json ntf = json::object();
  for (const auto& [id, n] : notifications_) ntf[id] = notification_to_json(n);
  j["notifications"] = ntf;

  j["assignment_decisions"] = assignment_decisions_;
  j["assignment_of_worker"] = assignment_of_worker_;
  return j;
}

StudyStore StudyStore::from_json(StudyConfig config, const json& j) {
  StudyStore s(std::move(config));
  s.last_seq_ = j.at("last_seq").get<std::uint64_t>();
  s.max_notification_number_ =
      j.at("max_notification_number").get<std::uint64_t>();
  for (const auto& [id, pj] : j.at("participants").items()) {
    s.participants_[id] = participant_from_json(pj);
  }
  for (const auto& [code, pj] : j.at("codes").items()) {
    s.codes_[code] = pending_from_json(pj);
  }
  s.active_code_of_device_ =
      j.at("active_code_of_device")
          .get<std::map<std::string, std::string>>();
  s.device_of_worker_ =
      j.at("device_of_worker").get<std::map<std::string, std::string>>();
  s.worker_of_device_ =
      j.at("worker_of_device").get<std::map<std::string, std::string>>();
  for (const auto& [w, arr] : j.at("measurements").items()) {
    for (const auto& mj : arr) {
      MeasurementRecord m = measurement_from_json(mj);
      s.measurements_[w][m.study_day] = m;
    }
  }
  for (const auto& [w, arr] : j.at("bonuses").items()) {
    for (const auto& bj : arr) {
      BonusRecord b = bonus_from_json(bj);
      s.bonuses_[w].push_back(b);
      s.paid_keys_.insert(b.idempotency_key);
    }
  }
  for (const auto& [id, nj] : j.at("notifications").items()) {
    ScheduledNotification n = notification_from_json(nj);
    s.notifications_[id] = n;
    if (n.status == NotificationStatus::Pending) {
      s.pending_by_time_.insert({n.fire_at, n.id});
    }
  }
  s.assignment_decisions_ =
      j.at("assignment_decisions").get<std::map<std::string, std::string>>();
  s.assignment_of_worker_ =
      j.at("assignment_of_worker").get<std::map<std::string, std::string>>();
  return s;
}

StudyEvent record_event(StudyStore& store, EventLog& log, StudyEvent e) {
  store.validate(e);
  StudyEvent written = log.append(std::move(e));
  store.apply(written);
  return written;
}

StudyStore replay(const StudyConfig& config, EventLog& log) {
  StudyStore store = log.load_snapshot()
                         ? StudyStore::from_json(config,
                                                 log.load_snapshot()->state)
                         : StudyStore(config);
  for (const StudyEvent& e : log.read_tail()) store.apply(e);
  return store;
}

}  // namespace dailystudy
