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

#include "dailystudy/service.hpp"

#include <algorithm>
#include <sstream>

#include "dailystudy/errors.hpp"
#include "dailystudy/eventlog.hpp"

namespace dailystudy {

namespace {

// Unambiguous uppercase alphanumerics: I, O, 0, 1 excluded.
constexpr char kCodeAlphabet[] = "ABCDEFGHJKLMNPQRSTUVWXYZ23456789";
constexpr int kCodeLength = 8;

std::string bonus_key(const std::string& worker_id, int study_day) {
  return worker_id + "/day-" + std::to_string(study_day);
}

}  // namespace

StudyService::StudyService(StudyConfig config, EventLog& log,
                           CrowdGateway& crowd, PushGateway& push, Clock& clock,
                           ServiceOptions options)
    : config_(std::move(config)),
      log_(log),
      crowd_(crowd),
      push_(push),
      clock_(clock),
      options_(std::move(options)),
      store_(replay(config_, log_)),
      scheduler_(store_, log_, push_, clock_) {
  std::uint64_t seed = options_.code_seed;
  if (seed == 0) seed = std::random_device{}();
  code_rng_.seed(seed);
  if (!options_.scheme_allocator) {
    options_.scheme_allocator = [this](const std::string&) {
      const auto& schemes = config_.schemes;
      return schemes[next_scheme_++ % schemes.size()].id;
    };
  }
  reconcile();
}

std::string StudyService::generate_code() {
  std::uniform_int_distribution<int> pick(0, int(sizeof(kCodeAlphabet)) - 2);
  for (;;) {
    std::string code;
    code.reserve(kCodeLength);
    for (int i = 0; i < kCodeLength; ++i) {
      code.push_back(kCodeAlphabet[pick(code_rng_)]);
    }
    if (!store_.find_code(code)) return code;  // unique across all issued
  }
}

std::string StudyService::publish_enrollment_hit() {
  std::lock_guard<std::mutex> lock(mu_);
  std::ostringstream desc;
  desc << "Install the study app and complete a 4-minute daily task for "
       << config_.duration_days
       << " days. Pays $1.00 for enrollment plus an instant bonus per daily "
          "task.";
  if (config_.allowed_device_models.empty()) {
    desc << " Requires an Android phone.";
  } else {
    desc << " Supported devices only:";
    for (const auto& m : config_.allowed_device_models) desc << ' ' << m;
    desc << '.';
  }
  hit_id_ = crowd_.publish_hit(options_.hit_title, desc.str(),
                               config_.enrollment_pay);
  return hit_id_;
}

void StudyService::start_enrollment(const EnrollmentStart& start) {
  std::lock_guard<std::mutex> lock(mu_);
  if (start.device_id.empty()) {
    fail(Err::ValidationError, "device_id required");
  }
  if (!config_.allowed_device_models.empty() &&
      std::find(config_.allowed_device_models.begin(),
                config_.allowed_device_models.end(),
                start.device_model) == config_.allowed_device_models.end()) {
    fail(Err::ValidationError,
         "unsupported device model: " + start.device_model);
  }
  TimeZone::of(start.timezone);  // throws UnknownZone
  if (!start.consent.complete()) {
    fail(Err::ConsentIncomplete, "all consent toggles must be on");
  }
  start.demographics.validate();
  if (store_.worker_of_device().count(start.device_id)) {
    fail(Err::ValidationError,
         "device already enrolled: " + start.device_id);
  }
  staged_[start.device_id] = start;
}

std::string StudyService::submit_first_measurement(
    const std::string& device_id, const MeasurementPayload& payload) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = staged_.find(device_id);
  if (it == staged_.end()) {
    fail(Err::ValidationError,
         "enrollment not started for device " + device_id);
  }
  const EnrollmentStart& start = it->second;
  if (!validate_rounds(payload.scroll_rounds, config_.required_correct_rounds) ||
      !validate_rounds(payload.swipe_rounds, config_.required_correct_rounds)) {
    fail(Err::InvalidMeasurement,
         "both sub-tasks need " +
             std::to_string(config_.required_correct_rounds) +
             " correct rounds");
  }

  UtcTime now = clock_.now();
  TimeZone tz = TimeZone::of(start.timezone);
  std::string code = generate_code();

  MeasurementRecord first;
  first.worker_id = "";  // bound at approval
  first.study_day = 1;
  first.submitted_at = now;
  first.local_time_of_day = tz.to_local(now).time_of_day;
  first.scroll_rounds = payload.scroll_rounds;
  first.swipe_rounds = payload.swipe_rounds;
  first.bonus_paid = 0;
  first.duration_seconds = payload.duration_seconds;

  StudyEvent e;
  e.at = now;
  e.kind = EventKind::CodeIssued;
  e.worker_id = "device:" + device_id;  // no worker identity yet
  e.payload = json{{"device_id", device_id},
                   {"code", code},
                   {"expires_at", format_utc(now + config_.code_ttl)},
                   {"timezone", start.timezone},
                   {"device_model", start.device_model},
                   {"demographics", demographics_to_json(start.demographics)},
                   {"consent", consent_to_json(start.consent)},
                   {"first_measurement", measurement_to_json(first)}};
  record_event(store_, log_, std::move(e));
  staged_.erase(it);
  return code;
}

void StudyService::record_day_one_measurement(const std::string& worker_id,
                                              const PendingEnrollment& pe,
                                              UtcTime now) {
  StudyEvent e;
  e.at = now;
  e.kind = EventKind::MeasurementSubmitted;
  e.worker_id = worker_id;
  e.payload = json{
      {"study_day", 1},
      {"local_tod", pe.first_measurement.local_time_of_day.count()},
      {"enrollment", true},
      {"bonus_cents", 0},
      {"duration_seconds", pe.first_measurement.duration_seconds},
      {"scroll_rounds", rounds_to_json(pe.first_measurement.scroll_rounds)},
      {"swipe_rounds", rounds_to_json(pe.first_measurement.swipe_rounds)}};
  record_event(store_, log_, std::move(e));
}

std::string StudyService::validate_submission(const std::string& worker_id,
                                              const std::string& assignment_id,
                                              const std::string& submitted_code) {
  std::lock_guard<std::mutex> lock(mu_);
  // Retries of an already-decided assignment get the recorded answer; the
  // gateway call they may have missed sits in the retry queue.
  if (auto decided = store_.assignment_decision(assignment_id)) {
    drain_gateway_ops();
    return *decided;
  }

  UtcTime now = clock_.now();
  const PendingEnrollment* pe = store_.find_code(submitted_code);
  bool valid = pe && !pe->consumed && now <= pe->expires_at &&
               !store_.device_of_worker().count(worker_id) &&
               !store_.worker_of_device().count(pe->device_id);

  if (valid) {
    std::string scheme_id = options_.scheme_allocator(worker_id);
    config_.scheme(scheme_id);  // allocator must yield a configured scheme
    StudyEvent e;
    e.at = now;
    e.kind = EventKind::EnrollmentApproved;
    e.worker_id = worker_id;
    e.payload = json{{"device_id", pe->device_id},
                     {"assignment_id", assignment_id},
                     {"code", submitted_code},
                     {"scheme_id", scheme_id},
                     {"hit_payment_cents", config_.enrollment_pay}};
    record_event(store_, log_, std::move(e));

    // Day 1 is the enrollment measurement, already completed in-app.
    record_day_one_measurement(worker_id,
                               *store_.find_code(submitted_code), now);
    scheduler_.schedule_after_submission(worker_id, now);
    push_expiry_watch(worker_id);

    PendingOp op;
    op.kind = PendingOp::Kind::Approve;
    op.worker_id = worker_id;
    op.assignment_id = assignment_id;
    gateway_ops_.push_back(op);
    drain_gateway_ops();
    return "Approved";
  }

  StudyEvent e;
  e.at = now;
  e.kind = EventKind::EnrollmentRejected;
  e.worker_id = worker_id;
  e.payload = json{{"assignment_id", assignment_id},
                   {"reason", !pe ? "unknown code"
                             : pe->consumed ? "code already used"
                                            : "code expired or mismatched"},
                   {"feedback", options_.rejection_feedback}};
  record_event(store_, log_, std::move(e));

  PendingOp op;
  op.kind = PendingOp::Kind::Reject;
  op.worker_id = worker_id;
  op.assignment_id = assignment_id;
  op.feedback = options_.rejection_feedback;
  gateway_ops_.push_back(op);
  drain_gateway_ops();
  return "Rejected";
}

SubmitResult StudyService::submit_measurement(
    const std::string& worker_id, const MeasurementPayload& payload) {
  std::lock_guard<std::mutex> lock(mu_);
  const Participant& p = store_.participant(worker_id);
  if (p.state == LifecycleState::Completed ||
      p.state == LifecycleState::Expired ||
      p.state == LifecycleState::Rejected) {
    fail(Err::IllegalTransition,
         std::string("participant is ") + state_name(p.state));
  }

  UtcTime now = clock_.now();
  int day;
  try {
    day = study_day(config_, p, now);
  } catch (const StudyError& err) {
    if (err.code() == Err::OutOfWindow) {
      fail(Err::WindowExpired, "study window has ended");
    }
    throw;
  }
  if (store_.has_measurement(worker_id, day)) {
    store_.duplicate_day_attempts += 1;
    fail(Err::DuplicateDay,
         "measurement already recorded for day " + std::to_string(day));
  }
  if (!validate_rounds(payload.scroll_rounds, config_.required_correct_rounds) ||
      !validate_rounds(payload.swipe_rounds, config_.required_correct_rounds)) {
    fail(Err::InvalidMeasurement,
         "both sub-tasks need " +
             std::to_string(config_.required_correct_rounds) +
             " correct rounds");
  }

  const PaymentScheme& scheme = config_.scheme(p.scheme_id);
  int bonus_index = p.bonus_count + 1;
  Cents amount =
      payments::bonus_amount(scheme, bonus_index, config_.pay_params());
  TimeZone tz = TimeZone::of(p.timezone);

  StudyEvent e;
  e.at = now;
  e.kind = EventKind::MeasurementSubmitted;
  e.worker_id = worker_id;
  e.payload = json{{"study_day", day},
                   {"local_tod", tz.to_local(now).time_of_day.count()},
                   {"enrollment", false},
                   {"bonus_cents", amount},
                   {"duration_seconds", payload.duration_seconds},
                   {"scroll_rounds", rounds_to_json(payload.scroll_rounds)},
                   {"swipe_rounds", rounds_to_json(payload.swipe_rounds)}};
  record_event(store_, log_, std::move(e));

  // A submission before a reminder fires makes the reminder noise.
  scheduler_.cancel_for_day(worker_id, tz.local_day(now));

  PendingOp op;
  op.kind = PendingOp::Kind::Bonus;
  op.worker_id = worker_id;
  op.study_day = day;
  op.amount = amount;
  op.idempotency_key = bonus_key(worker_id, day);
  gateway_ops_.push_back(op);
  drain_gateway_ops();

  // Next-day reminders; no-op once the worker completed the study.
  scheduler_.schedule_after_submission(worker_id, now);

  SubmitResult result;
  result.study_day = day;
  result.bonus = amount;
  result.quote = payments::quote(
      scheme, store_.participant(worker_id).bonus_count, config_.pay_params());
  return result;
}

PayQuote StudyService::earnings(const std::string& worker_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  const Participant& p = store_.participant(worker_id);
  return payments::quote(config_.scheme(p.scheme_id), p.bonus_count,
                         config_.pay_params());
}

void StudyService::push_expiry_watch(const std::string& worker_id) {
  const Participant& p = store_.participant(worker_id);
  TimeZone tz = TimeZone::of(p.timezone);
  // First instant of local day duration_days + 1.
  LocalDay end_day = tz.local_day(p.enrolled_at) +
                     std::chrono::days{config_.duration_days};
  expiry_heap_.push({tz.at_local(end_day, std::chrono::minutes{0}), worker_id});
  if (config_.reengagement_enabled) {
    LocalDay next = tz.local_day(p.enrolled_at) + std::chrono::days{1};
    midnight_heap_.push(
        {tz.at_local(next, std::chrono::minutes{0}), worker_id});
  }
}

void StudyService::cancel_all_pending(const std::string& worker_id) {
  std::vector<std::string> ids;
  for (const auto& [id, n] : store_.notifications()) {
    if (n.worker_id == worker_id && n.status == NotificationStatus::Pending) {
      ids.push_back(id);
    }
  }
  for (const std::string& id : ids) {
    StudyEvent e;
    e.at = clock_.now();
    e.kind = EventKind::NotificationCancelled;
    e.worker_id = worker_id;
    e.payload =
        json{{"notification_id", id}, {"suppressed", false}, {"attempts", 0}};
    record_event(store_, log_, std::move(e));
  }
}

void StudyService::expire_due_windows(UtcTime now) {
  while (!expiry_heap_.empty() && expiry_heap_.top().first <= now) {
    std::string worker_id = expiry_heap_.top().second;
    expiry_heap_.pop();
    const Participant* p = store_.find_participant(worker_id);
    if (!p || (p->state != LifecycleState::Enrolled &&
               p->state != LifecycleState::Active)) {
      continue;  // already terminal
    }
    StudyEvent e;
    e.at = now;
    e.kind = EventKind::StudyEnded;
    e.worker_id = worker_id;
    e.payload = json::object();
    record_event(store_, log_, std::move(e));
    cancel_all_pending(worker_id);
  }
}

void StudyService::watch_missed_days(UtcTime now) {
  while (!midnight_heap_.empty() && midnight_heap_.top().first <= now) {
    auto [at, worker_id] = midnight_heap_.top();
    midnight_heap_.pop();
    const Participant* p = store_.find_participant(worker_id);
    if (!p || (p->state != LifecycleState::Enrolled &&
               p->state != LifecycleState::Active)) {
      continue;
    }
    TimeZone tz = TimeZone::of(p->timezone);
    LocalDay ended_day = tz.local_day(at) - std::chrono::days{1};
    int day_index = raw_study_day(*p, at - std::chrono::seconds{1});
    bool had_any = store_.measurements_of(worker_id) &&
                   !store_.measurements_of(worker_id)->empty();
    if (had_any && day_index >= 1 && day_index <= config_.duration_days &&
        !store_.has_measurement(worker_id, day_index)) {
      scheduler_.schedule_reengagement(worker_id, ended_day);
    }
    LocalDay next = tz.local_day(at) + std::chrono::days{1};
    midnight_heap_.push({tz.at_local(next, std::chrono::minutes{0}),
                         worker_id});
  }
}

void StudyService::attempt_op(const PendingOp& op) {
  switch (op.kind) {
    case PendingOp::Kind::Approve:
      try {
        crowd_.approve_assignment(op.assignment_id);
      } catch (const StudyError& err) {
        // A retry after a success that we never saw acknowledged.
        if (err.code() != Err::AlreadyResolved) throw;
      }
      return;
    case PendingOp::Kind::Reject:
      try {
        crowd_.reject_assignment(op.assignment_id, op.feedback);
      } catch (const StudyError& err) {
        if (err.code() != Err::AlreadyResolved) throw;
      }
      return;
    case PendingOp::Kind::Bonus: {
      if (store_.bonus_paid(op.idempotency_key)) return;  // confirmed already
      std::string receipt =
          crowd_.send_bonus(op.worker_id, op.amount,
                            "daily measurement, day " +
                                std::to_string(op.study_day),
                            op.idempotency_key);
      StudyEvent e;
      e.at = clock_.now();
      e.kind = EventKind::BonusPaid;
      e.worker_id = op.worker_id;
      e.payload = json{{"study_day", op.study_day},
                       {"amount_cents", op.amount},
                       {"idempotency_key", op.idempotency_key},
                       {"receipt", receipt}};
      record_event(store_, log_, std::move(e));
      return;
    }
  }
}

void StudyService::drain_gateway_ops() {
  std::size_t n = gateway_ops_.size();
  for (std::size_t i = 0; i < n; ++i) {
    PendingOp op = gateway_ops_.front();
    gateway_ops_.pop_front();
    try {
      attempt_op(op);
    } catch (const StudyError& err) {
      if (err.code() == Err::GatewayError) {
        gateway_ops_.push_back(op);  // transient: retry on a later tick
      } else {
        throw;
      }
    }
  }
}

std::vector<std::string> StudyService::tick() {
  std::lock_guard<std::mutex> lock(mu_);
  UtcTime now = clock_.now();
  expire_due_windows(now);
  if (config_.reengagement_enabled) watch_missed_days(now);
  drain_gateway_ops();
  return scheduler_.tick(now);
}

void StudyService::reconcile() {
  // Approvals: re-assert every approved assignment; AlreadyResolved makes
  // repeats free. Bonuses: any measurement without a confirmation still owes
  // its payment.
  for (const auto& [worker_id, p] : store_.participants()) {
    if (p.state == LifecycleState::Rejected) continue;
    PendingOp op;
    op.kind = PendingOp::Kind::Approve;
    op.worker_id = worker_id;
    op.assignment_id = store_.assignment_of(worker_id);
    gateway_ops_.push_back(op);

    const auto* by_day = store_.measurements_of(worker_id);
    if (by_day) {
      for (const auto& [day, m] : *by_day) {
        if (m.bonus_paid <= 0) continue;  // enrollment measurement
        std::string key = bonus_key(worker_id, day);
        if (store_.bonus_paid(key)) continue;
        PendingOp bonus;
        bonus.kind = PendingOp::Kind::Bonus;
        bonus.worker_id = worker_id;
        bonus.study_day = day;
        bonus.amount = m.bonus_paid;
        bonus.idempotency_key = key;
        gateway_ops_.push_back(bonus);
      }
    }
    if (p.state == LifecycleState::Enrolled ||
        p.state == LifecycleState::Active) {
      push_expiry_watch(worker_id);
    }
  }
}

int StudyService::pending_gateway_ops() const {
  std::lock_guard<std::mutex> lock(mu_);
  return int(gateway_ops_.size());
}

}  // namespace dailystudy
