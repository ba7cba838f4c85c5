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

#ifndef DAILYSTUDY_SERVICE_HPP_
#define DAILYSTUDY_SERVICE_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "dailystudy/clock.hpp"
#include "dailystudy/domain.hpp"
#include "dailystudy/gateway.hpp"
#include "dailystudy/measurements.hpp"
#include "dailystudy/notifications.hpp"
#include "dailystudy/payments.hpp"
#include "dailystudy/store.hpp"

namespace dailystudy {

// Client payload for POST /enroll/start.
struct EnrollmentStart {
  std::string device_id;
  std::string device_model;
  std::string timezone;
  Demographics demographics;
  ConsentRecord consent;
};

// Client payload for POST /enroll/measurement and POST /measurement.
struct MeasurementPayload {
  std::vector<RoundResult> scroll_rounds;
  std::vector<RoundResult> swipe_rounds;
  int duration_seconds = 0;
};

struct SubmitResult {
  int study_day = 0;
  Cents bonus = 0;
  PayQuote quote;
};

struct ServiceOptions {
  // Seed for verification-code generation; 0 draws one from the system.
  std::uint64_t code_seed = 0;
  std::string hit_title = "Daily phone-use study: 31 days of 4-minute tasks";
  std::string rejection_feedback =
      "The verification code was invalid, expired, or already used.";
  // Maps worker_id to a scheme id at approval; default cycles through the
  // configured schemes in order.
  std::function<std::string(const std::string&)> scheme_allocator;
};

// The orchestration core: ties the store, event log, gateways, scheduler,
// and clock together. All public methods are serialized by one mutex; the
// spec only requires per-worker serialization, so a single lock is a
// stricter, simpler implementation of the same contract.
class StudyService {
 public:
  StudyService(StudyConfig config, EventLog& log, CrowdGateway& crowd,
               PushGateway& push, Clock& clock, ServiceOptions options = {});

  // Publishes the single enrollment HIT; title/description state the device
  // restriction. Throws DuplicateHit on a second call.
  std::string publish_enrollment_hit();
  const std::string& hit_id() const { return hit_id_; }

  // Stage 1 of enrollment: consent + demographics + device checks. Staged
  // in memory only; no event until the first measurement completes.
  void start_enrollment(const EnrollmentStart& start);

  // Stage 2: first completed measurement mints the verification code
  // (CodeIssued event). Returns the code for the worker to enter on the HIT.
  std::string submit_first_measurement(const std::string& device_id,
                                       const MeasurementPayload& payload);

  // HIT-side code validation. Exactly one Approved/Rejected decision per
  // assignment, persisted before any gateway call; retries return the
  // recorded decision. Returns "Approved" or "Rejected".
  std::string validate_submission(const std::string& worker_id,
                                  const std::string& assignment_id,
                                  const std::string& submitted_code);

  // Daily submission: validates, records, pays the bonus, reschedules
  // reminders. Throws DuplicateDay/WindowExpired/InvalidMeasurement.
  SubmitResult submit_measurement(const std::string& worker_id,
                                  const MeasurementPayload& payload);

  PayQuote earnings(const std::string& worker_id) const;

  // Advances the world to the clock's current time: expires windows,
  // retries outstanding gateway calls, dispatches due reminders. Returns
  // ids of notifications sent this tick.
  std::vector<std::string> tick();

  // Re-enqueues gateway work implied by the store (approvals and bonuses
  // whose confirmations are missing). Called from the constructor; gateway
  // idempotency makes repeats harmless.
  void reconcile();

  const StudyStore& store() const { return store_; }
  StudyStore& store() { return store_; }
  int pending_gateway_ops() const;

 private:
  struct PendingOp {
    enum class Kind { Approve, Reject, Bonus } kind;
    std::string worker_id;
    std::string assignment_id;  // approve/reject
    std::string feedback;       // reject
    int study_day = 0;          // bonus
    Cents amount = 0;           // bonus
    std::string idempotency_key;
  };

  std::string generate_code();
  void push_expiry_watch(const std::string& worker_id);
  void expire_due_windows(UtcTime now);
  void watch_missed_days(UtcTime now);
  void drain_gateway_ops();
  void attempt_op(const PendingOp& op);
  void record_day_one_measurement(const std::string& worker_id,
                                  const PendingEnrollment& pe, UtcTime now);
  void cancel_all_pending(const std::string& worker_id);

  StudyConfig config_;
  EventLog& log_;
  CrowdGateway& crowd_;
  PushGateway& push_;
  Clock& clock_;
  ServiceOptions options_;
  StudyStore store_;
  NotificationScheduler scheduler_;
  mutable std::mutex mu_;

  std::string hit_id_;
  std::map<std::string, EnrollmentStart> staged_;  // by device_id
  std::mt19937_64 code_rng_;
  std::size_t next_scheme_ = 0;

  // (fire_at, worker_id) min-heaps, runtime-only: rebuilt by reconcile().
  using TimedEntry = std::pair<UtcTime, std::string>;
  std::priority_queue<TimedEntry, std::vector<TimedEntry>,
                      std::greater<TimedEntry>>
      expiry_heap_;
  std::priority_queue<TimedEntry, std::vector<TimedEntry>,
                      std::greater<TimedEntry>>
      midnight_heap_;  // reengagement watches
  std::deque<PendingOp> gateway_ops_;
};

}  // namespace dailystudy

#endif  // DAILYSTUDY_SERVICE_HPP_
