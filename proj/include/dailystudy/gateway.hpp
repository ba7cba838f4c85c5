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

#ifndef DAILYSTUDY_GATEWAY_HPP_
#define DAILYSTUDY_GATEWAY_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dailystudy/clock.hpp"
#include "dailystudy/payments.hpp"
#include "dailystudy/timeutil.hpp"

namespace dailystudy {

enum class AssignmentState { Submitted, Approved, Rejected };

struct Assignment {
  std::string id;
  std::string hit_id;
  std::string worker_id;
  AssignmentState state = AssignmentState::Submitted;
  std::string feedback;  // rejection feedback, if any
};

enum class LedgerKind { HitPayment, Bonus, SurveyPayment };

const char* ledger_kind_name(LedgerKind k);

struct LedgerEntry {
  std::string worker_id;
  LedgerKind kind = LedgerKind::Bonus;
  Cents amount = 0;
  std::string reason;
  UtcTime at{};
  std::string idempotency_key;
};

// Narrow interface to the crowd-work platform. The mock below is the only
// implementation shipped; a real platform client would sit behind the same
// contract.
class CrowdGateway {
 public:
  virtual ~CrowdGateway() = default;

  // Publishes the single enrollment HIT. Throws DuplicateHit when a HIT with
  // the same title already exists (one enrollment HIT per study).
  virtual std::string publish_hit(const std::string& title,
                                  const std::string& description,
                                  Cents reward) = 0;

  // Pays a bonus against the worker's approved assignment. Exactly one
  // ledger entry is created per idempotency_key; retries with the same key
  // return the original receipt. Throws UnknownWorker if the worker has no
  // approved assignment.
  virtual std::string send_bonus(const std::string& worker_id, Cents amount,
                                 const std::string& reason,
                                 const std::string& idempotency_key) = 0;

  // Resolve a submitted assignment. Approval pays the HIT reward as a
  // HitPayment ledger entry. Throws AlreadyResolved on a second resolution,
  // UnknownAssignment if the id is not known.
  virtual void approve_assignment(const std::string& assignment_id) = 0;
  virtual void reject_assignment(const std::string& assignment_id,
                                 const std::string& feedback) = 0;

  virtual void create_qualification(const std::string& name) = 0;
  virtual void grant_qualification(const std::string& name,
                                   const std::string& worker_id) = 0;

  // Publishes a survey HIT visible only to workers granted `qualification`.
  // Throws UnknownQualification.
  virtual std::string publish_survey_hit(const std::string& qualification,
                                         Cents reward) = 0;
};

// In-process platform double with a money ledger and configurable transient
// failures. Failures are drawn from a seeded stream and thrown BEFORE any
// state changes, so a failed call is always safe to retry.
class MockCrowdGateway : public CrowdGateway {
 public:
  explicit MockCrowdGateway(Clock* clock) : clock_(clock) {}

  std::string publish_hit(const std::string& title,
                          const std::string& description,
                          Cents reward) override;
  std::string send_bonus(const std::string& worker_id, Cents amount,
                         const std::string& reason,
                         const std::string& idempotency_key) override;
  void approve_assignment(const std::string& assignment_id) override;
  void reject_assignment(const std::string& assignment_id,
                         const std::string& feedback) override;
  void create_qualification(const std::string& name) override;
  void grant_qualification(const std::string& name,
                           const std::string& worker_id) override;
  std::string publish_survey_hit(const std::string& qualification,
                                 Cents reward) override;

  // Worker-side actions, driven by tests and the simulator.
  std::string submit_assignment(const std::string& hit_id,
                                const std::string& worker_id);
  // Worker completes a survey HIT; pays its reward. Requires the worker to
  // hold the HIT's qualification.
  void complete_survey(const std::string& hit_id,
                       const std::string& worker_id);

  // Every mutating call fails with GatewayError with probability `rate`,
  // drawn from a stream seeded by `seed`.
  void set_failure(double rate, std::uint64_t seed);

  // Inspection.
  const std::vector<LedgerEntry>& ledger() const { return ledger_; }
  Cents ledger_total(const std::string& worker_id) const;
  Cents ledger_total(const std::string& worker_id, LedgerKind kind) const;
  const Assignment* find_assignment(const std::string& assignment_id) const;
  const std::set<std::string>& qualification_holders(
      const std::string& name) const;
  std::vector<std::string> survey_hits() const { return survey_hit_ids_; }
  // CSV: worker_id, kind, amount_cents, at, reason.
  std::string ledger_csv() const;

 private:
  void maybe_fail(const std::string& op);

  Clock* clock_;
  mutable std::mutex mu_;
  double failure_rate_ = 0.0;
  std::mt19937_64 failure_rng_{0};

  int next_hit_ = 1;
  int next_assignment_ = 1;
  int next_receipt_ = 1;
  std::map<std::string, std::string> hit_titles_;       // hit_id -> title
  std::set<std::string> enrollment_titles_;             // dedupe key
  std::map<std::string, Cents> hit_rewards_;            // hit_id -> reward
  std::map<std::string, Assignment> assignments_;       // by assignment_id
  std::set<std::string> approved_workers_;              // bonus-eligible
  std::map<std::string, std::string> receipts_;         // idem key -> receipt
  std::map<std::string, std::set<std::string>> quals_;  // name -> workers
  std::map<std::string, std::string> survey_quals_;     // hit_id -> qual
  std::vector<std::string> survey_hit_ids_;
  std::set<std::string> survey_completed_;  // hit_id + "/" + worker_id
  std::vector<LedgerEntry> ledger_;
};

// Push-notification delivery interface: true on acceptance, false on error.
class PushGateway {
 public:
  virtual ~PushGateway() = default;
  virtual bool send(const std::string& device_id,
                    const std::string& message) = 0;
};

struct PushRecord {
  std::string device_id;
  std::string message;
  UtcTime at{};
};

// Records every accepted send with its timestamp; can simulate delivery
// failure with a seeded stream (send returns false, nothing recorded).
class MockPushGateway : public PushGateway {
 public:
  explicit MockPushGateway(Clock* clock) : clock_(clock) {}

  bool send(const std::string& device_id, const std::string& message) override;

  void set_failure(double rate, std::uint64_t seed);
  const std::vector<PushRecord>& sends() const { return sends_; }

 private:
  Clock* clock_;
  std::mutex mu_;
  double failure_rate_ = 0.0;
  std::mt19937_64 failure_rng_{0};
  std::vector<PushRecord> sends_;
};

}  // namespace dailystudy

#endif  // DAILYSTUDY_GATEWAY_HPP_
