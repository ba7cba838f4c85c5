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

#include "dailystudy/gateway.hpp"

#include <sstream>

#include "dailystudy/errors.hpp"

namespace dailystudy {

const char* ledger_kind_name(LedgerKind k) {
  switch (k) {
    case LedgerKind::HitPayment: return "HitPayment";
    case LedgerKind::Bonus: return "Bonus";
    case LedgerKind::SurveyPayment: return "SurveyPayment";
  }
  return "?";
}

void MockCrowdGateway::maybe_fail(const std::string& op) {
  if (failure_rate_ <= 0.0) return;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(failure_rng_) < failure_rate_) {
    fail(Err::GatewayError, "simulated transient failure in " + op);
  }
}

void MockCrowdGateway::set_failure(double rate, std::uint64_t seed) {
  std::lock_guard<std::mutex> lock(mu_);
  failure_rate_ = rate;
  failure_rng_.seed(seed);
}

std::string MockCrowdGateway::publish_hit(const std::string& title,
                                          const std::string& description,
                                          Cents reward) {
  std::lock_guard<std::mutex> lock(mu_);
  maybe_fail("publish_hit");
  if (enrollment_titles_.count(title)) {
    fail(Err::DuplicateHit, "enrollment HIT already published: " + title);
  }
  if (description.empty()) {
    fail(Err::ValidationError, "HIT description required");
  }
  std::string id = "hit-" + std::to_string(next_hit_++);
  enrollment_titles_.insert(title);
  hit_titles_[id] = title;
  hit_rewards_[id] = reward;
  return id;
}

std::string MockCrowdGateway::submit_assignment(const std::string& hit_id,
                                                const std::string& worker_id) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!hit_titles_.count(hit_id)) {
    fail(Err::UnknownAssignment, "no such HIT: " + hit_id);
  }
  Assignment a;
  a.id = "asg-" + std::to_string(next_assignment_++);
  a.hit_id = hit_id;
  a.worker_id = worker_id;
  assignments_[a.id] = a;
  return a.id;
}

std::string MockCrowdGateway::send_bonus(const std::string& worker_id,
                                         Cents amount,
                                         const std::string& reason,
                                         const std::string& idempotency_key) {
  std::lock_guard<std::mutex> lock(mu_);
  maybe_fail("send_bonus");
  auto it = receipts_.find(idempotency_key);
  if (it != receipts_.end()) return it->second;
  if (!approved_workers_.count(worker_id)) {
    fail(Err::UnknownWorker,
         "no approved assignment for worker " + worker_id);
  }
  if (amount <= 0) fail(Err::ValidationError, "bonus amount must be > 0");
  LedgerEntry entry;
  entry.worker_id = worker_id;
  entry.kind = LedgerKind::Bonus;
  entry.amount = amount;
  entry.reason = reason;
  entry.at = clock_->now();
  entry.idempotency_key = idempotency_key;
  ledger_.push_back(entry);
  std::string receipt = "rcpt-" + std::to_string(next_receipt_++);
  receipts_[idempotency_key] = receipt;
  return receipt;
}

void MockCrowdGateway::approve_assignment(const std::string& assignment_id) {
  std::lock_guard<std::mutex> lock(mu_);
  maybe_fail("approve_assignment");
  auto it = assignments_.find(assignment_id);
  if (it == assignments_.end()) {
    fail(Err::UnknownAssignment, "no such assignment: " + assignment_id);
  }
  if (it->second.state != AssignmentState::Submitted) {
    fail(Err::AlreadyResolved, "assignment already resolved: " + assignment_id);
  }
  it->second.state = AssignmentState::Approved;
  approved_workers_.insert(it->second.worker_id);
  LedgerEntry entry;
  entry.worker_id = it->second.worker_id;
  entry.kind = LedgerKind::HitPayment;
  entry.amount = hit_rewards_.at(it->second.hit_id);
  entry.reason = "enrollment HIT approval";
  entry.at = clock_->now();
  entry.idempotency_key = "hitpay/" + assignment_id;
  ledger_.push_back(entry);
}

void MockCrowdGateway::reject_assignment(const std::string& assignment_id,
                                         const std::string& feedback) {
  std::lock_guard<std::mutex> lock(mu_);
  maybe_fail("reject_assignment");
  auto it = assignments_.find(assignment_id);
  if (it == assignments_.end()) {
    fail(Err::UnknownAssignment, "no such assignment: " + assignment_id);
  }
  if (it->second.state != AssignmentState::Submitted) {
    fail(Err::AlreadyResolved, "assignment already resolved: " + assignment_id);
  }
  it->second.state = AssignmentState::Rejected;
  it->second.feedback = feedback;
}

void MockCrowdGateway::create_qualification(const std::string& name) {
  std::lock_guard<std::mutex> lock(mu_);
  maybe_fail("create_qualification");
  quals_[name];  // idempotent create
}

void MockCrowdGateway::grant_qualification(const std::string& name,
                                           const std::string& worker_id) {
  std::lock_guard<std::mutex> lock(mu_);
  maybe_fail("grant_qualification");
  auto it = quals_.find(name);
  if (it == quals_.end()) {
    fail(Err::UnknownQualification, "no such qualification: " + name);
  }
  it->second.insert(worker_id);
}

std::string MockCrowdGateway::publish_survey_hit(
    const std::string& qualification, Cents reward) {
  std::lock_guard<std::mutex> lock(mu_);
  maybe_fail("publish_survey_hit");
  if (!quals_.count(qualification)) {
    fail(Err::UnknownQualification, "no such qualification: " + qualification);
  }
  std::string id = "hit-" + std::to_string(next_hit_++);
  hit_titles_[id] = "feedback survey";
  hit_rewards_[id] = reward;
  survey_quals_[id] = qualification;
  survey_hit_ids_.push_back(id);
  return id;
}

void MockCrowdGateway::complete_survey(const std::string& hit_id,
                                       const std::string& worker_id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = survey_quals_.find(hit_id);
  if (it == survey_quals_.end()) {
    fail(Err::UnknownAssignment, "no such survey HIT: " + hit_id);
  }
  if (!quals_.at(it->second).count(worker_id)) {
    fail(Err::UnknownQualification,
         "worker " + worker_id + " lacks qualification " + it->second);
  }
  std::string key = hit_id + "/" + worker_id;
  if (!survey_completed_.insert(key).second) return;  // already paid
  LedgerEntry entry;
  entry.worker_id = worker_id;
  entry.kind = LedgerKind::SurveyPayment;
  entry.amount = hit_rewards_.at(hit_id);
  entry.reason = "survey completion";
  entry.at = clock_->now();
  entry.idempotency_key = "survey/" + key;
  ledger_.push_back(entry);
}

Cents MockCrowdGateway::ledger_total(const std::string& worker_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  Cents total = 0;
  for (const auto& e : ledger_) {
    if (e.worker_id == worker_id) total += e.amount;
  }
  return total;
}

Cents MockCrowdGateway::ledger_total(const std::string& worker_id,
                                     LedgerKind kind) const {
  std::lock_guard<std::mutex> lock(mu_);
  Cents total = 0;
  for (const auto& e : ledger_) {
    if (e.worker_id == worker_id && e.kind == kind) total += e.amount;
  }
  return total;
}

const Assignment* MockCrowdGateway::find_assignment(
    const std::string& assignment_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = assignments_.find(assignment_id);
  return it == assignments_.end() ? nullptr : &it->second;
}

const std::set<std::string>& MockCrowdGateway::qualification_holders(
    const std::string& name) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = quals_.find(name);
  if (it == quals_.end()) {
    fail(Err::UnknownQualification, "no such qualification: " + name);
  }
  return it->second;
}

std::string MockCrowdGateway::ledger_csv() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::ostringstream out;
  out << "worker_id,kind,amount_cents,at,reason\n";
  for (const auto& e : ledger_) {
    out << e.worker_id << ',' << ledger_kind_name(e.kind) << ',' << e.amount
        << ',' << format_utc(e.at) << ',' << e.reason << '\n';
  }
  return out.str();
}

bool MockPushGateway::send(const std::string& device_id,
                           const std::string& message) {
  std::lock_guard<std::mutex> lock(mu_);
  if (failure_rate_ > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(failure_rng_) < failure_rate_) return false;
  }
  PushRecord rec;
  rec.device_id = device_id;
  rec.message = message;
  rec.at = clock_->now();
  sends_.push_back(rec);
  return true;
}

void MockPushGateway::set_failure(double rate, std::uint64_t seed) {
  std::lock_guard<std::mutex> lock(mu_);
  failure_rate_ = rate;
  failure_rng_.seed(seed);
}

}  // namespace dailystudy
