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

#ifndef DAILYSTUDY_SIMULATOR_HPP_
#define DAILYSTUDY_SIMULATOR_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dailystudy/domain.hpp"
#include "dailystudy/payments.hpp"
#include "dailystudy/timeutil.hpp"

namespace dailystudy {

// Generative model of one worker's day-to-day behavior. Parameter defaults
// are calibration outputs fitted so simulated cohorts land near the deployed
// study's aggregate retention (36.8% all-days, 68.4% over-75%); the source
// study published no behavioral parameters, so these are fitted values, not
// ground truth.
struct BehaviorProfile {
  // Probability of vanishing right after the enrollment measurement.
  double p_abandon_after_first = 0.11;
  // Per-day probability of completing without any prompt.
  double base_daily_completion = 0.65;
  // Probability of completing within 10 minutes of a received reminder.
  double notification_responsiveness = 0.90;
  // Permanent drop-out hazard after `streak` consecutive missed days:
  // min(1, hazard_base + hazard_step * (streak - 1)). Non-decreasing.
  double hazard_base = 0.23;
  double hazard_step = 0.10;
  // Share of reminder-responsive completions that follow the morning push
  // rather than the evening one.
  double morning_share = 0.60;
  // Multiplier on base_daily_completion per scheme id (absent id = 1.0).
  std::map<std::string, double> scheme_sensitivity = {
      {"HI", 1.04}, {"HC", 1.00}, {"LC", 0.98}};

  double terminal_hazard(int missed_streak) const;
  double sensitivity(const std::string& scheme_id) const;
  void validate() const;
};

struct SimConfig {
  std::map<std::string, int> workers_per_scheme = {
      {"HI", 44}, {"HC", 54}, {"LC", 89}};
  std::uint64_t seed = 42;
  UtcTime start{};  // defaults to 2021-03-01T00:00:00Z when unset
  // Injected client misbehavior: immediate same-day resubmission rate.
  double duplicate_submission_rate = 0.0;
  // Transient crowd-gateway failure rate, to exercise the retry queue.
  double gateway_failure_rate = 0.0;
  BehaviorProfile profile;
  // Half-width of the uniform per-worker jitter applied to
  // base_daily_completion and notification_responsiveness.
  double worker_jitter = 0.08;
  // Timezone pool and weights; defaults span UTC-8..UTC+1, US-heavy.
  std::vector<std::string> timezones;
  std::vector<double> timezone_weights;

  void validate() const;
};

struct DayState {
  int day_index = 0;  // 2..duration_days (day 1 is enrollment)
  bool reminders_scheduled_today = false;
  int missed_streak = 0;  // consecutive missed days before today
};

struct DayDecision {
  enum class Kind { CompleteAt, Skip, DropPermanently };
  Kind kind = Kind::Skip;
  MinutesOfDay local_time{};   // minute of day, when CompleteAt
  bool via_notification = false;
  bool evening = false;        // responsive completions: which reminder
  bool duplicate_attempt = false;
};

// Draws one day's decision. Consumes exactly six uniform draws regardless of
// the branch taken, so runs with different profile parameters stay aligned
// draw-for-draw (the monotonicity property depends on this).
DayDecision worker_day_decision(const BehaviorProfile& profile,
                                const std::string& scheme_id,
                                const DayState& state, std::mt19937_64& rng,
                                double duplicate_rate = 0.0);

// Substream seeding: decorrelates worker streams derived from one master
// seed.
std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t index);

struct SimResult {
  int enrolled = 0;
  int completed_all = 0;
  long measurements = 0;
  long duplicate_attempts_rejected = 0;
  int notifications_sent = 0;
  std::map<std::string, Cents> ledger_total_by_worker;
  std::map<std::string, std::string> scheme_by_worker;
  std::map<std::string, int> measurements_by_worker;
  std::string survey_hit_id;
  int qualification_holders = 0;
};

// Runs the full cohort through the real enrollment/measurement/notification
// stack against mock gateways under a virtual clock, writing the ordinary
// event log into log_dir. Deterministic: same (configs, seed) => same log
// bytes.
SimResult simulate_study(const SimConfig& sim, const StudyConfig& study,
                         const std::filesystem::path& log_dir);

}  // namespace dailystudy

#endif  // DAILYSTUDY_SIMULATOR_HPP_
