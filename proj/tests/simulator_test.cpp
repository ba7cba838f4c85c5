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

#include "dailystudy/simulator.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "dailystudy/errors.hpp"
#include "dailystudy/eventlog.hpp"
#include "dailystudy/store.hpp"
#include "service_fixture.hpp"

namespace dailystudy {
namespace {

using testutil::TempDir;

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// ---------------------------------------------------------------------------
// Substream seeding.

TEST(Splitmix64Test, MatchesTheReferenceStream) {
  // Reference: repeatedly advance the state by the golden-gamma and mix.
  for (std::uint64_t seed : {0ull, 42ull, 0xDEADBEEFull, ~0ull}) {
    std::uint64_t state = seed;
    for (std::uint64_t index = 1; index <= 64; ++index) {
      state += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = state;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      z ^= z >> 31;
      EXPECT_EQ(splitmix64(seed, index), z) << "seed=" << seed
                                            << " index=" << index;
    }
  }
}

TEST(Splitmix64Test, KnownVector) {
  EXPECT_EQ(splitmix64(0, 1), 0xE220A8397B1DCDAFULL);
}

TEST(Splitmix64Test, DistinctIndexesDecorrelate) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(splitmix64(42, i));
  EXPECT_EQ(seen.size(), 1000u);
}

// ---------------------------------------------------------------------------
// Profile mechanics.

TEST(TerminalHazardTest, NonDecreasingAndCapped) {
  BehaviorProfile p;
  p.hazard_base = 0.3;
  p.hazard_step = 0.25;
  EXPECT_DOUBLE_EQ(p.terminal_hazard(0), 0.0);
  EXPECT_DOUBLE_EQ(p.terminal_hazard(1), 0.3);
  EXPECT_DOUBLE_EQ(p.terminal_hazard(2), 0.55);
  EXPECT_DOUBLE_EQ(p.terminal_hazard(3), 0.8);
  EXPECT_DOUBLE_EQ(p.terminal_hazard(4), 1.0);  // capped
  EXPECT_DOUBLE_EQ(p.terminal_hazard(50), 1.0);
  for (int k = 0; k < 20; ++k) {
    EXPECT_LE(p.terminal_hazard(k), p.terminal_hazard(k + 1));
  }
}

TEST(ProfileValidateTest, RejectsOutOfRangeParameters) {
  BehaviorProfile p;
  p.p_abandon_after_first = 1.5;
  EXPECT_THROW(p.validate(), StudyError);
  p = BehaviorProfile{};
  p.hazard_step = -0.1;
  EXPECT_THROW(p.validate(), StudyError);
  p = BehaviorProfile{};
  p.scheme_sensitivity["HI"] = 0.0;
  EXPECT_THROW(p.validate(), StudyError);
  EXPECT_NO_THROW(BehaviorProfile{}.validate());
}

TEST(SimConfigValidateTest, RejectsBadKnobs) {
  SimConfig c;
  c.workers_per_scheme = {{"HI", 0}};
  EXPECT_THROW(c.validate(), StudyError);
  c = SimConfig{};
  c.duplicate_submission_rate = 0.96;
  EXPECT_THROW(c.validate(), StudyError);
  c = SimConfig{};
  c.worker_jitter = 0.6;
  EXPECT_THROW(c.validate(), StudyError);
  c = SimConfig{};
  c.timezones = {"UTC"};
  c.timezone_weights = {0.5, 0.5};
  EXPECT_THROW(c.validate(), StudyError);
  EXPECT_NO_THROW(SimConfig{}.validate());
}

// ---------------------------------------------------------------------------
// Per-day decision properties.

DayState day_state(int day, bool reminders, int streak) {
  DayState s;
  s.day_index = day;
  s.reminders_scheduled_today = reminders;
  s.missed_streak = streak;
  return s;
}

TEST(DayDecisionTest, ConsumesSixDrawsOnEveryBranch) {
  // Profiles chosen to force each branch: drop, unprompted, responsive, skip.
  BehaviorProfile drop;
  drop.p_abandon_after_first = 1.0;
  BehaviorProfile unprompted;
  unprompted.p_abandon_after_first = 0.0;
  unprompted.base_daily_completion = 1.0;
  BehaviorProfile responsive;
  responsive.p_abandon_after_first = 0.0;
  responsive.base_daily_completion = 0.0;
  responsive.notification_responsiveness = 1.0;
  BehaviorProfile skip;
  skip.p_abandon_after_first = 0.0;
  skip.base_daily_completion = 0.0;
  skip.notification_responsiveness = 0.0;

  const BehaviorProfile* profiles[] = {&drop, &unprompted, &responsive, &skip};
  std::mt19937_64 rng(7);
  for (int round = 0; round < 100; ++round) {
    const BehaviorProfile& profile = *profiles[round % 4];
    std::mt19937_64 expected = rng;
    expected.discard(6);
    worker_day_decision(profile, "LC", day_state(2, true, 0), rng);
    EXPECT_TRUE(rng == expected) << "round " << round;
  }
}

TEST(DayDecisionTest, AbandonmentOnlyStrikesOnDayTwo) {
  BehaviorProfile p;
  p.p_abandon_after_first = 1.0;
  p.base_daily_completion = 1.0;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    DayDecision d = worker_day_decision(p, "LC", day_state(2, true, 0), rng);
    EXPECT_EQ(d.kind, DayDecision::Kind::DropPermanently);
  }
  for (int i = 0; i < 50; ++i) {
    DayDecision d = worker_day_decision(p, "LC", day_state(3, true, 0), rng);
    EXPECT_EQ(d.kind, DayDecision::Kind::CompleteAt);
  }
}

TEST(DayDecisionTest, CertainHazardDropsAfterAnyMiss) {
  BehaviorProfile p;
  p.p_abandon_after_first = 0.0;
  p.hazard_base = 1.0;
  p.base_daily_completion = 1.0;
  std::mt19937_64 rng(13);
  for (int streak = 1; streak <= 5; ++streak) {
    DayDecision d =
        worker_day_decision(p, "LC", day_state(3 + streak, false, streak), rng);
    EXPECT_EQ(d.kind, DayDecision::Kind::DropPermanently) << streak;
  }
  // No miss, no hazard.
  DayDecision d = worker_day_decision(p, "LC", day_state(3, false, 0), rng);
  EXPECT_EQ(d.kind, DayDecision::Kind::CompleteAt);
}

TEST(DayDecisionTest, CertainBaseCompletesUnprompted) {
  BehaviorProfile p;
  p.p_abandon_after_first = 0.0;
  p.base_daily_completion = 1.0;
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    DayDecision d = worker_day_decision(p, "HI", day_state(5, false, 0), rng);
    ASSERT_EQ(d.kind, DayDecision::Kind::CompleteAt);
    EXPECT_FALSE(d.via_notification);
    EXPECT_GE(d.local_time.count(), 0);
    EXPECT_LT(d.local_time.count(), 1440);
  }
}

TEST(DayDecisionTest, ReminderResponsesLandInsideTheWindows) {
  BehaviorProfile p;
  p.p_abandon_after_first = 0.0;
  p.base_daily_completion = 0.0;
  p.notification_responsiveness = 1.0;

  p.morning_share = 1.0;
  std::mt19937_64 rng(19);
  for (int i = 0; i < 100; ++i) {
    DayDecision d = worker_day_decision(p, "LC", day_state(4, true, 0), rng);
    ASSERT_EQ(d.kind, DayDecision::Kind::CompleteAt);
    EXPECT_TRUE(d.via_notification);
    EXPECT_FALSE(d.evening);
    EXPECT_GE(d.local_time.count(), 9 * 60);
    EXPECT_LT(d.local_time.count(), 9 * 60 + 10);
  }

  p.morning_share = 0.0;
  for (int i = 0; i < 100; ++i) {
    DayDecision d = worker_day_decision(p, "LC", day_state(4, true, 0), rng);
    ASSERT_EQ(d.kind, DayDecision::Kind::CompleteAt);
    EXPECT_TRUE(d.evening);
    EXPECT_GE(d.local_time.count(), 19 * 60);
    EXPECT_LT(d.local_time.count(), 19 * 60 + 10);
  }

  // Responsiveness only matters when reminders actually fired today.
  DayDecision d = worker_day_decision(p, "LC", day_state(4, false, 0), rng);
  EXPECT_EQ(d.kind, DayDecision::Kind::Skip);
}

TEST(DayDecisionTest, DuplicateFlagFollowsTheInjectedRate) {
  // HC's default sensitivity multiplier is 1.0, so base 1.0 completes daily.
  BehaviorProfile p;
  p.p_abandon_after_first = 0.0;
  p.base_daily_completion = 1.0;
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    DayDecision d =
        worker_day_decision(p, "HC", day_state(5, false, 0), rng, 1.0);
    ASSERT_EQ(d.kind, DayDecision::Kind::CompleteAt);
    EXPECT_TRUE(d.duplicate_attempt);
  }
  for (int i = 0; i < 100; ++i) {
    DayDecision d =
        worker_day_decision(p, "HC", day_state(5, false, 0), rng, 0.0);
    EXPECT_FALSE(d.duplicate_attempt);
  }
}

// With the fixed six-draw schedule, raising base_daily_completion can only
// turn skips into completions, never the reverse.
TEST(DayDecisionTest, HigherBaseNeverCompletesLess) {
  BehaviorProfile low;
  low.p_abandon_after_first = 0.0;
  low.base_daily_completion = 0.35;
  low.notification_responsiveness = 0.0;
  BehaviorProfile high = low;
  high.base_daily_completion = 0.75;

  std::mt19937_64 rng_low(29);
  std::mt19937_64 rng_high(29);
  int low_done = 0, high_done = 0;
  for (int day = 0; day < 2000; ++day) {
    DayDecision dl =
        worker_day_decision(low, "HC", day_state(5, false, 0), rng_low);
    DayDecision dh =
        worker_day_decision(high, "HC", day_state(5, false, 0), rng_high);
    if (dl.kind == DayDecision::Kind::CompleteAt) {
      ++low_done;
      ASSERT_EQ(dh.kind, DayDecision::Kind::CompleteAt) << "day " << day;
      EXPECT_EQ(dl.local_time.count(), dh.local_time.count());
    }
    if (dh.kind == DayDecision::Kind::CompleteAt) ++high_done;
  }
  EXPECT_GT(low_done, 0);
  EXPECT_GT(high_done, low_done);
}

// ---------------------------------------------------------------------------
// Full-cohort runs.

SimConfig small_sim(std::uint64_t seed) {
  SimConfig sim;
  sim.seed = seed;
  sim.workers_per_scheme = {{"HI", 3}, {"HC", 3}, {"LC", 4}};
  return sim;
}

StudyConfig short_study() {
  StudyConfig study;
  study.duration_days = 8;
  study.max_measurements = 8;
  return study;
}

TEST(SimulateStudyTest, SameSeedSameLogBytes) {
  TempDir a, b, c;
  StudyConfig study = short_study();
  simulate_study(small_sim(99), study, a.str());
  simulate_study(small_sim(99), study, b.str());
  simulate_study(small_sim(100), study, c.str());

  EventLog log_a(a.str()), log_b(b.str()), log_c(c.str());
  std::string bytes_a = file_bytes(log_a.log_path());
  ASSERT_FALSE(bytes_a.empty());
  EXPECT_EQ(bytes_a, file_bytes(log_b.log_path()));
  EXPECT_NE(bytes_a, file_bytes(log_c.log_path()));
}

TEST(SimulateStudyTest, ResultAccountingIsConserved) {
  TempDir dir;
  StudyConfig study = short_study();
  SimResult r = simulate_study(small_sim(7), study, dir.str());

  // Enrollment is unconditional in the model; abandonment starts on day 2.
  EXPECT_EQ(r.enrolled, 10);
  EXPECT_EQ(r.qualification_holders, 10);
  EXPECT_FALSE(r.survey_hit_id.empty());

  std::map<std::string, int> per_scheme;
  long total = 0;
  for (const auto& [worker, scheme] : r.scheme_by_worker) {
    ++per_scheme[scheme];
  }
  EXPECT_EQ(per_scheme["HI"], 3);
  EXPECT_EQ(per_scheme["HC"], 3);
  EXPECT_EQ(per_scheme["LC"], 4);

  // Ledger conservation: every worker's crowd-side total is exactly the
  // enrollment reward plus the scheme bonuses for their completed count.
  for (const auto& [worker, done] : r.measurements_by_worker) {
    total += done;
    ASSERT_GE(done, 1);
    const PaymentScheme& scheme =
        study.scheme(r.scheme_by_worker.at(worker));
    Cents expected = study.enrollment_pay;
    for (int i = 1; i < done; ++i) {
      expected += payments::bonus_amount(scheme, i, study.pay_params());
    }
    EXPECT_EQ(r.ledger_total_by_worker.at(worker), expected) << worker;
  }
  EXPECT_EQ(r.measurements, total);

  int full = 0;
  for (const auto& [worker, done] : r.measurements_by_worker) {
    if (done == study.duration_days) ++full;
  }
  EXPECT_EQ(r.completed_all, full);
  EXPECT_GT(r.notifications_sent, 0);
}

TEST(SimulateStudyTest, DuplicateInjectionIsRejectedUnpaid) {
  TempDir dir;
  StudyConfig study = short_study();
  SimConfig sim = small_sim(21);
  sim.duplicate_submission_rate = 0.5;
  SimResult r = simulate_study(sim, study, dir.str());

  EXPECT_GT(r.duplicate_attempts_rejected, 0);
  for (const auto& [worker, done] : r.measurements_by_worker) {
    const PaymentScheme& scheme =
        study.scheme(r.scheme_by_worker.at(worker));
    Cents expected = study.enrollment_pay;
    for (int i = 1; i < done; ++i) {
      expected += payments::bonus_amount(scheme, i, study.pay_params());
    }
    EXPECT_EQ(r.ledger_total_by_worker.at(worker), expected) << worker;
  }
}

TEST(SimulateStudyTest, GatewayFailuresDrainWithoutDoublePay) {
  TempDir dir;
  StudyConfig study = short_study();
  SimConfig sim = small_sim(33);
  sim.gateway_failure_rate = 0.4;
  SimResult r = simulate_study(sim, study, dir.str());

  EXPECT_EQ(r.enrolled, 10);
  for (const auto& [worker, done] : r.measurements_by_worker) {
    const PaymentScheme& scheme =
        study.scheme(r.scheme_by_worker.at(worker));
    Cents expected = study.enrollment_pay;
    for (int i = 1; i < done; ++i) {
      expected += payments::bonus_amount(scheme, i, study.pay_params());
    }
    EXPECT_EQ(r.ledger_total_by_worker.at(worker), expected) << worker;
  }
}

TEST(SimulateStudyTest, ReplayMatchesTheLiveRun) {
  TempDir dir;
  StudyConfig study = short_study();
  SimResult r = simulate_study(small_sim(5), study, dir.str());

  EventLog log(dir.str());
  StudyStore store = replay(study, log);
  for (const auto& [worker, done] : r.measurements_by_worker) {
    const auto* ms = store.measurements_of(worker);
    int replayed = ms == nullptr ? 0 : static_cast<int>(ms->size());
    EXPECT_EQ(replayed, done) << worker;
  }
  int sent = 0;
  for (const auto& [id, n] : store.notifications()) {
    if (n.status == NotificationStatus::Sent) ++sent;
  }
  EXPECT_EQ(sent, r.notifications_sent);
}

}  // namespace
}  // namespace dailystudy
