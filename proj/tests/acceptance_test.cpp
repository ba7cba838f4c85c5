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
//
// Acceptance battery: one test and one printed PASS/FAIL line per criterion.
// Every line states what was checked and the observed numbers, so the
// printed transcript is a self-contained verdict.

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dailystudy/analytics.hpp"
#include "dailystudy/errors.hpp"
#include "dailystudy/eventlog.hpp"
#include "dailystudy/notifications.hpp"
#include "dailystudy/payments.hpp"
#include "dailystudy/reports.hpp"
#include "dailystudy/simulator.hpp"
#include "dailystudy/stats.hpp"
#include "dailystudy/store.hpp"
#include "service_fixture.hpp"

namespace dailystudy {
namespace {

using payments::bonus_amount;
using payments::cumulative_pay;
using payments::equivalent_hourly;
using testutil::sample_start;
using testutil::ServiceHarness;
using testutil::TempDir;
using testutil::valid_payload;

void report_line(const char* id, bool pass, const std::string& detail) {
  std::printf("%s: %s - %s\n", id, pass && !::testing::Test::HasFailure()
                                       ? "PASS"
                                       : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

long elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - since)
      .count();
}

// ---------------------------------------------------------------------------
// Shared artifacts, built once on first use.

struct SimArtifacts {
  TempDir dir;
  StudyConfig study;
  SimResult result;
  long run_ms = 0;
};

const SimArtifacts& run_sim(std::unique_ptr<SimArtifacts>& slot,
                            const SimConfig& sim) {
  if (!slot) {
    slot = std::make_unique<SimArtifacts>();
    auto t0 = std::chrono::steady_clock::now();
    slot->result = simulate_study(sim, slot->study, slot->dir.str());
    slot->run_ms = elapsed_ms(t0);
  }
  return *slot;
}

const SimArtifacts& sim_base() {
  static std::unique_ptr<SimArtifacts> slot;
  return run_sim(slot, SimConfig{});  // seed 42, 44/54/89, defaults
}

const SimArtifacts& sim_dup() {
  static std::unique_ptr<SimArtifacts> slot;
  SimConfig sim;
  sim.duplicate_submission_rate = 0.05;
  return run_sim(slot, sim);
}

const SimArtifacts& sim_zeroresp() {
  static std::unique_ptr<SimArtifacts> slot;
  SimConfig sim;
  sim.profile.notification_responsiveness = 0.0;
  return run_sim(slot, sim);
}

const StudyStore& store42() {
  static std::unique_ptr<StudyStore> slot;
  if (!slot) {
    EventLog log(sim_base().dir.str());
    slot = std::make_unique<StudyStore>(replay(sim_base().study, log));
  }
  return *slot;
}

// Notification-protocol scenario: two UTC-5 workers enrolled at 10:00 local,
// one submitting early (08:30) and one at noon on day 2.
struct NotificationScenario {
  VirtualClock clock{parse_utc("2021-03-01T15:00:00Z")};
  ServiceHarness harness{clock};
  int day2_sends_dev1 = 0;
  int day2_sends_dev2 = 0;

  NotificationScenario() {
    harness.enroll(clock, "w001", "dev-1", "UTC-5");
    harness.enroll(clock, "w002", "dev-2", "UTC-5");

    clock.set(parse_utc("2021-03-02T13:30:00Z"));  // 08:30 local, day 2
    harness.service.submit_measurement("w002", valid_payload());

    clock.set(parse_utc("2021-03-02T14:00:00Z"));  // 09:00 local
    harness.service.tick();

    clock.set(parse_utc("2021-03-02T17:00:00Z"));  // 12:00 local
    harness.service.submit_measurement("w001", valid_payload());

    clock.set(parse_utc("2021-03-03T00:00:30Z"));  // past 19:00 local
    harness.service.tick();

    const UtcTime day2_start = parse_utc("2021-03-02T05:00:00Z");
    const UtcTime day3_start = parse_utc("2021-03-03T05:00:00Z");
    for (const PushRecord& p : harness.push.sends()) {
      if (p.at < day2_start || p.at >= day3_start) continue;
      if (p.device_id == "dev-1") ++day2_sends_dev1;
      if (p.device_id == "dev-2") ++day2_sends_dev2;
    }
  }

  const ScheduledNotification* find(const std::string& worker,
                                    NotificationKind kind,
                                    const std::string& day) const {
    for (const auto& [id, n] : harness.service.store().notifications()) {
      if (n.worker_id == worker && n.kind == kind &&
          format_local_day(n.local_day) == day) {
        return &harness.service.store().notifications().at(id);
      }
    }
    return nullptr;
  }
};

const NotificationScenario& notification_scenario() {
  static NotificationScenario scenario;
  return scenario;
}

// Enrollment-protocol scenario: 1,000 randomized attempts, 30% bad codes,
// 10% transient gateway failure.
struct EnrollmentScenario {
  VirtualClock clock{parse_utc("2021-03-01T12:00:00Z")};
  ServiceHarness harness{clock};
  std::map<std::string, std::string> expected;  // assignment -> decision
  int approved = 0;
  int rejected = 0;
  int retried = 0;

  EnrollmentScenario() {
    harness.crowd.set_failure(0.10, 20210301);
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<std::string> consumed;

    auto submit_with_retry = [&](const std::string& worker) {
      for (;;) {
        try {
          return harness.crowd.submit_assignment(harness.service.hit_id(),
                                                 worker);
        } catch (const StudyError& e) {
          if (e.code() != Err::GatewayError) throw;
        }
      }
    };

    for (int i = 1; i <= 1000; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%04d", i);
      const std::string worker = std::string("w") + buf;
      const std::string device = std::string("dev-") + buf;

      harness.service.start_enrollment(
          sample_start(device, "UTC-5", clock.now()));
      const std::string code =
          harness.service.submit_first_measurement(device, valid_payload());

      std::string attempt = code;
      bool good = true;
      const double roll = uniform(rng);
      if (roll < 0.15) {
        attempt = "XXXXXXXX";  // wrong literal
        good = false;
      } else if (roll < 0.30) {
        // Replay an already-consumed code when one exists.
        attempt = consumed.empty() ? "YYYYYYYY"
                                   : consumed[rng() % consumed.size()];
        good = false;
      }

      const std::string asg = submit_with_retry(worker);
      const std::string decision =
          harness.service.validate_submission(worker, asg, attempt);
      expected[asg] = decision;
      EXPECT_EQ(decision, good ? "Approved" : "Rejected") << worker;
      if (decision == "Approved") {
        consumed.push_back(code);
        ++approved;
      } else {
        ++rejected;
      }

      if (rng() % 4 == 0) {
        // A retried validation must come back with the recorded decision.
        EXPECT_EQ(harness.service.validate_submission(worker, asg,
                                                      "ZZZZZZZZ"),
                  decision);
        ++retried;
      }
      if (rng() % 8 == 0) {
        clock.advance(std::chrono::minutes{1});
        harness.service.tick();
      }
      clock.advance(std::chrono::seconds{20});
    }

    for (int i = 0;
         i < 5000 && harness.service.pending_gateway_ops() > 0; ++i) {
      clock.advance(std::chrono::seconds{60});
      harness.service.tick();
    }
  }
};

const EnrollmentScenario& enrollment_scenario() {
  static EnrollmentScenario scenario;
  return scenario;
}

// ---------------------------------------------------------------------------
// Independent statistical references (quadrature, exact enumeration).

template <typename F>
double simpson(F f, double lo, double hi, int panels) {
  double h = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) {
    sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

double ref_normal_cdf(double z) {
  auto density = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  };
  double body = simpson(density, 0.0, std::fabs(z), 40000);
  return z >= 0.0 ? 0.5 + body : 0.5 - body;
}

double ref_t_cdf(double t, double df) {
  double ln_norm = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                   0.5 * std::log(df * M_PI);
  auto density = [&](double x) {
    return std::exp(ln_norm - (df + 1.0) / 2.0 * std::log1p(x * x / df));
  };
  double body = simpson(density, 0.0, std::fabs(t), 40000);
  return t >= 0.0 ? 0.5 + body : 0.5 - body;
}

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binom_pmf(int k, int n, double p) {
  return std::exp(log_choose(n, k) + k * std::log(p) +
                  (n - k) * std::log(1.0 - p));
}

double z_statistic(int ka, int na, int kb, int nb) {
  double pooled = double(ka + kb) / double(na + nb);
  double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
  return (double(ka) / na - double(kb) / nb) / se;
}

double exact_two_sided_p(int ka, int na, int kb, int nb) {
  double pooled = double(ka + kb) / double(na + nb);
  double z_obs = std::fabs(z_statistic(ka, na, kb, nb));
  double tail = 0.0;
  for (int a = 0; a <= na; ++a) {
    for (int b = 0; b <= nb; ++b) {
      int total = a + b;
      bool extreme = total == 0 || total == na + nb ||
                     std::fabs(z_statistic(a, na, b, nb)) >= z_obs - 1e-12;
      if (extreme) tail += binom_pmf(a, na, pooled) * binom_pmf(b, nb, pooled);
    }
  }
  return tail;
}

double median_of(std::vector<long> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 == 1 ? double(v[n / 2])
                    : (double(v[n / 2 - 1]) + double(v[n / 2])) / 2.0;
}

// ---------------------------------------------------------------------------
// AC1: payment table reproduction.

TEST(Acceptance, AC1_Table1Reproduction) {
  auto t0 = std::chrono::steady_clock::now();
  StudyConfig config;
  const PaymentScheme& lc = config.scheme("LC");
  const PaymentScheme& hc = config.scheme("HC");
  const PaymentScheme& hi = config.scheme("HI");

  struct Cell {
    const PaymentScheme* scheme;
    int n;
    Cents pay;       // printed cumulative, in cents
    double hourly;   // printed equivalent hourly
  };
  const Cell cells[] = {
      {&lc, 1, 100, 7.50},   {&lc, 11, 980, 12.19},  {&lc, 21, 1860, 12.61},
      {&lc, 31, 2740, 12.77}, {&hc, 1, 100, 7.50},   {&hc, 11, 1230, 15.30},
      {&hc, 21, 2360, 16.00}, {&hc, 31, 3490, 16.23}, {&hi, 1, 100, 7.50},
      {&hi, 11, 725, 9.02},   {&hi, 21, 1850, 12.55}, {&hi, 31, 3475, 16.20},
  };

  int exact = 0;
  for (const Cell& c : cells) {
    if (cumulative_pay(*c.scheme, c.n) == c.pay) ++exact;
    if (equivalent_hourly(*c.scheme, c.n) == c.hourly) ++exact;
  }
  long ms = elapsed_ms(t0);

  // 23 of the 24 printed cells are attainable. The HC n=31 hourly cell is
  // not: 34.90 over 480 + 30 * 241.44 seconds is 16.27 to 2 decimals, and
  // the LC/HI n=31 cells pin the time model to exactly those constants, so
  // no shared model yields the printed 16.23.
  EXPECT_EQ(exact, 23);
  EXPECT_DOUBLE_EQ(equivalent_hourly(hc, 31), 16.27);
  for (const Cell& c : cells) {
    EXPECT_EQ(cumulative_pay(*c.scheme, c.n), c.pay)
        << c.scheme->id << " n=" << c.n;
    if (!(c.scheme == &hc && c.n == 31)) {
      EXPECT_DOUBLE_EQ(equivalent_hourly(*c.scheme, c.n), c.hourly)
          << c.scheme->id << " n=" << c.n;
    }
  }
  EXPECT_LT(ms, 1000);

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "%d/24 printed cells exact in %ld ms; HC n=31 hourly is "
                "16.27 under the time model fixed by the other cells, not "
                "the printed 16.23 (that one cell is self-inconsistent and "
                "unattainable; see the payments report)",
                exact, ms);
  report_line("AC1", false, detail);
}

// ---------------------------------------------------------------------------
// AC2: bonus-equation reconciliation.

TEST(Acceptance, AC2_Eq1Reconciliation) {
  StudyConfig config;
  const PaymentScheme& hi = config.scheme("HI");

  const struct {
    int n;
    Cents printed;
  } checkpoints[] = {{11, 725}, {21, 1850}, {31, 3475}};
  for (const auto& cp : checkpoints) {
    Cents brute = config.enrollment_pay;
    for (int i = 1; i <= cp.n - 1; ++i) {
      brute += bonus_amount(hi, i);
      EXPECT_EQ(bonus_amount(hi, i), 40 + 5 * (i - 1)) << i;
    }
    EXPECT_EQ(brute, cp.printed) << "n=" << cp.n;
    EXPECT_EQ(brute, cumulative_pay(hi, cp.n)) << "n=" << cp.n;
  }

  // The naive literal reading indexes the formula by study day, paying the
  // second measurement 40 + 5 * 1 instead of 40 + 5 * 0. It must not match.
  Cents naive = config.enrollment_pay;
  for (int day = 2; day <= 11; ++day) naive += 40 + 5 * (day - 1);
  EXPECT_EQ(naive, 775);
  EXPECT_NE(naive, cumulative_pay(hi, 11));

  report_line("AC2", true,
              "brute-force bonus sums equal the HI column at n=11/21/31 "
              "(7.25/18.50/34.75 dollars); the day-indexed misreading gives "
              "7.75 at n=11 and is rejected");
}

// ---------------------------------------------------------------------------
// AC3: statistical oracle equivalence and battery shape.

TEST(Acceptance, AC3_StatisticalOracles) {
  // Randomized fixtures against quadrature references.
  std::mt19937_64 rng(20210301);
  int z_fixtures = 0;
  double max_z_err = 0.0;
  while (z_fixtures < 25) {
    int na = 20 + int(rng() % 280), nb = 20 + int(rng() % 280);
    int ka = 1 + int(rng() % (na - 1)), kb = 1 + int(rng() % (nb - 1));
    ++z_fixtures;
    double z = z_statistic(ka, na, kb, nb);
    TestResult r = two_proportion_z(ka, na, kb, nb, Alternative::two_sided);
    double ref = 2.0 * (1.0 - ref_normal_cdf(std::fabs(z)));
    max_z_err = std::max(max_z_err, std::fabs(r.p_value - ref));
    EXPECT_NEAR(r.p_value, ref, 1e-9);
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  int t_fixtures = 0;
  double max_t_err = 0.0;
  for (int fixture = 0; fixture < 20; ++fixture) {
    int na = 5 + int(rng() % 36), nb = 5 + int(rng() % 36);
    std::vector<double> a(na), b(nb);
    for (double& x : a) x = noise(rng);
    for (double& x : b) x = 0.3 * (fixture % 4) + noise(rng);
    ++t_fixtures;

    auto mean = [](const std::vector<double>& v) {
      double s = 0;
      for (double x : v) s += x;
      return s / v.size();
    };
    auto var = [](const std::vector<double>& v, double m) {
      double s = 0;
      for (double x : v) s += (x - m) * (x - m);
      return s / (v.size() - 1);
    };
    double ma = mean(a), mb = mean(b);
    double qa = var(a, ma) / na, qb = var(b, mb) / nb;
    double t = (ma - mb) / std::sqrt(qa + qb);
    double df =
        (qa + qb) * (qa + qb) / (qa * qa / (na - 1) + qb * qb / (nb - 1));
    double ref = 2.0 * (1.0 - ref_t_cdf(std::fabs(t), df));
    TestResult r = t_test(a, b, Alternative::two_sided, TTestVariant::welch);
    max_t_err = std::max(max_t_err, std::fabs(r.p_value - ref));
    EXPECT_NEAR(r.p_value, ref, 1e-9) << "fixture " << fixture;
  }

  // Small-sample agreement with exact enumeration.
  const int exact_fixtures[][4] = {{12, 40, 6, 38},
                                   {20, 60, 12, 55},
                                   {15, 45, 9, 50},
                                   {30, 90, 18, 80},
                                   {11, 35, 6, 30}};
  for (const auto& f : exact_fixtures) {
    TestResult r =
        two_proportion_z(f[0], f[1], f[2], f[3], Alternative::two_sided);
    EXPECT_NEAR(r.p_value, exact_two_sided_p(f[0], f[1], f[2], f[3]), 0.02);
  }

  // Permutation check for the pooled t-test on 10 + 10 samples.
  for (int fixture = 0; fixture < 2; ++fixture) {
    std::vector<double> values(20);
    for (int i = 0; i < 10; ++i) values[i] = noise(rng);
    for (int i = 10; i < 20; ++i) values[i] = 0.6 + noise(rng);
    std::vector<double> a(values.begin(), values.begin() + 10);
    std::vector<double> b(values.begin() + 10, values.end());
    TestResult r = t_test(a, b, Alternative::two_sided, TTestVariant::pooled);

    double total = 0, sum_a = 0;
    for (double v : values) total += v;
    for (double v : a) sum_a += v;
    double obs = std::fabs(sum_a / 10.0 - (total - sum_a) / 10.0);
    long extreme = 0, count = 0;
    for (unsigned mask = 0; mask < (1u << 20); ++mask) {
      if (__builtin_popcount(mask) != 10) continue;
      double s = 0;
      for (int i = 0; i < 20; ++i) {
        if (mask & (1u << i)) s += values[i];
      }
      double diff = std::fabs(s / 10.0 - (total - s) / 10.0);
      if (diff >= obs - 1e-12) ++extreme;
      ++count;
    }
    EXPECT_NEAR(r.p_value, double(extreme) / double(count), 0.02);
  }

  // Battery shape on the seed-42 cohort: Table-2-shaped comparisons over
  // schemes of size 44/54/89.
  CompletionMatrix matrix = completion_matrix(store42());
  std::map<std::string, int> cohort;
  for (const std::string& s : matrix.schemes) ++cohort[s];
  EXPECT_EQ(cohort["HI"], 44);
  EXPECT_EQ(cohort["HC"], 54);
  EXPECT_EQ(cohort["LC"], 89);

  std::vector<BatteryRow> rows = test_battery(store42(), TTestVariant::welch);
  ASSERT_EQ(rows.size(), 12u);
  const char* variables[] = {"drop_out_after_first", "measures_completed",
                             "measures_completed", "completed_every_day"};
  const char* pairs[][2] = {{"HI", "HC"}, {"HI", "LC"}, {"HC", "LC"}};
  for (int block = 0; block < 4; ++block) {
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(rows[block * 3 + i].variable, variables[block]);
      EXPECT_EQ(rows[block * 3 + i].scheme_a, pairs[i][0]);
      EXPECT_EQ(rows[block * 3 + i].scheme_b, pairs[i][1]);
    }
  }

  // The printed p-values came from raw data that was never released; the
  // simulated cohort must not be able to reproduce them all.
  const double printed_p[12] = {0.464, 0.572, 0.133, 0.131, 0.122, 0.870,
                                0.065, 0.061, 0.565, 0.019, 0.014, 0.554};
  int matched = 0;
  for (int i = 0; i < 12; ++i) {
    if (std::fabs(rows[i].result.p_value - printed_p[i]) <= 0.02) ++matched;
  }
  EXPECT_LT(matched, 12);

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "%d z and %d t randomized fixtures within 1e-9 of quadrature "
                "references (max err %.1e / %.1e); 5 exact-binomial and 2 "
                "permutation fixtures within 0.02; battery is 12 rows over "
                "HI/HC/LC pairs at n=44/54/89; printed p-values matched on "
                "%d/12 rows (raw data unavailable, full reproduction "
                "impossible by design)",
                z_fixtures, t_fixtures, max_z_err, max_t_err, matched);
  report_line("AC3", true, detail);
}

// ---------------------------------------------------------------------------
// AC4: scheduler determinism and protocol.

TEST(Acceptance, AC4_SchedulerProtocol) {
  const NotificationScenario& sc = notification_scenario();
  const StudyStore& store = sc.harness.service.store();

  // Exactly two day-2 reminders per worker at 09:00/19:00 local, which is
  // 14:00Z and 00:00Z for UTC-5.
  for (const char* worker : {"w001", "w002"}) {
    const ScheduledNotification* morning =
        sc.find(worker, NotificationKind::Morning, "2021-03-02");
    const ScheduledNotification* evening =
        sc.find(worker, NotificationKind::EveningConditional, "2021-03-02");
    ASSERT_NE(morning, nullptr) << worker;
    ASSERT_NE(evening, nullptr) << worker;
    EXPECT_EQ(format_utc(morning->fire_at), "2021-03-02T14:00:00Z") << worker;
    EXPECT_EQ(format_utc(evening->fire_at), "2021-03-03T00:00:00Z") << worker;
    int day2 = 0;
    for (const auto& [id, n] : store.notifications()) {
      if (n.worker_id == worker &&
          format_local_day(n.local_day) == "2021-03-02") {
        ++day2;
      }
    }
    EXPECT_EQ(day2, 2) << worker;
  }

  // w001 submitted at noon: the 19:00 reminder never dispatched.
  const ScheduledNotification* w1_evening =
      sc.find("w001", NotificationKind::EveningConditional, "2021-03-02");
  EXPECT_TRUE(w1_evening->status == NotificationStatus::Cancelled ||
              w1_evening->status == NotificationStatus::Suppressed);
  EXPECT_EQ(sc.day2_sends_dev1, 1);  // the 09:00 reminder only

  // w002 submitted at 08:30: the 09:00 reminder was cancelled unsent.
  const ScheduledNotification* w2_morning =
      sc.find("w002", NotificationKind::Morning, "2021-03-02");
  EXPECT_EQ(w2_morning->status, NotificationStatus::Cancelled);
  EXPECT_EQ(sc.day2_sends_dev2, 0);

  // 10,000 randomized (and non-monotonic) tick orderings never dispatch
  // more than the two armed reminders, and dispatch each exactly once when
  // its fire time has been reached.
  VirtualClock clock(parse_utc("2021-03-01T15:00:00Z"));
  ServiceHarness harness(clock);
  harness.enroll(clock, "w001", "dev-1", "UTC-5");
  const json snapshot = harness.service.store().to_json();
  const StudyConfig config;
  const UtcTime window_start = parse_utc("2021-03-01T15:00:00Z");
  const UtcTime morning_fire = parse_utc("2021-03-02T14:00:00Z");
  const UtcTime evening_fire = parse_utc("2021-03-03T00:00:00Z");

  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<long> offset(0, 45 * 3600);
  std::uniform_int_distribution<int> tick_count(1, 12);
  long total_sends = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<UtcTime> ticks;
    int k = tick_count(rng);
    for (int i = 0; i < k; ++i) {
      ticks.push_back(window_start + std::chrono::seconds{offset(rng)});
    }
    std::shuffle(ticks.begin(), ticks.end(), rng);

    StudyStore trial_store = StudyStore::from_json(config, snapshot);
    MockPushGateway push(&clock);
    NotificationScheduler scheduler(trial_store, harness.log, push, clock);
    bool past_morning = false, past_evening = false;
    for (UtcTime t : ticks) {
      scheduler.tick(t);
      past_morning = past_morning || t >= morning_fire;
      past_evening = past_evening || t >= evening_fire;
    }
    int expected = (past_morning ? 1 : 0) + (past_evening ? 1 : 0);
    ASSERT_LE(push.sends().size(), 2u) << "trial " << trial;
    ASSERT_EQ(int(push.sends().size()), expected) << "trial " << trial;
    total_sends += long(push.sends().size());
  }

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "day-2 pair armed at 14:00Z/00:00Z for both workers; noon "
                "submission left the evening reminder undispatched; the "
                "08:30 submission cancelled the morning one unsent; 10000 "
                "randomized tick orderings dispatched at most 2 per "
                "worker-day (%ld sends, all matching their fire-time "
                "expectation)",
                total_sends);
  report_line("AC4", true, detail);
}

// ---------------------------------------------------------------------------
// AC5: end-to-end money conservation.

TEST(Acceptance, AC5_LedgerConservation) {
  const SimArtifacts& base = sim_base();
  const SimArtifacts& dup = sim_dup();

  int workers_checked = 0;
  for (const auto& [worker, done] : base.result.measurements_by_worker) {
    const PaymentScheme& scheme =
        base.study.scheme(base.result.scheme_by_worker.at(worker));
    EXPECT_EQ(base.result.ledger_total_by_worker.at(worker),
              cumulative_pay(scheme, done))
        << worker;
    ++workers_checked;
  }
  EXPECT_EQ(workers_checked, 187);

  // The decision model consumes a fixed number of draws per day, so the 5%
  // duplicate run replays the identical cohort with duplicates layered on
  // top: measurement counts and ledgers must be byte-for-byte the same maps.
  EXPECT_GT(dup.result.duplicate_attempts_rejected, 0);
  EXPECT_EQ(dup.result.measurements_by_worker,
            base.result.measurements_by_worker);
  EXPECT_EQ(dup.result.ledger_total_by_worker,
            base.result.ledger_total_by_worker);
  for (const auto& [worker, done] : dup.result.measurements_by_worker) {
    const PaymentScheme& scheme =
        dup.study.scheme(dup.result.scheme_by_worker.at(worker));
    EXPECT_EQ(dup.result.ledger_total_by_worker.at(worker),
              cumulative_pay(scheme, done))
        << worker;
  }

  EXPECT_LT(base.run_ms, 30000);

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "seed-42 cohort of 187: every ledger total equals "
                "cumulative_pay(scheme, completed) over %ld measurements in "
                "%ld ms; injecting 5%% duplicates rejected %ld resubmissions "
                "with zero ledger or count changes",
                base.result.measurements, base.run_ms,
                dup.result.duplicate_attempts_rejected);
  report_line("AC5", true, detail);
}

// ---------------------------------------------------------------------------
// AC6: reminder-window submission spikes.

TEST(Acceptance, AC6_HistogramSpikes) {
  std::vector<long> bins = submission_histogram(store42());
  ASSERT_EQ(bins.size(), 144u);
  const int morning_bin = 9 * 6;   // [09:00, 09:10)
  const int evening_bin = 19 * 6;  // [19:00, 19:10)
  std::vector<long> others;
  for (int i = 0; i < 144; ++i) {
    if (i != morning_bin && i != evening_bin) others.push_back(bins[i]);
  }
  double med = median_of(others);
  EXPECT_GT(bins[morning_bin], 3.0 * med);
  EXPECT_GT(bins[evening_bin], 3.0 * med);

  EventLog log(sim_zeroresp().dir.str());
  StudyStore flat_store = replay(sim_zeroresp().study, log);
  std::vector<long> flat = submission_histogram(flat_store);
  double flat_med = median_of(flat);
  long flat_max = *std::max_element(flat.begin(), flat.end());
  EXPECT_LE(double(flat_max), 2.0 * flat_med);

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "default profile: bins [09:00-09:10)=%ld and "
                "[19:00-19:10)=%ld vs median %.1f of the other 142 (both "
                "above 3x); responsiveness 0: max bin %ld vs median %.1f "
                "(no bin above 2x)",
                bins[morning_bin], bins[evening_bin], med, flat_max,
                flat_med);
  report_line("AC6", true, detail);
}

// ---------------------------------------------------------------------------
// AC7: retention calibration.

TEST(Acceptance, AC7_RetentionCalibration) {
  double sum_all = 0.0, sum_75 = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TempDir dir;
    SimConfig sim;
    sim.seed = seed;
    StudyConfig study;
    SimResult r = simulate_study(sim, study, dir.str());
    int all = 0, over75 = 0;
    for (const auto& [worker, done] : r.measurements_by_worker) {
      if (done == study.duration_days) ++all;
      if (double(done) / study.duration_days > 0.75) ++over75;
    }
    sum_all += 100.0 * all / r.enrolled;
    sum_75 += 100.0 * over75 / r.enrolled;
  }
  double mean_all = sum_all / 10.0;
  double mean_75 = sum_75 / 10.0;
  EXPECT_NEAR(mean_all, 36.8, 10.0);
  EXPECT_NEAR(mean_75, 68.4, 10.0);

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "10 seeds with committed default profiles: mean pct_all_days "
                "%.2f (target 36.8 +/- 10) and mean pct_over_75 %.2f "
                "(target 68.4 +/- 10); fitted values, not a published claim",
                mean_all, mean_75);
  report_line("AC7", true, detail);
}

// ---------------------------------------------------------------------------
// AC8: published-aggregate self-consistency fixtures.

CompletionMatrix matrix_from_rows(const std::vector<std::vector<bool>>& rows) {
  CompletionMatrix m;
  m.days = 31;
  for (size_t i = 0; i < rows.size(); ++i) {
    m.worker_ids.push_back("w" + std::to_string(i));
    m.schemes.push_back("LC");
    m.grid.push_back(rows[i]);
  }
  return m;
}

TEST(Acceptance, AC8_RetentionFixtures) {
  // 69 full completers (36.8% of 187) and 118 workers with one mid-study
  // miss each: missed_any must land exactly on the published 118.
  std::vector<std::vector<bool>> rows;
  for (int i = 0; i < 69; ++i) rows.push_back(std::vector<bool>(31, true));
  for (int i = 0; i < 118; ++i) {
    std::vector<bool> row(31, true);
    row[1 + (i % 29)] = false;
    rows.push_back(row);
  }
  RetentionSummary s1 = retention_summary(matrix_from_rows(rows));
  EXPECT_EQ(s1.missed_any, 118);
  EXPECT_NEAR(s1.pct_all_days, 36.9, 0.1);
  EXPECT_EQ(s1.terminal_run_workers, 0);

  // Same cohort reshaped so exactly 46 of the 118 end on a terminal run of
  // three or more missed days.
  rows.clear();
  for (int i = 0; i < 69; ++i) rows.push_back(std::vector<bool>(31, true));
  for (int i = 0; i < 46; ++i) {
    std::vector<bool> row(31, true);
    for (int d = 31 - 3 - (i % 5); d < 31; ++d) row[d] = false;
    rows.push_back(row);
  }
  for (int i = 0; i < 72; ++i) {
    std::vector<bool> row(31, true);
    if (i % 2 == 0) {
      row[5 + (i % 20)] = false;
    } else {
      row[29] = false;
      row[30] = false;
    }
    rows.push_back(row);
  }
  RetentionSummary s2 = retention_summary(matrix_from_rows(rows));
  EXPECT_EQ(s2.missed_any, 118);
  EXPECT_EQ(s2.terminal_run_workers, 46);

  report_line("AC8", true,
              "187-worker fixture with 69 full completers yields "
              "missed_any=118; the terminal-run variant yields "
              "terminal_run_workers=46 of those 118");
}

// ---------------------------------------------------------------------------
// AC9: enrollment protocol under fault injection.

TEST(Acceptance, AC9_EnrollmentProtocol) {
  const EnrollmentScenario& sc = enrollment_scenario();
  const StudyStore& store = sc.harness.service.store();

  EXPECT_EQ(sc.approved + sc.rejected, 1000);
  EXPECT_GE(sc.rejected, 250);  // 30% bad codes, binomial slack
  EXPECT_LE(sc.rejected, 350);
  EXPECT_EQ(sc.harness.service.pending_gateway_ops(), 0);

  // Exactly one decision per assignment, mirrored on the platform side.
  int approved_assignments = 0;
  for (const auto& [asg, decision] : sc.expected) {
    auto recorded = store.assignment_decision(asg);
    ASSERT_TRUE(recorded.has_value()) << asg;
    EXPECT_EQ(*recorded, decision) << asg;
    const Assignment* platform = sc.harness.crowd.find_assignment(asg);
    ASSERT_NE(platform, nullptr) << asg;
    EXPECT_EQ(platform->state, decision == "Approved"
                                   ? AssignmentState::Approved
                                   : AssignmentState::Rejected)
        << asg;
    if (decision == "Approved") ++approved_assignments;
  }
  EXPECT_EQ(int(sc.expected.size()), 1000);
  EXPECT_EQ(approved_assignments, sc.approved);

  // Zero double associations: the worker/device binding is a bijection over
  // exactly the approved workers.
  const auto& w2d = store.device_of_worker();
  const auto& d2w = store.worker_of_device();
  EXPECT_EQ(int(w2d.size()), sc.approved);
  EXPECT_EQ(int(d2w.size()), sc.approved);
  for (const auto& [worker, device] : w2d) {
    ASSERT_TRUE(d2w.count(device)) << device;
    EXPECT_EQ(d2w.at(device), worker);
  }

  // Zero approvals without a consumed code, and one HIT payment each.
  std::set<std::string> consumed_by;
  for (const auto& [code, pe] : store.codes()) {
    if (pe.consumed) consumed_by.insert(pe.consumed_by);
  }
  std::map<std::string, int> hit_payments;
  for (const LedgerEntry& e : sc.harness.crowd.ledger()) {
    ASSERT_EQ(e.kind, LedgerKind::HitPayment);  // no bonuses on day 1
    ++hit_payments[e.worker_id];
  }
  int enrolled = 0;
  for (const auto& [worker, p] : store.participants()) {
    if (p.state == LifecycleState::Rejected) {
      EXPECT_EQ(hit_payments.count(worker), 0u) << worker;
      continue;
    }
    ++enrolled;
    EXPECT_TRUE(consumed_by.count(worker)) << worker;
    EXPECT_EQ(hit_payments[worker], 1) << worker;
  }
  EXPECT_EQ(enrolled, sc.approved);
  EXPECT_EQ(int(hit_payments.size()), sc.approved);

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "1000 attempts (%d approved, %d rejected, %d retried "
                "validations) under 10%% gateway failure: one decision per "
                "assignment, worker/device bindings form a bijection of "
                "size %d, every approval has a consumed code and exactly "
                "one HIT payment",
                sc.approved, sc.rejected, sc.retried, sc.approved);
  report_line("AC9", true, detail);
}

// ---------------------------------------------------------------------------
// AC10: replay equivalence.

std::vector<std::string> render_reports(const StudyConfig& config,
                                        const StudyStore& store,
                                        bool with_battery) {
  std::vector<std::string> out;
  out.push_back(paytable_text(config));
  out.push_back(retention_report_text(store));
  out.push_back(payments_report_text(config, store));
  out.push_back(histogram_csv(store));
  CompletionMatrix m = completion_matrix(store);
  out.push_back(completion_csv(m));
  out.push_back(heatmap_text(m));
  out.push_back(heatmap_pbm(m));
  if (with_battery) {
    out.push_back(tests_csv(store, TTestVariant::welch));
    out.push_back(battery_text(store, TTestVariant::welch));
  }
  return out;
}

TEST(Acceptance, AC10_ReplayEquivalence) {
  int scenarios = 0;
  int reports_compared = 0;

  // Live service scenarios: replayed state must equal live state field by
  // field, and every report must come out byte-identical.
  struct LiveCase {
    const ServiceHarness* harness;
    const char* name;
  };
  const LiveCase live_cases[] = {
      {&notification_scenario().harness, "notification protocol"},
      {&enrollment_scenario().harness, "enrollment protocol"},
  };
  for (const LiveCase& lc : live_cases) {
    EventLog log(lc.harness->dir.str());
    StudyStore replayed = replay(lc.harness->service.store().config(), log);
    EXPECT_EQ(lc.harness->service.store().to_json(), replayed.to_json())
        << lc.name;
    auto live_reports = render_reports(lc.harness->service.store().config(),
                                       lc.harness->service.store(), false);
    auto replay_reports =
        render_reports(replayed.config(), replayed, false);
    ASSERT_EQ(live_reports.size(), replay_reports.size());
    for (size_t i = 0; i < live_reports.size(); ++i) {
      EXPECT_EQ(live_reports[i], replay_reports[i]) << lc.name << " " << i;
      ++reports_compared;
    }
    ++scenarios;
  }

  // Simulation scenarios: two independent replays must agree on all state
  // and all reports, and the replayed counts must match what the live run
  // reported when it finished.
  const SimArtifacts* sims[] = {&sim_base(), &sim_dup(), &sim_zeroresp()};
  for (const SimArtifacts* sim : sims) {
    EventLog log_a(sim->dir.str());
    EventLog log_b(sim->dir.str());
    StudyStore a = replay(sim->study, log_a);
    StudyStore b = replay(sim->study, log_b);
    EXPECT_EQ(a.to_json(), b.to_json());

    for (const auto& [worker, done] : sim->result.measurements_by_worker) {
      const auto* ms = a.measurements_of(worker);
      EXPECT_EQ(ms == nullptr ? 0 : int(ms->size()), done) << worker;
      EXPECT_EQ(a.participant(worker).scheme_id,
                sim->result.scheme_by_worker.at(worker));
    }

    auto reports_a = render_reports(sim->study, a, true);
    auto reports_b = render_reports(sim->study, b, true);
    ASSERT_EQ(reports_a.size(), reports_b.size());
    for (size_t i = 0; i < reports_a.size(); ++i) {
      EXPECT_EQ(reports_a[i], reports_b[i]) << i;
      ++reports_compared;
    }
    ++scenarios;
  }

  char detail[512];
  std::snprintf(detail, sizeof(detail),
                "%d scenarios replayed field-identically (protocol "
                "scenarios live-vs-replay, simulations replay-vs-replay "
                "plus live counts); %d rendered reports byte-identical",
                scenarios, reports_compared);
  report_line("AC10", true, detail);
}

}  // namespace
}  // namespace dailystudy
