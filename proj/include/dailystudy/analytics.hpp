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

#ifndef DAILYSTUDY_ANALYTICS_HPP_
#define DAILYSTUDY_ANALYTICS_HPP_

#include <map>
#include <string>
#include <vector>

#include "dailystudy/stats.hpp"
#include "dailystudy/store.hpp"

namespace dailystudy {

// workers x duration_days completion grid with per-worker scheme labels.
// Row order is worker-id order, so the same log always yields the same
// matrix.
struct CompletionMatrix {
  std::vector<std::string> worker_ids;
  std::vector<std::string> schemes;        // parallel to worker_ids
  std::vector<std::vector<bool>> grid;     // [worker][day-1]
  int days = 0;
};

struct RetentionSummary {
  double pct_all_days = 0.0;
  double pct_over_75 = 0.0;
  int dropouts_after_first = 0;  // exactly one measurement ever
  int terminal_run_workers = 0;  // trailing missed-run >= 3
  int missed_any = 0;
};

// Grid over every worker who reached Enrolled (Rejected attempts and
// unconsumed codes are not rows).
CompletionMatrix completion_matrix(const StudyStore& store);

// Throws EmptyMatrix on a zero-row matrix. pct_over_75 counts workers who
// completed on strictly more than 75% of days (>= 24 of 31).
RetentionSummary retention_summary(const CompletionMatrix& matrix);

// Per-scheme totals of measurements per worker; workers with exactly one
// measurement are dropped when exclude_single is set.
std::map<std::string, std::vector<double>> measures_completed_samples(
    const StudyStore& store, bool exclude_single);

// Submissions bucketed by local time-of-day into 144 ten-minute bins; bin i
// covers [10i, 10i+10) minutes past local midnight.
std::vector<long> submission_histogram(const StudyStore& store);

// One Table-2-shaped row of the statistical battery.
struct BatteryRow {
  std::string variable;   // "drop_out_after_first", "measures_completed", ...
  std::string test;       // "two_proportion_z" or "t_test"
  std::string variant;    // "two_sided" / "greater" (+ "welch"/"pooled")
  std::string scheme_a;
  std::string scheme_b;
  TestResult result;
};

// The full 12-row battery over scheme pairs (HI,HC), (HI,LC), (HC,LC):
// drop-out-after-first z-tests, measures-completed two-sided and one-sided
// t-tests (excluding single-measurement workers), and completed-every-day
// one-sided z-tests.
std::vector<BatteryRow> test_battery(const StudyStore& store,
                                     TTestVariant variant);

}  // namespace dailystudy

#endif  // DAILYSTUDY_ANALYTICS_HPP_
