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

#include "dailystudy/analytics.hpp"

#include <algorithm>

#include "dailystudy/errors.hpp"

namespace dailystudy {

CompletionMatrix completion_matrix(const StudyStore& store) {
  CompletionMatrix m;
  m.days = store.config().duration_days;
  for (const auto& [worker_id, p] : store.participants()) {
    if (p.state == LifecycleState::Rejected) continue;
    m.worker_ids.push_back(worker_id);
    m.schemes.push_back(p.scheme_id);
    std::vector<bool> row(m.days, false);
    if (const auto* by_day = store.measurements_of(worker_id)) {
      for (const auto& [day, rec] : *by_day) {
        if (day >= 1 && day <= m.days) row[day - 1] = true;
      }
    }
    m.grid.push_back(std::move(row));
  }
  return m;
}

RetentionSummary retention_summary(const CompletionMatrix& matrix) {
  if (matrix.grid.empty() || matrix.days == 0) {
    fail(Err::EmptyMatrix, "completion matrix has no rows");
  }
  RetentionSummary s;
  int workers = int(matrix.grid.size());
  int all_days = 0;
  int over_75 = 0;
  for (const auto& row : matrix.grid) {
    int done = int(std::count(row.begin(), row.end(), true));
    if (done == matrix.days) all_days += 1;
    if (double(done) / matrix.days > 0.75) over_75 += 1;
    if (done == 1) s.dropouts_after_first += 1;
    if (done < matrix.days) s.missed_any += 1;
    int trailing_missed = 0;
    for (int d = matrix.days - 1; d >= 0 && !row[d]; --d) trailing_missed += 1;
    if (done < matrix.days && trailing_missed >= 3) {
      s.terminal_run_workers += 1;
    }
  }
  s.pct_all_days = 100.0 * all_days / workers;
  s.pct_over_75 = 100.0 * over_75 / workers;
  return s;
}

std::map<std::string, std::vector<double>> measures_completed_samples(
    const StudyStore& store, bool exclude_single) {
  std::map<std::string, std::vector<double>> samples;
  for (const auto& [worker_id, p] : store.participants()) {
    if (p.state == LifecycleState::Rejected) continue;
    const auto* by_day = store.measurements_of(worker_id);
    int total = by_day ? int(by_day->size()) : 0;
    if (exclude_single && total == 1) continue;
    samples[p.scheme_id].push_back(double(total));
  }
  return samples;
}

std::vector<long> submission_histogram(const StudyStore& store) {
  std::vector<long> bins(144, 0);
  for (const auto& [worker_id, by_day] : store.measurements()) {
    for (const auto& [day, rec] : by_day) {
      long minutes = rec.local_time_of_day.count() / 60;
      long bin = minutes / 10;
      if (bin >= 0 && bin < 144) bins[bin] += 1;
    }
  }
  return bins;
}

namespace {

struct SchemeCounts {
  int n = 0;          // enrolled workers
  int dropouts = 0;   // exactly one measurement
  int all_days = 0;   // completed every day
};

std::map<std::string, SchemeCounts> per_scheme_counts(const StudyStore& store) {
  std::map<std::string, SchemeCounts> counts;
  int days = store.config().duration_days;
  for (const auto& [worker_id, p] : store.participants()) {
    if (p.state == LifecycleState::Rejected) continue;
    SchemeCounts& c = counts[p.scheme_id];
    c.n += 1;
    const auto* by_day = store.measurements_of(worker_id);
    int total = by_day ? int(by_day->size()) : 0;
    if (total == 1) c.dropouts += 1;
    if (total == days) c.all_days += 1;
  }
  return counts;
}

}  // namespace

std::vector<BatteryRow> test_battery(const StudyStore& store,
                                     TTestVariant variant) {
  auto counts = per_scheme_counts(store);
  auto samples = measures_completed_samples(store, /*exclude_single=*/true);
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"HI", "HC"}, {"HI", "LC"}, {"HC", "LC"}};
  const char* variant_name =
      variant == TTestVariant::welch ? "welch" : "pooled";

  std::vector<BatteryRow> rows;
  for (const auto& [a, b] : pairs) {
    BatteryRow row;
    row.variable = "drop_out_after_first";
    row.test = "two_proportion_z";
    row.variant = "two_sided";
    row.scheme_a = a;
    row.scheme_b = b;
    row.result = two_proportion_z(counts[a].dropouts, counts[a].n,
                                  counts[b].dropouts, counts[b].n,
                                  Alternative::two_sided);
    rows.push_back(row);
  }
  for (const auto& [a, b] : pairs) {
    BatteryRow row;
    row.variable = "measures_completed";
    row.test = "t_test";
    row.variant = std::string("two_sided/") + variant_name;
    row.scheme_a = a;
    row.scheme_b = b;
    row.result = t_test(samples[a], samples[b], Alternative::two_sided,
                        variant);
    rows.push_back(row);
  }
  for (const auto& [a, b] : pairs) {
    BatteryRow row;
    row.variable = "measures_completed";
    row.test = "t_test";
    row.variant = std::string("greater/") + variant_name;
    row.scheme_a = a;
    row.scheme_b = b;
    row.result =
        t_test(samples[a], samples[b], Alternative::greater, variant);
    rows.push_back(row);
  }
  for (const auto& [a, b] : pairs) {
    BatteryRow row;
    row.variable = "completed_every_day";
    row.test = "two_proportion_z";
    row.variant = "greater";
    row.scheme_a = a;
    row.scheme_b = b;
    row.result = two_proportion_z(counts[a].all_days, counts[a].n,
                                  counts[b].all_days, counts[b].n,
                                  Alternative::greater);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dailystudy
