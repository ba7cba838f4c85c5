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

#include "dailystudy/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "dailystudy/payments.hpp"

namespace dailystudy {
namespace {

constexpr int kCheckpoints[] = {1, 11, 21, 31};

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string paytable_text(const StudyConfig& config) {
  const auto params = config.pay_params();
  std::ostringstream out;
  out << "measures";
  for (const auto& s : config.schemes) out << "  pay(" << s.id << ")";
  for (const auto& s : config.schemes) out << "  $/h(" << s.id << ")";
  out << "\n";
  for (int n : kCheckpoints) {
    if (n > config.max_measurements) continue;
    char row[16];
    std::snprintf(row, sizeof(row), "%8d", n);
    out << row;
    for (const auto& s : config.schemes) {
      out << "  " << format_dollars(payments::cumulative_pay(s, n, params));
    }
    for (const auto& s : config.schemes) {
      out << "  " << fixed2(payments::equivalent_hourly(s, n, params));
    }
    out << "\n";
  }
  return out.str();
}

std::string paytable_csv(const StudyConfig& config) {
  const auto params = config.pay_params();
  std::ostringstream out;
  out << "measures,scheme,cumulative_dollars,equivalent_hourly\n";
  for (int n : kCheckpoints) {
    if (n > config.max_measurements) continue;
    for (const auto& s : config.schemes) {
      out << n << "," << s.id << ","
          << format_dollars(payments::cumulative_pay(s, n, params)) << ","
          << fixed2(payments::equivalent_hourly(s, n, params)) << "\n";
    }
  }
  return out.str();
}

std::string retention_report_text(const StudyStore& store) {
  const CompletionMatrix m = completion_matrix(store);
  const RetentionSummary r = retention_summary(m);
  std::ostringstream out;
  out << "workers: " << m.worker_ids.size() << "\n"
      << "days: " << m.days << "\n"
      << "pct_all_days: " << fixed2(r.pct_all_days) << "\n"
      << "pct_over_75: " << fixed2(r.pct_over_75) << "\n"
      << "missed_any: " << r.missed_any << "\n"
      << "terminal_run_workers: " << r.terminal_run_workers << "\n"
      << "dropouts_after_first: " << r.dropouts_after_first << "\n";

  // Per-scheme measurement totals.
  std::map<std::string, std::pair<int, long>> by_scheme;  // n, sum
  for (std::size_t i = 0; i < m.worker_ids.size(); ++i) {
    long done = 0;
    for (bool b : m.grid[i]) done += b ? 1 : 0;
    auto& agg = by_scheme[m.schemes[i]];
    agg.first += 1;
    agg.second += done;
  }
  for (const auto& [scheme, agg] : by_scheme) {
    out << "scheme " << scheme << ": n=" << agg.first << " mean_measures="
        << fixed2(static_cast<double>(agg.second) / agg.first) << "\n";
  }
  return out.str();
}

std::string payments_report_text(const StudyConfig& config,
                                 const StudyStore& store) {
  const auto params = config.pay_params();
  std::ostringstream out;
  out << "worker_id,scheme,measures,recorded_cents,expected_cents,delta\n";
  long mismatches = 0;
  for (const auto& [worker_id, p] : store.participants()) {
    if (p.state == LifecycleState::Rejected) continue;
    const int n = p.total_measurements();
    Cents recorded = config.enrollment_pay;
    if (const auto* bonuses = store.bonuses_of(worker_id)) {
      for (const auto& b : *bonuses) recorded += b.amount;
    }
    const Cents expected =
        payments::cumulative_pay(config.scheme(p.scheme_id), n, params);
    const Cents delta = recorded - expected;
    if (delta != 0) ++mismatches;
    out << worker_id << "," << p.scheme_id << "," << n << "," << recorded
        << "," << expected << "," << delta << "\n";
  }
  out << "mismatched_workers," << mismatches << "\n";
  return out.str();
}

std::string histogram_csv(const StudyStore& store) {
  const std::vector<long> bins = submission_histogram(store);
  std::ostringstream out;
  out << "bin_start_minute,count\n";
  for (std::size_t i = 0; i < bins.size(); ++i) {
    out << i * 10 << "," << bins[i] << "\n";
  }
  return out.str();
}

std::string completion_csv(const CompletionMatrix& matrix) {
  std::ostringstream out;
  out << "worker_id,scheme";
  for (int d = 1; d <= matrix.days; ++d) out << ",d" << d;
  out << "\n";
  for (std::size_t i = 0; i < matrix.worker_ids.size(); ++i) {
    out << matrix.worker_ids[i] << "," << matrix.schemes[i];
    for (bool b : matrix.grid[i]) out << "," << (b ? 1 : 0);
    out << "\n";
  }
  return out.str();
}

std::string tests_csv(const StudyStore& store, TTestVariant variant) {
  std::ostringstream out;
  out << "variable,test,variant,scheme_a,scheme_b,statistic,p_value,df,"
         "degenerate\n";
  for (const auto& row : test_battery(store, variant)) {
    out << row.variable << "," << row.test << "," << row.variant << ","
        << row.scheme_a << "," << row.scheme_b << ","
        << fixed4(row.result.statistic) << "," << fixed4(row.result.p_value)
        << "," << fixed2(row.result.df) << ","
        << (row.result.degenerate ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string battery_text(const StudyStore& store, TTestVariant variant) {
  std::ostringstream out;
  for (const auto& row : test_battery(store, variant)) {
    out << row.variable << " " << row.scheme_a << " vs " << row.scheme_b
        << " (" << row.test << ", " << row.variant
        << "): stat=" << fixed4(row.result.statistic)
        << " p=" << fixed4(row.result.p_value);
    if (row.result.degenerate) out << " [degenerate]";
    out << "\n";
  }
  return out.str();
}

std::string heatmap_text(const CompletionMatrix& matrix) {
  std::ostringstream out;
  for (std::size_t i = 0; i < matrix.grid.size(); ++i) {
    for (bool b : matrix.grid[i]) out << (b ? '#' : '.');
    out << "  " << matrix.worker_ids[i] << " (" << matrix.schemes[i] << ")\n";
  }
  return out.str();
}

std::string heatmap_pbm(const CompletionMatrix& matrix) {
  std::ostringstream out;
  out << "P1\n" << matrix.days << " " << matrix.grid.size() << "\n";
  for (const auto& row : matrix.grid) {
    for (std::size_t d = 0; d < row.size(); ++d) {
      if (d) out << " ";
      out << (row[d] ? 1 : 0);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace dailystudy
