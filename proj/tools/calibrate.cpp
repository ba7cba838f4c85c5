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

// Fits the simulator's behavior profile to the deployed study's retention
// aggregates (36.8% of workers completed every day; 68.4% completed more
// than 75% of days). Runs a small grid search around the analytic starting
// point and prints the best candidates as config lines.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dailystudy/analytics.hpp"
#include "dailystudy/eventlog.hpp"
#include "dailystudy/simulator.hpp"
#include "dailystudy/store.hpp"

namespace fs = std::filesystem;
using namespace dailystudy;

namespace {

struct Candidate {
  double abandon, base, resp, hazard;
  double mean_all = 0.0, mean_75 = 0.0;
  double min_all = 100.0, max_all = 0.0;
  double min_75 = 100.0, max_75 = 0.0;
  double mean_dropout_share = 0.0;
  double score = 1e9;
};

RetentionSummary run_once(const SimConfig& sim, const StudyConfig& study,
                          const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  simulate_study(sim, study, dir);
  EventLog log(dir);
  StudyStore store = replay(study, log);
  const RetentionSummary r = retention_summary(completion_matrix(store));
  fs::remove_all(dir);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior-profile calibration search"};
  int seeds = 3;
  std::uint64_t seed0 = 1;
  bool fine = false;
  app.add_option("--seeds", seeds, "Seeds per candidate");
  app.add_option("--seed0", seed0, "First seed");
  app.add_flag("--fine", fine, "Denser grid (slower)");
  CLI11_PARSE(app, argc, argv);

  const StudyConfig study;
  const fs::path work =
      fs::temp_directory_path() /
      ("calibrate-" + std::to_string(::getpid()));

  std::vector<double> abandons = {0.08, 0.11, 0.14};
  std::vector<double> bases = {0.65, 0.68, 0.71, 0.74};
  std::vector<double> resps = {0.84, 0.88, 0.90, 0.93};
  std::vector<double> hazards = {0.17, 0.23, 0.29};
  if (fine) {
    bases = {0.64, 0.66, 0.68, 0.70, 0.72, 0.74, 0.76};
    resps = {0.82, 0.85, 0.88, 0.90, 0.92, 0.94};
    hazards = {0.15, 0.19, 0.23, 0.27, 0.31};
  }

  const double target_all = 36.8, target_75 = 68.4;
  std::vector<Candidate> results;
  int done = 0;
  const int total = static_cast<int>(abandons.size() * bases.size() *
                                     resps.size() * hazards.size());
  for (double abandon : abandons) {
    for (double base : bases) {
      for (double resp : resps) {
        for (double hazard : hazards) {
          Candidate c{abandon, base, resp, hazard};
          double sum_all = 0.0, sum_75 = 0.0, sum_drop = 0.0;
          for (int s = 0; s < seeds; ++s) {
            SimConfig sim;
            sim.seed = seed0 + s;
            sim.profile.p_abandon_after_first = abandon;
            sim.profile.base_daily_completion = base;
            sim.profile.notification_responsiveness = resp;
            sim.profile.hazard_base = hazard;
            const RetentionSummary r =
                run_once(sim, study, work / std::to_string(s));
            sum_all += r.pct_all_days;
            sum_75 += r.pct_over_75;
            sum_drop += r.dropouts_after_first;
            c.min_all = std::min(c.min_all, r.pct_all_days);
            c.max_all = std::max(c.max_all, r.pct_all_days);
            c.min_75 = std::min(c.min_75, r.pct_over_75);
            c.max_75 = std::max(c.max_75, r.pct_over_75);
          }
          c.mean_all = sum_all / seeds;
          c.mean_75 = sum_75 / seeds;
          c.mean_dropout_share = sum_drop / seeds;
          // Distance to targets plus a penalty when any seed leaves the
          // +/-10pp acceptance band.
          c.score = std::abs(c.mean_all - target_all) +
                    std::abs(c.mean_75 - target_75);
          const double band = 10.0;
          c.score += std::max(0.0, (target_all - band) - c.min_all) * 3;
          c.score += std::max(0.0, c.max_all - (target_all + band)) * 3;
          c.score += std::max(0.0, (target_75 - band) - c.min_75) * 3;
          c.score += std::max(0.0, c.max_75 - (target_75 + band)) * 3;
          results.push_back(c);
          ++done;
          std::fprintf(stderr, "\r%d/%d", done, total);
          std::fflush(stderr);
        }
      }
    }
  }
  std::fprintf(stderr, "\n");
  fs::remove_all(work);

  std::sort(results.begin(), results.end(),
            [](const Candidate& a, const Candidate& b) {
              return a.score < b.score;
            });
  const int show = std::min<std::size_t>(8, results.size());
  for (int i = 0; i < show; ++i) {
    const Candidate& c = results[i];
    std::printf(
        "score=%.2f all=%.1f [%.1f..%.1f] over75=%.1f [%.1f..%.1f] "
        "dropouts=%.1f\n"
        "  profile.p_abandon_after_first = %.2f\n"
        "  profile.base_daily_completion = %.2f\n"
        "  profile.notification_responsiveness = %.2f\n"
        "  profile.hazard_base = %.2f\n",
        c.score, c.mean_all, c.min_all, c.max_all, c.mean_75, c.min_75,
        c.max_75, c.mean_dropout_share, c.abandon, c.base, c.resp, c.hazard);
  }
  return 0;
}
