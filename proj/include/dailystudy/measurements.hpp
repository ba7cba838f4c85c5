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

#ifndef DAILYSTUDY_MEASUREMENTS_HPP
#define DAILYSTUDY_MEASUREMENTS_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "dailystudy/payments.hpp"
#include "dailystudy/timeutil.hpp"

namespace dailystudy {

// One validated round of a sub-task. The gesture content itself is opaque;
// only the varied round parameters and correctness are retained for audit.
struct RoundResult {
  int round_index = 0;
  int target_position = 0;  // article slot / object type index
  int object_count = 0;
  int image_count = 0;
  bool answer_correct = false;
};

// One day's accepted submission of both sub-tasks.
struct MeasurementRecord {
  std::string worker_id;
  int study_day = 0;
  UtcTime submitted_at{};
  std::chrono::seconds local_time_of_day{};  // local wall clock at submission
  std::vector<RoundResult> scroll_rounds;
  std::vector<RoundResult> swipe_rounds;
  Cents bonus_paid = 0;  // 0 for the enrollment measurement
  int duration_seconds = 0;
};

// A sub-task session is valid when it accumulated the required number of
// correct rounds; incorrect answers force extra rounds, so a valid session
// always ends on a correct one.
bool validate_rounds(const std::vector<RoundResult>& rounds, int required);

nlohmann::json rounds_to_json(const std::vector<RoundResult>& rounds);
std::vector<RoundResult> rounds_from_json(const nlohmann::json& j);
nlohmann::json measurement_to_json(const MeasurementRecord& m);
MeasurementRecord measurement_from_json(const nlohmann::json& j);

// Round sequence for test and simulator payloads: `correct` successes with
// `wrong` failures mixed in ahead of the final success, parameters varied
// per round.
std::vector<RoundResult> make_rounds(int correct, int wrong = 0);

}  // namespace dailystudy

#endif  // DAILYSTUDY_MEASUREMENTS_HPP
