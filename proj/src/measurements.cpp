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

#include "dailystudy/measurements.hpp"

#include <algorithm>

namespace dailystudy {

using nlohmann::json;

bool validate_rounds(const std::vector<RoundResult>& rounds,
                     int required_correct) {
  if (rounds.empty()) return false;
  int correct = int(std::count_if(rounds.begin(), rounds.end(),
                                  [](const RoundResult& r) {
                                    return r.answer_correct;
                                  }));
  // The final round must itself be correct: the task ends on a success, so a
  // trailing failure means the client cut the session short.
  return correct >= required_correct && rounds.back().answer_correct;
}

json rounds_to_json(const std::vector<RoundResult>& rounds) {
  json arr = json::array();
  for (const auto& r : rounds) {
    arr.push_back(json{{"round", r.round_index},
                       {"target", r.target_position},
                       {"objects", r.object_count},
                       {"images", r.image_count},
                       {"correct", r.answer_correct}});
  }
  return arr;
}

json measurement_to_json(const MeasurementRecord& m) {
  return json{{"worker_id", m.worker_id},
              {"study_day", m.study_day},
              {"submitted_at", format_utc(m.submitted_at)},
              {"local_tod", m.local_time_of_day.count()},
              {"scroll_rounds", rounds_to_json(m.scroll_rounds)},
              {"swipe_rounds", rounds_to_json(m.swipe_rounds)},
              {"bonus_paid", m.bonus_paid},
              {"duration_seconds", m.duration_seconds}};
}

MeasurementRecord measurement_from_json(const json& j) {
  MeasurementRecord m;
  m.worker_id = j.at("worker_id").get<std::string>();
  m.study_day = j.at("study_day").get<int>();
  m.submitted_at = parse_utc(j.at("submitted_at").get<std::string>());
  m.local_time_of_day = std::chrono::seconds(j.at("local_tod").get<long>());
  m.scroll_rounds = rounds_from_json(j.at("scroll_rounds"));
  m.swipe_rounds = rounds_from_json(j.at("swipe_rounds"));
  m.bonus_paid = j.at("bonus_paid").get<Cents>();
  m.duration_seconds = j.at("duration_seconds").get<int>();
  return m;
}

std::vector<RoundResult> rounds_from_json(const json& j) {
  std::vector<RoundResult> rounds;
  for (const auto& item : j) {
    RoundResult r;
    r.round_index = item.at("round").get<int>();
    r.target_position = item.at("target").get<int>();
    r.object_count = item.at("objects").get<int>();
    r.image_count = item.at("images").get<int>();
    r.answer_correct = item.at("correct").get<bool>();
    rounds.push_back(r);
  }
  return rounds;
}

std::vector<RoundResult> make_rounds(int correct, int wrong) {
  // Wrong answers go first so the sequence always ends on a success, matching
  // how the client terminates a round series.
  std::vector<RoundResult> rounds;
  int index = 1;
  for (int i = 0; i < wrong; ++i) {
    RoundResult r;
    r.round_index = index++;
    r.target_position = 7 + 5 * i;
    r.object_count = 20 + 3 * i;
    r.image_count = 4 + (i % 3);
    r.answer_correct = false;
    rounds.push_back(r);
  }
  for (int i = 0; i < correct; ++i) {
    RoundResult r;
    r.round_index = index++;
    r.target_position = 3 + 4 * i;
    r.object_count = 18 + 2 * i;
    r.image_count = 3 + (i % 4);
    r.answer_correct = true;
    rounds.push_back(r);
  }
  return rounds;
}

}  // namespace dailystudy
