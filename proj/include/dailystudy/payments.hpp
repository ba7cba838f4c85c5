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

#ifndef DAILYSTUDY_PAYMENTS_HPP
#define DAILYSTUDY_PAYMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace dailystudy {

// Money is integer cents throughout; the equivalent hourly rate is the only
// derived decimal quantity.
using Cents = std::int64_t;

std::string format_dollars(Cents amount);  // 980 -> "9.80"

// Bonus rule for one study arm. Constant schemes pay a fixed amount per
// measurement; the increasing scheme pays base + increment * (index - 1).
struct PaymentScheme {
  enum class Kind { Constant, LinearIncreasing };

  std::string id;  // "LC", "HC", "HI"
  Kind kind = Kind::Constant;
  Cents constant_amount = 0;
  Cents base = 0;
  Cents increment = 0;

  static PaymentScheme constant(std::string id, Cents amount);
  static PaymentScheme increasing(std::string id, Cents base, Cents increment);
  void validate() const;  // throws BadConfig on nonpositive amounts
};

// The three deployed arms: low constant 88c, high constant 113c, and high
// increasing 40c + 5c per prior bonus measurement.
std::vector<PaymentScheme> default_schemes();

// What the app shows a worker between sessions: the reward for the next
// completion and the total still obtainable, plus running totals.
struct PayQuote {
  Cents next_bonus = 0;
  Cents cumulative = 0;
  Cents remaining_potential = 0;
  double equivalent_hourly = 0.0;  // dollars per hour, 2 decimals
};

namespace payments {

struct Params {
  Cents enrollment_pay = 100;     // fixed reward for the enrollment task
  int max_measurements = 31;      // enrollment + 30 bonus measurements
  double onboarding_seconds = 480.0;
  double median_task_seconds = 241.44;
};

// Bonus for the bonus_index-th bonus-paid measurement (1-based; the
// enrollment measurement is paid via the fixed task reward, not a bonus).
Cents bonus_amount(const PaymentScheme& scheme, int bonus_index,
                   const Params& params = {});

// Total pay after `total_measurements` measurements, enrollment included.
Cents cumulative_pay(const PaymentScheme& scheme, int total_measurements,
                     const Params& params = {});

// Cumulative pay divided by estimated time on task, rounded half-up to
// 2 decimals. Time = onboarding + (n - 1) * median task duration.
double equivalent_hourly(const PaymentScheme& scheme, int total_measurements,
                         const Params& params = {});

// Sum of bonuses still obtainable after `bonus_count` bonuses were paid.
Cents remaining_potential(const PaymentScheme& scheme, int bonus_count,
                          const Params& params = {});

PayQuote quote(const PaymentScheme& scheme, int bonus_count,
               const Params& params = {});

}  // namespace payments

}  // namespace dailystudy

#endif  // DAILYSTUDY_PAYMENTS_HPP
