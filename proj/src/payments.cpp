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

#include "dailystudy/payments.hpp"

#include <cmath>
#include <cstdio>

#include "dailystudy/errors.hpp"

namespace dailystudy {

std::string format_dollars(Cents amount) {
  char buf[32];
  const char* sign = amount < 0 ? "-" : "";
  Cents a = amount < 0 ? -amount : amount;
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", sign,
                static_cast<long long>(a / 100),
                static_cast<long long>(a % 100));
  return buf;
}

PaymentScheme PaymentScheme::constant(std::string id, Cents amount) {
  PaymentScheme s;
  s.id = std::move(id);
  s.kind = Kind::Constant;
  s.constant_amount = amount;
  s.validate();
  return s;
}

PaymentScheme PaymentScheme::increasing(std::string id, Cents base,
                                        Cents increment) {
  PaymentScheme s;
  s.id = std::move(id);
  s.kind = Kind::LinearIncreasing;
  s.base = base;
  s.increment = increment;
  s.validate();
  return s;
}

void PaymentScheme::validate() const {
  if (id.empty()) fail(Err::BadConfig, "payment scheme needs an id");
  if (kind == Kind::Constant && constant_amount <= 0)
    fail(Err::BadConfig, "constant scheme " + id + " needs a positive amount");
  if (kind == Kind::LinearIncreasing && (base <= 0 || increment < 0))
    fail(Err::BadConfig, "increasing scheme " + id +
                             " needs positive base and nonnegative increment");
}

std::vector<PaymentScheme> default_schemes() {
  return {PaymentScheme::constant("LC", 88),
          PaymentScheme::constant("HC", 113),
          PaymentScheme::increasing("HI", 40, 5)};
}

namespace payments {

Cents bonus_amount(const PaymentScheme& scheme, int bonus_index,
                   const Params& params) {
  if (bonus_index < 1 || bonus_index > params.max_measurements - 1) {
    fail(Err::IndexOutOfRange,
         "bonus index " + std::to_string(bonus_index) + " outside [1, " +
             std::to_string(params.max_measurements - 1) + "]");
  }
  switch (scheme.kind) {
    case PaymentScheme::Kind::Constant:
      return scheme.constant_amount;
    case PaymentScheme::Kind::LinearIncreasing:
      return scheme.base + scheme.increment * (bonus_index - 1);
  }
  fail(Err::BadConfig, "unhandled scheme kind");
}

Cents cumulative_pay(const PaymentScheme& scheme, int total_measurements,
                     const Params& params) {
  if (total_measurements < 1 || total_measurements > params.max_measurements) {
    fail(Err::IndexOutOfRange,
         "measurement count " + std::to_string(total_measurements) +
             " outside [1, " + std::to_string(params.max_measurements) + "]");
  }
  Cents total = params.enrollment_pay;
  for (int j = 1; j <= total_measurements - 1; ++j) {
    total += bonus_amount(scheme, j, params);
  }
  return total;
}

double equivalent_hourly(const PaymentScheme& scheme, int total_measurements,
                         const Params& params) {
  Cents pay = cumulative_pay(scheme, total_measurements, params);
  double seconds = params.onboarding_seconds +
                   (total_measurements - 1) * params.median_task_seconds;
  double rate = (double(pay) / 100.0) / (seconds / 3600.0);
  // Half-up to two decimals, the precision the pay table is quoted at.
  return std::floor(rate * 100.0 + 0.5) / 100.0;
}

Cents remaining_potential(const PaymentScheme& scheme, int bonus_count,
                          const Params& params) {
  const int max_bonuses = params.max_measurements - 1;
  if (bonus_count < 0) fail(Err::IndexOutOfRange, "negative bonus count");
  Cents total = 0;
  for (int j = bonus_count + 1; j <= max_bonuses; ++j) {
    total += bonus_amount(scheme, j, params);
  }
  return total;
}

PayQuote quote(const PaymentScheme& scheme, int bonus_count,
               const Params& params) {
  PayQuote q;
  const int max_bonuses = params.max_measurements - 1;
  q.next_bonus = bonus_count >= max_bonuses
                     ? 0
                     : bonus_amount(scheme, bonus_count + 1, params);
  q.cumulative = cumulative_pay(scheme, bonus_count + 1, params);
  q.remaining_potential = remaining_potential(scheme, bonus_count, params);
  q.equivalent_hourly = equivalent_hourly(scheme, bonus_count + 1, params);
  return q;
}

}  // namespace payments

}  // namespace dailystudy
