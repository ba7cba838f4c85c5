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

#ifndef DAILYSTUDY_STATS_HPP_
#define DAILYSTUDY_STATS_HPP_

#include <vector>

namespace dailystudy {

enum class Alternative { two_sided, greater };
enum class TTestVariant { welch, pooled };

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;        // 0 for the z-test
  bool degenerate = false;  // pooled proportion 0/1, or zero variance
};

// Standard normal CDF via the complementary error function.
double normal_cdf(double z);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Student's t CDF with (possibly fractional) df, via incomplete beta.
double student_t_cdf(double t, double df);

// Pooled two-proportion z-test. Degenerate when the pooled proportion is 0
// or 1 (p = 1, flag set). Throws ValidationError on malformed counts.
TestResult two_proportion_z(int success_a, int n_a, int success_b, int n_b,
                            Alternative alternative);

// Two-sample t-test, Welch (default here and in reports) or pooled.
// Degenerate when both samples have zero combined variance. Throws
// ValidationError when a sample has fewer than 2 values.
TestResult t_test(const std::vector<double>& sample_a,
                  const std::vector<double>& sample_b,
                  Alternative alternative,
                  TTestVariant variant = TTestVariant::welch);

}  // namespace dailystudy

#endif  // DAILYSTUDY_STATS_HPP_
