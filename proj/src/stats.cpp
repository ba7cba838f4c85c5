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

#include "dailystudy/stats.hpp"

#include <cmath>
#include <limits>

#include "dailystudy/errors.hpp"

namespace dailystudy {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / double(v.size() - 1);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  // The continued fraction converges fast only for x below the distribution
  // bulk; use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (df <= 0.0) fail(Err::ValidationError, "t distribution needs df > 0");
  double x = df / (df + t * t);
  double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

TestResult two_proportion_z(int success_a, int n_a, int success_b, int n_b,
                            Alternative alternative) {
  if (n_a < 1 || n_b < 1) {
    fail(Err::ValidationError, "sample sizes must be >= 1");
  }
  if (success_a < 0 || success_a > n_a || success_b < 0 || success_b > n_b) {
    fail(Err::ValidationError, "successes must lie in [0, n]");
  }
  TestResult result;
  double pooled = double(success_a + success_b) / double(n_a + n_b);
  if (pooled <= 0.0 || pooled >= 1.0) {
    result.degenerate = true;
    result.p_value = 1.0;
    return result;
  }
  double pa = double(success_a) / n_a;
  double pb = double(success_b) / n_b;
  double se =
      std::sqrt(pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b));
  result.statistic = (pa - pb) / se;
  switch (alternative) {
    case Alternative::two_sided:
      result.p_value = 2.0 * normal_cdf(-std::fabs(result.statistic));
      break;
    case Alternative::greater:
      result.p_value = normal_cdf(-result.statistic);
      break;
  }
  return result;
}

TestResult t_test(const std::vector<double>& sample_a,
                  const std::vector<double>& sample_b,
                  Alternative alternative, TTestVariant variant) {
  if (sample_a.size() < 2 || sample_b.size() < 2) {
    fail(Err::ValidationError, "each sample needs at least 2 values");
  }
  double na = double(sample_a.size());
  double nb = double(sample_b.size());
  double ma = mean_of(sample_a);
  double mb = mean_of(sample_b);
  double va = sample_variance(sample_a, ma);
  double vb = sample_variance(sample_b, mb);

  TestResult result;
  if (va + vb <= 0.0) {
    result.degenerate = true;
    result.p_value = 1.0;
    return result;
  }

  double se;
  if (variant == TTestVariant::welch) {
    double qa = va / na;
    double qb = vb / nb;
    se = std::sqrt(qa + qb);
    result.df = (qa + qb) * (qa + qb) /
                (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  } else {
    double sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    se = std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
    result.df = na + nb - 2.0;
  }
  result.statistic = (ma - mb) / se;
  switch (alternative) {
    case Alternative::two_sided:
      result.p_value =
          2.0 * student_t_cdf(-std::fabs(result.statistic), result.df);
      break;
    case Alternative::greater:
      result.p_value = student_t_cdf(-result.statistic, result.df);
      break;
  }
  return result;
}

}  // namespace dailystudy
