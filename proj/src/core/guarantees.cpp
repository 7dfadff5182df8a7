/* Copyright 2026 The ConfReach Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "core/guarantees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace confreach {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kCfEpsilon = 1e-16;
constexpr int kCfMaxIterations = 1'000'000;
constexpr double kStirlingThreshold = 10.0;

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

// lgamma(x) - [(x - 1/2) ln x - x + ln(2 pi) / 2] for x >= 10.
double stirling_correction(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12.0 +
                inv2 * (-1.0 / 360.0 +
                        inv2 * (1.0 / 1260.0 +
                                inv2 * (-1.0 / 1680.0 +
                                        inv2 * (1.0 / 1188.0 +
                                                inv2 * (-691.0 / 360360.0 + inv2 / 156.0))))));
}

// ln x, evaluated through log1p of the complement when x is close to one.
double log_from_pair(double x, double complement) {
  return x > 0.5 ? std::log1p(-complement) : std::log(x);
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b); valid
// (fast) for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIterations; ++m) {
    const double md = static_cast<double>(m);
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kCfEpsilon) return h;
  }
  fail(ErrorKind::kNumerical, "incomplete beta continued fraction did not converge for a=" +
                                  std::to_string(a) + ", b=" + std::to_string(b));
}

// I_x(a, b) for x below the switch point, with y = 1 - x.
double lower_tail(double x, double y, double a, double b) {
  const double log_front =
      a * log_from_pair(x, y) + b * log_from_pair(y, x) - log_beta(a, b) - std::log(a);
  return std::exp(log_front) * beta_continued_fraction(x, a, b);
}

}  // namespace

double log_beta(double a, double b) {
  require(a > 0.0 && b > 0.0, ErrorKind::kDomain, "log_beta requires positive arguments");
  const double p = std::min(a, b);
  const double q = std::max(a, b);
  const double s = p + q;
  if (p >= kStirlingThreshold) {
    // (p - 1/2) ln(p/s) + (q - 1/2) ln(q/s) - ln(s)/2 + ln(2 pi)/2 + corrections
    const double r = p / s;
    return 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(s) +
           (p - 0.5) * std::log(r) + (q - 0.5) * std::log1p(-r) +
           (stirling_correction(p) + stirling_correction(q) - stirling_correction(s));
  }
  if (q >= kStirlingThreshold) {
    // lgamma(q) - lgamma(s) = -(q - 1/2) log1p(p/q) - p ln(s) + p + corr(q) - corr(s)
    const double ratio = -(q - 0.5) * std::log1p(p / q) - p * std::log(s) + p +
                         (stirling_correction(q) - stirling_correction(s));
    return log_gamma(p) + ratio;
  }
  return log_gamma(p) + log_gamma(q) - log_gamma(s);
}

BetaTail incomplete_beta(double x, double y, double a, double b) {
  require(a > 0.0 && b > 0.0, ErrorKind::kDomain,
          "beta shape parameters must be positive (a=" + std::to_string(a) +
              ", b=" + std::to_string(b) + ")");
  require(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0, ErrorKind::kDomain,
          "beta_cdf argument must lie in [0, 1] (x=" + std::to_string(x) + ")");
  if (x == 0.0) return {0.0, 1.0};
  if (y == 0.0) return {1.0, 0.0};
  if (x > (a + 1.0) / (a + b + 2.0)) {
    const double upper = lower_tail(y, x, b, a);
    return {1.0 - upper, upper};
  }
  const double lower = lower_tail(x, y, a, b);
  return {lower, 1.0 - lower};
}

double beta_cdf(double x, double a, double b) {
  require(x >= 0.0 && x <= 1.0, ErrorKind::kDomain,
          "beta_cdf argument must lie in [0, 1] (x=" + std::to_string(x) + ")");
  return incomplete_beta(x, 1.0 - x, a, b).lower;
}

double beta_quantile(double p, double a, double b) {
  require(p >= 0.0 && p <= 1.0, ErrorKind::kDomain, "beta_quantile probability outside [0, 1]");
  require(a > 0.0 && b > 0.0, ErrorKind::kDomain, "beta shape parameters must be positive");
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (beta_cdf(mid, a, b) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

GuaranteeSpec guarantee_confidence(double epsilon, std::uint64_t rank_ell,
                                   std::uint64_t calib_size_m) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::kDomain, "epsilon must lie in (0, 1)");
  require(calib_size_m >= 1, ErrorKind::kDomain, "calibration size m must be positive");
  require(rank_ell >= 1 && rank_ell <= calib_size_m, ErrorKind::kDomain,
          "rank ell must satisfy 1 <= ell <= m (ell=" + std::to_string(rank_ell) +
              ", m=" + std::to_string(calib_size_m) + ")");
  const double a = static_cast<double>(rank_ell);
  const double b = static_cast<double>(calib_size_m + 1 - rank_ell);
  const BetaTail tail = incomplete_beta(1.0 - epsilon, epsilon, a, b);

  GuaranteeSpec spec;
  spec.epsilon = epsilon;
  spec.rank_ell = rank_ell;
  spec.calib_size_m = calib_size_m;
  spec.coverage_delta1 = 1.0 - epsilon;
  spec.confidence_miss = tail.lower;
  spec.confidence_delta2 = tail.upper;
  return spec;
}

BetaMoments beta_moments(std::uint64_t rank_ell, std::uint64_t calib_size_m) {
  require(calib_size_m >= 1 && rank_ell >= 1 && rank_ell <= calib_size_m, ErrorKind::kDomain,
          "beta_moments requires 1 <= ell <= m");
  const double l = static_cast<double>(rank_ell);
  const double m1 = static_cast<double>(calib_size_m) + 1.0;
  const double rest = static_cast<double>(calib_size_m + 1 - rank_ell);
  return {l / m1, l * rest / (m1 * m1 * (m1 + 1.0))};
}

std::uint64_t select_rank(std::uint64_t calib_size_m, double epsilon) {
  require(calib_size_m >= 1, ErrorKind::kDomain, "calibration size m must be positive");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::kDomain, "epsilon must lie in (0, 1)");
  const double value = (static_cast<double>(calib_size_m) + 1.0) * (1.0 - epsilon);
  // Products that are integers in exact arithmetic must not round up.
  const double nearest = std::round(value);
  const double rank =
      std::fabs(value - nearest) <= 1e-12 * std::max(1.0, value) ? nearest : std::ceil(value);
  if (rank < 1.0) return 1;
  if (rank > static_cast<double>(calib_size_m)) return calib_size_m;
  return static_cast<std::uint64_t>(rank);
}

}  // namespace confreach
