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

#pragma once

#include <cstdint>

namespace confreach {

/// The (epsilon, rank, calibration size) triple behind a double-step
/// guarantee Pr[ Pr[P] >= 1 - epsilon ] >= confidence_delta2.
struct GuaranteeSpec {
  double epsilon = 0.0;
  std::uint64_t rank_ell = 0;
  std::uint64_t calib_size_m = 0;
  double coverage_delta1 = 0.0;    // 1 - epsilon
  double confidence_delta2 = 0.0;  // 1 - betacdf_{1-eps}(ell, m + 1 - ell)
  double confidence_miss = 0.0;    // betacdf_{1-eps}(ell, m + 1 - ell), kept for digits near 1
};

/// Regularized incomplete beta I_x(a, b) together with its complement.
struct BetaTail {
  double lower = 0.0;  // I_x(a, b)
  double upper = 0.0;  // 1 - I_x(a, b)
};

struct BetaMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// log B(a, b). Stirling-difference form for large arguments so that shape
/// parameters in the millions keep full relative precision.
double log_beta(double a, double b);

/// I_x(a, b) and 1 - I_x(a, b). `y` must equal 1 - x; passing it separately
/// lets callers hand over a complement (e.g. epsilon) without the rounding of
/// forming 1 - (1 - epsilon).
BetaTail incomplete_beta(double x, double y, double a, double b);

/// Regularized incomplete beta function I_x(a, b) (the Beta(a, b) CDF).
/// Throws ErrorKind::kDomain for x outside [0, 1] or non-positive shapes.
double beta_cdf(double x, double a, double b);

/// Inverse of beta_cdf in x, by bisection. p in [0, 1].
double beta_quantile(double p, double a, double b);

/// Populates a GuaranteeSpec; confidence is 1 - I_{1-eps}(ell, m + 1 - ell).
GuaranteeSpec guarantee_confidence(double epsilon, std::uint64_t rank_ell,
                                   std::uint64_t calib_size_m);

/// Mean and variance of Beta(ell, m + 1 - ell).
BetaMoments beta_moments(std::uint64_t rank_ell, std::uint64_t calib_size_m);

/// ceil((m + 1)(1 - epsilon)) clamped to [1, m].
std::uint64_t select_rank(std::uint64_t calib_size_m, double epsilon);

}  // namespace confreach
