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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "core/guarantees.hpp"

namespace confreach {

/// Absolute floor under every normalization factor; only reached when the
/// training cloud is degenerate.
inline constexpr double kTauFloor = 1e-12;

/// Center and per-coordinate normalization of a training cloud.
struct CenterScale {
  std::vector<double> center;
  std::vector<double> tau;
  double tau_star = 0.0;
  bool floor_applied = false;  // the absolute floor replaced a zero tau_star

  std::size_t dim() const { return center.size(); }
};

/// c = mean, tau_star = 1e-5 * mean absolute deviation over all coordinates,
/// tau_k = max(tau_star, max_j |y_j(k) - c(k)|). `outputs` is row-major
/// count x dim.
CenterScale center_and_scales(std::span<const double> outputs, std::size_t count, std::size_t dim);

/// max_k |y(k) - c(k)| / tau_k.
double nonconformity(std::span<const double> y, const CenterScale& cs);

/// Sorted (ascending) nonconformity scores of m calibration samples.
struct CalibrationSet {
  std::vector<double> scores;
  std::string source;  // "outputs" or "surrogate-error"

  std::size_t size() const { return scores.size(); }
  /// Score of one-based ascending rank ell.
  double at_rank(std::size_t ell) const;
};

CalibrationSet build_calibration(std::span<const double> outputs, std::size_t count,
                                 const CenterScale& cs, std::string source = "outputs");

/// Sorts precomputed scores (stable) into a calibration set.
CalibrationSet calibration_from_scores(std::vector<double> scores, std::string source);

/// Hyper-rectangle c +- sigma with sigma_k = tau_k * R_ell.
struct HyperRectReachSet {
  std::vector<double> center;
  std::vector<double> sigma;
  double threshold = 0.0;  // R_ell
  GuaranteeSpec guarantee;

  bool contains(std::span<const double> y) const;
};

HyperRectReachSet naive_reachset(const CalibrationSet& calib, const CenterScale& cs,
                                 const GuaranteeSpec& guarantee);

}  // namespace confreach
