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

#include "core/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace confreach {

CenterScale center_and_scales(std::span<const double> outputs, std::size_t count,
                              std::size_t dim) {
  require(count >= 1, ErrorKind::kDomain, "training set is empty");
  require(dim >= 1, ErrorKind::kDimension, "output dimension is zero");
  require(outputs.size() == count * dim, ErrorKind::kDimension,
          "training outputs have the wrong length");
  CenterScale cs;
  cs.center.assign(dim, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t k = 0; k < dim; ++k) cs.center[k] += outputs[j * dim + k];
  }
  for (double& c : cs.center) c /= static_cast<double>(count);

  std::vector<double> max_dev(dim, 0.0);
  double total_dev = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = std::abs(outputs[j * dim + k] - cs.center[k]);
      require(std::isfinite(d), ErrorKind::kNumerical, "non-finite training output");
      total_dev += d;
      max_dev[k] = std::max(max_dev[k], d);
    }
  }
  cs.tau_star = 1e-5 * total_dev / (static_cast<double>(dim) * static_cast<double>(count));
  if (cs.tau_star < kTauFloor) {
    cs.tau_star = kTauFloor;
    cs.floor_applied = true;
  }
  cs.tau.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) cs.tau[k] = std::max(cs.tau_star, max_dev[k]);
  return cs;
}

double nonconformity(std::span<const double> y, const CenterScale& cs) {
  require(y.size() == cs.dim(), ErrorKind::kDimension,
          "score input has length " + std::to_string(y.size()) + ", expected " +
              std::to_string(cs.dim()));
  double r = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    r = std::max(r, std::abs(y[k] - cs.center[k]) / cs.tau[k]);
  }
  return r;
}

double CalibrationSet::at_rank(std::size_t ell) const {
  require(ell >= 1 && ell <= scores.size(), ErrorKind::kDomain,
          "rank " + std::to_string(ell) + " outside [1, " + std::to_string(scores.size()) + "]");
  return scores[ell - 1];
}

CalibrationSet calibration_from_scores(std::vector<double> scores, std::string source) {
  require(!scores.empty(), ErrorKind::kDomain, "calibration set is empty");
  for (double s : scores) {
    require(std::isfinite(s) && s >= 0.0, ErrorKind::kNumerical,
            "calibration score is negative or not finite");
  }
  std::stable_sort(scores.begin(), scores.end());
  return CalibrationSet{std::move(scores), std::move(source)};
}

CalibrationSet build_calibration(std::span<const double> outputs, std::size_t count,
                                 const CenterScale& cs, std::string source) {
  const std::size_t dim = cs.dim();
  require(outputs.size() == count * dim, ErrorKind::kDimension,
          "calibration outputs have the wrong length");
  std::vector<double> scores(count);
  for (std::size_t j = 0; j < count; ++j) scores[j] = nonconformity(outputs.subspan(j * dim, dim), cs);
  return calibration_from_scores(std::move(scores), std::move(source));
}

bool HyperRectReachSet::contains(std::span<const double> y) const {
  if (y.size() != center.size()) return false;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!(y[k] >= center[k] - sigma[k] && y[k] <= center[k] + sigma[k])) return false;
  }
  return true;
}

HyperRectReachSet naive_reachset(const CalibrationSet& calib, const CenterScale& cs,
                                 const GuaranteeSpec& guarantee) {
  require(guarantee.calib_size_m == calib.size(), ErrorKind::kDimension,
          "guarantee was computed for m = " + std::to_string(guarantee.calib_size_m) +
              " but the calibration set holds " + std::to_string(calib.size()) + " scores");
  HyperRectReachSet rs;
  rs.threshold = calib.at_rank(guarantee.rank_ell);
  rs.center = cs.center;
  rs.sigma.resize(cs.dim());
  for (std::size_t k = 0; k < cs.dim(); ++k) rs.sigma[k] = cs.tau[k] * rs.threshold;
  rs.guarantee = guarantee;
  return rs;
}

}  // namespace confreach
