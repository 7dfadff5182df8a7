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

#include "core/calibrate.hpp"
#include "core/guarantees.hpp"
#include "core/model.hpp"
#include "core/pca.hpp"

namespace confreach {

enum class ClipNorm { kLinf, kL1 };

const char* clip_norm_name(ClipNorm norm);
ClipNorm parse_clip_norm(const std::string& name);

/// Convex hull of t reduced training points, stored row-major t x N.
struct HullModel {
  std::size_t count = 0;  // t
  std::size_t dim = 0;    // N
  std::vector<double> points;
  /// Ascending indices of the points that can be vertices; empty means all.
  /// Clipping solves over these only, and alpha is zero on the rest.
  std::vector<std::size_t> vertices;

  std::span<const double> point(std::size_t j) const {
    return std::span<const double>(points).subspan(j * dim, dim);
  }
  /// Fewer than N + 1 points span a degenerate hull.
  bool degenerate() const { return count < dim + 1; }
};

struct ClipResult {
  std::vector<double> projected;  // v_hat
  std::vector<double> alpha;
  double residual = 0.0;
};

/// Closest point of the hull to v in the chosen norm, via a linear program.
ClipResult clip(std::span<const double> v, const HullModel& hull, ClipNorm norm = ClipNorm::kLinf);

/// Ascending indices of a subset of points with the same convex hull as all
/// of them. Points inside the hull of the others are left out, so clips over
/// the subset solve smaller programs with the same optimal residual.
std::vector<std::size_t> vertex_candidates(const HullModel& hull, unsigned threads = 1);

/// g = A clip(A^T y) for a model output y.
std::vector<double> surrogate_from_output(std::span<const double> y, const ProjectionBasis& basis,
                                          const HullModel& hull, ClipNorm norm);

/// g(x) = A clip(A^T f(x)).
std::vector<double> surrogate_predict(const MlpNetwork& model, const ProjectionBasis& basis,
                                      const HullModel& hull, std::span<const double> x,
                                      ClipNorm norm = ClipNorm::kLinf);

/// Hull of the lifted training points (Minkowski-summed with the error box).
struct SurrogateReachSet {
  ProjectionBasis basis;
  HullModel hull;
  ClipNorm norm = ClipNorm::kLinf;
  CenterScale error_scale;     // centre c_q and tau of q = f - g
  std::vector<double> sigma;   // inflation tau_q * R_ell
  double threshold = 0.0;      // R_ell of the error scores
  std::vector<double> lift_lb;
  std::vector<double> lift_ub;
  GuaranteeSpec guarantee;
};

struct SurrogateOptions {
  std::size_t components = 0;  // N; 0 picks min(t - 1, 64, n), at least 1
  ClipNorm norm = ClipNorm::kLinf;
  PcaOptions pca;
  unsigned threads = 1;
};

/// Builds the surrogate reachset from model outputs already sampled from
/// disjoint streams: `train` (t x n) for the basis and hull, `aux` (t' x n)
/// for the error normalization, `calib` (m x n) for the error threshold.
SurrogateReachSet build_surrogate_from_outputs(std::span<const double> train, std::size_t t,
                                               std::span<const double> aux, std::size_t tprime,
                                               std::span<const double> calib, std::size_t m,
                                               std::size_t n, const GuaranteeSpec& guarantee,
                                               const SurrogateOptions& options);

/// Errors q = y - g(y) for `count` row-major outputs, computed in parallel.
std::vector<double> surrogate_errors(std::span<const double> outputs, std::size_t count,
                                     const SurrogateReachSet& sr, unsigned threads);

struct IntervalBounds {
  std::vector<double> lo;
  std::vector<double> hi;

  bool contains(std::span<const double> y) const;
  double total_width() const;
};

/// [c_q + lb - sigma, c_q + ub + sigma] per component.
IntervalBounds project_intervals(const SurrogateReachSet& sr);
/// [c - sigma, c + sigma] per component.
IntervalBounds project_intervals(const HyperRectReachSet& rs);

/// Hull points as "HULL v1 <t> <N>" header plus row-major binary64. With a
/// vertex list the header is "HULL v2 <t> <N> <k>" and the k indices follow
/// the points, also as binary64.
void save_hull(const HullModel& hull, const std::string& path);
HullModel load_hull(const std::string& path);

}  // namespace confreach
