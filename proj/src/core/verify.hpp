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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/calibrate.hpp"
#include "core/guarantees.hpp"
#include "core/hull.hpp"
#include "core/model.hpp"
#include "core/pca.hpp"
#include "core/perturb.hpp"
#include "core/tensor.hpp"

namespace confreach {

enum class PixelStatus : std::uint8_t { kUnknown = 0, kNonrobust = 1, kRobust = 2 };

struct PixelStatusMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<PixelStatus> status;
  ClassMask baseline;
  std::size_t robust = 0;
  std::size_t nonrobust = 0;
  std::size_t unknown = 0;
  std::size_t lower_bound_ties = 0;  // pixels whose l* came from the tie-break
  double rv = 0.0;
  GuaranteeSpec guarantee;

  PixelStatus at(std::size_t i, std::size_t j) const { return status[i * width + j]; }
};

/// Per pixel: l* = argmax of the lower bounds (lowest index on ties); unknown
/// if y_lo(l*) <= max over other classes of y_hi, else robust when l* is the
/// baseline class and nonrobust otherwise.
PixelStatusMask pixel_status(const LogitTensor& y_lo, const LogitTensor& y_hi,
                             const ClassMask& baseline);

/// 100 * #robust / #pixels.
double robustness_value(const PixelStatusMask& mask);
double average_rv(std::span<const PixelStatusMask> masks);
double average_rv(std::span<const double> rvs);

/// PGM gray levels: 255 robust, 128 nonrobust, 0 unknown.
std::vector<std::uint8_t> status_levels(const PixelStatusMask& mask);

enum class ReachMode { kNaive, kSurrogate };
const char* reach_mode_name(ReachMode mode);
ReachMode parse_reach_mode(const std::string& name);

struct PipelineConfig {
  ReachMode mode = ReachMode::kNaive;
  std::size_t m = 0;
  std::size_t ell = 0;        // 0 picks m - 1 (at least 1)
  std::size_t t = 0;          // 0 picks max(1, m / 2)
  std::size_t tprime = 0;     // 0 picks t
  std::size_t components = 0; // 0 picks min(t - 1, 64, n)
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  ClipNorm norm = ClipNorm::kLinf;
  PcaOptions pca;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct StreamSeeds {
  std::uint64_t train = 0;
  std::uint64_t auxiliary = 0;
  std::uint64_t calibration = 0;
};

StreamSeeds stream_seeds(std::uint64_t root);

/// Reachset of f over the perturbation set, before any pixel decision.
struct ReachsetResult {
  ReachMode mode = ReachMode::kNaive;
  PipelineConfig config;  // with defaults resolved
  GuaranteeSpec guarantee;
  StreamSeeds seeds;
  CenterScale center_scale;  // naive: on f; surrogate: on q
  double threshold = 0.0;    // R_ell
  std::optional<HyperRectReachSet> naive;
  std::optional<SurrogateReachSet> surrogate;
  IntervalBounds bounds;
  std::vector<StageTiming> timings;
  std::vector<std::string> flags;
};

PipelineConfig resolve_config(const PipelineConfig& config, std::size_t output_dim);

ReachsetResult compute_reachset(const MlpNetwork& model, const PerturbationSpec& spec,
                                const PipelineConfig& config);

/// Naive reachset from precomputed outputs (t x n training, m x n calibration).
ReachsetResult naive_from_outputs(std::span<const double> train, std::size_t t,
                                  std::span<const double> calib, std::size_t m, std::size_t n,
                                  const GuaranteeSpec& guarantee);

struct PipelineResult {
  ReachsetResult reach;
  LogitTensor baseline_logits;
  PixelStatusMask status;
};

/// Full segmentation pipeline: the model output is read as h x w x L logits
/// with h, w taken from the base image.
PipelineResult run_pipeline(const MlpNetwork& model, const PerturbationSpec& spec,
                            const PipelineConfig& config);
PipelineResult run_naive_pipeline(const MlpNetwork& model, const PerturbationSpec& spec,
                                  PipelineConfig config);
PipelineResult run_surrogate_pipeline(const MlpNetwork& model, const PerturbationSpec& spec,
                                      PipelineConfig config);

/// Pixel decisions for given interval bounds on the flattened logits.
PixelStatusMask classify_bounds(const MlpNetwork& model, const PerturbationSpec& spec,
                                const IntervalBounds& bounds, LogitTensor* baseline_out = nullptr);

struct ConservatismReport {
  double eps_hat = 0.0;
  std::size_t outside = 0;
  std::size_t sample_count = 0;
  double bound_ratio = 0.0;
  bool ratio_degenerate = false;  // certified width infinite or zero
  std::vector<double> empirical_lo;
  std::vector<double> empirical_hi;
};

/// Draws `sample_count` fresh perturbations from `seed` (used as given) and
/// measures miscoverage and the empirical-to-certified width ratio.
ConservatismReport conservatism_audit(const MlpNetwork& model, const PerturbationSpec& spec,
                                      std::span<const double> y_lo, std::span<const double> y_hi,
                                      std::size_t sample_count, std::uint64_t seed,
                                      unsigned threads);

/// Same measurement on outputs already in memory.
ConservatismReport audit_outputs(std::span<const double> outputs, std::size_t count,
                                 std::span<const double> y_lo, std::span<const double> y_hi);

}  // namespace confreach
