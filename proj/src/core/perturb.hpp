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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/tensor.hpp"

namespace confreach {

enum class Distribution {
  kUniformBox,       // each lambda(i) uniform on [lower(i), upper(i)]
  kUniformL2Ball,    // lambda uniform in the Euclidean ball of radius e
  kUniformLinfBall,  // lambda uniform in [-e, e]^r
};

const char* distribution_name(Distribution d);
Distribution parse_distribution(const std::string& name);

/// One noise image stored sparsely: the listed flat indices hold the listed
/// values, everything else is zero.
struct SparseNoise {
  std::vector<std::size_t> indices;
  std::vector<double> values;
};

/// Pixel picked by the darkening adversary (zero-based row, column).
struct PixelCoord {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const PixelCoord&) const = default;
};

/// The input set I = { x + sum_i lambda(i) x_i^noise : lambda in box } and the
/// distribution W over it.
struct PerturbationSpec {
  ImageTensor base;
  Distribution distribution = Distribution::kUniformBox;
  /// Unit basis noise e_1 ... e_{n0}, kept implicit for global balls.
  bool implicit_identity = false;
  std::vector<SparseNoise> noise;
  std::vector<double> lambda_lower;
  std::vector<double> lambda_upper;
  double radius = 0.0;

  // Provenance, enough to rebuild the set exactly.
  std::string kind;  // "darkening", "l2", "linf" or "box"
  std::string base_path;
  double pixel_fraction = 0.0;
  double intensity_threshold = 0.0;
  double min_darkening = 0.0;
  std::uint64_t selection_seed = 0;
  std::vector<PixelCoord> selected_pixels;

  /// Number of coefficients r.
  std::size_t dimension() const { return lambda_lower.size(); }

  /// x + sum_i lambda(i) x_i^noise without clamping. Throws kDomain when
  /// lambda leaves the coefficient box.
  ImageTensor apply(std::span<const double> lambda) const;

  /// Same as apply() into a preallocated flat buffer, no box check.
  void apply_into(std::span<const double> lambda, std::span<double> out) const;

  /// Membership of lambda in the support of the distribution (box or ball),
  /// with absolute slack `tol`.
  bool contains(std::span<const double> lambda, double tol = 0.0) const;
};

/// General box spec from explicit noise images; validates shapes and bounds.
PerturbationSpec make_box_spec(ImageTensor base, std::vector<SparseNoise> noise,
                               std::vector<double> lower, std::vector<double> upper);

/// Darkening adversary: picks ceil(fraction * #eligible) pixels brighter than
/// `threshold` in every channel and darkens each channel independently, by at
/// least `min_darkening` and at most down to zero.
PerturbationSpec build_darkening(const ImageTensor& x, double pixel_fraction, double threshold,
                                 double min_darkening, std::uint64_t seed);

enum class BallNorm { kL2, kLinf };

/// Uniform perturbation of every input coordinate inside an l2 or linf ball
/// of radius e around x.
PerturbationSpec build_global_ball(const ImageTensor& x, BallNorm norm, double radius);

/// Samples are generated in shards of this many draws; shard s draws from
/// derive_seed(seed, {s}), so sample k is the same whichever worker or batch
/// produces it.
inline constexpr std::size_t kShardSize = 256;

/// Writes the lambda vectors of samples [first, first + count) (row-major,
/// count x r) where `first` is a multiple of kShardSize.
void sample_lambdas_shard(const PerturbationSpec& spec, std::uint64_t seed, std::size_t shard,
                          std::size_t count, std::span<double> lambdas);

struct PerturbationSample {
  std::vector<double> lambda;
  ImageTensor image;
};

/// i.i.d. draws from the set's distribution, reproducible from `seed`.
std::vector<PerturbationSample> sample(const PerturbationSpec& spec, std::size_t count,
                                       std::uint64_t seed);

/// Runs `body(first, count, lambdas, outputs)` once per shard with model
/// outputs of the sampled perturbed inputs; shards may run concurrently.
void for_each_output_shard(
    const MlpNetwork& model, const PerturbationSpec& spec, std::size_t count, std::uint64_t seed,
    unsigned threads,
    const std::function<void(std::size_t first, std::size_t n, std::span<const double> lambdas,
                             std::span<const double> outputs)>& body);

/// Model outputs for `count` samples, row-major count x output_dim.
std::vector<double> evaluate_outputs(const MlpNetwork& model, const PerturbationSpec& spec,
                                     std::size_t count, std::uint64_t seed, unsigned threads);

/// JSON manifest of the set (provenance, bounds, pixels) and its inverse.
/// Noise values are not stored for darkening and balls; they are rebuilt from
/// the base image.
std::string perturbation_to_json(const PerturbationSpec& spec);
PerturbationSpec perturbation_from_json(const std::string& text, const ImageTensor& base);

}  // namespace confreach
