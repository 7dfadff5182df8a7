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
#include <span>
#include <string>
#include <vector>

namespace confreach {

/// Dense layer, weights row-major with one row per output unit.
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs
  std::vector<double> bias;     // outputs
};

/// Feedforward network f: R^{n0} -> R^n. ReLU after every hidden layer,
/// identity on the output layer. Immutable once built; safe to share between
/// threads for inference.
class MlpNetwork {
 public:
  explicit MlpNetwork(std::vector<DenseLayer> layers);

  /// He-normal weights and small normal biases, drawn from `seed`.
  static MlpNetwork random(std::span<const std::size_t> dims, std::uint64_t seed);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_dim() const { return dims_.front(); }
  std::size_t output_dim() const { return dims_.back(); }

  std::vector<double> infer(std::span<const double> input) const;

  /// `count` row-major inputs in, `count` row-major outputs out. Each sample
  /// goes through exactly the arithmetic of infer(), so results do not depend
  /// on how samples are grouped into batches.
  void infer_batch(std::span<const double> inputs, std::size_t count,
                   std::span<double> outputs) const;

  /// Activation after the first `layer_count` layers (post-ReLU for hidden
  /// layers, raw for the output layer).
  std::vector<double> forward_prefix(std::span<const double> input, std::size_t layer_count) const;

 private:
  void run_layers(std::span<const double> inputs, std::size_t count, std::size_t layer_count,
                  std::span<double> outputs) const;

  std::vector<DenseLayer> layers_;
  std::vector<std::size_t> dims_;
  std::size_t max_width_ = 0;
};

/// Model file: text line "MLP v1 <layers> <n0> <n1> ... <n>" followed by
/// little-endian binary64 blocks, per layer the row-major weight matrix then
/// the bias vector.
void save_model(const MlpNetwork& model, const std::string& path);
MlpNetwork load_model(const std::string& path);

}  // namespace confreach
