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

#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "core/binary_io.hpp"
#include "core/error.hpp"
#include "core/random.hpp"

namespace confreach {
namespace {

constexpr std::size_t kBatchBlock = 64;
constexpr std::size_t kMaxDim = std::size_t{1} << 31;

// Every dot product uses one fixed summation order: eight lane sums over
// k = q (mod 8), folded by a fixed tree, then the scalar tail. The blocked
// kernel below repeats that order exactly, so a sample's output does not
// depend on the batch it was computed in.
constexpr std::size_t kLanes = 8;
typedef double Lanes __attribute__((vector_size(kLanes * sizeof(double))));

inline Lanes load(const double* p) {
  Lanes v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline double fold(Lanes v) {
  return ((v[0] + v[4]) + (v[2] + v[6])) + ((v[1] + v[5]) + (v[3] + v[7]));
}

inline double dot1(const double* w, const double* x, std::size_t n) {
  Lanes acc{};
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) acc += load(w + k) * load(x + k);
  double s = fold(acc);
  for (; k < n; ++k) s += w[k] * x[k];
  return s;
}

// Four weight rows against four samples: out[r][q] = w_r . x_q.
inline void dot4x4(const double* w, std::size_t w_stride, const double* x, std::size_t x_stride,
                   std::size_t n, double out[4][4]) {
  Lanes acc[4][4] = {};
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const Lanes x0 = load(x + k), x1 = load(x + x_stride + k);
    const Lanes x2 = load(x + 2 * x_stride + k), x3 = load(x + 3 * x_stride + k);
    for (int r = 0; r < 4; ++r) {
      const Lanes wr = load(w + r * w_stride + k);
      acc[r][0] += wr * x0;
      acc[r][1] += wr * x1;
      acc[r][2] += wr * x2;
      acc[r][3] += wr * x3;
    }
  }
  for (int r = 0; r < 4; ++r) {
    const double* wr = w + r * w_stride;
    for (int q = 0; q < 4; ++q) {
      const double* xq = x + q * x_stride;
      double s = fold(acc[r][q]);
      for (std::size_t j = k; j < n; ++j) s += wr[j] * xq[j];
      out[r][q] = s;
    }
  }
}

inline double activate(double v, bool relu) { return (relu && v < 0.0) ? 0.0 : v; }

void dense_forward(const DenseLayer& layer, bool relu, const double* in, std::size_t count,
                   double* out) {
  const std::size_t n_in = layer.inputs;
  const std::size_t n_out = layer.outputs;
  const double* w = layer.weights.data();
  std::size_t s = 0;
  for (; s + 4 <= count; s += 4) {
    const double* x = in + s * n_in;
    std::size_t o = 0;
    for (; o + 4 <= n_out; o += 4) {
      double acc[4][4];
      dot4x4(w + o * n_in, n_in, x, n_in, n_in, acc);
      for (int r = 0; r < 4; ++r) {
        for (int q = 0; q < 4; ++q) {
          out[(s + q) * n_out + o + r] = activate(acc[r][q] + layer.bias[o + r], relu);
        }
      }
    }
    for (; o < n_out; ++o) {
      for (int q = 0; q < 4; ++q) {
        out[(s + q) * n_out + o] =
            activate(dot1(w + o * n_in, x + q * n_in, n_in) + layer.bias[o], relu);
      }
    }
  }
  for (; s < count; ++s) {
    const double* x = in + s * n_in;
    for (std::size_t o = 0; o < n_out; ++o) {
      out[s * n_out + o] = activate(dot1(w + o * n_in, x, n_in) + layer.bias[o], relu);
    }
  }
}

}  // namespace

MlpNetwork::MlpNetwork(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  require(!layers_.empty(), ErrorKind::kDimension, "network needs at least one layer");
  dims_.push_back(layers_.front().inputs);
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const DenseLayer& layer = layers_[k];
    require(layer.inputs > 0 && layer.outputs > 0, ErrorKind::kDimension,
            "layer " + std::to_string(k) + " has a zero dimension");
    require(layer.inputs == dims_.back(), ErrorKind::kDimension,
            "layer " + std::to_string(k) + " expects " + std::to_string(layer.inputs) +
                " inputs but the previous layer produces " + std::to_string(dims_.back()));
    require(layer.weights.size() == layer.inputs * layer.outputs, ErrorKind::kDimension,
            "layer " + std::to_string(k) + " weight matrix has the wrong size");
    require(layer.bias.size() == layer.outputs, ErrorKind::kDimension,
            "layer " + std::to_string(k) + " bias has the wrong length");
    dims_.push_back(layer.outputs);
  }
  max_width_ = *std::max_element(dims_.begin(), dims_.end());
}

MlpNetwork MlpNetwork::random(std::span<const std::size_t> dims, std::uint64_t seed) {
  require(dims.size() >= 2, ErrorKind::kDimension, "random network needs at least two dims");
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::kModelInit)}));
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    DenseLayer layer;
    layer.inputs = dims[k];
    layer.outputs = dims[k + 1];
    const double scale = std::sqrt(2.0 / static_cast<double>(layer.inputs));
    layer.weights.resize(layer.inputs * layer.outputs);
    for (double& w : layer.weights) w = scale * rng.normal();
    layer.bias.resize(layer.outputs);
    for (double& b : layer.bias) b = 0.1 * rng.normal();
    layers.push_back(std::move(layer));
  }
  return MlpNetwork(std::move(layers));
}

void MlpNetwork::run_layers(std::span<const double> inputs, std::size_t count,
                            std::size_t layer_count, std::span<double> outputs) const {
  std::vector<double> a(std::min(count, kBatchBlock) * max_width_);
  std::vector<double> b(a.size());
  const std::size_t in_dim = input_dim();
  const std::size_t out_dim = dims_[layer_count];
  for (std::size_t start = 0; start < count; start += kBatchBlock) {
    const std::size_t block = std::min(kBatchBlock, count - start);
    const double* src = inputs.data() + start * in_dim;
    double* dst = a.data();
    for (std::size_t k = 0; k < layer_count; ++k) {
      const bool relu = k + 1 < layers_.size();
      dense_forward(layers_[k], relu, src, block, dst);
      src = dst;
      dst = (dst == a.data()) ? b.data() : a.data();
    }
    std::copy(src, src + block * out_dim, outputs.data() + start * out_dim);
  }
}

std::vector<double> MlpNetwork::infer(std::span<const double> input) const {
  std::vector<double> out(output_dim());
  infer_batch(input, 1, out);
  return out;
}

void MlpNetwork::infer_batch(std::span<const double> inputs, std::size_t count,
                             std::span<double> outputs) const {
  require(inputs.size() == count * input_dim(), ErrorKind::kDimension,
          "inference input has length " + std::to_string(inputs.size()) + ", expected " +
              std::to_string(count * input_dim()));
  require(outputs.size() == count * output_dim(), ErrorKind::kDimension,
          "inference output buffer has the wrong length");
  run_layers(inputs, count, layers_.size(), outputs);
}

std::vector<double> MlpNetwork::forward_prefix(std::span<const double> input,
                                               std::size_t layer_count) const {
  require(layer_count >= 1 && layer_count <= layers_.size(), ErrorKind::kDimension,
          "forward_prefix layer count out of range");
  require(input.size() == input_dim(), ErrorKind::kDimension, "input length mismatch");
  std::vector<double> out(dims_[layer_count]);
  run_layers(input, 1, layer_count, out);
  return out;
}

void save_model(const MlpNetwork& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write model '" + path + "'");
  out << "MLP v1 " << model.layers().size();
  for (std::size_t d : model.dims()) out << ' ' << d;
  out << '\n';
  for (const DenseLayer& layer : model.layers()) {
    write_f64_le(out, layer.weights);
    write_f64_le(out, layer.bias);
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for model '" + path + "'");
}

MlpNetwork load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open model '" + path + "'");
  std::string line;
  require(read_header_line(in, line), ErrorKind::kFormat,
          "malformed header in model '" + path + "'");
  std::istringstream header(line);
  std::string magic, version;
  std::size_t layer_count = 0;
  header >> magic >> version >> layer_count;
  require(header && magic == "MLP" && version == "v1" && layer_count >= 1, ErrorKind::kFormat,
          "malformed header in model '" + path + "'");
  std::vector<std::size_t> dims(layer_count + 1);
  for (std::size_t& d : dims) {
    header >> d;
    require(static_cast<bool>(header) && d > 0 && d < kMaxDim, ErrorKind::kFormat,
            "malformed header in model '" + path + "': bad dimension list");
  }
  std::string extra;
  require(!(header >> extra), ErrorKind::kFormat,
          "malformed header in model '" + path + "': too many dimensions");

  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k < layer_count; ++k) {
    DenseLayer layer;
    layer.inputs = dims[k];
    layer.outputs = dims[k + 1];
    layer.weights.resize(layer.inputs * layer.outputs);
    layer.bias.resize(layer.outputs);
    require(read_f64_le(in, layer.weights) && read_f64_le(in, layer.bias), ErrorKind::kFormat,
            "truncated payload in model '" + path + "' (layer " + std::to_string(k) + " of " +
                std::to_string(layer_count) + ")");
    layers.push_back(std::move(layer));
  }
  char probe = 0;
  require(!in.get(probe), ErrorKind::kFormat,
          "unexpected trailing data after the last weight block in '" + path + "'");
  return MlpNetwork(std::move(layers));
}

}  // namespace confreach
