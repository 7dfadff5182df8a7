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

#include "core/perturb.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/random.hpp"

namespace confreach {
namespace {

using nlohmann::json;

void check_bounds(const std::vector<double>& lower, const std::vector<double>& upper) {
  require(lower.size() == upper.size(), ErrorKind::kDimension,
          "lambda bounds have different lengths");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    require(std::isfinite(lower[i]) && std::isfinite(upper[i]), ErrorKind::kDomain,
            "lambda bound " + std::to_string(i) + " is not finite");
    require(lower[i] <= upper[i], ErrorKind::kDomain,
            "lambda lower bound exceeds upper bound at coefficient " + std::to_string(i));
  }
}

// Darkening noise for a fixed list of pixels: one coefficient per channel.
void fill_darkening(PerturbationSpec& spec) {
  const ImageTensor& x = spec.base;
  spec.noise.clear();
  spec.lambda_lower.clear();
  spec.lambda_upper.clear();
  for (const PixelCoord& p : spec.selected_pixels) {
    require(p.row < x.height && p.col < x.width, ErrorKind::kDimension,
            "darkened pixel lies outside the image");
    for (std::size_t c = 0; c < x.channels; ++c) {
      const std::size_t k = x.index(p.row, p.col, c);
      const double value = x.data[k];
      require(value > 0.0, ErrorKind::kDomain, "darkened channel has zero intensity");
      require(spec.min_darkening <= value, ErrorKind::kDomain,
              "minimum darkening exceeds the intensity of a selected channel");
      spec.noise.push_back(SparseNoise{{k}, {-value}});
      spec.lambda_lower.push_back(spec.min_darkening / value);
      spec.lambda_upper.push_back(1.0);
    }
  }
}

void ball_bounds(PerturbationSpec& spec) {
  const std::size_t n0 = spec.base.size();
  spec.lambda_lower.assign(n0, -spec.radius);
  spec.lambda_upper.assign(n0, spec.radius);
}

}  // namespace

const char* distribution_name(Distribution d) {
  switch (d) {
    case Distribution::kUniformBox:
      return "uniform-box";
    case Distribution::kUniformL2Ball:
      return "uniform-l2-ball";
    case Distribution::kUniformLinfBall:
      return "uniform-linf-ball";
  }
  return "unknown";
}

Distribution parse_distribution(const std::string& name) {
  if (name == "uniform-box") return Distribution::kUniformBox;
  if (name == "uniform-l2-ball") return Distribution::kUniformL2Ball;
  if (name == "uniform-linf-ball") return Distribution::kUniformLinfBall;
  fail(ErrorKind::kFormat, "unknown distribution '" + name + "'");
}

ImageTensor PerturbationSpec::apply(std::span<const double> lambda) const {
  require(lambda.size() == dimension(), ErrorKind::kDimension,
          "lambda has length " + std::to_string(lambda.size()) + ", expected " +
              std::to_string(dimension()));
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    require(lambda[i] >= lambda_lower[i] && lambda[i] <= lambda_upper[i], ErrorKind::kDomain,
            "lambda(" + std::to_string(i) + ") lies outside its bounds");
  }
  ImageTensor out(base.height, base.width, base.channels);
  apply_into(lambda, out.data);
  return out;
}

void PerturbationSpec::apply_into(std::span<const double> lambda, std::span<double> out) const {
  std::copy(base.data.begin(), base.data.end(), out.begin());
  if (implicit_identity) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += lambda[k];
    return;
  }
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const SparseNoise& n = noise[i];
    for (std::size_t q = 0; q < n.indices.size(); ++q) out[n.indices[q]] += lambda[i] * n.values[q];
  }
}

bool PerturbationSpec::contains(std::span<const double> lambda, double tol) const {
  if (lambda.size() != dimension()) return false;
  if (distribution == Distribution::kUniformL2Ball) {
    double sq = 0.0;
    for (double v : lambda) sq += v * v;
    return std::sqrt(sq) <= radius + tol;
  }
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < lambda_lower[i] - tol || lambda[i] > lambda_upper[i] + tol) return false;
  }
  return true;
}

PerturbationSpec make_box_spec(ImageTensor base, std::vector<SparseNoise> noise,
                               std::vector<double> lower, std::vector<double> upper) {
  check_bounds(lower, upper);
  require(noise.size() == lower.size(), ErrorKind::kDimension,
          "number of noise images differs from the number of lambda bounds");
  for (const SparseNoise& n : noise) {
    require(n.indices.size() == n.values.size(), ErrorKind::kDimension,
            "sparse noise index/value lengths differ");
    for (std::size_t k : n.indices) {
      require(k < base.size(), ErrorKind::kDimension,
              "noise image does not share the base image's shape");
    }
  }
  PerturbationSpec spec;
  spec.base = std::move(base);
  spec.distribution = Distribution::kUniformBox;
  spec.noise = std::move(noise);
  spec.lambda_lower = std::move(lower);
  spec.lambda_upper = std::move(upper);
  spec.kind = "box";
  return spec;
}

PerturbationSpec build_darkening(const ImageTensor& x, double pixel_fraction, double threshold,
                                 double min_darkening, std::uint64_t seed) {
  require(pixel_fraction > 0.0 && pixel_fraction <= 1.0, ErrorKind::kDomain,
          "pixel fraction must lie in (0, 1]");
  require(min_darkening >= 0.0, ErrorKind::kDomain, "minimum darkening must be non-negative");
  std::vector<PixelCoord> eligible;
  for (std::size_t i = 0; i < x.height; ++i) {
    for (std::size_t j = 0; j < x.width; ++j) {
      bool bright = true;
      for (std::size_t c = 0; c < x.channels && bright; ++c) bright = x.at(i, j, c) > threshold;
      if (bright) eligible.push_back({i, j});
    }
  }
  require(!eligible.empty(), ErrorKind::kDomain,
          "no eligible pixel: nothing is brighter than the threshold in every channel");
  const auto wanted = static_cast<std::size_t>(
      std::ceil(pixel_fraction * static_cast<double>(eligible.size()) - 1e-12));
  const std::size_t r_prime = std::clamp<std::size_t>(wanted, 1, eligible.size());

  // Partial Fisher-Yates over the row-major eligible list.
  Rng rng(stream_seed(seed, Stream::kPixelSelection));
  for (std::size_t k = 0; k < r_prime; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(eligible.size() - k));
    std::swap(eligible[k], eligible[pick]);
  }
  eligible.resize(r_prime);
  std::sort(eligible.begin(), eligible.end(), [](const PixelCoord& a, const PixelCoord& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  PerturbationSpec spec;
  spec.base = x;
  spec.distribution = Distribution::kUniformBox;
  spec.kind = "darkening";
  spec.pixel_fraction = pixel_fraction;
  spec.intensity_threshold = threshold;
  spec.min_darkening = min_darkening;
  spec.selection_seed = seed;
  spec.selected_pixels = std::move(eligible);
  fill_darkening(spec);
  return spec;
}

PerturbationSpec build_global_ball(const ImageTensor& x, BallNorm norm, double radius) {
  require(radius >= 0.0 && std::isfinite(radius), ErrorKind::kDomain,
          "ball radius must be finite and non-negative");
  require(x.size() > 0, ErrorKind::kDimension, "empty base image");
  PerturbationSpec spec;
  spec.base = x;
  spec.implicit_identity = true;
  spec.radius = radius;
  spec.distribution =
      norm == BallNorm::kL2 ? Distribution::kUniformL2Ball : Distribution::kUniformLinfBall;
  spec.kind = norm == BallNorm::kL2 ? "l2" : "linf";
  ball_bounds(spec);
  return spec;
}

void sample_lambdas_shard(const PerturbationSpec& spec, std::uint64_t seed, std::size_t shard,
                          std::size_t count, std::span<double> lambdas) {
  const std::size_t r = spec.dimension();
  require(lambdas.size() == count * r, ErrorKind::kDimension, "lambda buffer has the wrong size");
  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(shard)}));
  for (std::size_t s = 0; s < count; ++s) {
    double* lam = lambdas.data() + s * r;
    switch (spec.distribution) {
      case Distribution::kUniformBox:
        for (std::size_t i = 0; i < r; ++i) {
          lam[i] = spec.lambda_lower[i] + (spec.lambda_upper[i] - spec.lambda_lower[i]) * rng.uniform();
        }
        break;
      case Distribution::kUniformLinfBall:
        for (std::size_t i = 0; i < r; ++i) lam[i] = spec.radius * (2.0 * rng.uniform() - 1.0);
        break;
      case Distribution::kUniformL2Ball: {
        double sq = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
          lam[i] = rng.normal();
          sq += lam[i] * lam[i];
        }
        const double u = rng.uniform();
        const double scale =
            sq > 0.0 ? spec.radius * std::pow(u, 1.0 / static_cast<double>(r)) / std::sqrt(sq)
                     : 0.0;
        for (std::size_t i = 0; i < r; ++i) lam[i] *= scale;
        break;
      }
    }
  }
}

std::vector<PerturbationSample> sample(const PerturbationSpec& spec, std::size_t count,
                                       std::uint64_t seed) {
  require(count >= 1, ErrorKind::kDomain, "sample count must be at least 1");
  const std::size_t r = spec.dimension();
  std::vector<PerturbationSample> out;
  out.reserve(count);
  std::vector<double> lambdas;
  for (std::size_t first = 0; first < count; first += kShardSize) {
    const std::size_t n = std::min(kShardSize, count - first);
    lambdas.assign(n * r, 0.0);
    sample_lambdas_shard(spec, seed, first / kShardSize, n, lambdas);
    for (std::size_t s = 0; s < n; ++s) {
      PerturbationSample item;
      item.lambda.assign(lambdas.begin() + s * r, lambdas.begin() + (s + 1) * r);
      item.image = ImageTensor(spec.base.height, spec.base.width, spec.base.channels);
      spec.apply_into(item.lambda, item.image.data);
      out.push_back(std::move(item));
    }
  }
  return out;
}

void for_each_output_shard(
    const MlpNetwork& model, const PerturbationSpec& spec, std::size_t count, std::uint64_t seed,
    unsigned threads,
    const std::function<void(std::size_t, std::size_t, std::span<const double>,
                             std::span<const double>)>& body) {
  const std::size_t n0 = spec.base.size();
  require(model.input_dim() == n0, ErrorKind::kDimension,
          "model expects " + std::to_string(model.input_dim()) + " inputs but the image has " +
              std::to_string(n0) + " values");
  const std::size_t r = spec.dimension();
  const std::size_t n = model.output_dim();
  const std::size_t shards = (count + kShardSize - 1) / kShardSize;
  parallel_for(shards, threads, [&](std::size_t shard) {
    const std::size_t first = shard * kShardSize;
    const std::size_t k = std::min(kShardSize, count - first);
    std::vector<double> lambdas(k * r);
    sample_lambdas_shard(spec, seed, shard, k, lambdas);
    std::vector<double> inputs(k * n0);
    for (std::size_t s = 0; s < k; ++s) {
      spec.apply_into(std::span<const double>(lambdas).subspan(s * r, r),
                      std::span<double>(inputs).subspan(s * n0, n0));
    }
    std::vector<double> outputs(k * n);
    model.infer_batch(inputs, k, outputs);
    body(first, k, lambdas, outputs);
  });
}

std::vector<double> evaluate_outputs(const MlpNetwork& model, const PerturbationSpec& spec,
                                     std::size_t count, std::uint64_t seed, unsigned threads) {
  const std::size_t n = model.output_dim();
  std::vector<double> all(count * n);
  for_each_output_shard(model, spec, count, seed, threads,
                        [&](std::size_t first, std::size_t k, std::span<const double>,
                            std::span<const double> outputs) {
                          std::copy(outputs.begin(), outputs.begin() + k * n,
                                    all.begin() + first * n);
                        });
  return all;
}

std::string perturbation_to_json(const PerturbationSpec& spec) {
  json j;
  j["kind"] = spec.kind;
  j["distribution"] = distribution_name(spec.distribution);
  j["base_image"] = spec.base_path;
  j["shape"] = {spec.base.height, spec.base.width, spec.base.channels};
  j["dimension"] = spec.dimension();
  if (spec.kind == "darkening") {
    j["pixel_fraction"] = spec.pixel_fraction;
    j["threshold"] = spec.intensity_threshold;
    j["e"] = spec.min_darkening;
    j["seed"] = spec.selection_seed;
    json pixels = json::array();
    for (const PixelCoord& p : spec.selected_pixels) pixels.push_back({p.row, p.col});
    j["selected_pixels"] = pixels;
  } else if (spec.kind == "l2" || spec.kind == "linf") {
    j["e"] = spec.radius;
  }
  if (!spec.implicit_identity) {
    j["lambda_lower"] = spec.lambda_lower;
    j["lambda_upper"] = spec.lambda_upper;
  }
  if (spec.kind == "box") {
    json noise = json::array();
    for (const SparseNoise& n : spec.noise) noise.push_back({{"indices", n.indices}, {"values", n.values}});
    j["noise"] = noise;
  }
  return j.dump(2) + "\n";
}

PerturbationSpec perturbation_from_json(const std::string& text, const ImageTensor& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, std::string("perturbation manifest is not valid JSON: ") + e.what());
  }
  try {
    const auto shape = j.at("shape").get<std::vector<std::size_t>>();
    require(shape.size() == 3 && shape[0] == base.height && shape[1] == base.width &&
                shape[2] == base.channels,
            ErrorKind::kDimension, "perturbation manifest shape differs from the base image");
    const std::string kind = j.at("kind").get<std::string>();
    PerturbationSpec spec;
    if (kind == "darkening") {
      spec.base = base;
      spec.kind = kind;
      spec.distribution = Distribution::kUniformBox;
      spec.pixel_fraction = j.at("pixel_fraction").get<double>();
      spec.intensity_threshold = j.at("threshold").get<double>();
      spec.min_darkening = j.at("e").get<double>();
      spec.selection_seed = j.at("seed").get<std::uint64_t>();
      for (const auto& p : j.at("selected_pixels")) {
        spec.selected_pixels.push_back({p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>()});
      }
      fill_darkening(spec);
      require(spec.lambda_lower == j.at("lambda_lower").get<std::vector<double>>() &&
                  spec.lambda_upper == j.at("lambda_upper").get<std::vector<double>>(),
              ErrorKind::kFormat, "darkening bounds in the manifest do not match the base image");
    } else if (kind == "l2" || kind == "linf") {
      spec = build_global_ball(base, kind == "l2" ? BallNorm::kL2 : BallNorm::kLinf,
                               j.at("e").get<double>());
    } else if (kind == "box") {
      std::vector<SparseNoise> noise;
      for (const auto& n : j.at("noise")) {
        noise.push_back({n.at("indices").get<std::vector<std::size_t>>(),
                         n.at("values").get<std::vector<double>>()});
      }
      spec = make_box_spec(base, std::move(noise), j.at("lambda_lower").get<std::vector<double>>(),
                           j.at("lambda_upper").get<std::vector<double>>());
    } else {
      fail(ErrorKind::kFormat, "unknown perturbation kind '" + kind + "'");
    }
    spec.base_path = j.value("base_image", std::string());
    require(spec.dimension() == j.at("dimension").get<std::size_t>(), ErrorKind::kFormat,
            "perturbation manifest dimension mismatch");
    return spec;
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, std::string("malformed perturbation manifest: ") + e.what());
  }
}

}  // namespace confreach
