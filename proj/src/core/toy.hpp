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
#include <string>
#include <vector>

#include "core/verify.hpp"

namespace confreach {

/// Deep random MLP on the unit cube [0, 1]^in, analysed with both reachset
/// constructions from shared calibration data.
struct ToyConfig {
  std::size_t depth = 60;
  std::size_t width = 100;
  std::size_t inputs = 784;
  std::size_t outputs = 2;
  std::size_t m = 200000;
  std::size_t ell = 199998;
  double epsilon = 1e-4;
  std::size_t t_naive = 10000;
  std::size_t t_surrogate = 4000;
  std::size_t tprime = 10000;
  std::size_t components = 0;  // 0 picks min(t - 1, 64, n)
  std::size_t validation = 100000;
  std::size_t cloud_points = 2000;  // validation outputs kept for plotting
  std::uint64_t seed = 0;
  unsigned threads = 0;
  ClipNorm norm = ClipNorm::kLinf;
};

struct ToyResult {
  ToyConfig config;
  GuaranteeSpec guarantee;
  ReachsetResult naive;
  ReachsetResult surrogate;
  std::size_t naive_outside = 0;
  std::size_t surrogate_outside = 0;
  double naive_outside_fraction = 0.0;
  double surrogate_outside_fraction = 0.0;
  double naive_width = 0.0;
  double surrogate_width = 0.0;
  std::vector<double> cloud;  // first cloud_points validation outputs, row-major
};

ToyResult run_toy(const ToyConfig& config);

/// Writes cloud.csv, bounds.csv and summary.json into `dir`.
void write_toy_dir(const std::string& dir, const ToyResult& result);

std::string toy_summary_json(const ToyResult& result);

}  // namespace confreach
