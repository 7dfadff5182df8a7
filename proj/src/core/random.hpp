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
#include <initializer_list>
#include <random>

namespace confreach {

/// Named random streams. Every stochastic stage draws from its own stream so
/// that changing one sample size never shifts the draws of another stage.
enum class Stream : std::uint64_t {
  kTrain = 1,
  kAuxiliary = 2,
  kCalibration = 3,
  kAudit = 4,
  kValidation = 5,
  kPixelSelection = 6,
  kModelInit = 7,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// sub-seed = splitmix64(seed ^ splitmix64(tag)), folded left over the tags.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept;

inline std::uint64_t stream_seed(std::uint64_t root, Stream stream) noexcept {
  return derive_seed(root, {static_cast<std::uint64_t>(stream)});
}

/// mt19937_64 with distribution code written out here: the standard library's
/// distributions are implementation-defined, the engine is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller, second variate cached).
  double normal();

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace confreach
