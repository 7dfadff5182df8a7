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

namespace confreach {

struct PcaOptions {
  /// Ascent step along the normalized gradient. Zero selects the locally
  /// optimal step: the best unit vector in span{a, gradient, previous step}.
  double step_size = 0.0;
  std::size_t max_iters = 10000;
  /// Relative Rayleigh-quotient improvement below which a direction may stop.
  double tol = 1e-10;
  /// Also required before stopping: ||C a - J a|| <= residual_tol * J.
  double residual_tol = 1e-10;
  unsigned threads = 1;
};

/// Top-N directions of the uncentered second moment (1/t) sum_j z_j z_j^T.
struct ProjectionBasis {
  std::size_t dim = 0;         // n
  std::size_t components = 0;  // N
  std::vector<double> a;       // column-major n x N
  std::vector<double> rayleigh;
  std::vector<std::size_t> iterations;
  std::vector<bool> converged;
  std::vector<double> residual;  // final ||C a - J a|| / max(J, tiny)

  std::span<const double> column(std::size_t k) const {
    return std::span<const double>(a).subspan(k * dim, dim);
  }
  bool all_converged() const;
};

/// Deflation PCA by projected gradient ascent on the unit sphere, using only
/// products with the stored vectors (row-major t x n).
ProjectionBasis deflate(std::span<const double> vectors, std::size_t t, std::size_t n,
                        std::size_t num_components, const PcaOptions& options = {});

/// v = A^T y.
std::vector<double> reduce(const ProjectionBasis& basis, std::span<const double> y);
/// y = A v.
std::vector<double> lift(const ProjectionBasis& basis, std::span<const double> v);

/// "PCA v1 <n> <N>" header line, then column-major little-endian binary64.
void save_basis(const ProjectionBasis& basis, const std::string& path);
ProjectionBasis load_basis(const std::string& path);

}  // namespace confreach
