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
#include <limits>
#include <vector>

namespace confreach {

/// Dense linear program
///   minimize    c^T x
///   subject to  A_eq x  = b_eq
///               A_ub x <= b_ub
///               lower <= x <= upper
/// Matrices are row-major with `num_vars` columns. Empty bound vectors mean
/// lower = 0 and upper = +inf; lower may be -inf (free variable).
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<double> a_eq;
  std::vector<double> b_eq;
  std::vector<double> a_ub;
  std::vector<double> b_ub;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-11;
  double pivot_tol = 1e-11;
  std::size_t max_iterations = 100000;
  /// Consecutive degenerate pivots tolerated under Dantzig pricing before
  /// switching to Bland's rule for the rest of the solve.
  std::size_t degenerate_switch = 50;
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  double max_violation = 0.0;  // worst constraint or bound violation of x
  bool used_bland = false;
};

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

/// Two-phase dense tableau simplex. Throws ErrorKind::kInfeasible,
/// kUnbounded, or kNumerical (iteration limit).
LpSolution lp_solve(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace confreach
