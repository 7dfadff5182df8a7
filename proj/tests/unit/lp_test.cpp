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

#include "core/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "core/error.hpp"
#include "core/random.hpp"

namespace confreach {
namespace {

// Brute-force optimum over all vertices of { G x <= h }: every basic solution
// from n tight rows is tested for feasibility.
double vertex_enumeration_min(const Eigen::MatrixXd& g, const Eigen::VectorXd& h,
                              const Eigen::VectorXd& c) {
  const int rows = static_cast<int>(g.rows());
  const int n = static_cast<int>(g.cols());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      a.row(i) = g.row(pick[i]);
      b(i) = h(pick[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() == n) {
      const Eigen::VectorXd x = lu.solve(b);
      if (((g * x - h).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
    }
    int k = n - 1;
    while (k >= 0 && pick[k] == rows - n + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int j = k + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

TEST(LpSolveTest, MatchesVertexEnumerationOnRandomBoundedPrograms) {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(3);     // 2..4 variables
    const std::size_t rows = 1 + rng.below(5);  // 1..5 inequality rows
    LinearProgram lp;
    lp.num_vars = n;
    lp.objective.resize(n);
    for (double& c : lp.objective) c = rng.uniform(-1, 1);
    std::vector<double> x0(n);
    for (double& v : x0) v = rng.uniform(0, 3);
    lp.a_ub.resize(rows * n);
    lp.b_ub.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      double ax = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        lp.a_ub[r * n + j] = rng.uniform(-1, 1);
        ax += lp.a_ub[r * n + j] * x0[j];
      }
      lp.b_ub[r] = ax + rng.uniform(0, 1);  // x0 strictly feasible
    }
    lp.lower.assign(n, 0.0);
    lp.upper.assign(n, 5.0);

    // Same polytope as G x <= h including the bounds.
    Eigen::MatrixXd g(rows + 2 * n, n);
    Eigen::VectorXd h(rows + 2 * n);
    g.setZero();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < n; ++j) g(r, j) = lp.a_ub[r * n + j];
      h(r) = lp.b_ub[r];
    }
    for (std::size_t j = 0; j < n; ++j) {
      g(rows + j, j) = -1.0;
      h(rows + j) = 0.0;
      g(rows + n + j, j) = 1.0;
      h(rows + n + j) = 5.0;
    }
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(lp.objective.data(), n);

    const LpSolution sol = lp_solve(lp);
    EXPECT_NEAR(sol.objective, vertex_enumeration_min(g, h, c), 1e-9) << "trial " << trial;
    EXPECT_LE(sol.max_violation, 1e-9);
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * sol.x[j];
    EXPECT_NEAR(obj, sol.objective, 1e-12);
  }
}

TEST(LpSolveTest, EqualityRowsAndFreeVariables) {
  // min x + y  s.t.  x - y = 1,  x free,  -2 <= y <= 3  ->  y = -2, x = -1.
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {1, 1};
  lp.a_eq = {1, -1};
  lp.b_eq = {1};
  lp.lower = {-kLpInfinity, -2};
  lp.upper = {kLpInfinity, 3};
  const LpSolution sol = lp_solve(lp);
  EXPECT_NEAR(sol.objective, -3.0, 1e-12);
  EXPECT_NEAR(sol.x[0], -1.0, 1e-12);
  EXPECT_NEAR(sol.x[1], -2.0, 1e-12);
}

TEST(LpSolveTest, NegativeRightHandSides) {
  // min x1 + 2 x2  s.t.  -x1 - x2 <= -3,  x1 <= 2  ->  x1 = 2, x2 = 1.
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {1, 2};
  lp.a_ub = {-1, -1, 1, 0};
  lp.b_ub = {-3, 2};
  const LpSolution sol = lp_solve(lp);
  EXPECT_NEAR(sol.objective, 4.0, 1e-12);
  EXPECT_NEAR(sol.x[0], 2.0, 1e-12);
}

TEST(LpSolveTest, DetectsInfeasibleAndUnbounded) {
  LinearProgram infeasible;
  infeasible.num_vars = 1;
  infeasible.objective = {1};
  infeasible.a_ub = {1};
  infeasible.b_ub = {-1};
  try {
    lp_solve(infeasible);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasible);
  }

  LinearProgram unbounded;
  unbounded.num_vars = 2;
  unbounded.objective = {-1, 0};
  unbounded.a_ub = {0, 1};
  unbounded.b_ub = {1};
  try {
    lp_solve(unbounded);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnbounded);
  }
}

// Beale's example cycles under textbook Dantzig pricing with a naive tie
// rule; the optimum is -1/20 at x4 = 1/25, x6 = 1.
LinearProgram beale() {
  LinearProgram lp;
  lp.num_vars = 4;
  lp.objective = {-0.75, 150, -0.02, 6};
  lp.a_ub = {0.25, -60, -0.04, 9,  //
             0.5, -90, -0.02, 3,   //
             0, 0, 1, 0};
  lp.b_ub = {0, 0, 1};
  return lp;
}

TEST(LpSolveTest, DegenerateCyclingExampleTerminates) {
  const LpSolution sol = lp_solve(beale());
  EXPECT_NEAR(sol.objective, -0.05, 1e-12);
  EXPECT_NEAR(sol.x[0], 0.04, 1e-12);
  EXPECT_NEAR(sol.x[2], 1.0, 1e-12);

  LpOptions bland_only;
  bland_only.degenerate_switch = 0;
  const LpSolution b = lp_solve(beale(), bland_only);
  EXPECT_TRUE(b.used_bland);
  EXPECT_NEAR(b.objective, -0.05, 1e-12);
}

TEST(LpSolveTest, RejectsMalformedPrograms) {
  LinearProgram lp;
  lp.num_vars = 2;
  lp.objective = {1};
  EXPECT_THROW(lp_solve(lp), Error);
  lp.objective = {1, 1};
  lp.lower = {1, 0};
  lp.upper = {0, 1};
  EXPECT_THROW(lp_solve(lp), Error);
}

}  // namespace
}  // namespace confreach
