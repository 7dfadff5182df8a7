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

#include "core/pca.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "core/error.hpp"
#include "core/random.hpp"
#include "support/test_support.hpp"

namespace confreach {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Anisotropic cloud with well separated second-moment eigenvalues.
std::vector<double> cloud(std::size_t t, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(t * n);
  for (std::size_t j = 0; j < t; ++j) {
    for (std::size_t k = 0; k < n; ++k) v[j * n + k] = rng.normal() * (1.0 + 3.0 * k) + 0.5;
  }
  return v;
}

double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
  const double smallest = svd.singularValues().minCoeff();
  return std::acos(std::min(1.0, smallest));
}

TEST(DeflateTest, MatchesDenseEigenDecomposition) {
  const std::size_t t = 150, n = 12, N = 4;
  const std::vector<double> v = cloud(t, n, 5);
  const ProjectionBasis basis = deflate(v, t, n, N);
  ASSERT_EQ(basis.components, N);
  EXPECT_TRUE(basis.all_converged());

  const Eigen::Map<const RowMatrix> z(v.data(), t, n);
  const Eigen::MatrixXd c = z.transpose() * z / static_cast<double>(t);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  const Eigen::MatrixXd top = es.eigenvectors().rightCols(N);
  const Eigen::Map<const Eigen::MatrixXd> a(basis.a.data(), n, N);
  EXPECT_LT(max_principal_angle(a, top), 1e-6);
  EXPECT_LT((a.transpose() * a - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff(), 1e-8);
  for (std::size_t k = 0; k < N; ++k) {
    EXPECT_NEAR(basis.rayleigh[k], es.eigenvalues()(n - 1 - k), 1e-8 * es.eigenvalues()(n - 1));
  }
}

TEST(DeflateTest, FixedStepGradientAscentAlsoConverges) {
  const std::size_t t = 80, n = 6, N = 2;
  const std::vector<double> v = cloud(t, n, 9);
  PcaOptions opts;
  opts.step_size = 0.5;
  opts.max_iters = 50000;
  const ProjectionBasis fixed = deflate(v, t, n, N, opts);
  const ProjectionBasis optimal = deflate(v, t, n, N);
  const Eigen::Map<const Eigen::MatrixXd> a(fixed.a.data(), n, N);
  const Eigen::Map<const Eigen::MatrixXd> b(optimal.a.data(), n, N);
  EXPECT_LT(max_principal_angle(a, b), 1e-5);
}

TEST(DeflateTest, IndependentOfWorkerCount) {
  const std::size_t t = 300, n = 10, N = 3;
  const std::vector<double> v = cloud(t, n, 4);
  PcaOptions one, many;
  one.threads = 1;
  many.threads = 4;
  EXPECT_EQ(deflate(v, t, n, N, one).a, deflate(v, t, n, N, many).a);
}

TEST(DeflateTest, SignConventionAndRankDeficientClouds) {
  // All points on one line: the second direction has zero Rayleigh quotient
  // but must still be a unit vector orthogonal to the first.
  const std::size_t t = 20, n = 3;
  std::vector<double> v(t * n);
  for (std::size_t j = 0; j < t; ++j) {
    const double s = static_cast<double>(j) - 7.0;
    v[j * n + 0] = s;
    v[j * n + 1] = -2 * s;
  }
  const ProjectionBasis basis = deflate(v, t, n, 2);
  const Eigen::Map<const Eigen::MatrixXd> a(basis.a.data(), n, 2);
  EXPECT_NEAR(std::abs(a(1, 0)), 2.0 / std::sqrt(5.0), 1e-10);
  EXPECT_GT(a(1, 0), 0.0);  // the largest-magnitude entry is positive
  EXPECT_NEAR(a.col(1).norm(), 1.0, 1e-12);
  EXPECT_NEAR(a.col(0).dot(a.col(1)), 0.0, 1e-12);
  EXPECT_NEAR(basis.rayleigh[1], 0.0, 1e-12);
}

TEST(DeflateTest, RejectsBadArguments) {
  const std::vector<double> v = cloud(5, 3, 1);
  EXPECT_THROW(deflate(v, 5, 3, 0), Error);
  EXPECT_THROW(deflate(v, 5, 3, 4), Error);
  EXPECT_THROW(deflate(v, 4, 3, 1), Error);
}

TEST(BasisTest, ReduceLiftAndFileRoundTrip) {
  const std::size_t t = 40, n = 5;
  const std::vector<double> v = cloud(t, n, 2);
  const ProjectionBasis basis = deflate(v, t, n, n);
  // A full basis is orthogonal, so lift(reduce(y)) = y.
  const std::vector<double> y{0.3, -1.0, 2.0, 0.0, 4.5};
  const std::vector<double> back = lift(basis, reduce(basis, y));
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(back[k], y[k], 1e-12);

  testing::TempDir dir;
  save_basis(basis, dir.file("b.pca"));
  const ProjectionBasis loaded = load_basis(dir.file("b.pca"));
  EXPECT_EQ(loaded.a, basis.a);
  EXPECT_EQ(loaded.dim, n);
  EXPECT_EQ(loaded.components, n);
  EXPECT_THROW(reduce(basis, std::vector<double>{1.0}), Error);
}

}  // namespace
}  // namespace confreach
