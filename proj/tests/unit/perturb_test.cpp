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

#include <cmath>
#include <cstring>
#include <numeric>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "support/test_support.hpp"

namespace confreach {
namespace {

ImageTensor two_by_two() {
  return ImageTensor(2, 2, 1, {0.9, 0.1, 0.8, 0.2});
}

TEST(DarkeningTest, HandEnumeratedEligibleSet) {
  const PerturbationSpec spec = build_darkening(two_by_two(), 1.0, 150.0 / 255.0, 0.1, 0);
  ASSERT_EQ(spec.dimension(), 2u);
  EXPECT_EQ(spec.selected_pixels, (std::vector<PixelCoord>{{0, 0}, {1, 0}}));
  ASSERT_EQ(spec.noise.size(), 2u);
  EXPECT_EQ(spec.noise[0].indices, (std::vector<std::size_t>{0}));
  EXPECT_EQ(spec.noise[0].values, (std::vector<double>{-0.9}));
  EXPECT_EQ(spec.noise[1].indices, (std::vector<std::size_t>{2}));
  EXPECT_EQ(spec.noise[1].values, (std::vector<double>{-0.8}));
  // Upper bound zeroes the pixel; lower bound darkens it by exactly e.
  const ImageTensor full = spec.apply(spec.lambda_upper);
  EXPECT_NEAR(full.at(0, 0, 0), 0.0, 1e-15);
  EXPECT_NEAR(full.at(1, 0, 0), 0.0, 1e-15);
  const ImageTensor partial = spec.apply(spec.lambda_lower);
  EXPECT_NEAR(partial.at(0, 0, 0), 0.8, 1e-15);
  EXPECT_NEAR(partial.at(1, 0, 0), 0.7, 1e-15);
  EXPECT_DOUBLE_EQ(partial.at(0, 1, 0), 0.1);
}

TEST(DarkeningTest, ChannelWiseNoiseForColourImages) {
  ImageTensor x(2, 3, 3);
  std::fill(x.data.begin(), x.data.end(), 0.9);
  x.at(0, 2, 1) = 0.3;  // one dim channel makes the pixel ineligible
  const PerturbationSpec spec = build_darkening(x, 0.2, 0.5, 0.05, 11);
  // ceil(0.2 * 5) = 1 pixel, 3 channels.
  EXPECT_EQ(spec.selected_pixels.size(), 1u);
  EXPECT_EQ(spec.dimension(), 3u);
  EXPECT_FALSE(spec.selected_pixels[0] == (PixelCoord{0, 2}));
}

TEST(DarkeningTest, SelectionIsSeededAndSorted) {
  ImageTensor x(6, 6, 1);
  std::fill(x.data.begin(), x.data.end(), 0.95);
  const auto a = build_darkening(x, 0.25, 0.5, 0.1, 1).selected_pixels;
  const auto b = build_darkening(x, 0.25, 0.5, 0.1, 1).selected_pixels;
  const auto c = build_darkening(x, 0.25, 0.5, 0.1, 2).selected_pixels;
  EXPECT_EQ(a.size(), 9u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(), [](const PixelCoord& p, const PixelCoord& q) {
    return p.row != q.row ? p.row < q.row : p.col < q.col;
  }));
}

TEST(DarkeningTest, RejectsInvalidSettings) {
  EXPECT_THROW(build_darkening(two_by_two(), 0.0, 0.5, 0.1, 0), Error);
  EXPECT_THROW(build_darkening(two_by_two(), 1.5, 0.5, 0.1, 0), Error);
  EXPECT_THROW(build_darkening(two_by_two(), 1.0, 0.95, 0.1, 0), Error);  // nothing eligible
  EXPECT_THROW(build_darkening(two_by_two(), 1.0, 0.5, 0.85, 0), Error);  // e above 0.8
  EXPECT_THROW(build_darkening(two_by_two(), 1.0, 0.5, -0.1, 0), Error);
}

TEST(PerturbationSpecTest, ApplyChecksBoundsAndLength) {
  const PerturbationSpec spec = build_darkening(two_by_two(), 1.0, 0.5, 0.1, 0);
  EXPECT_THROW(spec.apply(std::vector<double>{1.0}), Error);
  EXPECT_THROW(spec.apply(std::vector<double>{1.5, 0.5}), Error);
  EXPECT_THROW(spec.apply(std::vector<double>{0.0, 0.5}), Error);
}

TEST(SamplingTest, DrawsStayInsideTheSupport) {
  const ImageTensor x(3, 3, 1, std::vector<double>(9, 0.5));
  const PerturbationSpec l2 = build_global_ball(x, BallNorm::kL2, 0.3);
  const PerturbationSpec linf = build_global_ball(x, BallNorm::kLinf, 0.3);
  const PerturbationSpec dark = build_darkening(two_by_two(), 1.0, 0.5, 0.1, 0);
  for (const PerturbationSpec* spec : {&l2, &linf, &dark}) {
    const auto draws = sample(*spec, 2000, 99);
    ASSERT_EQ(draws.size(), 2000u);
    for (const auto& d : draws) {
      ASSERT_TRUE(spec->contains(d.lambda, 1e-12));
      const ImageTensor again = spec->apply(d.lambda);
      ASSERT_EQ(again.data, d.image.data);
    }
  }
  for (const auto& d : sample(l2, 500, 3)) {
    const double norm = std::sqrt(std::inner_product(d.lambda.begin(), d.lambda.end(),
                                                     d.lambda.begin(), 0.0));
    EXPECT_LE(norm, 0.3 + 1e-12);
  }
}

TEST(SamplingTest, L2BallRadialLawIsUniformInVolume) {
  // For uniform points in a d-ball, (|lambda| / e)^d is uniform on [0, 1].
  const ImageTensor x(1, 4, 1, std::vector<double>(4, 0.0));
  const PerturbationSpec spec = build_global_ball(x, BallNorm::kL2, 2.0);
  const auto draws = sample(spec, 20000, 8);
  double mean = 0.0;
  for (const auto& d : draws) {
    const double r = std::sqrt(std::inner_product(d.lambda.begin(), d.lambda.end(),
                                                  d.lambda.begin(), 0.0)) / 2.0;
    mean += std::pow(r, 4.0);
  }
  mean /= static_cast<double>(draws.size());
  EXPECT_NEAR(mean, 0.5, 6 * std::sqrt(1.0 / 12 / 20000));
}

TEST(SamplingTest, ZeroRadiusBallIsTheBaseImage) {
  const ImageTensor x(2, 2, 1, {0.1, 0.2, 0.3, 0.4});
  const PerturbationSpec spec = build_global_ball(x, BallNorm::kLinf, 0.0);
  for (const auto& d : sample(spec, 10, 1)) EXPECT_EQ(d.image.data, x.data);
}

TEST(SamplingTest, OutputsIndependentOfWorkerCount) {
  const MlpNetwork net = MlpNetwork::random(std::vector<std::size_t>{9, 12, 4}, 2);
  const ImageTensor x(3, 3, 1, std::vector<double>(9, 0.5));
  const PerturbationSpec spec = build_global_ball(x, BallNorm::kL2, 0.4);
  const std::size_t count = 3 * kShardSize + 17;
  const auto one = evaluate_outputs(net, spec, count, 1234, 1);
  const auto four = evaluate_outputs(net, spec, count, 1234, 4);
  ASSERT_EQ(one.size(), count * 4);
  EXPECT_EQ(std::memcmp(one.data(), four.data(), one.size() * sizeof(double)), 0);
  // A prefix of a longer run equals a shorter run.
  const auto shorter = evaluate_outputs(net, spec, 100, 1234, 2);
  EXPECT_EQ(std::memcmp(shorter.data(), one.data(), shorter.size() * sizeof(double)), 0);
}

TEST(SerializationTest, DarkeningRoundTrip) {
  PerturbationSpec spec = build_darkening(two_by_two(), 0.5, 0.5, 0.1, 17);
  spec.base_path = "/data/img.pgm";
  const PerturbationSpec back = perturbation_from_json(perturbation_to_json(spec), two_by_two());
  EXPECT_EQ(back.kind, "darkening");
  EXPECT_EQ(back.selected_pixels, spec.selected_pixels);
  EXPECT_EQ(back.lambda_lower, spec.lambda_lower);
  EXPECT_EQ(back.lambda_upper, spec.lambda_upper);
  EXPECT_EQ(back.base_path, spec.base_path);
  EXPECT_EQ(perturbation_to_json(back), perturbation_to_json(spec));
}

TEST(SerializationTest, BallAndBoxRoundTrip) {
  const ImageTensor x(1, 3, 1, {0.2, 0.4, 0.6});
  const PerturbationSpec ball = build_global_ball(x, BallNorm::kL2, 0.25);
  const PerturbationSpec ball_back = perturbation_from_json(perturbation_to_json(ball), x);
  EXPECT_EQ(ball_back.distribution, Distribution::kUniformL2Ball);
  EXPECT_DOUBLE_EQ(ball_back.radius, 0.25);

  const PerturbationSpec box =
      make_box_spec(x, {SparseNoise{{0, 2}, {1.0, -1.0}}}, {-0.5}, {0.25});
  const PerturbationSpec box_back = perturbation_from_json(perturbation_to_json(box), x);
  ASSERT_EQ(box_back.noise.size(), 1u);
  EXPECT_EQ(box_back.noise[0].indices, box.noise[0].indices);
  EXPECT_EQ(box_back.noise[0].values, box.noise[0].values);
  EXPECT_EQ(box_back.lambda_lower, box.lambda_lower);
}

TEST(SerializationTest, DetectsMismatchedBaseImage) {
  const PerturbationSpec spec = build_darkening(two_by_two(), 1.0, 0.5, 0.1, 0);
  const ImageTensor other(2, 2, 1, {0.9, 0.1, 0.7, 0.2});
  EXPECT_THROW(perturbation_from_json(perturbation_to_json(spec), other), Error);
  EXPECT_THROW(perturbation_from_json("{not json", two_by_two()), Error);
}

}  // namespace
}  // namespace confreach
