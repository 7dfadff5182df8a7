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

#include "core/image_io.hpp"

#include <fstream>

#include <gtest/gtest.h>

#include "core/binary_io.hpp"
#include "core/error.hpp"
#include "support/test_support.hpp"

namespace confreach {
namespace {

using testing::TempDir;

TEST(ImageIoTest, ParsesPlainPgmWithComments) {
  TempDir dir;
  std::ofstream(dir.file("a.pgm")) << "P2\n# comment\n3 2\n255\n0 51 255\n102 # inline\n 204 153\n";
  const ImageTensor img = load_image(dir.file("a.pgm"));
  ASSERT_EQ(img.height, 2u);
  ASSERT_EQ(img.width, 3u);
  ASSERT_EQ(img.channels, 1u);
  EXPECT_DOUBLE_EQ(img.at(0, 1, 0), 0.2);
  EXPECT_DOUBLE_EQ(img.at(0, 2, 0), 1.0);
  EXPECT_DOUBLE_EQ(img.at(1, 2, 0), 0.6);
}

TEST(ImageIoTest, ParsesPlainPpm) {
  TempDir dir;
  std::ofstream(dir.file("a.ppm")) << "P3 1 2 255\n255 0 0\n0 0 255\n";
  const ImageTensor img = load_image(dir.file("a.ppm"));
  ASSERT_EQ(img.channels, 3u);
  EXPECT_DOUBLE_EQ(img.at(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(img.at(1, 0, 2), 1.0);
  EXPECT_DOUBLE_EQ(img.at(1, 0, 0), 0.0);
}

TEST(ImageIoTest, BinaryRoundTripForBothChannelCounts) {
  TempDir dir;
  for (std::size_t c : {1u, 3u}) {
    ImageTensor img(3, 5, c);
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = static_cast<double>(i % 256) / 255.0;
    const std::string path = dir.file(c == 1 ? "x.pgm" : "x.ppm");
    save_pnm(path, img);
    const ImageTensor back = load_image(path);
    ASSERT_TRUE(back.same_shape(img));
    EXPECT_EQ(back.data, img.data);
  }
}

TEST(ImageIoTest, F64NeedsMatchingShape) {
  TempDir dir;
  const std::vector<double> values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  write_f64_file(dir.file("x.f64"), values);
  const ImageTensor img = load_image(dir.file("x.f64"), 1, 2, 3);
  EXPECT_EQ(img.data, values);
  EXPECT_THROW(load_image(dir.file("x.f64"), 2, 2, 2), Error);
  EXPECT_THROW(load_image(dir.file("x.f64")), Error);
}

TEST(ImageIoTest, RejectsMalformedFiles) {
  TempDir dir;
  auto expect_format = [&](const std::string& name, const std::string& contents) {
    std::ofstream(dir.file(name), std::ios::binary) << contents;
    try {
      load_image(dir.file(name));
      ADD_FAILURE() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kFormat) << name << ": " << e.what();
    }
  };
  expect_format("magic.pgm", "P7\n1 1\n255\n0\n");
  expect_format("maxval.pgm", "P2\n1 1\n65535\n0\n");
  expect_format("short.pgm", "P5\n2 2\n255\nab");
  expect_format("level.pgm", "P2\n1 1\n255\n300\n");
  expect_format("header.pgm", "P2\n1\n");
}

TEST(ImageIoTest, SavePgmWritesRawLevels) {
  TempDir dir;
  const std::vector<std::uint8_t> levels{0, 128, 255, 7};
  save_pgm(dir.file("s.pgm"), 2, 2, levels);
  const std::string bytes = testing::read_bytes(dir.file("s.pgm"));
  EXPECT_EQ(bytes, std::string("P5\n2 2\n255\n") + std::string("\x00\x80\xff\x07", 4));
}

}  // namespace
}  // namespace confreach
