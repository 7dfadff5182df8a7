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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/tensor.hpp"

namespace confreach::testing {

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string read_bytes(const std::string& path);

/// All regular files below `dir` (relative path -> bytes), sorted by path.
std::vector<std::pair<std::string, std::string>> snapshot_dir(const std::string& dir);

/// Single affine layer y = W x + b (no hidden layers).
MlpNetwork affine_model(std::size_t in, std::size_t out, std::span<const double> weights,
                        std::span<const double> bias);

/// 4 x 4 single-channel image with two bright pixels at (0, 1) = 0.9 and
/// (2, 3) = 0.8; everything else 0.2.
ImageTensor two_bright_pixel_image();

/// 4 x 4 x 3-class segmentation network on the image above: a hidden layer
/// copies the 16 intensities, the output layer maps each pixel's intensity
/// v and a global brightness term to three class logits.
MlpNetwork segmentation_toy_model();

/// Runs a shell command, returning its exit status (-1 if it did not exit).
int run_command(const std::string& command);

}  // namespace confreach::testing
