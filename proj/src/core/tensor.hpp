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
#include <vector>

namespace confreach {

/// h x w x nc image, row-major in (i, j, channel), intensities nominally in [0, 1].
struct ImageTensor {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  ImageTensor() = default;
  ImageTensor(std::size_t h, std::size_t w, std::size_t c)
      : height(h), width(w), channels(c), data(h * w * c, 0.0) {}
  ImageTensor(std::size_t h, std::size_t w, std::size_t c, std::vector<double> values);

  std::size_t size() const { return data.size(); }
  std::size_t pixels() const { return height * width; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t c) const {
    return (i * width + j) * channels + c;
  }
  double& at(std::size_t i, std::size_t j, std::size_t c) { return data[index(i, j, c)]; }
  double at(std::size_t i, std::size_t j, std::size_t c) const { return data[index(i, j, c)]; }

  bool same_shape(const ImageTensor& other) const {
    return height == other.height && width == other.width && channels == other.channels;
  }
};

/// h x w x L logits. Flat index k = (i * w + j) * L + l (zero-based i, j, l),
/// i.e. the one-based vec(y)(k) with k = ((i-1) w + (j-1)) L + l.
struct LogitTensor {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t classes = 0;
  std::vector<double> data;

  LogitTensor() = default;
  LogitTensor(std::size_t h, std::size_t w, std::size_t l, std::vector<double> values);

  std::size_t index(std::size_t i, std::size_t j, std::size_t l) const {
    return (i * width + j) * classes + l;
  }
  double at(std::size_t i, std::size_t j, std::size_t l) const { return data[index(i, j, l)]; }
};

/// Zero-based class index per pixel, row-major h x w.
struct ClassMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint32_t> labels;
  std::size_t ties = 0;  // pixels whose argmax was decided by the tie-break

  std::uint32_t at(std::size_t i, std::size_t j) const { return labels[i * width + j]; }
};

/// Per-pixel argmax over classes; ties go to the lowest class index.
ClassMask predict_mask(const LogitTensor& logits);

}  // namespace confreach
