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

#include "core/tensor.hpp"

#include <string>
#include <utility>

#include "core/error.hpp"

namespace confreach {

ImageTensor::ImageTensor(std::size_t h, std::size_t w, std::size_t c, std::vector<double> values)
    : height(h), width(w), channels(c), data(std::move(values)) {
  require(data.size() == h * w * c, ErrorKind::kDimension,
          "image data length " + std::to_string(data.size()) + " != h*w*nc = " +
              std::to_string(h * w * c));
}

LogitTensor::LogitTensor(std::size_t h, std::size_t w, std::size_t l, std::vector<double> values)
    : height(h), width(w), classes(l), data(std::move(values)) {
  require(data.size() == h * w * l, ErrorKind::kDimension,
          "logit data length " + std::to_string(data.size()) + " != h*w*L = " +
              std::to_string(h * w * l));
}

ClassMask predict_mask(const LogitTensor& logits) {
  require(logits.classes >= 1, ErrorKind::kDimension, "predict_mask needs at least one class");
  ClassMask mask;
  mask.height = logits.height;
  mask.width = logits.width;
  mask.labels.resize(logits.height * logits.width);
  for (std::size_t p = 0; p < mask.labels.size(); ++p) {
    const double* row = logits.data.data() + p * logits.classes;
    std::uint32_t best = 0;
    bool tied = false;
    for (std::size_t l = 1; l < logits.classes; ++l) {
      if (row[l] > row[best]) {
        best = static_cast<std::uint32_t>(l);
        tied = false;
      } else if (row[l] == row[best]) {
        tied = true;
      }
    }
    mask.labels[p] = best;
    if (tied) ++mask.ties;
  }
  return mask;
}

}  // namespace confreach
