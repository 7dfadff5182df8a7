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
#include <span>
#include <string>

#include "core/tensor.hpp"

namespace confreach {

/// Plain or binary PGM (P2/P5, one channel) and PPM (P3/P6, three channels)
/// with maxval 255; intensities are divided by 255.
ImageTensor load_pnm(const std::string& path);

/// Headerless little-endian binary64 tensor of the given shape.
ImageTensor load_f64_image(const std::string& path, std::size_t height, std::size_t width,
                           std::size_t channels);

/// Dispatches on extension: .pgm/.ppm/.pnm go to load_pnm, .f64 to
/// load_f64_image (shape required there, ignored otherwise).
ImageTensor load_image(const std::string& path, std::size_t height = 0, std::size_t width = 0,
                       std::size_t channels = 0);

/// Binary P5 greyscale image from raw 8-bit levels.
void save_pgm(const std::string& path, std::size_t height, std::size_t width,
              std::span<const std::uint8_t> levels);

/// Writes an image as P5/P6 (1 or 3 channels), rounding intensity * 255.
void save_pnm(const std::string& path, const ImageTensor& image);

}  // namespace confreach
