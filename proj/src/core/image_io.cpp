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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <vector>

#include "core/binary_io.hpp"
#include "core/error.hpp"

namespace confreach {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
bool next_token(std::istream& in, std::string& token) {
  token.clear();
  int ch = in.get();
  for (;;) {
    if (ch == EOF) return false;
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  while (ch != EOF && !std::isspace(ch) && ch != '#') {
    token.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  // Binary formats: exactly one whitespace byte separates maxval and data;
  // it has just been consumed.
  return true;
}

std::size_t parse_size(const std::string& token, const std::string& path) {
  require(!token.empty() && std::all_of(token.begin(), token.end(),
                                        [](char c) { return std::isdigit(c) != 0; }),
          ErrorKind::kFormat, "malformed PNM header in '" + path + "'");
  return static_cast<std::size_t>(std::stoull(token));
}

std::string lower_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

ImageTensor load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open image '" + path + "'");
  std::string magic, token;
  require(next_token(in, magic), ErrorKind::kFormat, "empty image file '" + path + "'");
  std::size_t channels = 0;
  bool binary = false;
  if (magic == "P2") {
    channels = 1;
  } else if (magic == "P5") {
    channels = 1;
    binary = true;
  } else if (magic == "P3") {
    channels = 3;
  } else if (magic == "P6") {
    channels = 3;
    binary = true;
  } else {
    fail(ErrorKind::kFormat, "unsupported image magic '" + magic + "' in '" + path + "'");
  }
  require(next_token(in, token), ErrorKind::kFormat, "truncated PNM header in '" + path + "'");
  const std::size_t width = parse_size(token, path);
  require(next_token(in, token), ErrorKind::kFormat, "truncated PNM header in '" + path + "'");
  const std::size_t height = parse_size(token, path);
  require(next_token(in, token), ErrorKind::kFormat, "truncated PNM header in '" + path + "'");
  const std::size_t maxval = parse_size(token, path);
  require(maxval == 255, ErrorKind::kFormat,
          "only maxval 255 is supported ('" + path + "' has " + token + ")");
  require(width > 0 && height > 0, ErrorKind::kFormat, "empty image in '" + path + "'");

  ImageTensor image(height, width, channels);
  if (binary) {
    std::vector<unsigned char> raw(image.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    require(static_cast<std::size_t>(in.gcount()) == raw.size(), ErrorKind::kFormat,
            "truncated pixel data in '" + path + "'");
    for (std::size_t k = 0; k < raw.size(); ++k) image.data[k] = raw[k] / 255.0;
  } else {
    for (double& v : image.data) {
      require(next_token(in, token), ErrorKind::kFormat,
              "truncated pixel data in '" + path + "'");
      const std::size_t level = parse_size(token, path);
      require(level <= 255, ErrorKind::kFormat, "pixel value above maxval in '" + path + "'");
      v = static_cast<double>(level) / 255.0;
    }
  }
  return image;
}

ImageTensor load_f64_image(const std::string& path, std::size_t height, std::size_t width,
                           std::size_t channels) {
  require(height > 0 && width > 0 && channels > 0, ErrorKind::kDimension,
          "a .f64 image needs an explicit height, width and channel count");
  std::vector<double> values = read_f64_file(path);
  require(values.size() == height * width * channels, ErrorKind::kDimension,
          "'" + path + "' holds " + std::to_string(values.size()) + " values, expected " +
              std::to_string(height * width * channels));
  return ImageTensor(height, width, channels, std::move(values));
}

ImageTensor load_image(const std::string& path, std::size_t height, std::size_t width,
                       std::size_t channels) {
  const std::string ext = lower_extension(path);
  if (ext == "f64") return load_f64_image(path, height, width, channels);
  return load_pnm(path);
}

void save_pgm(const std::string& path, std::size_t height, std::size_t width,
              std::span<const std::uint8_t> levels) {
  require(levels.size() == height * width, ErrorKind::kDimension, "PGM level count mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path + "'");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(levels.data()),
            static_cast<std::streamsize>(levels.size()));
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for '" + path + "'");
}

void save_pnm(const std::string& path, const ImageTensor& image) {
  require(image.channels == 1 || image.channels == 3, ErrorKind::kDimension,
          "PNM output supports 1 or 3 channels");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path + "'");
  out << (image.channels == 1 ? "P5\n" : "P6\n") << image.width << ' ' << image.height
      << "\n255\n";
  std::vector<unsigned char> raw(image.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double v = std::clamp(image.data[k], 0.0, 1.0);
    raw[k] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for '" + path + "'");
}

}  // namespace confreach
