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

#include "core/binary_io.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace confreach {

void write_f64_le(std::ostream& out, std::span<const double> values) {
  std::vector<char> buffer(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) buffer[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

bool read_f64_le(std::istream& in, std::span<double> values) {
  std::vector<unsigned char> buffer(values.size() * 8);
  in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
  if (static_cast<std::size_t>(in.gcount()) != buffer.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | buffer[i * 8 + b];
    values[i] = std::bit_cast<double>(bits);
  }
  return true;
}

bool read_header_line(std::istream& in, std::string& line, std::size_t limit) {
  line.clear();
  char ch = 0;
  while (line.size() < limit && in.get(ch)) {
    if (ch == '\n') return true;
    line.push_back(ch);
  }
  return false;
}

std::vector<double> read_f64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open '" + path + "'");
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  require(bytes % 8 == 0, ErrorKind::kFormat,
          "'" + path + "' is not a whole number of 64-bit values");
  std::vector<double> values(bytes / 8);
  require(read_f64_le(in, values), ErrorKind::kFormat, "truncated payload in '" + path + "'");
  return values;
}

void write_f64_file(const std::string& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path + "'");
  write_f64_le(out, values);
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for '" + path + "'");
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path + "'");
  out << contents;
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace confreach
