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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace confreach {

/// Little-endian IEEE-754 binary64 stream helpers, independent of host order.
void write_f64_le(std::ostream& out, std::span<const double> values);

/// Returns false if the stream ended before `values.size()` doubles were read.
bool read_f64_le(std::istream& in, std::span<double> values);

/// Reads one '\n'-terminated text header line (at most `limit` bytes).
/// Returns false on EOF before any byte or when no newline is found.
bool read_header_line(std::istream& in, std::string& line, std::size_t limit = 1 << 16);

/// Whole-file helpers for headerless .f64 tensors.
std::vector<double> read_f64_file(const std::string& path);
void write_f64_file(const std::string& path, std::span<const double> values);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace confreach
