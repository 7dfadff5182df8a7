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

#include <stdexcept>
#include <string>

namespace confreach {

enum class ErrorKind {
  kDomain,      // argument outside the mathematical domain
  kDimension,   // shapes or lengths disagree
  kFormat,      // malformed or truncated file content
  kIo,          // file could not be opened / written
  kNumerical,   // solver failure, non-finite values
  kInfeasible,  // LP has no feasible point
  kUnbounded,   // LP objective unbounded below
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

/// Prefixes the message of an in-flight Error with a pipeline stage name.
[[noreturn]] void rethrow_with_stage(const std::string& stage);

}  // namespace confreach
