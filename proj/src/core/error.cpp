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

#include "core/error.hpp"

#include <exception>

namespace confreach {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kDimension: return "dimension mismatch";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kNumerical: return "numerical failure";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kUnbounded: return "unbounded";
  }
  return "unknown error";
}

void rethrow_with_stage(const std::string& stage) {
  try {
    throw;
  } catch (const Error& e) {
    throw Error(e.kind(), "stage '" + stage + "': " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kNumerical, "stage '" + stage + "': " + e.what());
  }
}

}  // namespace confreach
