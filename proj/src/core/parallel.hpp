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
#include <functional>

namespace confreach {

/// Resolves a requested worker count: non-zero values are taken as given,
/// zero falls back to CONFORMAL_REACH_THREADS and then to the hardware count.
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
/// handed out in index order; callers write results into per-index slots, so
/// the outcome never depends on the worker count. The first exception thrown
/// by any item is rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace confreach
