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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "core/guarantees.hpp"
#include "core/perturb.hpp"
#include "core/verify.hpp"

namespace confreach {

inline constexpr const char* kVersion = "1.0.0";

/// Where a run's inputs came from; stored as run.json so the run can be
/// audited or replayed later.
struct RunInputs {
  std::string model_path;
  std::string image_path;
  std::array<std::size_t, 3> image_shape{0, 0, 0};  // only needed for .f64 images
};

std::string guarantee_json(const GuaranteeSpec& g, int indent = 2);

/// Writes the run directory:
///   status.pgm        255 robust, 128 nonrobust, 0 unknown
///   summary.json      RV, counts, guarantee, seeds
///   bounds.f64        y_lo then y_hi, n values each
///   perturbation.json the input set
///   calibration.json  m, ell, epsilon, seed, distribution, R_ell, tau_star
///   reachset.json     centre, sigma and (surrogate) lift bounds
///   basis.pca, hull.bin (surrogate mode only)
///   run.json          inputs and resolved configuration
/// Nothing written depends on timing or the worker count.
void write_run_dir(const std::string& dir, const RunInputs& inputs, const PerturbationSpec& spec,
                   const PipelineResult& result);

std::string summary_json(const PipelineResult& result);

struct AuditOutcome {
  ConservatismReport report;
  std::uint64_t seed = 0;  // root seed given by the caller
};

/// Re-runs the model on fresh samples (audit stream of `seed`) against the
/// bounds stored in `run_dir`.
AuditOutcome audit_run_dir(const std::string& run_dir, std::size_t samples, std::uint64_t seed,
                           unsigned threads);

std::string audit_json(const AuditOutcome& outcome);

/// Loads run.json, the model and the image, then rebuilds the perturbation.
struct LoadedRun {
  RunInputs inputs;
  MlpNetwork model;
  PerturbationSpec spec;
  std::vector<double> y_lo;
  std::vector<double> y_hi;
};
LoadedRun load_run_dir(const std::string& run_dir);

}  // namespace confreach
