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

#include "core/artifacts.hpp"

#include <filesystem>

#include <nlohmann/json.hpp>

#include "core/binary_io.hpp"
#include "core/error.hpp"
#include "core/image_io.hpp"
#include "core/random.hpp"

namespace confreach {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json guarantee_object(const GuaranteeSpec& g) {
  const BetaMoments mom = beta_moments(g.rank_ell, g.calib_size_m);
  return {{"epsilon", g.epsilon},
          {"ell", g.rank_ell},
          {"m", g.calib_size_m},
          {"delta1", g.coverage_delta1},
          {"delta2", g.confidence_delta2},
          {"one_minus_delta2", g.confidence_miss},
          {"beta_mean", mom.mean},
          {"beta_variance", mom.variance}};
}

json seeds_object(const ReachsetResult& r) {
  return {{"root", r.config.seed},
          {"train", r.seeds.train},
          {"auxiliary", r.seeds.auxiliary},
          {"calibration", r.seeds.calibration}};
}

std::string path_in(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

std::string guarantee_json(const GuaranteeSpec& g, int indent) {
  return guarantee_object(g).dump(indent) + "\n";
}

std::string summary_json(const PipelineResult& result) {
  const ReachsetResult& r = result.reach;
  const PixelStatusMask& s = result.status;
  json j;
  j["mode"] = reach_mode_name(r.mode);
  j["rv"] = s.rv;
  j["pixels"] = s.height * s.width;
  j["counts"] = {{"robust", s.robust}, {"nonrobust", s.nonrobust}, {"unknown", s.unknown}};
  j["ties"] = {{"baseline_argmax", s.baseline.ties}, {"lower_bound_argmax", s.lower_bound_ties}};
  j["guarantee"] = guarantee_object(r.guarantee);
  j["seeds"] = seeds_object(r);
  j["threshold"] = r.threshold;
  j["total_width"] = r.bounds.total_width();
  j["flags"] = r.flags;
  return j.dump(2) + "\n";
}

void write_run_dir(const std::string& dir, const RunInputs& inputs, const PerturbationSpec& spec,
                   const PipelineResult& result) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::kIo, "cannot create output directory '" + dir + "': " + ec.message());
  const ReachsetResult& r = result.reach;
  const PipelineConfig& c = r.config;

  save_pgm(path_in(dir, "status.pgm"), result.status.height, result.status.width,
           status_levels(result.status));
  write_text_file(path_in(dir, "summary.json"), summary_json(result));

  std::vector<double> bounds(r.bounds.lo);
  bounds.insert(bounds.end(), r.bounds.hi.begin(), r.bounds.hi.end());
  write_f64_file(path_in(dir, "bounds.f64"), bounds);
  write_text_file(path_in(dir, "perturbation.json"), perturbation_to_json(spec));

  json cal;
  cal["m"] = c.m;
  cal["ell"] = c.ell;
  cal["epsilon"] = c.epsilon;
  cal["seed"] = c.seed;
  cal["calibration_stream_seed"] = r.seeds.calibration;
  cal["distribution"] = distribution_name(spec.distribution);
  cal["source"] = r.mode == ReachMode::kNaive ? "outputs" : "surrogate-error";
  cal["score_at_rank"] = r.threshold;
  cal["tau_star"] = r.center_scale.tau_star;
  cal["tau_floor_applied"] = r.center_scale.floor_applied;
  cal["guarantee"] = guarantee_object(r.guarantee);
  write_text_file(path_in(dir, "calibration.json"), cal.dump(2) + "\n");

  json rs;
  rs["mode"] = reach_mode_name(r.mode);
  rs["center"] = r.center_scale.center;
  rs["tau"] = r.center_scale.tau;
  if (r.naive) {
    rs["sigma"] = r.naive->sigma;
  }
  if (r.surrogate) {
    const SurrogateReachSet& sr = *r.surrogate;
    rs["sigma"] = sr.sigma;
    rs["lift_lb"] = sr.lift_lb;
    rs["lift_ub"] = sr.lift_ub;
    rs["components"] = sr.basis.components;
    rs["hull_points"] = sr.hull.count;
    rs["clip_norm"] = clip_norm_name(sr.norm);
    rs["rayleigh"] = sr.basis.rayleigh;
    rs["pca_iterations"] = sr.basis.iterations;
    save_basis(sr.basis, path_in(dir, "basis.pca"));
    save_hull(sr.hull, path_in(dir, "hull.bin"));
  }
  rs["guarantee"] = guarantee_object(r.guarantee);
  rs["seeds"] = seeds_object(r);
  write_text_file(path_in(dir, "reachset.json"), rs.dump(2) + "\n");

  json run;
  run["version"] = kVersion;
  run["model"] = inputs.model_path;
  run["image"] = inputs.image_path;
  run["image_shape"] = inputs.image_shape;
  run["mode"] = reach_mode_name(c.mode);
  run["m"] = c.m;
  run["ell"] = c.ell;
  run["t"] = c.t;
  run["tprime"] = c.tprime;
  run["components"] = c.components;
  run["epsilon"] = c.epsilon;
  run["seed"] = c.seed;
  run["clip_norm"] = clip_norm_name(c.norm);
  run["output_dim"] = r.bounds.lo.size();
  write_text_file(path_in(dir, "run.json"), run.dump(2) + "\n");
}

LoadedRun load_run_dir(const std::string& run_dir) {
  const std::string run_path = path_in(run_dir, "run.json");
  require(fs::exists(run_path), ErrorKind::kIo, "missing artifact '" + run_path + "'");
  json run;
  try {
    run = json::parse(read_text_file(run_path));
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, "malformed '" + run_path + "': " + e.what());
  }
  RunInputs inputs;
  try {
    inputs.model_path = run.at("model").get<std::string>();
    inputs.image_path = run.at("image").get<std::string>();
    inputs.image_shape = run.at("image_shape").get<std::array<std::size_t, 3>>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, "malformed '" + run_path + "': " + e.what());
  }
  MlpNetwork model = load_model(inputs.model_path);
  ImageTensor image = load_image(inputs.image_path, inputs.image_shape[0], inputs.image_shape[1],
                                 inputs.image_shape[2]);
  const std::string pert_path = path_in(run_dir, "perturbation.json");
  require(fs::exists(pert_path), ErrorKind::kIo, "missing artifact '" + pert_path + "'");
  PerturbationSpec spec = perturbation_from_json(read_text_file(pert_path), image);

  const std::string bounds_path = path_in(run_dir, "bounds.f64");
  require(fs::exists(bounds_path), ErrorKind::kIo, "missing artifact '" + bounds_path + "'");
  std::vector<double> bounds = read_f64_file(bounds_path);
  const std::size_t n = model.output_dim();
  require(bounds.size() == 2 * n, ErrorKind::kDimension,
          "bounds.f64 holds " + std::to_string(bounds.size()) + " values, expected " +
              std::to_string(2 * n));
  std::vector<double> lo(bounds.begin(), bounds.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> hi(bounds.begin() + static_cast<std::ptrdiff_t>(n), bounds.end());
  return LoadedRun{std::move(inputs), std::move(model), std::move(spec), std::move(lo),
                   std::move(hi)};
}

AuditOutcome audit_run_dir(const std::string& run_dir, std::size_t samples, std::uint64_t seed,
                           unsigned threads) {
  const LoadedRun run = load_run_dir(run_dir);
  AuditOutcome out;
  out.seed = seed;
  out.report = conservatism_audit(run.model, run.spec, run.y_lo, run.y_hi, samples,
                                  stream_seed(seed, Stream::kAudit), threads);
  return out;
}

std::string audit_json(const AuditOutcome& outcome) {
  const ConservatismReport& r = outcome.report;
  json j;
  j["eps_hat"] = r.eps_hat;
  j["outside"] = r.outside;
  j["samples"] = r.sample_count;
  j["bound_ratio"] = r.bound_ratio;
  j["bound_ratio_degenerate"] = r.ratio_degenerate;
  j["seed"] = outcome.seed;
  j["empirical_lo"] = r.empirical_lo;
  j["empirical_hi"] = r.empirical_hi;
  return j.dump(2) + "\n";
}

}  // namespace confreach
