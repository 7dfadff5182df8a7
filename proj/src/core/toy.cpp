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

#include "core/toy.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/artifacts.hpp"
#include "core/binary_io.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/random.hpp"

namespace confreach {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t count_outside(const std::vector<double>& outputs, std::size_t count,
                          const IntervalBounds& b) {
  const std::size_t n = b.lo.size();
  std::size_t outside = 0;
  for (std::size_t j = 0; j < count; ++j) {
    outside += b.contains(std::span<const double>(outputs).subspan(j * n, n)) ? 0 : 1;
  }
  return outside;
}

}  // namespace

ToyResult run_toy(const ToyConfig& cfg) {
  require(cfg.depth >= 1 && cfg.width >= 1 && cfg.inputs >= 1 && cfg.outputs >= 1,
          ErrorKind::kDomain, "toy network dimensions must be positive");
  require(cfg.t_surrogate <= cfg.t_naive, ErrorKind::kDomain,
          "surrogate training size must not exceed the naive training size");
  require(cfg.validation >= 1, ErrorKind::kDomain, "validation size must be positive");
  const unsigned threads = resolve_threads(cfg.threads);

  std::vector<std::size_t> dims{cfg.inputs};
  for (std::size_t k = 0; k < cfg.depth; ++k) dims.push_back(cfg.width);
  dims.push_back(cfg.outputs);
  const MlpNetwork model = MlpNetwork::random(dims, cfg.seed);
  // The unit cube [0, 1]^in as an linf ball of radius 1/2 around 1/2.
  const ImageTensor centre(1, cfg.inputs, 1, std::vector<double>(cfg.inputs, 0.5));
  const PerturbationSpec spec = build_global_ball(centre, BallNorm::kLinf, 0.5);

  ToyResult res;
  res.config = cfg;
  res.guarantee = guarantee_confidence(cfg.epsilon, cfg.ell, cfg.m);
  const StreamSeeds seeds = stream_seeds(cfg.seed);
  const std::size_t n = cfg.outputs;

  const std::vector<double> train = evaluate_outputs(model, spec, cfg.t_naive, seeds.train, threads);
  const std::vector<double> calib = evaluate_outputs(model, spec, cfg.m, seeds.calibration, threads);
  const std::vector<double> aux = evaluate_outputs(model, spec, cfg.tprime, seeds.auxiliary, threads);
  const std::vector<double> valid = evaluate_outputs(
      model, spec, cfg.validation, stream_seed(cfg.seed, Stream::kValidation), threads);

  res.naive = naive_from_outputs(train, cfg.t_naive, calib, cfg.m, n, res.guarantee);

  // The surrogate's training batch is the prefix of the naive one.
  SurrogateOptions opts;
  opts.components = cfg.components;
  opts.norm = cfg.norm;
  opts.threads = threads;
  const std::span<const double> train_s(train.data(), cfg.t_surrogate * n);
  ReachsetResult& s = res.surrogate;
  s.mode = ReachMode::kSurrogate;
  s.guarantee = res.guarantee;
  s.surrogate = build_surrogate_from_outputs(train_s, cfg.t_surrogate, aux, cfg.tprime, calib,
                                             cfg.m, n, res.guarantee, opts);
  s.center_scale = s.surrogate->error_scale;
  s.threshold = s.surrogate->threshold;
  s.bounds = project_intervals(*s.surrogate);
  if (s.surrogate->hull.degenerate()) s.flags.push_back("degenerate-hull");
  if (!s.surrogate->basis.all_converged()) s.flags.push_back("pca-not-converged");
  for (ReachsetResult* r : {&res.naive, &res.surrogate}) {
    r->seeds = seeds;
    r->config.seed = cfg.seed;
    r->config.m = cfg.m;
    r->config.ell = cfg.ell;
    r->config.epsilon = cfg.epsilon;
  }

  res.naive_outside = count_outside(valid, cfg.validation, res.naive.bounds);
  res.surrogate_outside = count_outside(valid, cfg.validation, res.surrogate.bounds);
  res.naive_outside_fraction =
      static_cast<double>(res.naive_outside) / static_cast<double>(cfg.validation);
  res.surrogate_outside_fraction =
      static_cast<double>(res.surrogate_outside) / static_cast<double>(cfg.validation);
  res.naive_width = res.naive.bounds.total_width();
  res.surrogate_width = res.surrogate.bounds.total_width();
  const std::size_t keep = std::min(cfg.cloud_points, cfg.validation);
  res.cloud.assign(valid.begin(), valid.begin() + static_cast<std::ptrdiff_t>(keep * n));
  return res;
}

std::string toy_summary_json(const ToyResult& r) {
  const ToyConfig& c = r.config;
  json j;
  j["network"] = {{"depth", c.depth}, {"width", c.width}, {"inputs", c.inputs}, {"outputs", c.outputs}};
  j["sizes"] = {{"m", c.m}, {"t_naive", c.t_naive}, {"t_surrogate", c.t_surrogate},
                {"tprime", c.tprime}, {"validation", c.validation}};
  j["components"] = r.surrogate.surrogate ? r.surrogate.surrogate->basis.components : 0;
  j["seed"] = c.seed;
  j["guarantee"] = json::parse(guarantee_json(r.guarantee));
  j["naive"] = {{"outside", r.naive_outside},
                {"outside_fraction", r.naive_outside_fraction},
                {"total_width", r.naive_width},
                {"threshold", r.naive.threshold}};
  j["surrogate"] = {{"outside", r.surrogate_outside},
                    {"outside_fraction", r.surrogate_outside_fraction},
                    {"total_width", r.surrogate_width},
                    {"threshold", r.surrogate.threshold},
                    {"flags", r.surrogate.flags}};
  return j.dump(2) + "\n";
}

void write_toy_dir(const std::string& dir, const ToyResult& r) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::kIo, "cannot create output directory '" + dir + "': " + ec.message());
  const std::size_t n = r.config.outputs;

  std::ostringstream cloud;
  for (std::size_t k = 0; k < n; ++k) cloud << (k ? "," : "") << "y" << k;
  cloud << '\n';
  for (std::size_t j = 0; j < r.cloud.size() / n; ++j) {
    for (std::size_t k = 0; k < n; ++k) cloud << (k ? "," : "") << format_double(r.cloud[j * n + k]);
    cloud << '\n';
  }
  write_text_file((fs::path(dir) / "cloud.csv").string(), cloud.str());

  std::ostringstream bounds;
  bounds << "reachset,component,lo,hi\n";
  for (const auto& [name, res] : {std::pair<const char*, const ReachsetResult*>{"naive", &r.naive},
                                  {"surrogate", &r.surrogate}}) {
    for (std::size_t k = 0; k < n; ++k) {
      bounds << name << ',' << k << ',' << format_double(res->bounds.lo[k]) << ','
             << format_double(res->bounds.hi[k]) << '\n';
    }
  }
  if (r.surrogate.surrogate) {
    const SurrogateReachSet& sr = *r.surrogate.surrogate;
    for (std::size_t k = 0; k < n; ++k) {
      bounds << "lifted-hull," << k << ',' << format_double(sr.lift_lb[k]) << ','
             << format_double(sr.lift_ub[k]) << '\n';
    }
  }
  write_text_file((fs::path(dir) / "bounds.csv").string(), bounds.str());
  write_text_file((fs::path(dir) / "summary.json").string(), toy_summary_json(r));
}

}  // namespace confreach
