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

#include "core/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/random.hpp"

namespace confreach {
namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}
  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.push_back({stage, std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Miscoverage and width ratio once counts and empirical extrema are known.
void finalize(ConservatismReport& rep, std::span<const double> y_lo, std::span<const double> y_hi) {
  rep.eps_hat = static_cast<double>(rep.outside) / static_cast<double>(rep.sample_count);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < y_lo.size(); ++k) {
    num += rep.empirical_hi[k] - rep.empirical_lo[k];
    den += y_hi[k] - y_lo[k];
  }
  rep.ratio_degenerate = !std::isfinite(den) || den <= 0.0;
  rep.bound_ratio = rep.ratio_degenerate ? 0.0 : num / den;
}

template <typename F>
auto staged(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (...) {
    rethrow_with_stage(stage);
  }
}

}  // namespace

PixelStatusMask pixel_status(const LogitTensor& y_lo, const LogitTensor& y_hi,
                             const ClassMask& baseline) {
  require(y_lo.height == y_hi.height && y_lo.width == y_hi.width && y_lo.classes == y_hi.classes,
          ErrorKind::kDimension, "lower and upper logit bounds differ in shape");
  require(baseline.height == y_lo.height && baseline.width == y_lo.width, ErrorKind::kDimension,
          "baseline mask shape differs from the logit bounds");
  require(y_lo.classes >= 1, ErrorKind::kDimension, "logit bounds need at least one class");
  const std::size_t L = y_lo.classes;
  PixelStatusMask mask;
  mask.height = y_lo.height;
  mask.width = y_lo.width;
  mask.baseline = baseline;
  mask.status.resize(mask.height * mask.width);
  for (std::size_t p = 0; p < mask.status.size(); ++p) {
    const double* lo = y_lo.data.data() + p * L;
    const double* hi = y_hi.data.data() + p * L;
    std::size_t star = 0;
    bool tied = false;
    for (std::size_t l = 1; l < L; ++l) {
      if (lo[l] > lo[star]) {
        star = l;
        tied = false;
      } else if (lo[l] == lo[star]) {
        tied = true;
      }
    }
    if (tied) ++mask.lower_bound_ties;
    double rival = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < L; ++l) {
      if (l != star) rival = std::max(rival, hi[l]);
    }
    PixelStatus s;
    if (lo[star] <= rival) {
      s = PixelStatus::kUnknown;
      ++mask.unknown;
    } else if (star == baseline.labels[p]) {
      s = PixelStatus::kRobust;
      ++mask.robust;
    } else {
      s = PixelStatus::kNonrobust;
      ++mask.nonrobust;
    }
    mask.status[p] = s;
  }
  mask.rv = robustness_value(mask);
  return mask;
}

double robustness_value(const PixelStatusMask& mask) {
  const std::size_t pixels = mask.height * mask.width;
  require(pixels > 0, ErrorKind::kDimension, "status mask is empty");
  std::size_t robust = 0;
  for (PixelStatus s : mask.status) robust += s == PixelStatus::kRobust ? 1 : 0;
  return 100.0 * static_cast<double>(robust) / static_cast<double>(pixels);
}

double average_rv(std::span<const double> rvs) {
  require(!rvs.empty(), ErrorKind::kDomain, "average RV needs at least one image");
  double s = 0.0;
  for (double r : rvs) s += r;
  return s / static_cast<double>(rvs.size());
}

double average_rv(std::span<const PixelStatusMask> masks) {
  std::vector<double> rvs;
  rvs.reserve(masks.size());
  for (const PixelStatusMask& m : masks) rvs.push_back(robustness_value(m));
  return average_rv(std::span<const double>(rvs));
}

std::vector<std::uint8_t> status_levels(const PixelStatusMask& mask) {
  std::vector<std::uint8_t> levels(mask.status.size());
  for (std::size_t p = 0; p < levels.size(); ++p) {
    switch (mask.status[p]) {
      case PixelStatus::kRobust: levels[p] = 255; break;
      case PixelStatus::kNonrobust: levels[p] = 128; break;
      case PixelStatus::kUnknown: levels[p] = 0; break;
    }
  }
  return levels;
}

const char* reach_mode_name(ReachMode mode) {
  return mode == ReachMode::kNaive ? "naive" : "surrogate";
}

ReachMode parse_reach_mode(const std::string& name) {
  if (name == "naive") return ReachMode::kNaive;
  if (name == "surrogate") return ReachMode::kSurrogate;
  fail(ErrorKind::kDomain, "unknown mode '" + name + "' (expected naive or surrogate)");
}

StreamSeeds stream_seeds(std::uint64_t root) {
  return {stream_seed(root, Stream::kTrain), stream_seed(root, Stream::kAuxiliary),
          stream_seed(root, Stream::kCalibration)};
}

PipelineConfig resolve_config(const PipelineConfig& in, std::size_t output_dim) {
  PipelineConfig c = in;
  require(c.m >= 1, ErrorKind::kDomain, "calibration size m must be at least 1");
  require(c.epsilon > 0.0 && c.epsilon < 1.0, ErrorKind::kDomain, "epsilon must lie in (0, 1)");
  if (c.ell == 0) c.ell = c.m > 1 ? c.m - 1 : 1;
  require(c.ell <= c.m, ErrorKind::kDomain, "rank ell must not exceed m");
  if (c.t == 0) c.t = std::max<std::size_t>(1, c.m / 2);
  if (c.tprime == 0) c.tprime = c.t;
  if (c.mode == ReachMode::kSurrogate && c.components == 0) {
    c.components = std::max<std::size_t>(
        1, std::min({c.t > 1 ? c.t - 1 : std::size_t{1}, std::size_t{64}, output_dim}));
  }
  c.threads = resolve_threads(c.threads);
  return c;
}

ReachsetResult naive_from_outputs(std::span<const double> train, std::size_t t,
                                  std::span<const double> calib, std::size_t m, std::size_t n,
                                  const GuaranteeSpec& guarantee) {
  ReachsetResult r;
  r.mode = ReachMode::kNaive;
  r.guarantee = guarantee;
  r.center_scale = staged("center and scales", [&] { return center_and_scales(train, t, n); });
  const CalibrationSet cal =
      staged("calibration", [&] { return build_calibration(calib, m, r.center_scale); });
  r.naive = naive_reachset(cal, r.center_scale, guarantee);
  r.threshold = r.naive->threshold;
  r.bounds = project_intervals(*r.naive);
  if (r.center_scale.floor_applied) r.flags.push_back("tau-floor-applied");
  return r;
}

ReachsetResult compute_reachset(const MlpNetwork& model, const PerturbationSpec& spec,
                                const PipelineConfig& config) {
  const std::size_t n = model.output_dim();
  const PipelineConfig c = staged("configuration", [&] { return resolve_config(config, n); });
  const GuaranteeSpec guarantee =
      staged("guarantee", [&] { return guarantee_confidence(c.epsilon, c.ell, c.m); });
  const StreamSeeds seeds = stream_seeds(c.seed);
  std::vector<StageTiming> timings;
  StageClock clock(timings);

  const std::vector<double> train = staged("sampling training set", [&] {
    return evaluate_outputs(model, spec, c.t, seeds.train, c.threads);
  });
  clock.mark("train");

  ReachsetResult r;
  if (c.mode == ReachMode::kNaive) {
    CenterScale cs = staged("center and scales", [&] { return center_and_scales(train, c.t, n); });
    // Scores are reduced shard by shard, so the m x n outputs never coexist.
    std::vector<double> scores(c.m);
    staged("calibration", [&] {
      for_each_output_shard(model, spec, c.m, seeds.calibration, c.threads,
                            [&](std::size_t first, std::size_t k, std::span<const double>,
                                std::span<const double> out) {
                              for (std::size_t s = 0; s < k; ++s) {
                                scores[first + s] = nonconformity(out.subspan(s * n, n), cs);
                              }
                            });
      return 0;
    });
    clock.mark("calibration");
    const CalibrationSet cal = calibration_from_scores(std::move(scores), "outputs");
    r.mode = ReachMode::kNaive;
    r.guarantee = guarantee;
    r.center_scale = std::move(cs);
    r.naive = naive_reachset(cal, r.center_scale, guarantee);
    r.threshold = r.naive->threshold;
    r.bounds = project_intervals(*r.naive);
    if (r.center_scale.floor_applied) r.flags.push_back("tau-floor-applied");
    clock.mark("reachset");
  } else {
    const std::vector<double> aux = staged("sampling auxiliary set", [&] {
      return evaluate_outputs(model, spec, c.tprime, seeds.auxiliary, c.threads);
    });
    const std::vector<double> cal = staged("sampling calibration set", [&] {
      return evaluate_outputs(model, spec, c.m, seeds.calibration, c.threads);
    });
    clock.mark("sampling");
    SurrogateOptions opts;
    opts.components = c.components;
    opts.norm = c.norm;
    opts.pca = c.pca;
    opts.threads = c.threads;
    r.mode = ReachMode::kSurrogate;
    r.guarantee = guarantee;
    r.surrogate = staged("surrogate", [&] {
      return build_surrogate_from_outputs(train, c.t, aux, c.tprime, cal, c.m, n, guarantee, opts);
    });
    clock.mark("surrogate");
    r.center_scale = r.surrogate->error_scale;
    r.threshold = r.surrogate->threshold;
    r.bounds = project_intervals(*r.surrogate);
    if (r.surrogate->hull.degenerate()) r.flags.push_back("degenerate-hull");
    if (!r.surrogate->basis.all_converged()) r.flags.push_back("pca-not-converged");
    if (r.center_scale.floor_applied) r.flags.push_back("tau-floor-applied");
  }
  r.config = c;
  r.seeds = seeds;
  r.timings = std::move(timings);
  return r;
}

PixelStatusMask classify_bounds(const MlpNetwork& model, const PerturbationSpec& spec,
                                const IntervalBounds& bounds, LogitTensor* baseline_out) {
  const std::size_t h = spec.base.height;
  const std::size_t w = spec.base.width;
  const std::size_t n = model.output_dim();
  require(h * w > 0 && n % (h * w) == 0, ErrorKind::kDimension,
          "model output length " + std::to_string(n) + " is not a multiple of h*w = " +
              std::to_string(h * w));
  require(bounds.lo.size() == n && bounds.hi.size() == n, ErrorKind::kDimension,
          "interval bounds do not match the model output length");
  const std::size_t L = n / (h * w);
  LogitTensor baseline(h, w, L, model.infer(spec.base.data));
  const ClassMask mask = predict_mask(baseline);
  PixelStatusMask status =
      pixel_status(LogitTensor(h, w, L, bounds.lo), LogitTensor(h, w, L, bounds.hi), mask);
  if (baseline_out != nullptr) *baseline_out = std::move(baseline);
  return status;
}

PipelineResult run_pipeline(const MlpNetwork& model, const PerturbationSpec& spec,
                            const PipelineConfig& config) {
  PipelineResult out;
  out.reach = compute_reachset(model, spec, config);
  out.status = staged("pixel status",
                      [&] { return classify_bounds(model, spec, out.reach.bounds, &out.baseline_logits); });
  out.status.guarantee = out.reach.guarantee;
  return out;
}

PipelineResult run_naive_pipeline(const MlpNetwork& model, const PerturbationSpec& spec,
                                  PipelineConfig config) {
  config.mode = ReachMode::kNaive;
  return run_pipeline(model, spec, config);
}

PipelineResult run_surrogate_pipeline(const MlpNetwork& model, const PerturbationSpec& spec,
                                      PipelineConfig config) {
  config.mode = ReachMode::kSurrogate;
  return run_pipeline(model, spec, config);
}

ConservatismReport audit_outputs(std::span<const double> outputs, std::size_t count,
                                 std::span<const double> y_lo, std::span<const double> y_hi) {
  const std::size_t n = y_lo.size();
  require(y_hi.size() == n, ErrorKind::kDimension, "audit bounds differ in length");
  require(count >= 1, ErrorKind::kDomain, "audit needs at least one sample");
  require(outputs.size() == count * n, ErrorKind::kDimension, "audit outputs have the wrong length");
  ConservatismReport rep;
  rep.sample_count = count;
  rep.empirical_lo.assign(n, std::numeric_limits<double>::infinity());
  rep.empirical_hi.assign(n, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < count; ++j) {
    bool outside = false;
    for (std::size_t k = 0; k < n; ++k) {
      const double y = outputs[j * n + k];
      outside = outside || !(y >= y_lo[k] && y <= y_hi[k]);
      rep.empirical_lo[k] = std::min(rep.empirical_lo[k], y);
      rep.empirical_hi[k] = std::max(rep.empirical_hi[k], y);
    }
    rep.outside += outside ? 1 : 0;
  }
  finalize(rep, y_lo, y_hi);
  return rep;
}

ConservatismReport conservatism_audit(const MlpNetwork& model, const PerturbationSpec& spec,
                                      std::span<const double> y_lo, std::span<const double> y_hi,
                                      std::size_t sample_count, std::uint64_t seed,
                                      unsigned threads) {
  const std::size_t n = model.output_dim();
  require(y_lo.size() == n && y_hi.size() == n, ErrorKind::kDimension,
          "audit bounds do not match the model output length");
  require(sample_count >= 1, ErrorKind::kDomain, "audit needs at least one sample");
  // Per-shard partial results, merged in shard order.
  const std::size_t shards = (sample_count + kShardSize - 1) / kShardSize;
  std::vector<ConservatismReport> parts(shards);
  for_each_output_shard(model, spec, sample_count, seed, resolve_threads(threads),
                        [&](std::size_t first, std::size_t k, std::span<const double>,
                            std::span<const double> out) {
                          parts[first / kShardSize] = audit_outputs(out, k, y_lo, y_hi);
                        });
  ConservatismReport rep;
  rep.sample_count = sample_count;
  rep.empirical_lo.assign(n, std::numeric_limits<double>::infinity());
  rep.empirical_hi.assign(n, -std::numeric_limits<double>::infinity());
  for (const ConservatismReport& p : parts) {
    rep.outside += p.outside;
    for (std::size_t k = 0; k < n; ++k) {
      rep.empirical_lo[k] = std::min(rep.empirical_lo[k], p.empirical_lo[k]);
      rep.empirical_hi[k] = std::max(rep.empirical_hi[k], p.empirical_hi[k]);
    }
  }
  finalize(rep, y_lo, y_hi);
  return rep;
}

}  // namespace confreach
