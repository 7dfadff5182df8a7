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

#include "confreach/confreach.h"

#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "core/artifacts.hpp"
#include "core/binary_io.hpp"
#include "core/error.hpp"
#include "core/guarantees.hpp"
#include "core/image_io.hpp"
#include "core/model.hpp"
#include "core/perturb.hpp"
#include "core/toy.hpp"
#include "core/verify.hpp"

struct cr_model {
  confreach::MlpNetwork net;
};

struct cr_image {
  confreach::ImageTensor tensor;
};

struct cr_perturbation {
  confreach::PerturbationSpec spec;
};

struct cr_run {
  confreach::PipelineResult result;
  confreach::PerturbationSpec spec;
  std::string timings_json;
};

namespace {

thread_local std::string g_last_error;

cr_status status_of(confreach::ErrorKind kind) {
  using confreach::ErrorKind;
  switch (kind) {
    case ErrorKind::kDomain: return CR_ERR_DOMAIN;
    case ErrorKind::kDimension: return CR_ERR_DIMENSION;
    case ErrorKind::kFormat: return CR_ERR_FORMAT;
    case ErrorKind::kIo: return CR_ERR_IO;
    case ErrorKind::kNumerical: return CR_ERR_NUMERICAL;
    case ErrorKind::kInfeasible: return CR_ERR_INFEASIBLE;
    case ErrorKind::kUnbounded: return CR_ERR_UNBOUNDED;
  }
  return CR_ERR_INTERNAL;
}

cr_status invalid(const char* message) {
  g_last_error = message;
  return CR_ERR_INVALID_ARGUMENT;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
cr_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CR_OK;
  } catch (const confreach::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return CR_ERR_INTERNAL;
  }
}

void fill_guarantee(const confreach::GuaranteeSpec& g, cr_guarantee* out) {
  const confreach::BetaMoments mom = confreach::beta_moments(g.rank_ell, g.calib_size_m);
  out->epsilon = g.epsilon;
  out->ell = g.rank_ell;
  out->m = g.calib_size_m;
  out->delta1 = g.coverage_delta1;
  out->delta2 = g.confidence_delta2;
  out->one_minus_delta2 = g.confidence_miss;
  out->beta_mean = mom.mean;
  out->beta_variance = mom.variance;
}

std::string absolute_path(const char* path) {
  std::error_code ec;
  const auto p = std::filesystem::absolute(path, ec);
  return ec ? std::string(path) : p.lexically_normal().string();
}

}  // namespace

extern "C" {

const char* cr_status_name(cr_status status) {
  switch (status) {
    case CR_OK: return "ok";
    case CR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CR_ERR_DOMAIN: return "domain error";
    case CR_ERR_DIMENSION: return "dimension mismatch";
    case CR_ERR_IO: return "i/o error";
    case CR_ERR_FORMAT: return "format error";
    case CR_ERR_NUMERICAL: return "numerical failure";
    case CR_ERR_INFEASIBLE: return "infeasible";
    case CR_ERR_UNBOUNDED: return "unbounded";
    case CR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* cr_last_error_message(void) { return g_last_error.c_str(); }

const char* cr_version(void) { return confreach::kVersion; }

cr_status cr_guarantee_compute(double epsilon, uint64_t ell, uint64_t m, cr_guarantee* out) {
  if (out == nullptr) return invalid("null output pointer");
  return guarded([&] { fill_guarantee(confreach::guarantee_confidence(epsilon, ell, m), out); });
}

cr_status cr_beta_cdf(double x, double a, double b, double* out) {
  if (out == nullptr) return invalid("null output pointer");
  return guarded([&] { *out = confreach::beta_cdf(x, a, b); });
}

cr_status cr_select_rank(uint64_t m, double epsilon, uint64_t* out) {
  if (out == nullptr) return invalid("null output pointer");
  return guarded([&] { *out = confreach::select_rank(m, epsilon); });
}

cr_status cr_model_load(const char* path, cr_model** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new cr_model{confreach::load_model(path)}; });
}

cr_status cr_model_create(const size_t* dims, size_t dims_count, const double* const* weights,
                          const double* const* biases, cr_model** out) {
  if (dims == nullptr || weights == nullptr || biases == nullptr || out == nullptr) {
    return invalid("null argument");
  }
  if (dims_count < 2) return invalid("a network needs at least two dims");
  *out = nullptr;
  return guarded([&] {
    std::vector<confreach::DenseLayer> layers;
    for (size_t k = 0; k + 1 < dims_count; ++k) {
      confreach::DenseLayer layer;
      layer.inputs = dims[k];
      layer.outputs = dims[k + 1];
      confreach::require(weights[k] != nullptr && biases[k] != nullptr,
                         confreach::ErrorKind::kDimension, "missing layer parameters");
      layer.weights.assign(weights[k], weights[k] + layer.inputs * layer.outputs);
      layer.bias.assign(biases[k], biases[k] + layer.outputs);
      layers.push_back(std::move(layer));
    }
    *out = new cr_model{confreach::MlpNetwork(std::move(layers))};
  });
}

cr_status cr_model_create_random(const size_t* dims, size_t dims_count, uint64_t seed,
                                 cr_model** out) {
  if (dims == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new cr_model{confreach::MlpNetwork::random(std::span<const size_t>(dims, dims_count), seed)};
  });
}

cr_status cr_model_save(const cr_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return invalid("null argument");
  return guarded([&] { confreach::save_model(model->net, path); });
}

size_t cr_model_input_dim(const cr_model* model) { return model ? model->net.input_dim() : 0; }

size_t cr_model_output_dim(const cr_model* model) { return model ? model->net.output_dim() : 0; }

cr_status cr_model_infer(const cr_model* model, const double* input, size_t input_len,
                         double* output, size_t output_len) {
  if (model == nullptr || input == nullptr || output == nullptr) return invalid("null argument");
  return guarded([&] {
    model->net.infer_batch(std::span<const double>(input, input_len), 1,
                           std::span<double>(output, output_len));
  });
}

void cr_model_free(cr_model* model) { delete model; }

cr_status cr_image_load(const char* path, size_t height, size_t width, size_t channels,
                        cr_image** out) {
  if (path == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new cr_image{confreach::load_image(path, height, width, channels)}; });
}

cr_status cr_image_create(const double* data, size_t height, size_t width, size_t channels,
                          cr_image** out) {
  if (data == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    std::vector<double> values(data, data + height * width * channels);
    *out = new cr_image{confreach::ImageTensor(height, width, channels, std::move(values))};
  });
}

cr_status cr_image_shape(const cr_image* image, size_t* height, size_t* width, size_t* channels) {
  if (image == nullptr) return invalid("null image");
  if (height) *height = image->tensor.height;
  if (width) *width = image->tensor.width;
  if (channels) *channels = image->tensor.channels;
  return CR_OK;
}

void cr_image_free(cr_image* image) { delete image; }

cr_status cr_perturbation_darkening(const cr_image* image, double fraction, double threshold,
                                    double e, uint64_t seed, cr_perturbation** out) {
  if (image == nullptr || out == nullptr) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new cr_perturbation{confreach::build_darkening(image->tensor, fraction, threshold, e, seed)};
  });
}

cr_status cr_perturbation_ball(const cr_image* image, cr_ball_norm norm, double radius,
                               cr_perturbation** out) {
  if (image == nullptr || out == nullptr) return invalid("null argument");
  if (norm != CR_BALL_L2 && norm != CR_BALL_LINF) return invalid("unknown ball norm");
  *out = nullptr;
  return guarded([&] {
    *out = new cr_perturbation{confreach::build_global_ball(
        image->tensor, norm == CR_BALL_L2 ? confreach::BallNorm::kL2 : confreach::BallNorm::kLinf,
        radius)};
  });
}

size_t cr_perturbation_dimension(const cr_perturbation* spec) {
  return spec ? spec->spec.dimension() : 0;
}

cr_status cr_perturbation_set_source(cr_perturbation* spec, const char* image_path) {
  if (spec == nullptr || image_path == nullptr) return invalid("null argument");
  return guarded([&] { spec->spec.base_path = absolute_path(image_path); });
}

void cr_perturbation_free(cr_perturbation* spec) { delete spec; }

void cr_run_config_init(cr_run_config* config) {
  if (config == nullptr) return;
  *config = cr_run_config{};
  config->mode = CR_MODE_NAIVE;
  config->m = 8000;
  config->epsilon = 1e-3;
  config->clip_norm = CR_CLIP_LINF;
}

cr_status cr_run_verify(const cr_model* model, const cr_perturbation* spec,
                        const cr_run_config* config, cr_run** out) {
  if (model == nullptr || spec == nullptr || config == nullptr || out == nullptr) {
    return invalid("null argument");
  }
  if (config->mode != CR_MODE_NAIVE && config->mode != CR_MODE_SURROGATE) {
    return invalid("unknown mode");
  }
  if (config->clip_norm != CR_CLIP_LINF && config->clip_norm != CR_CLIP_L1) {
    return invalid("unknown clipping norm");
  }
  *out = nullptr;
  return guarded([&] {
    confreach::PipelineConfig c;
    c.mode = config->mode == CR_MODE_NAIVE ? confreach::ReachMode::kNaive
                                           : confreach::ReachMode::kSurrogate;
    c.m = config->m;
    c.ell = config->ell;
    c.t = config->t;
    c.tprime = config->tprime;
    c.components = config->components;
    c.epsilon = config->epsilon;
    c.seed = config->seed;
    c.threads = config->threads;
    c.norm = config->clip_norm == CR_CLIP_LINF ? confreach::ClipNorm::kLinf
                                               : confreach::ClipNorm::kL1;
    auto run = std::make_unique<cr_run>();
    run->result = confreach::run_pipeline(model->net, spec->spec, c);
    run->spec = spec->spec;
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& t : run->result.reach.timings) timings[t.stage] = t.seconds;
    run->timings_json = timings.dump();
    *out = run.release();
  });
}

cr_status cr_run_summary_get(const cr_run* run, cr_run_summary* out) {
  if (run == nullptr || out == nullptr) return invalid("null argument");
  return guarded([&] {
    const auto& r = run->result.reach;
    const auto& s = run->result.status;
    *out = cr_run_summary{};
    out->rv = s.rv;
    out->pixels = s.height * s.width;
    out->robust = s.robust;
    out->nonrobust = s.nonrobust;
    out->unknown = s.unknown;
    out->threshold = r.threshold;
    out->total_width = r.bounds.total_width();
    out->resolved.mode = r.mode == confreach::ReachMode::kNaive ? CR_MODE_NAIVE : CR_MODE_SURROGATE;
    out->resolved.m = r.config.m;
    out->resolved.ell = r.config.ell;
    out->resolved.t = r.config.t;
    out->resolved.tprime = r.config.tprime;
    out->resolved.components = r.config.components;
    out->resolved.epsilon = r.config.epsilon;
    out->resolved.seed = r.config.seed;
    out->resolved.threads = r.config.threads;
    out->resolved.clip_norm = r.config.norm == confreach::ClipNorm::kLinf ? CR_CLIP_LINF : CR_CLIP_L1;
    fill_guarantee(r.guarantee, &out->guarantee);
    out->train_seed = r.seeds.train;
    out->auxiliary_seed = r.seeds.auxiliary;
    out->calibration_seed = r.seeds.calibration;
  });
}

cr_status cr_run_bounds(const cr_run* run, double* lo, double* hi, size_t n) {
  if (run == nullptr || lo == nullptr || hi == nullptr) return invalid("null argument");
  const auto& b = run->result.reach.bounds;
  if (n != b.lo.size()) return invalid("bounds buffer length differs from the output dimension");
  std::copy(b.lo.begin(), b.lo.end(), lo);
  std::copy(b.hi.begin(), b.hi.end(), hi);
  return CR_OK;
}

cr_status cr_run_status(const cr_run* run, uint8_t* status, size_t count) {
  if (run == nullptr || status == nullptr) return invalid("null argument");
  const auto& s = run->result.status.status;
  if (count != s.size()) return invalid("status buffer length differs from the pixel count");
  for (size_t p = 0; p < count; ++p) status[p] = static_cast<uint8_t>(s[p]);
  return CR_OK;
}

const char* cr_run_timings_json(const cr_run* run) {
  return run ? run->timings_json.c_str() : "{}";
}

cr_status cr_run_write(const cr_run* run, const char* dir, const char* model_path,
                       const char* image_path) {
  if (run == nullptr || dir == nullptr || model_path == nullptr || image_path == nullptr) {
    return invalid("null argument");
  }
  return guarded([&] {
    confreach::RunInputs inputs;
    inputs.model_path = absolute_path(model_path);
    inputs.image_path = absolute_path(image_path);
    inputs.image_shape = {run->spec.base.height, run->spec.base.width, run->spec.base.channels};
    confreach::PerturbationSpec spec = run->spec;
    spec.base_path = inputs.image_path;
    confreach::write_run_dir(dir, inputs, spec, run->result);
  });
}

void cr_run_free(cr_run* run) { delete run; }

cr_status cr_audit_run_dir(const char* run_dir, uint64_t samples, uint64_t seed, uint32_t threads,
                           const char* out_json, cr_audit_report* report) {
  if (run_dir == nullptr) return invalid("null run directory");
  return guarded([&] {
    const confreach::AuditOutcome outcome = confreach::audit_run_dir(run_dir, samples, seed, threads);
    if (out_json != nullptr) confreach::write_text_file(out_json, confreach::audit_json(outcome));
    if (report != nullptr) {
      report->eps_hat = outcome.report.eps_hat;
      report->outside = outcome.report.outside;
      report->samples = outcome.report.sample_count;
      report->bound_ratio = outcome.report.bound_ratio;
      report->bound_ratio_degenerate = outcome.report.ratio_degenerate ? 1 : 0;
    }
  });
}

void cr_toy_config_init(cr_toy_config* config) {
  if (config == nullptr) return;
  const confreach::ToyConfig d;
  *config = cr_toy_config{};
  config->depth = d.depth;
  config->width = d.width;
  config->inputs = d.inputs;
  config->outputs = d.outputs;
  config->m = d.m;
  config->ell = d.ell;
  config->epsilon = d.epsilon;
  config->t_naive = d.t_naive;
  config->t_surrogate = d.t_surrogate;
  config->tprime = d.tprime;
  config->components = d.components;
  config->validation = d.validation;
  config->cloud_points = d.cloud_points;
  config->seed = d.seed;
  config->threads = d.threads;
  config->clip_norm = CR_CLIP_LINF;
}

cr_status cr_toy_run(const cr_toy_config* config, const char* out_dir, cr_toy_result* result) {
  if (config == nullptr) return invalid("null configuration");
  if (config->clip_norm != CR_CLIP_LINF && config->clip_norm != CR_CLIP_L1) {
    return invalid("unknown clipping norm");
  }
  return guarded([&] {
    confreach::ToyConfig c;
    c.depth = config->depth;
    c.width = config->width;
    c.inputs = config->inputs;
    c.outputs = config->outputs;
    c.m = config->m;
    c.ell = config->ell;
    c.epsilon = config->epsilon;
    c.t_naive = config->t_naive;
    c.t_surrogate = config->t_surrogate;
    c.tprime = config->tprime;
    c.components = config->components;
    c.validation = config->validation;
    c.cloud_points = config->cloud_points;
    c.seed = config->seed;
    c.threads = config->threads;
    c.norm = config->clip_norm == CR_CLIP_LINF ? confreach::ClipNorm::kLinf : confreach::ClipNorm::kL1;
    const confreach::ToyResult r = confreach::run_toy(c);
    if (out_dir != nullptr) confreach::write_toy_dir(out_dir, r);
    if (result != nullptr) {
      fill_guarantee(r.guarantee, &result->guarantee);
      result->naive_outside = r.naive_outside;
      result->surrogate_outside = r.surrogate_outside;
      result->naive_outside_fraction = r.naive_outside_fraction;
      result->surrogate_outside_fraction = r.surrogate_outside_fraction;
      result->naive_width = r.naive_width;
      result->surrogate_width = r.surrogate_width;
    }
  });
}

}  // extern "C"
