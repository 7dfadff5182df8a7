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

#ifndef CONFREACH_CONFREACH_H_
#define CONFREACH_CONFREACH_H_

/* Conformal reachsets for black-box networks and pixel-level robustness
 * verification of segmentation models.
 *
 * All objects are opaque handles created by cr_*_create / cr_*_load style
 * functions and released with the matching cr_*_free. Every fallible call
 * returns a cr_status; on failure a thread-local message is available from
 * cr_last_error_message(). Handles are immutable after creation and may be
 * shared between threads for read-only calls. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CR_API __declspec(dllexport)
#else
#define CR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cr_status {
  CR_OK = 0,
  CR_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad enum, buffer too small */
  CR_ERR_DOMAIN = 2,           /* value outside its mathematical domain */
  CR_ERR_DIMENSION = 3,        /* shapes or lengths disagree */
  CR_ERR_IO = 4,               /* file could not be opened or written */
  CR_ERR_FORMAT = 5,           /* malformed or truncated file */
  CR_ERR_NUMERICAL = 6,        /* solver failure, non-finite values */
  CR_ERR_INFEASIBLE = 7,
  CR_ERR_UNBOUNDED = 8,
  CR_ERR_INTERNAL = 9
} cr_status;

CR_API const char* cr_status_name(cr_status status);
/* Message of the last failed call on this thread ("" if none). */
CR_API const char* cr_last_error_message(void);
CR_API const char* cr_version(void);

/* ---- guarantees -------------------------------------------------------- */

typedef struct cr_guarantee {
  double epsilon;
  uint64_t ell;
  uint64_t m;
  double delta1;           /* 1 - epsilon */
  double delta2;           /* 1 - betacdf_{1-eps}(ell, m + 1 - ell) */
  double one_minus_delta2; /* the same tail, kept for digits near 1 */
  double beta_mean;
  double beta_variance;
} cr_guarantee;

CR_API cr_status cr_guarantee_compute(double epsilon, uint64_t ell, uint64_t m, cr_guarantee* out);
/* Regularized incomplete beta I_x(a, b). */
CR_API cr_status cr_beta_cdf(double x, double a, double b, double* out);
/* ceil((m + 1)(1 - epsilon)) clamped to [1, m]. */
CR_API cr_status cr_select_rank(uint64_t m, double epsilon, uint64_t* out);

/* ---- model ------------------------------------------------------------- */

typedef struct cr_model cr_model;

CR_API cr_status cr_model_load(const char* path, cr_model** out);
/* Dense ReLU network from explicit parameters. dims has layer_count + 1
 * entries; weights[k] is row-major dims[k+1] x dims[k], biases[k] has
 * dims[k+1] entries. */
CR_API cr_status cr_model_create(const size_t* dims, size_t dims_count,
                                 const double* const* weights, const double* const* biases,
                                 cr_model** out);
/* He-normal random network. */
CR_API cr_status cr_model_create_random(const size_t* dims, size_t dims_count, uint64_t seed,
                                        cr_model** out);
CR_API cr_status cr_model_save(const cr_model* model, const char* path);
CR_API size_t cr_model_input_dim(const cr_model* model);
CR_API size_t cr_model_output_dim(const cr_model* model);
CR_API cr_status cr_model_infer(const cr_model* model, const double* input, size_t input_len,
                                double* output, size_t output_len);
CR_API void cr_model_free(cr_model* model);

/* ---- images ------------------------------------------------------------ */

typedef struct cr_image cr_image;

/* PGM/PPM (P2, P3, P5, P6; maxval 255) or raw little-endian .f64. The shape
 * arguments are required for .f64 and ignored otherwise. */
CR_API cr_status cr_image_load(const char* path, size_t height, size_t width, size_t channels,
                               cr_image** out);
CR_API cr_status cr_image_create(const double* data, size_t height, size_t width,
                                 size_t channels, cr_image** out);
CR_API cr_status cr_image_shape(const cr_image* image, size_t* height, size_t* width,
                                size_t* channels);
CR_API void cr_image_free(cr_image* image);

/* ---- perturbations ----------------------------------------------------- */

typedef struct cr_perturbation cr_perturbation;

typedef enum cr_ball_norm { CR_BALL_L2 = 0, CR_BALL_LINF = 1 } cr_ball_norm;

/* Darkening of ceil(fraction * #eligible) pixels brighter than `threshold`
 * in every channel; each channel drops by at least e and at most to zero. */
CR_API cr_status cr_perturbation_darkening(const cr_image* image, double fraction,
                                           double threshold, double e, uint64_t seed,
                                           cr_perturbation** out);
/* Uniform perturbation of the whole image inside an l2 or linf ball. */
CR_API cr_status cr_perturbation_ball(const cr_image* image, cr_ball_norm norm, double radius,
                                      cr_perturbation** out);
/* Number of perturbation coefficients r. */
CR_API size_t cr_perturbation_dimension(const cr_perturbation* spec);
/* Records the image path written into manifests. */
CR_API cr_status cr_perturbation_set_source(cr_perturbation* spec, const char* image_path);
CR_API void cr_perturbation_free(cr_perturbation* spec);

/* ---- verification ------------------------------------------------------ */

typedef enum cr_mode { CR_MODE_NAIVE = 0, CR_MODE_SURROGATE = 1 } cr_mode;
typedef enum cr_clip_norm { CR_CLIP_LINF = 0, CR_CLIP_L1 = 1 } cr_clip_norm;

typedef struct cr_run_config {
  cr_mode mode;
  uint64_t m;
  uint64_t ell;        /* 0: m - 1 */
  uint64_t t;          /* 0: m / 2 */
  uint64_t tprime;     /* 0: t */
  uint64_t components; /* 0: min(t - 1, 64, n) */
  double epsilon;
  uint64_t seed;
  uint32_t threads;    /* 0: CONFORMAL_REACH_THREADS or all cores */
  cr_clip_norm clip_norm;
} cr_run_config;

CR_API void cr_run_config_init(cr_run_config* config);

typedef struct cr_run cr_run;

CR_API cr_status cr_run_verify(const cr_model* model, const cr_perturbation* spec,
                               const cr_run_config* config, cr_run** out);

typedef struct cr_run_summary {
  double rv;
  uint64_t pixels;
  uint64_t robust;
  uint64_t nonrobust;
  uint64_t unknown;
  double threshold;   /* score at rank ell */
  double total_width; /* sum of interval widths */
  cr_run_config resolved;
  cr_guarantee guarantee;
  uint64_t train_seed;
  uint64_t auxiliary_seed;
  uint64_t calibration_seed;
} cr_run_summary;

CR_API cr_status cr_run_summary_get(const cr_run* run, cr_run_summary* out);
/* Interval bounds on the flattened logits; `n` must equal the output dim. */
CR_API cr_status cr_run_bounds(const cr_run* run, double* lo, double* hi, size_t n);
/* Per-pixel status codes: 2 robust, 1 nonrobust, 0 unknown (row-major). */
CR_API cr_status cr_run_status(const cr_run* run, uint8_t* status, size_t count);
/* Stage timings as a JSON object; owned by the run. */
CR_API const char* cr_run_timings_json(const cr_run* run);
/* Writes status.pgm, summary.json, bounds.f64, perturbation.json,
 * calibration.json, reachset.json, run.json (plus basis.pca and hull.bin for
 * the surrogate) into `dir`. */
CR_API cr_status cr_run_write(const cr_run* run, const char* dir, const char* model_path,
                              const char* image_path);
CR_API void cr_run_free(cr_run* run);

/* ---- audit ------------------------------------------------------------- */

typedef struct cr_audit_report {
  double eps_hat;
  uint64_t outside;
  uint64_t samples;
  double bound_ratio;
  int bound_ratio_degenerate;
} cr_audit_report;

/* Fresh-sample audit of a run directory; writes JSON to `out_json` when it
 * is non-null. */
CR_API cr_status cr_audit_run_dir(const char* run_dir, uint64_t samples, uint64_t seed,
                                  uint32_t threads, const char* out_json,
                                  cr_audit_report* report);

/* ---- deep random MLP experiment ----------------------------------------- */

typedef struct cr_toy_config {
  uint64_t depth;
  uint64_t width;
  uint64_t inputs;
  uint64_t outputs;
  uint64_t m;
  uint64_t ell;
  double epsilon;
  uint64_t t_naive;
  uint64_t t_surrogate;
  uint64_t tprime;
  uint64_t components;
  uint64_t validation;
  uint64_t cloud_points;
  uint64_t seed;
  uint32_t threads;
  cr_clip_norm clip_norm;
} cr_toy_config;

typedef struct cr_toy_result {
  cr_guarantee guarantee;
  uint64_t naive_outside;
  uint64_t surrogate_outside;
  double naive_outside_fraction;
  double surrogate_outside_fraction;
  double naive_width;
  double surrogate_width;
} cr_toy_result;

CR_API void cr_toy_config_init(cr_toy_config* config);
/* Runs both reachset constructions; writes cloud.csv, bounds.csv and
 * summary.json into `out_dir` when it is non-null. */
CR_API cr_status cr_toy_run(const cr_toy_config* config, const char* out_dir,
                            cr_toy_result* result);

#ifdef __cplusplus
}
#endif

#endif /* CONFREACH_CONFREACH_H_ */
