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

// conformal_reach: command-line front end over the confreach C API.
//
// Every command is driven by a JSON config object. Flags are parsed into that
// object, the command runs from it, and the object is stored verbatim in the
// output directory's manifest.json so that `replay` can run it again.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "confreach/confreach.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ApiError : public std::runtime_error {
 public:
  ApiError(cr_status status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  cr_status status() const { return status_; }

 private:
  cr_status status_;
};

void check(cr_status status, const std::string& what) {
  if (status != CR_OK) {
    throw ApiError(status, what + ": " + cr_last_error_message());
  }
}

int exit_code_for(cr_status status) {
  switch (status) {
    case CR_OK: return kExitOk;
    case CR_ERR_INVALID_ARGUMENT: return kExitUsage;
    case CR_ERR_DOMAIN:
    case CR_ERR_DIMENSION:
    case CR_ERR_IO:
    case CR_ERR_FORMAT: return kExitData;
    default: return kExitNumerical;
  }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ModelPtr = std::unique_ptr<cr_model, Deleter<cr_model, cr_model_free>>;
using ImagePtr = std::unique_ptr<cr_image, Deleter<cr_image, cr_image_free>>;
using SpecPtr = std::unique_ptr<cr_perturbation, Deleter<cr_perturbation, cr_perturbation_free>>;
using RunPtr = std::unique_ptr<cr_run, Deleter<cr_run, cr_run_free>>;

struct Context {
  std::string out_dir;  // empty: print only
  unsigned threads = 0;
};

// What a command reports back for its manifest.
struct Outcome {
  json seeds = json::object();
  json guarantee = nullptr;
  json timing = json::object();
};

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string absolute(const std::string& path) {
  std::error_code ec;
  const fs::path p = fs::absolute(path, ec);
  return ec ? path : p.lexically_normal().string();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ApiError(CR_ERR_IO, "cannot write '" + path.string() + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ApiError(CR_ERR_IO, "cannot create '" + dir + "': " + ec.message());
}

json guarantee_to_json(const cr_guarantee& g) {
  return {{"epsilon", g.epsilon},     {"ell", g.ell},
          {"m", g.m},                 {"delta1", g.delta1},
          {"delta2", g.delta2},       {"one_minus_delta2", g.one_minus_delta2},
          {"beta_mean", g.beta_mean}, {"beta_variance", g.beta_variance}};
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' ? ' ' : c);
  }
  return out + "\"";
}

// ---- guarantee -------------------------------------------------------------

void validate_triple(std::uint64_t m, std::uint64_t ell, double epsilon) {
  if (m < 1) throw UsageError("--m must be at least 1");
  if (ell < 1 || ell > m) throw UsageError("--ell must lie in [1, m]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
}

Outcome cmd_guarantee(const json& cfg, const Context& ctx) {
  const std::uint64_t m = cfg.at("m").get<std::uint64_t>();
  const double epsilon = cfg.at("epsilon").get<double>();
  std::uint64_t ell = cfg.at("ell").get<std::uint64_t>();
  if (ell == 0 && cfg.at("ell_auto").get<bool>()) {
    validate_triple(m, 1, epsilon);
    check(cr_select_rank(m, epsilon, &ell), "select rank");
  }
  validate_triple(m, ell, epsilon);
  cr_guarantee g;
  check(cr_guarantee_compute(epsilon, ell, m, &g), "guarantee");
  std::printf("m          %" PRIu64 "\n", g.m);
  std::printf("ell        %" PRIu64 "\n", g.ell);
  std::printf("epsilon    %.17g\n", g.epsilon);
  std::printf("delta1     %.17g\n", g.delta1);
  std::printf("delta2     %.17g\n", g.delta2);
  std::printf("1-delta2   %.17g\n", g.one_minus_delta2);
  std::printf("beta mean  %.17g\n", g.beta_mean);
  std::printf("beta var   %.17g\n", g.beta_variance);
  Outcome out;
  out.guarantee = guarantee_to_json(g);
  if (!ctx.out_dir.empty()) {
    ensure_dir(ctx.out_dir);
    write_file(fs::path(ctx.out_dir) / "guarantee.json", out.guarantee.dump(2) + "\n");
  }
  return out;
}

// ---- verify / sweep ---------------------------------------------------------

ImagePtr load_image(const std::string& path, const json& shape) {
  std::size_t h = 0, w = 0, c = 0;
  if (shape.is_array()) {
    h = shape.at(0).get<std::size_t>();
    w = shape.at(1).get<std::size_t>();
    c = shape.at(2).get<std::size_t>();
  }
  cr_image* raw = nullptr;
  check(cr_image_load(path.c_str(), h, w, c, &raw), "image '" + path + "'");
  return ImagePtr(raw);
}

SpecPtr build_attack(const cr_image* image, const json& cfg, double e, double fraction) {
  const std::string attack = cfg.at("attack").get<std::string>();
  cr_perturbation* raw = nullptr;
  if (attack == "darkening") {
    check(cr_perturbation_darkening(image, fraction, cfg.at("threshold").get<double>(), e,
                                    cfg.at("seed").get<std::uint64_t>(), &raw),
          "stage 'perturbation'");
  } else if (attack == "l2" || attack == "linf") {
    check(cr_perturbation_ball(image, attack == "l2" ? CR_BALL_L2 : CR_BALL_LINF, e, &raw),
          "stage 'perturbation'");
  } else {
    throw UsageError("unknown attack '" + attack + "'");
  }
  return SpecPtr(raw);
}

cr_run_config run_config(const json& cfg, unsigned threads) {
  cr_run_config rc;
  cr_run_config_init(&rc);
  const std::string mode = cfg.at("mode").get<std::string>();
  if (mode != "naive" && mode != "surrogate") throw UsageError("unknown mode '" + mode + "'");
  rc.mode = mode == "naive" ? CR_MODE_NAIVE : CR_MODE_SURROGATE;
  rc.m = cfg.at("m").get<std::uint64_t>();
  rc.ell = cfg.at("ell").get<std::uint64_t>();
  rc.t = cfg.at("t").get<std::uint64_t>();
  rc.tprime = cfg.at("tprime").get<std::uint64_t>();
  rc.components = cfg.at("N").get<std::uint64_t>();
  rc.epsilon = cfg.at("epsilon").get<double>();
  rc.seed = cfg.at("seed").get<std::uint64_t>();
  rc.threads = threads;
  const std::string clip = cfg.at("clip").get<std::string>();
  if (clip != "linf" && clip != "l1") throw UsageError("unknown clipping norm '" + clip + "'");
  rc.clip_norm = clip == "linf" ? CR_CLIP_LINF : CR_CLIP_L1;
  if (rc.m < 1) throw UsageError("--m must be at least 1");
  if (rc.ell > rc.m) throw UsageError("--ell must not exceed --m");
  if (!(rc.epsilon > 0.0 && rc.epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
  return rc;
}

void validate_attack_params(const std::string& attack, double e, double fraction) {
  if (!(e >= 0.0) || !std::isfinite(e)) throw UsageError("--e must be a finite value >= 0");
  if (attack == "darkening" && !(fraction > 0.0 && fraction <= 1.0)) {
    throw UsageError("--fraction must lie in (0, 1]");
  }
}

ModelPtr load_model(const std::string& path) {
  cr_model* raw = nullptr;
  check(cr_model_load(path.c_str(), &raw), "model '" + path + "'");
  return ModelPtr(raw);
}

json seeds_json(const cr_run_summary& s) {
  return {{"root", s.resolved.seed},
          {"train", s.train_seed},
          {"auxiliary", s.auxiliary_seed},
          {"calibration", s.calibration_seed}};
}

Outcome cmd_verify(const json& cfg, const Context& ctx) {
  const double e = cfg.at("e").get<double>();
  const double fraction = cfg.at("fraction").get<double>();
  validate_attack_params(cfg.at("attack").get<std::string>(), e, fraction);
  const cr_run_config rc = run_config(cfg, ctx.threads);
  if (ctx.out_dir.empty()) throw UsageError("--out is required");
  const std::string model_path = cfg.at("model").get<std::string>();
  const std::string image_path = cfg.at("image").get<std::string>();

  const ModelPtr model = load_model(model_path);
  const ImagePtr image = load_image(image_path, cfg.at("shape"));
  const SpecPtr spec = build_attack(image.get(), cfg, e, fraction);
  cr_run* raw = nullptr;
  check(cr_run_verify(model.get(), spec.get(), &rc, &raw), "verify");
  const RunPtr run(raw);
  check(cr_run_write(run.get(), ctx.out_dir.c_str(), model_path.c_str(), image_path.c_str()),
        "stage 'write'");

  cr_run_summary s;
  check(cr_run_summary_get(run.get(), &s), "summary");
  std::printf("RV = %.6f (robust %" PRIu64 ", nonrobust %" PRIu64 ", unknown %" PRIu64
              " of %" PRIu64 " pixels)\n",
              s.rv, s.robust, s.nonrobust, s.unknown, s.pixels);
  std::printf("guarantee: epsilon %.6g, ell %" PRIu64 ", m %" PRIu64 ", delta2 %.9f\n",
              s.guarantee.epsilon, s.guarantee.ell, s.guarantee.m, s.guarantee.delta2);
  Outcome out;
  out.seeds = seeds_json(s);
  out.guarantee = guarantee_to_json(s.guarantee);
  out.timing = json::parse(cr_run_timings_json(run.get()));
  return out;
}

Outcome cmd_sweep(const json& cfg, const Context& ctx) {
  const auto images = cfg.at("images").get<std::vector<std::string>>();
  const auto values = cfg.at("values").get<std::vector<double>>();
  const std::string param = cfg.at("param").get<std::string>();
  const std::string attack = cfg.at("attack").get<std::string>();
  if (images.empty()) throw UsageError("--images needs at least one image");
  if (values.empty()) throw UsageError("--values needs at least one value");
  if (param != "e" && param != "fraction") throw UsageError("--param must be 'e' or 'fraction'");
  const cr_run_config rc = run_config(cfg, ctx.threads);
  for (double v : values) {
    validate_attack_params(attack, param == "e" ? v : cfg.at("e").get<double>(),
                           param == "fraction" ? v : cfg.at("fraction").get<double>());
  }
  if (ctx.out_dir.empty()) throw UsageError("--out is required");
  ensure_dir(ctx.out_dir);

  const ModelPtr model = load_model(cfg.at("model").get<std::string>());
  std::vector<ImagePtr> loaded;
  for (const auto& path : images) loaded.push_back(load_image(path, cfg.at("shape")));

  std::ostringstream csv;
  std::ostringstream timing_csv;
  csv << "param,value,mean_rv,images_ok,images_failed,error\n";
  timing_csv << "param,value,seconds\n";
  Outcome out;
  out.timing = json::array();
  for (double v : values) {
    const double e = param == "e" ? v : cfg.at("e").get<double>();
    const double fraction = param == "fraction" ? v : cfg.at("fraction").get<double>();
    const auto start = std::chrono::steady_clock::now();
    double rv_sum = 0.0;
    std::size_t ok = 0;
    std::string first_error;
    for (std::size_t i = 0; i < loaded.size(); ++i) {
      try {
        const SpecPtr spec = build_attack(loaded[i].get(), cfg, e, fraction);
        cr_run* raw = nullptr;
        check(cr_run_verify(model.get(), spec.get(), &rc, &raw), "verify");
        const RunPtr run(raw);
        cr_run_summary s;
        check(cr_run_summary_get(run.get(), &s), "summary");
        rv_sum += s.rv;
        ++ok;
        if (out.guarantee.is_null()) {
          out.guarantee = guarantee_to_json(s.guarantee);
          out.seeds = seeds_json(s);
        }
      } catch (const ApiError& err) {
        if (first_error.empty()) first_error = images[i] + ": " + err.what();
      }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::size_t failed = loaded.size() - ok;
    csv << param << ',' << fmt_double(v) << ','
        << (ok > 0 ? fmt_double(rv_sum / static_cast<double>(ok)) : std::string("nan")) << ','
        << ok << ',' << failed << ',' << (first_error.empty() ? "" : csv_quote(first_error))
        << '\n';
    timing_csv << param << ',' << fmt_double(v) << ',' << fmt_double(seconds) << '\n';
    out.timing.push_back({{"value", v}, {"seconds", seconds}});
    std::printf("%s = %.6g: mean RV %s over %zu image(s)%s\n", param.c_str(), v,
                ok > 0 ? fmt_double(rv_sum / static_cast<double>(ok)).c_str() : "n/a", ok,
                failed ? " (some failed)" : "");
  }
  write_file(fs::path(ctx.out_dir) / "sweep.csv", csv.str());
  write_file(fs::path(ctx.out_dir) / "sweep_timing.csv", timing_csv.str());
  return out;
}

// ---- audit --------------------------------------------------------------------

Outcome cmd_audit(const json& cfg, const Context& ctx) {
  const std::string run_dir = cfg.at("run_dir").get<std::string>();
  const std::uint64_t samples = cfg.at("samples").get<std::uint64_t>();
  if (samples < 1) throw UsageError("--samples must be at least 1");
  if (ctx.out_dir.empty()) throw UsageError("an output directory is required");
  ensure_dir(ctx.out_dir);
  const std::string out_json = (fs::path(ctx.out_dir) / "audit.json").string();
  cr_audit_report r;
  const auto start = std::chrono::steady_clock::now();
  check(cr_audit_run_dir(run_dir.c_str(), samples, cfg.at("seed").get<std::uint64_t>(),
                         ctx.threads, out_json.c_str(), &r),
        "audit");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("eps_hat = %.9g (%" PRIu64 " of %" PRIu64 " samples outside)\n", r.eps_hat,
              r.outside, r.samples);
  if (r.bound_ratio_degenerate) {
    std::printf("bound_ratio = undefined (certified width is zero or infinite)\n");
  } else {
    std::printf("bound_ratio = %.9g\n", r.bound_ratio);
  }
  Outcome out;
  out.seeds = {{"root", cfg.at("seed")}};
  out.timing = {{"audit", seconds}};
  return out;
}

// ---- toy ------------------------------------------------------------------------

Outcome cmd_toy(const json& cfg, const Context& ctx) {
  cr_toy_config tc;
  cr_toy_config_init(&tc);
  tc.depth = cfg.at("depth").get<std::uint64_t>();
  tc.width = cfg.at("width").get<std::uint64_t>();
  tc.inputs = cfg.at("in").get<std::uint64_t>();
  tc.outputs = cfg.at("out").get<std::uint64_t>();
  tc.m = cfg.at("m").get<std::uint64_t>();
  tc.ell = cfg.at("ell").get<std::uint64_t>();
  tc.epsilon = cfg.at("epsilon").get<double>();
  tc.t_naive = cfg.at("t").get<std::uint64_t>();
  tc.t_surrogate = cfg.at("t_surrogate").get<std::uint64_t>();
  tc.tprime = cfg.at("tprime").get<std::uint64_t>();
  tc.components = cfg.at("N").get<std::uint64_t>();
  tc.validation = cfg.at("validation").get<std::uint64_t>();
  tc.cloud_points = cfg.at("cloud").get<std::uint64_t>();
  tc.seed = cfg.at("seed").get<std::uint64_t>();
  tc.threads = ctx.threads;
  const std::string clip = cfg.at("clip").get<std::string>();
  if (clip != "linf" && clip != "l1") throw UsageError("unknown clipping norm '" + clip + "'");
  tc.clip_norm = clip == "linf" ? CR_CLIP_LINF : CR_CLIP_L1;
  if (tc.ell == 0) tc.ell = tc.m > 1 ? tc.m - 1 : 1;
  validate_triple(tc.m, tc.ell, tc.epsilon);
  if (tc.depth < 1 || tc.width < 1 || tc.inputs < 1 || tc.outputs < 1) {
    throw UsageError("network dimensions must be positive");
  }
  if (tc.t_surrogate < 1 || tc.t_surrogate > tc.t_naive) {
    throw UsageError("--t-surrogate must lie in [1, --t]");
  }
  if (tc.tprime < 1 || tc.validation < 1) throw UsageError("sample sizes must be positive");
  if (ctx.out_dir.empty()) throw UsageError("--out-dir is required");

  cr_toy_result r;
  const auto start = std::chrono::steady_clock::now();
  check(cr_toy_run(&tc, ctx.out_dir.c_str(), &r), "toy");
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("naive:     outside fraction %.9g, total width %.9g\n", r.naive_outside_fraction,
              r.naive_width);
  std::printf("surrogate: outside fraction %.9g, total width %.9g\n",
              r.surrogate_outside_fraction, r.surrogate_width);
  std::printf("guarantee: delta2 %.9f\n", r.guarantee.delta2);
  Outcome out;
  out.seeds = {{"root", tc.seed}};
  out.guarantee = guarantee_to_json(r.guarantee);
  out.timing = {{"total", seconds}};
  return out;
}

// ---- dispatch and manifests ---------------------------------------------------

Outcome dispatch(const std::string& command, const json& cfg, const Context& ctx) {
  try {
    if (command == "guarantee") return cmd_guarantee(cfg, ctx);
    if (command == "verify") return cmd_verify(cfg, ctx);
    if (command == "sweep") return cmd_sweep(cfg, ctx);
    if (command == "audit") return cmd_audit(cfg, ctx);
    if (command == "toy") return cmd_toy(cfg, ctx);
  } catch (const json::exception& e) {
    throw ApiError(CR_ERR_FORMAT, "config of '" + command + "': " + e.what());
  }
  throw UsageError("unknown command '" + command + "'");
}

void write_manifest(const std::string& command, const json& cfg, const Context& ctx,
                    const Outcome& outcome) {
  if (ctx.out_dir.empty()) return;
  ensure_dir(ctx.out_dir);
  json m;
  m["command"] = command;
  m["config"] = cfg;
  m["config_digest"] = hex64(fnv1a64(cfg.dump()));
  m["versions"] = {{"confreach", cr_version()}, {"manifest", 1}};
  m["seeds"] = outcome.seeds;
  m["guarantee"] = outcome.guarantee;
  m["timing"] = outcome.timing;
  const char* env = std::getenv("CONFORMAL_REACH_THREADS");
  m["threads"] = {{"requested", ctx.threads}, {"env", env ? json(env) : json(nullptr)}};
  write_file(fs::path(ctx.out_dir) / "manifest.json", m.dump(2) + "\n");
}

int execute(const std::string& command, const json& cfg, const Context& ctx) {
  const Outcome outcome = dispatch(command, cfg, ctx);
  write_manifest(command, cfg, ctx, outcome);
  return kExitOk;
}

json shape_json(const std::vector<std::size_t>& shape) {
  if (shape.empty()) return nullptr;
  if (shape.size() != 3) throw UsageError("--shape takes H,W,C");
  return shape;
}

// Flags shared by verify and sweep.
struct VerifyFlags {
  std::string model;
  std::vector<std::size_t> shape;
  std::string attack = "darkening";
  double e = 0.0;
  double fraction = 1.0;
  double threshold = 150.0 / 255.0;
  std::string mode = "naive";
  std::uint64_t m = 8000;
  std::uint64_t ell = 0;
  double epsilon = 1e-3;
  std::uint64_t t = 0;
  std::uint64_t tprime = 0;
  std::uint64_t components = 0;
  std::string clip = "linf";
  std::uint64_t seed = 0;

  void add_to(CLI::App* app) {
    app->add_option("--model", model, "model file (MLP v1)")->required()->check(CLI::ExistingFile);
    app->add_option("--shape", shape, "H,W,C for raw .f64 images")->delimiter(',');
    app->add_option("--attack", attack, "perturbation family")
        ->check(CLI::IsMember({"darkening", "l2", "linf"}));
    app->add_option("--e", e, "darkening amount or ball radius");
    app->add_option("--fraction", fraction, "fraction of eligible pixels darkened");
    app->add_option("--threshold", threshold, "darkening eligibility threshold");
    app->add_option("--mode", mode, "reachset construction")
        ->check(CLI::IsMember({"naive", "surrogate"}));
    app->add_option("--m", m, "calibration size")->check(CLI::Range(std::uint64_t{1}, UINT64_MAX));
    app->add_option("--ell", ell, "rank of the threshold score (default m - 1)")
        ->check(CLI::Range(std::uint64_t{1}, UINT64_MAX));
    app->add_option("--epsilon", epsilon, "miscoverage level");
    app->add_option("--t", t, "training size (default m / 2)");
    app->add_option("--tprime", tprime, "auxiliary size for the error scales (default t)");
    app->add_option("--N", components, "principal components (default min(t - 1, 64, n))");
    app->add_option("--clip", clip, "clipping norm")->check(CLI::IsMember({"linf", "l1"}));
    app->add_option("--seed", seed, "root seed");
  }

  json to_json() const {
    return {{"model", absolute(model)}, {"shape", shape_json(shape)},
            {"attack", attack},         {"e", e},
            {"fraction", fraction},     {"threshold", threshold},
            {"mode", mode},             {"m", m},
            {"ell", ell},               {"epsilon", epsilon},
            {"t", t},                   {"tprime", tprime},
            {"N", components},          {"clip", clip},
            {"seed", seed}};
  }
};

int run_cli(int argc, char** argv) {
  CLI::App app{"Conformal reachsets and pixel robustness verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cr_version()));
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker cap (0: CONFORMAL_REACH_THREADS or all cores)")
      ->envname("CONFORMAL_REACH_THREADS");

  // guarantee
  CLI::App* g = app.add_subcommand("guarantee", "print the <epsilon, ell, m> guarantee");
  std::uint64_t g_m = 0, g_ell = 0;
  double g_eps = 0.0;
  std::string g_out;
  g->add_option("--m", g_m, "calibration size")->required();
  auto* g_ell_opt = g->add_option("--ell", g_ell, "rank (default ceil((m + 1)(1 - epsilon)))");
  g->add_option("--epsilon", g_eps, "miscoverage level")->required();
  g->add_option("--out", g_out, "directory for guarantee.json and manifest.json");

  // verify
  CLI::App* v = app.add_subcommand("verify", "certify pixel robustness of one image");
  VerifyFlags vf;
  std::string v_image, v_out;
  vf.add_to(v);
  v->add_option("--image", v_image, "PGM/PPM or .f64 image")->required()->check(CLI::ExistingFile);
  v->add_option("--out", v_out, "output directory")->required();

  // sweep
  CLI::App* s = app.add_subcommand("sweep", "mean RV over images for a list of attack levels");
  VerifyFlags sf;
  std::vector<std::string> s_images;
  std::vector<double> s_values;
  std::string s_param = "e", s_out;
  sf.add_to(s);
  s->add_option("--images", s_images, "image files")->required()->delimiter(',')->check(CLI::ExistingFile);
  s->add_option("--param", s_param, "swept parameter")->check(CLI::IsMember({"e", "fraction"}));
  s->add_option("--values", s_values, "parameter values")->required()->delimiter(',');
  s->add_option("--out", s_out, "output directory")->required();

  // audit
  CLI::App* a = app.add_subcommand("audit", "fresh-sample audit of a verify run directory");
  std::string a_run, a_out;
  std::uint64_t a_samples = 100000, a_seed = 0;
  a->add_option("--run-dir", a_run, "directory written by verify")->required()->check(CLI::ExistingDirectory);
  a->add_option("--samples", a_samples, "audit sample count");
  a->add_option("--seed", a_seed, "audit seed");
  a->add_option("--out", a_out, "output directory (default <run-dir>/audit)");

  // toy
  CLI::App* t = app.add_subcommand("toy", "deep random MLP on the unit cube, both reachsets");
  std::uint64_t t_depth = 60, t_width = 100, t_in = 784, t_outd = 2, t_m = 200000, t_ell = 0,
                t_t = 10000, t_ts = 4000, t_tp = 10000, t_n = 0, t_valid = 100000, t_cloud = 2000,
                t_seed = 0;
  double t_eps = 1e-4;
  std::string t_clip = "linf", t_dir;
  t->add_option("--depth", t_depth, "hidden layers");
  t->add_option("--width", t_width, "hidden width");
  t->add_option("--in", t_in, "input dimension");
  t->add_option("--out", t_outd, "output dimension");
  t->add_option("--m", t_m, "calibration size");
  t->add_option("--ell", t_ell, "rank (default m - 1)");
  t->add_option("--epsilon", t_eps, "miscoverage level");
  t->add_option("--t", t_t, "naive training size");
  t->add_option("--t-surrogate", t_ts, "surrogate training size");
  t->add_option("--tprime", t_tp, "auxiliary size");
  t->add_option("--N", t_n, "principal components (default min(t - 1, 64, n))");
  t->add_option("--validation", t_valid, "fresh validation samples");
  t->add_option("--cloud", t_cloud, "validation outputs written to cloud.csv");
  t->add_option("--seed", t_seed, "root seed");
  t->add_option("--clip", t_clip, "clipping norm")->check(CLI::IsMember({"linf", "l1"}));
  t->add_option("--out-dir", t_dir, "output directory")->required();

  // replay
  CLI::App* r = app.add_subcommand("replay", "re-run a command from its manifest.json");
  std::string r_manifest, r_out;
  r->add_option("--manifest", r_manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  r->add_option("--out", r_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  Context ctx;
  ctx.threads = threads;
  if (g->parsed()) {
    ctx.out_dir = g_out;
    const json cfg = {{"m", g_m}, {"ell", g_ell}, {"epsilon", g_eps}, {"ell_auto", g_ell_opt->count() == 0}};
    return execute("guarantee", cfg, ctx);
  }
  if (v->parsed()) {
    json cfg = vf.to_json();
    cfg["image"] = absolute(v_image);
    ctx.out_dir = v_out;
    return execute("verify", cfg, ctx);
  }
  if (s->parsed()) {
    json cfg = sf.to_json();
    std::vector<std::string> abs_images;
    for (const auto& p : s_images) abs_images.push_back(absolute(p));
    cfg["images"] = abs_images;
    cfg["param"] = s_param;
    cfg["values"] = s_values;
    ctx.out_dir = s_out;
    return execute("sweep", cfg, ctx);
  }
  if (a->parsed()) {
    const json cfg = {{"run_dir", absolute(a_run)}, {"samples", a_samples}, {"seed", a_seed}};
    ctx.out_dir = a_out.empty() ? (fs::path(a_run) / "audit").string() : a_out;
    return execute("audit", cfg, ctx);
  }
  if (t->parsed()) {
    const json cfg = {{"depth", t_depth}, {"width", t_width},  {"in", t_in},
                      {"out", t_outd},    {"m", t_m},          {"ell", t_ell},
                      {"epsilon", t_eps}, {"t", t_t},          {"t_surrogate", t_ts},
                      {"tprime", t_tp},   {"N", t_n},          {"validation", t_valid},
                      {"cloud", t_cloud}, {"seed", t_seed},    {"clip", t_clip}};
    ctx.out_dir = t_dir;
    return execute("toy", cfg, ctx);
  }
  if (r->parsed()) {
    json manifest;
    std::ifstream in(r_manifest, std::ios::binary);
    try {
      manifest = json::parse(in);
      const std::string command = manifest.at("command").get<std::string>();
      ctx.out_dir = r_out;
      return execute(command, manifest.at("config"), ctx);
    } catch (const json::exception& e) {
      throw ApiError(CR_ERR_FORMAT, "manifest '" + r_manifest + "': " + e.what());
    }
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const ApiError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.status());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
}
