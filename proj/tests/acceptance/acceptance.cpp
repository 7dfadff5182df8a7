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

// Acceptance suite. Each criterion prints one line:
//   [PASS] criterion N (name): details (seconds)
// Run one with --criterion N, or all of them without arguments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/error.hpp"
#include "core/guarantees.hpp"
#include "core/hull.hpp"
#include "core/image_io.hpp"
#include "core/model.hpp"
#include "core/pca.hpp"
#include "core/perturb.hpp"
#include "core/random.hpp"
#include "core/toy.hpp"
#include "core/verify.hpp"
#include "support/test_support.hpp"

namespace confreach {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// ---- 1, 2: Beta calculus ---------------------------------------------------

Outcome beta_calculus() {
  const double a = guarantee_confidence(1e-4, 99999, 100000).confidence_delta2;
  const double b = guarantee_confidence(1e-4, 199998, 200000).confidence_delta2;
  const double c = guarantee_confidence(2e-6, 8464286, 8464287).confidence_delta2;
  const double v = beta_moments(7999, 8000).variance;
  const bool ok = std::abs(a - 0.9995008) <= 1e-6 && b >= 0.9999995 && c >= 0.9999992 &&
                  std::abs(v - 3.123e-8) <= 1e-11;
  return {ok, fmt("delta2 = %.9f, %.9f, %.9f; variance %.6e", a, b, c, v)};
}

Outcome table_settings() {
  struct Row {
    std::uint64_t m, gap;
    double delta1;
  };
  const Row rows[] = {{8000, 1, 0.999}, {921, 1, 0.99}};
  bool ok = true;
  std::string detail;
  for (const Row& r : rows) {
    const double eps = 1.0 - r.delta1;
    const double d2 = guarantee_confidence(eps, r.m - r.gap, r.m).confidence_delta2;
    const bool row_ok = std::abs(d2 - 0.997) <= 1e-3;
    ok = ok && row_ok;
    detail += fmt("%s(m=%llu, delta1=%.3g) delta2 = %.6f %s", detail.empty() ? "" : "; ",
                  static_cast<unsigned long long>(r.m), r.delta1, d2,
                  row_ok ? "within 0.997 +- 0.001" : "OUTSIDE 0.997 +- 0.001");
  }
  return {ok, detail};
}

// ---- 3, 8: coverage law and audit ------------------------------------------

// Uniform box [0, 1]^8 around the origin.
PerturbationSpec unit_box(std::size_t dim) {
  std::vector<SparseNoise> noise(dim);
  for (std::size_t i = 0; i < dim; ++i) noise[i] = {{i}, {1.0}};
  return make_box_spec(ImageTensor(1, dim, 1), std::move(noise), std::vector<double>(dim, 0.0),
                       std::vector<double>(dim, 1.0));
}

struct CoverageTrial {
  ConservatismReport report;
  double limit = 0.0;
};

CoverageTrial coverage_trial(std::uint64_t seed, std::size_t m, std::size_t ell, double epsilon) {
  const MlpNetwork model = MlpNetwork::random(std::vector<std::size_t>{8, 32, 32, 4}, seed);
  const PerturbationSpec spec = unit_box(8);
  PipelineConfig c;
  c.mode = ReachMode::kNaive;
  c.m = m;
  c.ell = ell;
  c.epsilon = epsilon;
  c.seed = seed;
  const ReachsetResult r = compute_reachset(model, spec, c);
  CoverageTrial out;
  out.report = conservatism_audit(model, spec, r.bounds.lo, r.bounds.hi, 100000,
                                  stream_seed(seed, Stream::kAudit), 0);
  // Miscoverage is 1 - Beta(ell, m + 1 - ell); its 99.9th percentile.
  out.limit = 1.0 - beta_quantile(0.001, static_cast<double>(ell), static_cast<double>(m + 1 - ell));
  return out;
}

Outcome coverage_law() {
  int exceed = 0;
  double worst = 0.0, limit = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CoverageTrial t = coverage_trial(seed, 2000, 1998, 0.005);
    limit = t.limit;
    worst = std::max(worst, t.report.eps_hat);
    if (t.report.eps_hat > t.limit) ++exceed;
  }
  return {exceed <= 1, fmt("%d of 20 trials above the 99.9th percentile %.6f (max eps_hat %.6f)",
                           exceed, limit, worst)};
}

Outcome audit_consistency() {
  int eps_ok = 0, zero_runs = 0, ratio_ok = 0;
  double max_eps = 0.0, max_ratio = 0.0;
  auto check_ratio = [&](const ConservatismReport& r) {
    if (r.outside != 0 || r.ratio_degenerate) return;
    ++zero_runs;
    max_ratio = std::max(max_ratio, r.bound_ratio);
    if (r.bound_ratio <= 1.0 + 1e-9) ++ratio_ok;
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CoverageTrial t = coverage_trial(seed, 2000, 1998, 0.005);
    max_eps = std::max(max_eps, t.report.eps_hat);
    if (t.report.eps_hat <= 10.0 * 0.005) ++eps_ok;
    check_ratio(t.report);
  }
  // Top-rank runs on a large calibration set usually see no miss in 1e5.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    check_ratio(coverage_trial(seed, 1000000, 1000000, 1e-5).report);
  }
  const MlpNetwork model = testing::segmentation_toy_model();
  const PerturbationSpec spec =
      build_darkening(testing::two_bright_pixel_image(), 1.0, 150.0 / 255.0, 0.1, 0);
  for (ReachMode mode : {ReachMode::kNaive, ReachMode::kSurrogate}) {
    PipelineConfig c;
    c.mode = mode;
    c.m = 8000;
    c.epsilon = 1e-3;
    c.seed = 11;
    const PipelineResult r = run_pipeline(model, spec, c);
    check_ratio(conservatism_audit(model, spec, r.reach.bounds.lo, r.reach.bounds.hi, 100000,
                                   stream_seed(11, Stream::kAudit), 0));
  }
  const bool ok = eps_ok == 20 && zero_runs >= 1 && ratio_ok == zero_runs;
  return {ok, fmt("eps_hat <= 0.05 in %d/20 (max %.6f); bound_ratio <= 1 + 1e-9 in %d/%d runs "
                  "with eps_hat = 0 (max %.6f)",
                  eps_ok, max_eps, ratio_ok, zero_runs, max_ratio)};
}

// ---- 4: deflation oracle ----------------------------------------------------

Outcome deflation_oracle() {
  Rng rng(404);
  int passed = 0, clouds = 0;
  double worst_angle = 0.0, worst_orth = 0.0, min_gap = std::numeric_limits<double>::infinity();
  while (clouds < 50) {
    const std::size_t n = 2 + rng.below(49);
    const std::size_t t = 2 + rng.below(199);
    const std::size_t N = 1 + rng.below(std::min(n, t) - 1);
    // Anisotropic Gaussian cloud with a random offset.
    Eigen::MatrixXd Z(t, n);
    std::vector<double> scales(n), offset(n);
    for (std::size_t k = 0; k < n; ++k) {
      scales[k] = std::exp(rng.uniform(-3.0, 1.0));
      offset[k] = rng.uniform(-1.0, 1.0);
    }
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t k = 0; k < n; ++k) Z(j, k) = offset[k] + scales[k] * rng.normal();
    const Eigen::MatrixXd C = Z.transpose() * Z / static_cast<double>(t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    const Eigen::VectorXd lam = eig.eigenvalues();  // ascending
    const double gap = lam(n - N) - lam(n - N - 1);
    if (!(gap > 1e-6)) continue;
    ++clouds;
    min_gap = std::min(min_gap, gap);
    const Eigen::MatrixXd U = eig.eigenvectors().rightCols(N);

    std::vector<double> flat(t * n);
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t k = 0; k < n; ++k) flat[j * n + k] = Z(j, k);
    const ProjectionBasis basis = deflate(flat, t, n, N, PcaOptions{});
    Eigen::MatrixXd A(n, N);
    for (std::size_t c = 0; c < N; ++c)
      for (std::size_t k = 0; k < n; ++k) A(k, c) = basis.column(c)[k];
    // Largest principal angle: its sine is the spectral norm of (I - U U^T) A.
    const Eigen::MatrixXd R = A - U * (U.transpose() * A);
    const double sine = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues()(0);
    const double angle = std::asin(std::min(1.0, sine));
    const double orth =
        (A.transpose() * A - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff();
    worst_angle = std::max(worst_angle, angle);
    worst_orth = std::max(worst_orth, orth);
    if (angle < 1e-6 && orth <= 1e-8) ++passed;
  }
  return {passed == 50, fmt("%d/50 clouds; max principal angle %.3e, max |A^T A - I| %.3e, "
                            "min eigengap %.3e",
                            passed, worst_angle, worst_orth, min_gap)};
}

// ---- 5: clipping optimality -------------------------------------------------

// l-infinity residual of the combination alpha = counts / K.
double grid_residual(const HullModel& h, std::span<const double> v, const std::vector<int>& counts,
                     int K) {
  double r = 0.0;
  for (std::size_t k = 0; k < h.dim; ++k) {
    double x = 0.0;
    for (std::size_t j = 0; j < h.count; ++j) x += counts[j] * h.points[j * h.dim + k];
    r = std::max(r, std::abs(x / K - v[k]));
  }
  return r;
}

// Brute force over alpha in (1/K) Z^t on the simplex. A full grid at a coarse
// step seeds a coarse-to-fine pattern search that ends on the 1e-3 grid.
double grid_oracle(const HullModel& h, std::span<const double> v) {
  const std::size_t t = h.count;
  struct Point {
    double r;
    std::vector<int> c;
  };
  const int coarse = t <= 3 ? 200 : (t == 4 ? 60 : (t == 5 ? 30 : 20));
  std::vector<Point> pool;
  std::vector<int> c(t, 0);
  std::function<void(std::size_t, int)> enumerate = [&](std::size_t j, int left) {
    if (j + 1 == t) {
      c[j] = left;
      pool.push_back({grid_residual(h, v, c, coarse), c});
      return;
    }
    for (int x = 0; x <= left; ++x) {
      c[j] = x;
      enumerate(j + 1, left - x);
    }
  };
  enumerate(0, coarse);
  auto by_residual = [](const Point& a, const Point& b) { return a.r < b.r; };
  std::sort(pool.begin(), pool.end(), by_residual);
  if (pool.size() > 16) pool.resize(16);

  int K = coarse;
  const int levels[] = {1000};
  double best = pool.front().r;
  for (int target : levels) {
    for (Point& p : pool) {
      // Rescale to the finer grid, largest remainders first.
      std::vector<double> exact(t);
      std::vector<int> cc(t);
      int sum = 0;
      for (std::size_t j = 0; j < t; ++j) {
        exact[j] = static_cast<double>(p.c[j]) * target / K;
        cc[j] = static_cast<int>(std::floor(exact[j]));
        sum += cc[j];
      }
      std::vector<std::size_t> order(t);
      for (std::size_t j = 0; j < t; ++j) order[j] = j;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return exact[a] - cc[a] > exact[b] - cc[b];
      });
      for (std::size_t q = 0; sum < target; ++q, ++sum) ++cc[order[q % t]];
      p.c = cc;
      p.r = grid_residual(h, v, p.c, target);
      // Pattern search: move `step` units between two weights while it helps.
      for (int step = target / 8; step >= 1; step /= 2) {
        bool improved = true;
        while (improved) {
          improved = false;
          for (std::size_t i = 0; i < t; ++i) {
            for (std::size_t j = 0; j < t; ++j) {
              if (i == j || p.c[j] < step) continue;
              p.c[i] += step;
              p.c[j] -= step;
              const double r = grid_residual(h, v, p.c, target);
              if (r < p.r) {
                p.r = r;
                improved = true;
              } else {
                p.c[i] -= step;
                p.c[j] += step;
              }
            }
          }
        }
      }
      best = std::min(best, p.r);
    }
    K = target;
  }
  return best;
}

Outcome clipping_optimality() {
  Rng rng(505);
  int matched = 0, interior_ok = 0;
  double worst_gap = 0.0, worst_interior = 0.0;
  bool never_worse = true;
  for (int trial = 0; trial < 100; ++trial) {
    HullModel h;
    h.dim = 1 + rng.below(4);
    h.count = 1 + rng.below(6);
    h.points.resize(h.count * h.dim);
    for (double& p : h.points) p = rng.uniform(-1.0, 1.0);
    std::vector<double> v(h.dim);
    for (double& x : v) x = rng.uniform(-2.0, 2.0);
    const double lp = clip(v, h, ClipNorm::kLinf).residual;
    const double grid = grid_oracle(h, v);
    worst_gap = std::max(worst_gap, std::abs(lp - grid));
    if (lp > grid + 1e-9) never_worse = false;
    if (std::abs(lp - grid) <= 2e-3) ++matched;

    // A random convex combination is inside the hull.
    std::vector<double> alpha(h.count);
    double s = 0.0;
    for (double& a : alpha) s += (a = -std::log(1.0 - rng.uniform()));
    std::vector<double> inside(h.dim, 0.0);
    for (std::size_t j = 0; j < h.count; ++j)
      for (std::size_t k = 0; k < h.dim; ++k) inside[k] += alpha[j] / s * h.points[j * h.dim + k];
    const double r = clip(inside, h, ClipNorm::kLinf).residual;
    worst_interior = std::max(worst_interior, r);
    if (r <= 1e-7) ++interior_ok;
  }
  const bool ok = matched == 100 && interior_ok == 100 && never_worse;
  return {ok, fmt("%d/100 within 2e-3 of the grid (max gap %.3e, LP never above grid: %s); "
                  "%d/100 interior residuals <= 1e-7 (max %.3e)",
                  matched, worst_gap, never_worse ? "yes" : "no", interior_ok, worst_interior)};
}

// ---- 6: deep toy ------------------------------------------------------------

Outcome deep_toy() {
  int naive_ok = 0, surrogate_ok = 0, narrower = 0;
  double worst_naive = 0.0, worst_surrogate = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ToyConfig cfg;
    cfg.seed = seed;
    const ToyResult r = run_toy(cfg);
    worst_naive = std::max(worst_naive, r.naive_outside_fraction);
    worst_surrogate = std::max(worst_surrogate, r.surrogate_outside_fraction);
    if (r.naive_outside_fraction <= 5e-4) ++naive_ok;
    if (r.surrogate_outside_fraction <= 5e-4) ++surrogate_ok;
    if (r.surrogate_width <= r.naive_width) ++narrower;
    std::printf("  seed %llu: outside naive %.2e surrogate %.2e, width naive %.6f surrogate %.6f\n",
                static_cast<unsigned long long>(seed), r.naive_outside_fraction,
                r.surrogate_outside_fraction, r.naive_width, r.surrogate_width);
    std::fflush(stdout);
  }
  const bool ok = naive_ok == 10 && surrogate_ok == 10 && narrower >= 8;
  return {ok, fmt("outside <= 5e-4: naive %d/10 (max %.2e), surrogate %d/10 (max %.2e); "
                  "surrogate narrower in %d/10",
                  naive_ok, worst_naive, surrogate_ok, worst_surrogate, narrower)};
}

// ---- 7: pixel-status soundness ----------------------------------------------

Outcome pixel_soundness() {
  const MlpNetwork model = testing::segmentation_toy_model();
  const ImageTensor image = testing::two_bright_pixel_image();
  const PerturbationSpec spec = build_darkening(image, 1.0, 150.0 / 255.0, 0.1, 0);
  if (spec.dimension() != 2) return {false, "darkening set is not two-dimensional"};
  const std::size_t h = image.height, w = image.width, pixels = h * w;
  const std::size_t L = model.output_dim() / pixels;
  const ClassMask baseline = predict_mask(LogitTensor(h, w, L, model.infer(image.data)));

  std::vector<char> flips(pixels, 0);
  std::vector<double> lambda(2);
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      lambda[0] = spec.lambda_lower[0] + (spec.lambda_upper[0] - spec.lambda_lower[0]) * i / 100.0;
      lambda[1] = spec.lambda_lower[1] + (spec.lambda_upper[1] - spec.lambda_lower[1]) * j / 100.0;
      const ClassMask mask =
          predict_mask(LogitTensor(h, w, L, model.infer(spec.apply(lambda).data)));
      for (std::size_t p = 0; p < pixels; ++p) flips[p] |= mask.labels[p] != baseline.labels[p];
    }
  }
  std::size_t grid_robust = 0;
  for (char f : flips) grid_robust += f == 0;
  const double grid_rv = 100.0 * static_cast<double>(grid_robust) / static_cast<double>(pixels);

  bool ok = true;
  std::string detail = fmt("grid RV %.4f", grid_rv);
  for (ReachMode mode : {ReachMode::kNaive, ReachMode::kSurrogate}) {
    PipelineConfig c;
    c.mode = mode;
    c.m = 8000;
    c.epsilon = 1e-3;
    c.seed = 7;
    const PipelineResult r = run_pipeline(model, spec, c);
    std::size_t robust_flips = 0;
    for (std::size_t p = 0; p < pixels; ++p) {
      if (r.status.status[p] == PixelStatus::kRobust && flips[p]) ++robust_flips;
    }
    ok = ok && robust_flips == 0 && r.status.rv == grid_rv;
    detail += fmt("; %s RV %.4f, flips on robust pixels %zu", reach_mode_name(mode), r.status.rv,
                  robust_flips);
  }
  return {ok, detail};
}

// ---- 9: determinism ---------------------------------------------------------

using Snapshot = std::vector<std::pair<std::string, std::string>>;

Snapshot primary_outputs(const std::string& dir) {
  Snapshot out;
  for (auto& [name, bytes] : testing::snapshot_dir(dir)) {
    const bool timing = name == "manifest.json" || name.ends_with("/manifest.json") ||
                        name == "sweep_timing.csv";
    if (!timing) out.emplace_back(name, bytes);
  }
  return out;
}

Outcome determinism() {
  testing::TempDir dir;
  save_model(testing::segmentation_toy_model(), dir.file("model.mlp"));
  save_pnm(dir.file("a.pgm"), testing::two_bright_pixel_image());
  ImageTensor dim = testing::two_bright_pixel_image();
  dim.at(0, 1, 0) = 0.7;
  save_pnm(dir.file("b.pgm"), dim);

  const std::string cli = CONFREACH_CLI_PATH;
  auto run = [&](const std::string& args) {
    return testing::run_command(cli + " " + args + " > " + dir.file("log.txt") + " 2>&1");
  };
  const std::string model = " --model " + dir.file("model.mlp");
  struct Case {
    std::string name;
    std::string args;  // everything except --threads and the output flag
    std::string out_flag;
  };
  const std::vector<Case> cases = {
      {"guarantee", "guarantee --m 8000 --epsilon 1e-3", "--out"},
      {"verify-naive",
       "verify" + model + " --image " + dir.file("a.pgm") +
           " --attack darkening --e 0.1 --m 4000 --epsilon 1e-3 --seed 3",
       "--out"},
      {"verify-surrogate",
       "verify" + model + " --image " + dir.file("a.pgm") +
           " --attack l2 --e 0.05 --mode surrogate --m 3000 --epsilon 1e-3 --seed 4",
       "--out"},
      {"sweep",
       "sweep" + model + " --images " + dir.file("a.pgm") + "," + dir.file("b.pgm") +
           " --param e --values 0.05,0.1,0.75 --m 1000 --epsilon 0.01 --seed 5",
       "--out"},
      {"toy",
       "toy --depth 8 --width 30 --in 20 --out 3 --m 5000 --epsilon 1e-3 --t 1000"
       " --t-surrogate 500 --tprime 1000 --validation 20000 --seed 6",
       "--out-dir"},
  };

  int identical = 0, total = 0;
  std::string failures;
  auto compare = [&](const std::string& label, const std::string& a, const std::string& b) {
    ++total;
    const Snapshot sa = primary_outputs(a), sb = primary_outputs(b);
    if (!sa.empty() && sa == sb) {
      ++identical;
    } else {
      failures += " " + label;
    }
  };
  for (const Case& c : cases) {
    const std::string first = dir.file(c.name + "-t1");
    if (run("--threads 1 " + c.args + " " + c.out_flag + " " + first) != 0) {
      failures += " " + c.name + "(exit)";
      ++total;
      continue;
    }
    const std::string again = dir.file(c.name + "-t4");
    if (run("--threads 4 " + c.args + " " + c.out_flag + " " + again) != 0) failures += " rerun";
    compare(c.name + "/rerun", first, again);
    const std::string replayed = dir.file(c.name + "-replay");
    if (run("--threads 3 replay --manifest " + first + "/manifest.json --out " + replayed) != 0) {
      failures += " " + c.name + "(replay exit)";
    }
    compare(c.name + "/replay", first, replayed);
  }

  // Audit of a stored run, re-run and replayed.
  const std::string audited = dir.file("verify-naive-t1");
  const std::string a1 = dir.file("audit-t1");
  if (run("--threads 1 audit --run-dir " + audited + " --samples 20000 --seed 9 --out " + a1) == 0) {
    run("--threads 2 audit --run-dir " + audited + " --samples 20000 --seed 9 --out " +
        dir.file("audit-t2"));
    compare("audit/rerun", a1, dir.file("audit-t2"));
    run("--threads 3 replay --manifest " + a1 + "/manifest.json --out " + dir.file("audit-replay"));
    compare("audit/replay", a1, dir.file("audit-replay"));
  } else {
    failures += " audit(exit)";
    ++total;
  }
  return {identical == total,
          fmt("%d/%d re-runs and replays byte-identical%s%s", identical, total,
              failures.empty() ? "" : "; differing:", failures.c_str())};
}

// ---- driver -----------------------------------------------------------------

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "Beta-calculus reproduction", 1.0, beta_calculus},
      {2, "reference guarantee rows", 1.0, table_settings},
      {3, "coverage law", 300.0, coverage_law},
      {4, "deflation oracle", 60.0, deflation_oracle},
      {5, "clipping optimality", 120.0, clipping_optimality},
      {6, "deep toy at desk scale", 1800.0, deep_toy},
      {7, "pixel-status soundness", 120.0, pixel_soundness},
      {8, "conservatism audit self-consistency", 300.0, audit_consistency},
      {9, "determinism", 300.0, determinism},
  };
  return all;
}

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_budget = seconds < c.budget_seconds;
  const bool pass = o.pass && in_budget;
  std::printf("[%s] criterion %d (%s): %s (%.2f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL",
              c.number, c.name, o.detail.c_str(), seconds, c.budget_seconds,
              in_budget ? "" : ", OVER BUDGET");
  std::fflush(stdout);
  return pass;
}

}  // namespace
}  // namespace confreach

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  bool all_pass = true;
  bool matched = false;
  for (const auto& c : confreach::criteria()) {
    if (only != 0 && c.number != only) continue;
    matched = true;
    all_pass = confreach::run_one(c) && all_pass;
  }
  if (!matched) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all_pass ? 0 : 1;
}
