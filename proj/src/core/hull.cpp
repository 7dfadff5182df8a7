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

#include "core/hull.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/binary_io.hpp"
#include "core/error.hpp"
#include "core/lp.hpp"
#include "core/parallel.hpp"
#include "core/random.hpp"

namespace confreach {

const char* clip_norm_name(ClipNorm norm) { return norm == ClipNorm::kLinf ? "linf" : "l1"; }

ClipNorm parse_clip_norm(const std::string& name) {
  if (name == "linf" || name == "inf") return ClipNorm::kLinf;
  if (name == "l1") return ClipNorm::kL1;
  fail(ErrorKind::kDomain, "unknown clipping norm '" + name + "' (expected linf or l1)");
}

namespace {

ClipResult clip_all(std::span<const double> v, const HullModel& hull, ClipNorm norm);

}  // namespace

ClipResult clip(std::span<const double> v, const HullModel& hull, ClipNorm norm) {
  require(hull.count >= 1, ErrorKind::kDimension, "hull has no points");
  require(v.size() == hull.dim, ErrorKind::kDimension, "clip: vector length mismatch");
  require(hull.points.size() == hull.count * hull.dim, ErrorKind::kDimension, "malformed hull");
  if (hull.vertices.empty() || hull.vertices.size() == hull.count) return clip_all(v, hull, norm);

  HullModel sub;
  sub.dim = hull.dim;
  sub.count = hull.vertices.size();
  sub.points.reserve(sub.count * sub.dim);
  for (std::size_t j : hull.vertices) {
    const auto p = hull.point(j);
    sub.points.insert(sub.points.end(), p.begin(), p.end());
  }
  ClipResult r = clip_all(v, sub, norm);
  std::vector<double> alpha(hull.count, 0.0);
  for (std::size_t i = 0; i < sub.count; ++i) alpha[hull.vertices[i]] = r.alpha[i];
  r.alpha = std::move(alpha);
  return r;
}

namespace {

ClipResult clip_all(std::span<const double> v, const HullModel& hull, ClipNorm norm) {
  const std::size_t t = hull.count;
  const std::size_t dim = hull.dim;

  // Variables: alpha (t) then the epigraph variables (1 for linf, N for l1).
  const std::size_t eps_vars = norm == ClipNorm::kLinf ? 1 : dim;
  LinearProgram lp;
  lp.num_vars = t + eps_vars;
  const std::size_t nv = lp.num_vars;
  lp.objective.assign(nv, 0.0);
  for (std::size_t e = 0; e < eps_vars; ++e) lp.objective[t + e] = 1.0;
  lp.a_eq.assign(nv, 0.0);
  for (std::size_t j = 0; j < t; ++j) lp.a_eq[j] = 1.0;
  lp.b_eq = {1.0};
  lp.a_ub.assign(2 * dim * nv, 0.0);
  lp.b_ub.assign(2 * dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    double* plus = &lp.a_ub[(2 * k) * nv];       //  (V alpha)_k - s <= v_k
    double* minus = &lp.a_ub[(2 * k + 1) * nv];  // -(V alpha)_k - s <= -v_k
    for (std::size_t j = 0; j < t; ++j) {
      const double p = hull.points[j * dim + k];
      plus[j] = p;
      minus[j] = -p;
    }
    const std::size_t s = t + (norm == ClipNorm::kLinf ? 0 : k);
    plus[s] = -1.0;
    minus[s] = -1.0;
    lp.b_ub[2 * k] = v[k];
    lp.b_ub[2 * k + 1] = -v[k];
  }

  LpSolution sol;
  try {
    sol = lp_solve(lp);
  } catch (const Error& e) {
    fail(e.kind(), std::string("clipping LP failed: ") + e.what());
  }
  ClipResult out;
  out.alpha.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(t));
  out.projected.assign(dim, 0.0);
  for (std::size_t j = 0; j < t; ++j) {
    const double a = out.alpha[j];
    if (a == 0.0) continue;
    for (std::size_t k = 0; k < dim; ++k) out.projected[k] += a * hull.points[j * dim + k];
  }
  // Report the attained norm of the actual combination.
  double r = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = std::abs(v[k] - out.projected[k]);
    r = norm == ClipNorm::kLinf ? std::max(r, d) : r + d;
  }
  out.residual = r;
  return out;
}

}  // namespace

std::vector<std::size_t> vertex_candidates(const HullModel& hull, unsigned threads) {
  const std::size_t t = hull.count;
  const std::size_t dim = hull.dim;
  require(t >= 1 && hull.points.size() == t * dim, ErrorKind::kDimension, "malformed hull");
  std::vector<std::size_t> all(t);
  for (std::size_t j = 0; j < t; ++j) all[j] = j;
  if (t <= 2 * dim + 2) return all;

  // Seeds: extreme points along the axes and a fixed set of directions.
  std::vector<char> seed(t, 0);
  Rng rng(0x68756c6cULL);
  const std::size_t directions = 2 * dim + 16 * dim;
  std::vector<double> d(dim);
  for (std::size_t r = 0; r < directions; ++r) {
    if (r < 2 * dim) {
      std::fill(d.begin(), d.end(), 0.0);
      d[r / 2] = (r % 2 == 0) ? 1.0 : -1.0;
    } else {
      for (double& x : d) x = rng.normal();
    }
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < t; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += d[k] * hull.points[j * dim + k];
      if (s > best_value) {
        best_value = s;
        best = j;
      }
    }
    seed[best] = 1;
  }
  auto subset = [&](const std::vector<std::size_t>& idx, std::size_t skip) {
    HullModel h;
    h.dim = dim;
    for (std::size_t j : idx) {
      if (j == skip) continue;
      const auto p = hull.point(j);
      h.points.insert(h.points.end(), p.begin(), p.end());
      ++h.count;
    }
    return h;
  };
  std::vector<std::size_t> seeds;
  for (std::size_t j = 0; j < t; ++j)
    if (seed[j]) seeds.push_back(j);
  const HullModel core = subset(seeds, t);
  double scale = 0.0;
  for (double p : hull.points) scale = std::max(scale, std::abs(p));
  // A point within `tol` of the kept hull moves it by at most `tol`.
  const double tol = 1e-12 * (1.0 + scale);

  // First pass: everything the seed hull misses survives.
  std::vector<char> outside(t, 0);
  parallel_for(t, threads, [&](std::size_t j) {
    if (!seed[j]) outside[j] = clip_all(hull.point(j), core, ClipNorm::kLinf).residual > tol;
  });
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < t; ++j)
    if (seed[j] || outside[j]) kept.push_back(j);

  // Second pass: drop survivors inside the hull of the points still kept, one
  // at a time, so duplicated vertices cannot remove each other.
  const std::vector<std::size_t> survivors = kept;
  for (std::size_t j : survivors) {
    if (seed[j]) continue;
    if (clip_all(hull.point(j), subset(kept, j), ClipNorm::kLinf).residual <= tol) {
      kept.erase(std::find(kept.begin(), kept.end(), j));
    }
  }
  return kept;
}

std::vector<double> surrogate_from_output(std::span<const double> y, const ProjectionBasis& basis,
                                          const HullModel& hull, ClipNorm norm) {
  require(hull.dim == basis.components, ErrorKind::kDimension,
          "hull dimension differs from the number of principal components");
  const std::vector<double> v = reduce(basis, y);
  return lift(basis, clip(v, hull, norm).projected);
}

std::vector<double> surrogate_predict(const MlpNetwork& model, const ProjectionBasis& basis,
                                      const HullModel& hull, std::span<const double> x,
                                      ClipNorm norm) {
  require(model.output_dim() == basis.dim, ErrorKind::kDimension,
          "basis dimension differs from the model output dimension");
  const std::vector<double> y = model.infer(x);
  return surrogate_from_output(y, basis, hull, norm);
}

std::vector<double> surrogate_errors(std::span<const double> outputs, std::size_t count,
                                     const SurrogateReachSet& sr, unsigned threads) {
  const std::size_t n = sr.basis.dim;
  require(outputs.size() == count * n, ErrorKind::kDimension, "outputs have the wrong length");
  std::vector<double> q(count * n);
  parallel_for(count, threads, [&](std::size_t j) {
    const auto y = outputs.subspan(j * n, n);
    const std::vector<double> g = surrogate_from_output(y, sr.basis, sr.hull, sr.norm);
    for (std::size_t k = 0; k < n; ++k) q[j * n + k] = y[k] - g[k];
  });
  return q;
}

SurrogateReachSet build_surrogate_from_outputs(std::span<const double> train, std::size_t t,
                                               std::span<const double> aux, std::size_t tprime,
                                               std::span<const double> calib, std::size_t m,
                                               std::size_t n, const GuaranteeSpec& guarantee,
                                               const SurrogateOptions& options) {
  require(t >= 1 && tprime >= 1 && m >= 1, ErrorKind::kDomain, "t, t' and m must be positive");
  require(train.size() == t * n && aux.size() == tprime * n && calib.size() == m * n,
          ErrorKind::kDimension, "surrogate stage inputs have the wrong length");
  require(guarantee.calib_size_m == m, ErrorKind::kDimension,
          "guarantee calibration size differs from m");
  const unsigned threads = resolve_threads(options.threads);

  SurrogateReachSet sr;
  sr.norm = options.norm;
  sr.guarantee = guarantee;

  std::size_t N = options.components;
  if (N == 0) N = std::max<std::size_t>(1, std::min({t > 1 ? t - 1 : 1, std::size_t{64}, n}));
  require(N <= std::min(n, t), ErrorKind::kDomain,
          "number of components must not exceed min(n, t)");
  PcaOptions pca = options.pca;
  pca.threads = threads;
  sr.basis = deflate(train, t, n, N, pca);

  sr.hull.count = t;
  sr.hull.dim = N;
  sr.hull.points.resize(t * N);
  sr.lift_lb.assign(n, std::numeric_limits<double>::infinity());
  sr.lift_ub.assign(n, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < t; ++j) {
    const std::vector<double> v = reduce(sr.basis, train.subspan(j * n, n));
    std::copy(v.begin(), v.end(), sr.hull.points.begin() + static_cast<std::ptrdiff_t>(j * N));
    const std::vector<double> y = lift(sr.basis, v);
    for (std::size_t k = 0; k < n; ++k) {
      sr.lift_lb[k] = std::min(sr.lift_lb[k], y[k]);
      sr.lift_ub[k] = std::max(sr.lift_ub[k], y[k]);
    }
  }

  sr.hull.vertices = vertex_candidates(sr.hull, threads);

  const std::vector<double> q_aux = surrogate_errors(aux, tprime, sr, threads);
  sr.error_scale = center_and_scales(q_aux, tprime, n);

  const std::vector<double> q_cal = surrogate_errors(calib, m, sr, threads);
  std::vector<double> scores(m);
  for (std::size_t j = 0; j < m; ++j) {
    scores[j] = nonconformity(std::span<const double>(q_cal).subspan(j * n, n), sr.error_scale);
  }
  const CalibrationSet cal = calibration_from_scores(std::move(scores), "surrogate-error");
  sr.threshold = cal.at_rank(guarantee.rank_ell);
  sr.sigma.resize(n);
  for (std::size_t k = 0; k < n; ++k) sr.sigma[k] = sr.error_scale.tau[k] * sr.threshold;
  return sr;
}

bool IntervalBounds::contains(std::span<const double> y) const {
  if (y.size() != lo.size()) return false;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!(y[k] >= lo[k] && y[k] <= hi[k])) return false;
  }
  return true;
}

double IntervalBounds::total_width() const {
  double w = 0.0;
  for (std::size_t k = 0; k < lo.size(); ++k) w += hi[k] - lo[k];
  return w;
}

IntervalBounds project_intervals(const SurrogateReachSet& sr) {
  const std::size_t n = sr.sigma.size();
  IntervalBounds b;
  b.lo.resize(n);
  b.hi.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double c = sr.error_scale.center[k];
    b.lo[k] = c + sr.lift_lb[k] - sr.sigma[k];
    b.hi[k] = c + sr.lift_ub[k] + sr.sigma[k];
  }
  return b;
}

IntervalBounds project_intervals(const HyperRectReachSet& rs) {
  const std::size_t n = rs.sigma.size();
  IntervalBounds b;
  b.lo.resize(n);
  b.hi.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    b.lo[k] = rs.center[k] - rs.sigma[k];
    b.hi[k] = rs.center[k] + rs.sigma[k];
  }
  return b;
}

void save_hull(const HullModel& hull, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write hull '" + path + "'");
  const bool indexed = !hull.vertices.empty();
  out << "HULL " << (indexed ? "v2 " : "v1 ") << hull.count << ' ' << hull.dim;
  if (indexed) out << ' ' << hull.vertices.size();
  out << '\n';
  write_f64_le(out, hull.points);
  if (indexed) {
    std::vector<double> idx(hull.vertices.begin(), hull.vertices.end());
    write_f64_le(out, idx);
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for hull '" + path + "'");
}

HullModel load_hull(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open hull '" + path + "'");
  std::string line, magic, version, extra;
  require(read_header_line(in, line), ErrorKind::kFormat, "malformed header in hull '" + path + "'");
  std::istringstream header(line);
  HullModel hull;
  std::size_t vertex_count = 0;
  header >> magic >> version >> hull.count >> hull.dim;
  const bool indexed = version == "v2";
  if (indexed) header >> vertex_count;
  require(header && magic == "HULL" && (version == "v1" || indexed) && hull.count > 0 &&
              hull.dim > 0 && (!indexed || (vertex_count >= 1 && vertex_count <= hull.count)) &&
              !(header >> extra),
          ErrorKind::kFormat, "malformed header in hull '" + path + "'");
  hull.points.resize(hull.count * hull.dim);
  require(read_f64_le(in, hull.points), ErrorKind::kFormat, "truncated payload in hull '" + path + "'");
  if (indexed) {
    std::vector<double> idx(vertex_count);
    require(read_f64_le(in, idx), ErrorKind::kFormat, "truncated vertex list in hull '" + path + "'");
    for (double x : idx) {
      const auto j = static_cast<std::size_t>(x);
      require(x >= 0.0 && static_cast<double>(j) == x && j < hull.count &&
                  (hull.vertices.empty() || j > hull.vertices.back()),
              ErrorKind::kFormat, "bad vertex list in hull '" + path + "'");
      hull.vertices.push_back(j);
    }
  }
  char probe = 0;
  require(!in.get(probe), ErrorKind::kFormat, "unexpected trailing data in hull '" + path + "'");
  return hull;
}

}  // namespace confreach
