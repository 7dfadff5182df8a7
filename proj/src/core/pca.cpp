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

#include "core/pca.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/binary_io.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"

namespace confreach {
namespace {

constexpr std::size_t kReduceBlock = 64;
constexpr std::size_t kRefreshEvery = 32;
// Rayleigh values below this fraction of the initial trace are roundoff left
// by earlier deflations; the remaining operator is treated as zero.
constexpr double kNullRatio = 1e-24;

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

void scale(std::span<double> x, double s) {
  for (double& v : x) v *= s;
}

// Matrix-free second-moment product out = (1/t) sum_j z_j (z_j . x). Rows are
// summed in fixed blocks whose partials are added in block order, so the
// result does not depend on the worker count.
class MomentOperator {
 public:
  MomentOperator(std::vector<double>& z, std::size_t t, std::size_t n, unsigned threads)
      : z_(z), t_(t), n_(n), threads_(threads),
        blocks_((t + kReduceBlock - 1) / kReduceBlock), partial_(blocks_ * n) {}

  void apply(std::span<const double> x, std::span<double> out) {
    parallel_for(blocks_, threads_, [&](std::size_t b) {
      double* acc = &partial_[b * n_];
      std::fill(acc, acc + n_, 0.0);
      const std::size_t end = std::min(t_, (b + 1) * kReduceBlock);
      for (std::size_t j = b * kReduceBlock; j < end; ++j) {
        const double* zj = &z_[j * n_];
        double w = 0.0;
        for (std::size_t k = 0; k < n_; ++k) w += zj[k] * x[k];
        if (w == 0.0) continue;
        for (std::size_t k = 0; k < n_; ++k) acc[k] += w * zj[k];
      }
    });
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t b = 0; b < blocks_; ++b) axpy(1.0, std::span<const double>(&partial_[b * n_], n_), out);
    scale(out, 1.0 / static_cast<double>(t_));
  }

  void deflate(std::span<const double> a) {
    for (std::size_t j = 0; j < t_; ++j) {
      std::span<double> zj(&z_[j * n_], n_);
      axpy(-dot(a, zj), a, zj);
    }
  }

 private:
  std::vector<double>& z_;
  std::size_t t_, n_;
  unsigned threads_;
  std::size_t blocks_;
  std::vector<double> partial_;
};

// Removes the components along the first `count` columns (two passes of
// modified Gram-Schmidt) and returns the remaining norm.
double orthogonalize(std::span<double> v, const std::vector<double>& cols, std::size_t n,
                     std::size_t count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < count; ++c) {
      std::span<const double> col(&cols[c * n], n);
      axpy(-dot(col, v), col, v);
    }
  }
  return norm(v);
}

// Largest eigenpair of a symmetric k x k matrix (k <= 3) by cyclic Jacobi.
std::array<double, 3> top_eigenvector(std::array<std::array<double, 3>, 3> m, std::size_t k) {
  std::array<std::array<double, 3>, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) off += m[p][q] * m[p][q];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        if (m[p][q] == 0.0) continue;
        const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        const double tt = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tt * tt + 1.0);
        const double s = tt * c;
        for (std::size_t r = 0; r < k; ++r) {
          const double mrp = m[r][p], mrq = m[r][q];
          m[r][p] = c * mrp - s * mrq;
          m[r][q] = s * mrp + c * mrq;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double mpr = m[p][r], mqr = m[q][r];
          m[p][r] = c * mpr - s * mqr;
          m[q][r] = s * mpr + c * mqr;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double vrp = v[r][p], vrq = v[r][q];
          v[r][p] = c * vrp - s * vrq;
          v[r][q] = s * vrp + c * vrq;
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (m[i][i] > m[best][best]) best = i;
  std::array<double, 3> out{};
  for (std::size_t r = 0; r < k; ++r) out[r] = v[r][best];
  if (out[0] < 0.0)
    for (double& x : out) x = -x;
  return out;
}

}  // namespace

bool ProjectionBasis::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

ProjectionBasis deflate(std::span<const double> vectors, std::size_t t, std::size_t n,
                        std::size_t num_components, const PcaOptions& opt) {
  require(t >= 1 && n >= 1, ErrorKind::kDimension, "deflation needs at least one vector");
  require(vectors.size() == t * n, ErrorKind::kDimension, "training vectors have the wrong length");
  require(num_components >= 1 && num_components <= std::min(n, t), ErrorKind::kDomain,
          "number of components must lie in [1, min(n, t)]");
  for (double v : vectors) require(std::isfinite(v), ErrorKind::kNumerical, "non-finite training vector");

  std::vector<double> z(vectors.begin(), vectors.end());
  MomentOperator op(z, t, n, resolve_threads(opt.threads));

  ProjectionBasis basis;
  basis.dim = n;
  basis.components = num_components;
  basis.a.assign(n * num_components, 0.0);

  double trace = 0.0;
  for (double v : z) trace += v * v;
  trace /= static_cast<double>(t);
  const double null_level = kNullRatio * trace;

  std::vector<double> a(n), u(n), g(n), cg(n), p(n), cp(n), next(n), unext(n);
  for (std::size_t k = 0; k < num_components; ++k) {
    // Start from the normalized sum of the stage's vectors.
    std::fill(a.begin(), a.end(), 0.0);
    for (std::size_t j = 0; j < t; ++j) axpy(1.0, std::span<const double>(&z[j * n], n), a);
    double an = orthogonalize(a, basis.a, n, k);
    if (!(an >= 1e-14)) {
      // Fall back to the coordinate axis least covered by earlier components.
      std::size_t best = 0;
      double best_norm = -1.0;
      for (std::size_t e = 0; e < n; ++e) {
        std::fill(a.begin(), a.end(), 0.0);
        a[e] = 1.0;
        const double r = orthogonalize(a, basis.a, n, k);
        if (r > best_norm) {
          best_norm = r;
          best = e;
        }
        if (r > 0.5) break;
      }
      std::fill(a.begin(), a.end(), 0.0);
      a[best] = 1.0;
      an = orthogonalize(a, basis.a, n, k);
    }
    scale(a, 1.0 / an);

    op.apply(a, u);
    double J = dot(a, u);
    double prev_J = -1.0;
    bool have_p = false;
    bool converged = false;
    double residual = 0.0;
    std::size_t it = 0;
    for (;; ++it) {
      // Tangent gradient g = u - J a (half the projected gradient of J).
      for (std::size_t q = 0; q < n; ++q) g[q] = u[q] - J * a[q];
      orthogonalize(g, basis.a, n, k);
      double gn = norm(g);
      residual = gn / std::max(std::abs(J), 1e-300);
      const bool small_gain = prev_J >= 0.0 && (J - prev_J) <= opt.tol * std::abs(J);
      if (gn == 0.0 || J <= null_level || (small_gain && residual <= opt.residual_tol) ||
          it >= opt.max_iters) {
        // Confirm with an exact product before accepting.
        op.apply(a, u);
        J = dot(a, u);
        for (std::size_t q = 0; q < n; ++q) g[q] = u[q] - J * a[q];
        gn = norm(g);
        residual = J > 0.0 ? gn / J : 0.0;
        const bool zero_operator = J <= null_level || gn == 0.0;
        if (zero_operator || residual <= opt.residual_tol) {
          converged = true;
          break;
        }
        if (it >= opt.max_iters) break;
      }
      prev_J = J;

      if (opt.step_size > 0.0) {
        // Plain projected gradient ascent with a fixed step.
        const double un = norm(u);
        for (std::size_t q = 0; q < n; ++q) next[q] = a[q] + opt.step_size * u[q] / un;
        const double nn = orthogonalize(next, basis.a, n, k);
        scale(next, 1.0 / nn);
        a.swap(next);
        op.apply(a, u);
        J = dot(a, u);
        continue;
      }

      // Locally optimal step: Rayleigh-Ritz over span{a, g, p}, where p is
      // the previous step. Without p this is the exact line search along
      // the gradient great circle.
      scale(g, 1.0 / gn);
      axpy(-dot(a, g), a, g);
      const double gn2 = norm(g);
      if (!(gn2 > 0.0)) {
        converged = true;
        break;
      }
      scale(g, 1.0 / gn2);
      op.apply(g, cg);
      std::size_t dimk = 2;
      if (have_p) {
        axpy(-dot(a, p), a, p);
        axpy(-dot(g, p), g, p);
        orthogonalize(p, basis.a, n, k);
        const double pn = norm(p);
        if (pn > 1e-12) {
          scale(p, 1.0 / pn);
          op.apply(p, cp);
          dimk = 3;
        }
      }
      std::array<std::array<double, 3>, 3> m{};
      m[0][0] = J;
      m[0][1] = m[1][0] = dot(g, u);
      m[1][1] = dot(g, cg);
      if (dimk == 3) {
        m[0][2] = m[2][0] = dot(p, u);
        m[1][2] = m[2][1] = dot(p, cg);
        m[2][2] = dot(p, cp);
      }
      const auto c = top_eigenvector(m, dimk);
      for (std::size_t q = 0; q < n; ++q) {
        double step = c[1] * g[q];
        double cstep = c[1] * cg[q];
        if (dimk == 3) {
          step += c[2] * p[q];
          cstep += c[2] * cp[q];
        }
        next[q] = c[0] * a[q] + step;
        unext[q] = c[0] * u[q] + cstep;
        p[q] = step;
      }
      have_p = true;
      const double nn = orthogonalize(next, basis.a, n, k);
      if (!(nn > 0.0)) break;
      scale(next, 1.0 / nn);
      scale(unext, 1.0 / nn);
      a.swap(next);
      if ((it + 1) % kRefreshEvery == 0) {
        op.apply(a, u);
      } else {
        u.swap(unext);
      }
      J = dot(a, u);
    }

    // Sign: largest-magnitude entry positive.
    std::size_t big = 0;
    for (std::size_t q = 1; q < n; ++q)
      if (std::abs(a[q]) > std::abs(a[big])) big = q;
    if (a[big] < 0.0) scale(a, -1.0);

    std::copy(a.begin(), a.end(), basis.a.begin() + static_cast<std::ptrdiff_t>(k * n));
    basis.rayleigh.push_back(J);
    basis.iterations.push_back(it);
    basis.converged.push_back(converged);
    basis.residual.push_back(residual);
    op.deflate(a);
  }
  return basis;
}

std::vector<double> reduce(const ProjectionBasis& basis, std::span<const double> y) {
  require(y.size() == basis.dim, ErrorKind::kDimension, "reduce: vector length mismatch");
  std::vector<double> v(basis.components);
  for (std::size_t k = 0; k < basis.components; ++k) v[k] = dot(basis.column(k), y);
  return v;
}

std::vector<double> lift(const ProjectionBasis& basis, std::span<const double> v) {
  require(v.size() == basis.components, ErrorKind::kDimension, "lift: vector length mismatch");
  std::vector<double> y(basis.dim, 0.0);
  for (std::size_t k = 0; k < basis.components; ++k) axpy(v[k], basis.column(k), y);
  return y;
}

void save_basis(const ProjectionBasis& basis, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write basis '" + path + "'");
  out << "PCA v1 " << basis.dim << ' ' << basis.components << '\n';
  write_f64_le(out, basis.a);
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for basis '" + path + "'");
}

ProjectionBasis load_basis(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open basis '" + path + "'");
  std::string line;
  require(read_header_line(in, line), ErrorKind::kFormat, "malformed header in basis '" + path + "'");
  std::istringstream header(line);
  std::string magic, version, extra;
  ProjectionBasis basis;
  header >> magic >> version >> basis.dim >> basis.components;
  require(header && magic == "PCA" && version == "v1" && basis.dim > 0 && basis.components > 0 &&
              basis.components <= basis.dim && !(header >> extra),
          ErrorKind::kFormat, "malformed header in basis '" + path + "'");
  basis.a.resize(basis.dim * basis.components);
  require(read_f64_le(in, basis.a), ErrorKind::kFormat, "truncated payload in basis '" + path + "'");
  char probe = 0;
  require(!in.get(probe), ErrorKind::kFormat, "unexpected trailing data in basis '" + path + "'");
  basis.converged.assign(basis.components, true);
  return basis;
}

}  // namespace confreach
