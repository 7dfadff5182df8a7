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

#include "core/lp.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace confreach {
namespace {

// How an original variable maps onto non-negative tableau columns:
// x = offset + sign * col  (one column), or x = col_pos - col_neg (free).
struct VarMap {
  double offset = 0.0;
  double sign = 1.0;
  std::size_t col = 0;
  bool free = false;
  std::size_t col_neg = 0;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t e) {
    const std::size_t w = cols_ + 1;
    double* prow = &data_[r * w];
    const double inv = 1.0 / prow[e];
    for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
    prow[e] = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double* row = &data_[i * w];
      const double f = row[e];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) row[c] -= f * prow[c];
      row[e] = 0.0;
    }
    basis_[r] = e;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class Outcome { kOptimal, kUnbounded };

// Primal simplex on the current objective row. `allowed` limits entering
// columns (artificials are barred in phase two).
Outcome run_simplex(Tableau& tab, std::size_t allowed_cols, const LpOptions& opt,
                    std::size_t& iterations, bool& bland) {
  std::size_t degenerate_run = 0;
  for (;;) {
    require(iterations < opt.max_iterations, ErrorKind::kNumerical,
            "simplex iteration limit reached");
    std::size_t enter = allowed_cols;
    double best = -opt.optimality_tol;
    for (std::size_t c = 0; c < allowed_cols; ++c) {
      const double d = tab.cost(c);
      if (bland) {
        if (d < -opt.optimality_tol) {
          enter = c;
          break;
        }
      } else if (d < best) {
        best = d;
        enter = c;
      }
    }
    if (enter == allowed_cols) return Outcome::kOptimal;

    std::size_t leave = tab.rows();
    double best_ratio = 0.0;
    for (std::size_t r = 0; r < tab.rows(); ++r) {
      const double a = tab.at(r, enter);
      if (a <= opt.pivot_tol) continue;
      const double ratio = std::max(tab.rhs(r), 0.0) / a;
      if (leave == tab.rows()) {
        leave = r;
        best_ratio = ratio;
        continue;
      }
      const double slack = 1e-14 * (1.0 + best_ratio);
      if (ratio < best_ratio - slack ||
          (ratio <= best_ratio + slack && tab.basis()[r] < tab.basis()[leave])) {
        leave = r;
        best_ratio = std::min(ratio, best_ratio);
      }
    }
    if (leave == tab.rows()) return Outcome::kUnbounded;

    degenerate_run = best_ratio <= 1e-14 ? degenerate_run + 1 : 0;
    if (!bland && degenerate_run >= opt.degenerate_switch) bland = true;
    tab.pivot(leave, enter);
    ++iterations;
  }
}

}  // namespace

LpSolution lp_solve(const LinearProgram& lp, const LpOptions& opt) {
  const std::size_t n = lp.num_vars;
  require(n >= 1, ErrorKind::kDimension, "linear program has no variables");
  require(lp.objective.size() == n, ErrorKind::kDimension, "objective length mismatch");
  require(lp.a_eq.size() == lp.b_eq.size() * n, ErrorKind::kDimension,
          "equality matrix shape mismatch");
  require(lp.a_ub.size() == lp.b_ub.size() * n, ErrorKind::kDimension,
          "inequality matrix shape mismatch");
  require(lp.lower.empty() || lp.lower.size() == n, ErrorKind::kDimension, "lower bound length");
  require(lp.upper.empty() || lp.upper.size() == n, ErrorKind::kDimension, "upper bound length");

  // Map variables onto non-negative columns; finite upper bounds become rows.
  std::vector<VarMap> map(n);
  std::size_t structural = 0;
  std::vector<std::pair<std::size_t, double>> bound_rows;  // column <= value
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower.empty() ? 0.0 : lp.lower[j];
    const double hi = lp.upper.empty() ? kLpInfinity : lp.upper[j];
    require(!std::isnan(lo) && !std::isnan(hi) && lo <= hi && lo < kLpInfinity &&
                hi > -kLpInfinity,
            ErrorKind::kInfeasible, "variable " + std::to_string(j) + " has an empty range");
    VarMap& m = map[j];
    if (std::isfinite(lo)) {
      m.offset = lo;
      m.col = structural++;
      if (std::isfinite(hi)) bound_rows.emplace_back(m.col, hi - lo);
    } else if (std::isfinite(hi)) {
      m.offset = hi;
      m.sign = -1.0;
      m.col = structural++;
    } else {
      m.free = true;
      m.col = structural++;
      m.col_neg = structural++;
    }
  }

  struct Row {
    std::vector<double> coef;  // over structural columns
    double rhs = 0.0;
    bool equality = false;
  };
  std::vector<Row> rows;
  auto add_row = [&](const double* a, double b, bool eq) {
    Row row;
    row.coef.assign(structural, 0.0);
    row.rhs = b;
    row.equality = eq;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a[j];
      if (v == 0.0) continue;
      const VarMap& m = map[j];
      if (m.free) {
        row.coef[m.col] += v;
        row.coef[m.col_neg] -= v;
      } else {
        row.coef[m.col] += v * m.sign;
        row.rhs -= v * m.offset;
      }
    }
    rows.push_back(std::move(row));
  };
  for (std::size_t i = 0; i < lp.b_eq.size(); ++i) add_row(&lp.a_eq[i * n], lp.b_eq[i], true);
  for (std::size_t i = 0; i < lp.b_ub.size(); ++i) add_row(&lp.a_ub[i * n], lp.b_ub[i], false);
  for (const auto& [col, value] : bound_rows) {
    Row row;
    row.coef.assign(structural, 0.0);
    row.coef[col] = 1.0;
    row.rhs = value;
    rows.push_back(std::move(row));
  }

  const std::size_t m_rows = rows.size();
  std::size_t slacks = 0;
  for (const Row& r : rows) slacks += r.equality ? 0 : 1;
  // Rows that cannot start with their slack basic need an artificial.
  std::vector<bool> needs_art(m_rows, false);
  std::size_t artificials = 0;
  for (std::size_t i = 0; i < m_rows; ++i) {
    needs_art[i] = rows[i].equality || rows[i].rhs < 0.0;
    artificials += needs_art[i] ? 1 : 0;
  }
  const std::size_t art_begin = structural + slacks;
  const std::size_t total_cols = art_begin + artificials;

  LpSolution sol;
  std::vector<double> xcol(structural, 0.0);
  if (m_rows > 0) {
    Tableau tab(m_rows, total_cols);
    std::size_t slack_col = structural;
    std::size_t art_col = art_begin;
    for (std::size_t i = 0; i < m_rows; ++i) {
      const Row& r = rows[i];
      const double s = r.rhs < 0.0 ? -1.0 : 1.0;
      for (std::size_t c = 0; c < structural; ++c) tab.at(i, c) = s * r.coef[c];
      tab.rhs(i) = s * r.rhs;
      std::size_t own_slack = total_cols;
      if (!r.equality) {
        own_slack = slack_col++;
        tab.at(i, own_slack) = s;
      }
      if (needs_art[i]) {
        tab.at(i, art_col) = 1.0;
        tab.basis()[i] = art_col++;
      } else {
        tab.basis()[i] = own_slack;
      }
    }

    bool bland = false;
    if (artificials > 0) {
      double max_rhs = 1.0;
      for (std::size_t i = 0; i < m_rows; ++i) {
        if (!needs_art[i]) continue;
        max_rhs = std::max(max_rhs, std::abs(tab.rhs(i)));
        for (std::size_t c = 0; c <= total_cols; ++c) {
          if (c >= art_begin && c < total_cols) continue;
          tab.at(m_rows, c) -= tab.at(i, c);
        }
      }
      run_simplex(tab, art_begin, opt, sol.iterations, bland);
      const double infeasibility = -tab.rhs(m_rows);
      require(infeasibility <= opt.feasibility_tol * max_rhs, ErrorKind::kInfeasible,
              "linear program is infeasible (phase one residual " +
                  std::to_string(infeasibility) + ")");
      // Drive artificials out of the basis where a real column can replace them.
      for (std::size_t i = 0; i < m_rows; ++i) {
        if (tab.basis()[i] < art_begin) continue;
        std::size_t best = art_begin;
        double best_abs = opt.pivot_tol;
        for (std::size_t c = 0; c < art_begin; ++c) {
          const double a = std::abs(tab.at(i, c));
          if (a > best_abs) {
            best_abs = a;
            best = c;
          }
        }
        if (best < art_begin) tab.pivot(i, best);
      }
    }

    // Phase two objective row over structural columns.
    std::vector<double> cost(total_cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const VarMap& m = map[j];
      if (m.free) {
        cost[m.col] += lp.objective[j];
        cost[m.col_neg] -= lp.objective[j];
      } else {
        cost[m.col] += lp.objective[j] * m.sign;
      }
    }
    for (std::size_t c = 0; c <= total_cols; ++c) tab.cost(c) = c < total_cols ? cost[c] : 0.0;
    for (std::size_t i = 0; i < m_rows; ++i) {
      const double cb = cost[tab.basis()[i]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= total_cols; ++c) tab.at(m_rows, c) -= cb * tab.at(i, c);
    }
    if (run_simplex(tab, art_begin, opt, sol.iterations, bland) == Outcome::kUnbounded) {
      fail(ErrorKind::kUnbounded, "linear program is unbounded");
    }
    sol.used_bland = bland;
    for (std::size_t i = 0; i < m_rows; ++i) {
      if (tab.basis()[i] < structural) xcol[tab.basis()[i]] = std::max(tab.rhs(i), 0.0);
    }
  } else {
    // No constraints: every column sits at its bound unless the cost is negative.
    for (std::size_t j = 0; j < n; ++j) {
      const VarMap& m = map[j];
      const double c = lp.objective[j];
      require(!m.free || c == 0.0, ErrorKind::kUnbounded, "linear program is unbounded");
      require(m.free || c * m.sign >= 0.0, ErrorKind::kUnbounded, "linear program is unbounded");
    }
  }

  sol.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const VarMap& m = map[j];
    sol.x[j] = m.free ? xcol[m.col] - xcol[m.col_neg] : m.offset + m.sign * xcol[m.col];
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += lp.objective[j] * sol.x[j];

  double viol = 0.0;
  for (std::size_t i = 0; i < lp.b_eq.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += lp.a_eq[i * n + j] * sol.x[j];
    viol = std::max(viol, std::abs(s - lp.b_eq[i]));
  }
  for (std::size_t i = 0; i < lp.b_ub.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += lp.a_ub[i * n + j] * sol.x[j];
    viol = std::max(viol, s - lp.b_ub[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!lp.lower.empty()) viol = std::max(viol, lp.lower[j] - sol.x[j]);
    else viol = std::max(viol, -sol.x[j]);
    if (!lp.upper.empty()) viol = std::max(viol, sol.x[j] - lp.upper[j]);
  }
  sol.max_violation = viol;
  return sol;
}

}  // namespace confreach
