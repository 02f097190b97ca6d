#pragma once

// Dense linear-program maximization with post-hoc certification.
//
// The solver is a two-phase tableau simplex with Bland's rule. Its output is
// never trusted directly: the optimal point is shrunk toward the lower bounds,
// re-verified against every row, and only then is the objective evaluated.
// A solver bug can therefore make the reported value worse, never unsound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigmaproof/geometry.hpp"

namespace sigmaproof {

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Packing rows are the constraints the certified point must satisfy (checked
// with the eps margin). Selector rows only pick out one branch of a piecewise
// objective; callers that use them re-evaluate their objective directly at
// the certified point, so they are checked with the slack the shrink step can
// introduce.
enum class RowRole { Packing, Selector };

struct VarBounds {
  double lo = 0.0;
  double hi = 1.0;
};

// maximize objective . x + objective_offset
// subject to row_i . x <= bound_i, lo_j <= x_j <= hi_j.
class LpProblem {
 public:
  LpProblem() = default;
  explicit LpProblem(std::size_t num_vars, VarBounds bounds = {}) { reset(num_vars, bounds); }

  // Reuses the existing storage.
  void reset(std::size_t num_vars, VarBounds bounds = {}) {
    n_ = num_vars;
    bounds_.assign(num_vars, bounds);
    objective_.assign(num_vars, 0.0);
    offset_ = 0.0;
    rows_.clear();
    rhs_.clear();
    roles_.clear();
  }

  std::size_t num_vars() const { return n_; }
  std::size_t num_constraints() const { return rhs_.size(); }

  void set_bounds(std::size_t j, VarBounds b) { bounds_.at(j) = b; }
  const std::vector<VarBounds>& var_bounds() const { return bounds_; }

  void set_objective(std::size_t j, double c) { objective_.at(j) = c; }
  void set_objective_offset(double c) { offset_ = c; }
  const std::vector<double>& objective() const { return objective_; }
  double objective_offset() const { return offset_; }

  void add_constraint(std::span<const double> coeffs, double bound,
                      RowRole role = RowRole::Packing) {
    if (coeffs.size() != n_) throw LpError("constraint width does not match variable count");
    rows_.insert(rows_.end(), coeffs.begin(), coeffs.end());
    rhs_.push_back(bound);
    roles_.push_back(role);
  }

  // Appends a zero row and returns a pointer to its coefficients.
  double* add_row(double bound, RowRole role = RowRole::Packing) {
    rows_.resize(rows_.size() + n_, 0.0);
    rhs_.push_back(bound);
    roles_.push_back(role);
    return rows_.data() + rows_.size() - n_;
  }

  std::span<const double> row(std::size_t i) const { return {rows_.data() + i * n_, n_}; }
  double bound(std::size_t i) const { return rhs_[i]; }
  RowRole role(std::size_t i) const { return roles_[i]; }

  double evaluate(std::span<const double> x) const {
    double v = offset_;
    for (std::size_t j = 0; j < n_; ++j) v += objective_[j] * x[j];
    return v;
  }

  // lo <= hi per variable, lo finite, every coefficient finite.
  void validate() const {
    for (const auto& b : bounds_)
      if (!std::isfinite(b.lo) || std::isnan(b.hi) || b.lo > b.hi)
        throw LpError("invalid variable bounds");
    for (double a : rows_)
      if (!std::isfinite(a)) throw LpError("non-finite constraint coefficient");
    for (double b : rhs_)
      if (!std::isfinite(b)) throw LpError("non-finite constraint bound");
    for (double c : objective_)
      if (!std::isfinite(c)) throw LpError("non-finite objective coefficient");
    if (!std::isfinite(offset_)) throw LpError("non-finite objective offset");
  }

 private:
  std::size_t n_ = 0;
  std::vector<VarBounds> bounds_;
  std::vector<double> objective_;
  double offset_ = 0.0;
  std::vector<double> rows_;
  std::vector<double> rhs_;
  std::vector<RowRole> roles_;
};

enum class LpStatus { Optimal, Infeasible };

struct CertifiedLpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> point;      // shrunk and verified; empty when infeasible
  double certified_value = -std::numeric_limits<double>::infinity();
  // Objective at the unshrunk solver vertex. Advisory: not re-verified.
  double solver_value = -std::numeric_limits<double>::infinity();
  std::size_t pivots = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct LpOptions {
  double eps = kEps;
  double shrink = 2 * kEps;
  double pivot_tol = 1e-11;
  double feasibility_tol = 1e-9;
  std::size_t max_pivots = 0;  // 0: derived from the problem size
};

namespace detail {

inline void shrink_point(const LpProblem& problem, std::span<const double> point, double shrink,
                         std::vector<double>& out) {
  const auto& b = problem.var_bounds();
  out.resize(point.size());
  for (std::size_t j = 0; j < point.size(); ++j)
    out[j] = std::clamp(std::max(b[j].lo, point[j] - shrink), b[j].lo, b[j].hi);
}

inline bool rows_hold(const LpProblem& problem, std::span<const double> r, double shrink,
                      double eps) {
  const auto& bounds = problem.var_bounds();
  for (std::size_t j = 0; j < r.size(); ++j)
    if (!(bounds[j].lo <= r[j] && r[j] <= bounds[j].hi)) return false;
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    const auto a = problem.row(i);
    double lhs = 0.0;
    double negative_mass = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      lhs += a[j] * r[j];
      if (a[j] < 0) negative_mass -= a[j];
    }
    const double b = problem.bound(i);
    if (problem.role(i) == RowRole::Packing) {
      const double limit = b >= 0 ? std::max(0.0, b - eps) : b;
      if (!(lhs <= limit)) return false;
    } else if (!(lhs <= b + shrink * negative_mass + eps)) {
      return false;
    }
  }
  return true;
}

// Reusable tableau storage.
struct SimplexWorkspace {
  std::vector<double> tab;
  std::vector<std::size_t> basis;
  std::vector<double> solution;
  std::vector<double> shrunk;
};

class Tableau {
 public:
  Tableau(SimplexWorkspace& ws, std::size_t rows, std::size_t cols)
      : ws_(ws), rows_(rows), cols_(cols) {
    ws_.tab.assign((rows + 1) * cols, 0.0);
    ws_.basis.assign(rows, 0);
  }

  double& at(std::size_t r, std::size_t c) { return ws_.tab[r * cols_ + c]; }
  double* row(std::size_t r) { return ws_.tab.data() + r * cols_; }
  std::size_t& basis(std::size_t r) { return ws_.basis[r]; }
  std::size_t rows() const { return rows_; }  // constraint rows, objective is row 0
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = row(pr);
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* cur = row(r);
      const double f = cur[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols_; ++c) cur[c] -= f * prow[c];
      cur[pc] = 0.0;
    }
    basis(pr - 1) = pc;
  }

  // Runs Bland-rule iterations on row 0 over columns [0, allowed). Returns false
  // when the objective is unbounded.
  bool optimize(std::size_t allowed, double tol, std::size_t& pivots, std::size_t max_pivots) {
    const std::size_t rhs = cols_ - 1;
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t c = 0; c < allowed; ++c)
        if (at(0, c) < -tol) {
          enter = c;
          break;
        }
      if (enter == allowed) return true;
      std::size_t leave = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 1; r <= rows_; ++r) {
        const double a = at(r, enter);
        if (a <= tol) continue;
        const double ratio = at(r, rhs) / a;
        if (leave == 0 || ratio < best - 1e-12) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + 1e-12 && basis(r - 1) < basis(leave - 1)) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave == 0) return false;
      if (++pivots > max_pivots) throw LpError("simplex cycling guard exceeded");
      pivot(leave, enter);
    }
  }

 private:
  SimplexWorkspace& ws_;
  std::size_t rows_;
  std::size_t cols_;
};

}  // namespace detail

// True iff the point, after each coordinate is moved down by `shrink` (and
// clipped to its bounds), satisfies every bound and row. Packing rows with a
// nonnegative bound are checked against max(0, bound - eps).
inline bool verify_feasible(const LpProblem& problem, std::span<const double> point,
                            double shrink = 2 * kEps, double eps = kEps) {
  if (point.size() != problem.num_vars()) return false;
  std::vector<double> r;
  detail::shrink_point(problem, point, shrink, r);
  return detail::rows_hold(problem, r, shrink, eps);
}

inline CertifiedLpResult solve_max(const LpProblem& problem, detail::SimplexWorkspace& ws,
                                   const LpOptions& opt = {}) {
  problem.validate();
  const std::size_t n = problem.num_vars();
  const auto& vb = problem.var_bounds();

  std::size_t upper_rows = 0;
  for (const auto& b : vb)
    if (std::isfinite(b.hi)) ++upper_rows;
  const std::size_t m = problem.num_constraints() + upper_rows;

  // Shifted right-hand sides decide which rows need an artificial variable.
  std::vector<double> rhs(m);
  std::size_t artificials = 0;
  {
    std::size_t r = 0;
    for (std::size_t i = 0; i < problem.num_constraints(); ++i, ++r) {
      const auto a = problem.row(i);
      double shift = 0.0;
      for (std::size_t j = 0; j < n; ++j) shift += a[j] * vb[j].lo;
      rhs[r] = problem.bound(i) - shift;
    }
    for (std::size_t j = 0; j < n; ++j)
      if (std::isfinite(vb[j].hi)) rhs[r++] = vb[j].hi - vb[j].lo;
    for (double b : rhs)
      if (b < 0) ++artificials;
  }

  const std::size_t slack0 = n;
  const std::size_t art0 = n + m;
  const std::size_t cols = n + m + artificials + 1;
  const std::size_t rhs_col = cols - 1;
  detail::Tableau t(ws, m, cols);

  {
    std::size_t r = 0;
    std::size_t art = art0;
    auto fill = [&](const double* coeffs, std::size_t unit) {
      double* row = t.row(r + 1);
      const double sign = rhs[r] < 0 ? -1.0 : 1.0;
      if (coeffs)
        for (std::size_t j = 0; j < n; ++j) row[j] = sign * coeffs[j];
      else
        row[unit] = sign;
      row[slack0 + r] = sign;
      row[rhs_col] = sign * rhs[r];
      if (sign < 0) {
        row[art] = 1.0;
        t.basis(r) = art++;
      } else {
        t.basis(r) = slack0 + r;
      }
      ++r;
    };
    for (std::size_t i = 0; i < problem.num_constraints(); ++i) fill(problem.row(i).data(), 0);
    for (std::size_t j = 0; j < n; ++j)
      if (std::isfinite(vb[j].hi)) fill(nullptr, j);
  }

  const std::size_t max_pivots = opt.max_pivots ? opt.max_pivots : 50 * (m + cols) + 100;
  CertifiedLpResult result;

  if (artificials > 0) {
    double* obj = t.row(0);
    std::fill(obj, obj + cols, 0.0);
    for (std::size_t c = art0; c < art0 + artificials; ++c) obj[c] = 1.0;
    for (std::size_t r = 0; r < m; ++r)
      if (t.basis(r) >= art0) {
        const double* row = t.row(r + 1);
        for (std::size_t c = 0; c < cols; ++c) obj[c] -= row[c];
      }
    t.optimize(art0 + artificials, opt.pivot_tol, result.pivots, max_pivots);
    if (t.at(0, rhs_col) < -opt.feasibility_tol) return result;  // Infeasible
    // Drive artificial variables out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis(r) < art0) continue;
      for (std::size_t c = 0; c < art0; ++c)
        if (std::abs(t.at(r + 1, c)) > 1e-9) {
          t.pivot(r + 1, c);
          break;
        }
    }
  }

  {
    double* obj = t.row(0);
    std::fill(obj, obj + cols, 0.0);
    const auto& c = problem.objective();
    for (std::size_t j = 0; j < n; ++j) obj[j] = -c[j];
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t b = t.basis(r);
      const double f = obj[b];
      if (f == 0.0) continue;
      const double* row = t.row(r + 1);
      for (std::size_t col = 0; col < cols; ++col) obj[col] -= f * row[col];
    }
  }
  if (!t.optimize(art0, opt.pivot_tol, result.pivots, max_pivots))
    throw LpError("linear program is unbounded");

  ws.solution.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (t.basis(r) < n) ws.solution[t.basis(r)] = t.at(r + 1, rhs_col);
  for (std::size_t j = 0; j < n; ++j)
    ws.solution[j] = std::clamp(ws.solution[j] + vb[j].lo, vb[j].lo, vb[j].hi);

  detail::shrink_point(problem, ws.solution, opt.shrink, ws.shrunk);
  if (!detail::rows_hold(problem, ws.shrunk, opt.shrink, opt.eps))
    throw LpError("solver output failed verification");

  result.status = LpStatus::Optimal;
  result.point = ws.shrunk;
  result.certified_value = problem.evaluate(result.point) - opt.eps;
  result.solver_value = problem.evaluate(ws.solution);
  return result;
}

inline CertifiedLpResult solve_max(const LpProblem& problem, const LpOptions& opt = {}) {
  detail::SimplexWorkspace ws;
  return solve_max(problem, ws, opt);
}

}  // namespace sigmaproof
