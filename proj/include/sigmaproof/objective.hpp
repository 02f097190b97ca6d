#pragma once

// The objective family over radii assignments and its maximization through
// the subset/anchor decomposition into small linear programs.
//
// Every maximum reported here is a certified lower bound: it is the value of
// the objective at an explicit admissible radii assignment (the witness),
// minus eps.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sigmaproof/geometry.hpp"
#include "sigmaproof/lp.hpp"

namespace sigmaproof {

inline constexpr std::size_t kMaxPoints = 12;

// Value reported when no candidate of a maximization is feasible.
inline constexpr double kNoCandidate = -1.0;

struct RadiiAssignment {
  std::vector<double> radii;

  std::size_t size() const { return radii.size(); }
  double operator[](std::size_t i) const { return radii[i]; }
};

enum class Branch { Sharp, Flat };

struct ObjectiveValue {
  double value = kNoCandidate;  // certified lower bound
  // Largest solver optimum over the candidates. Advisory: it is what the
  // exact maximum equals when the simplex is right, but nothing checks that.
  double optimum = kNoCandidate;
  RadiiAssignment witness;
  Branch branch = Branch::Sharp;
  std::uint32_t support = 0;  // subset whose program produced the value
  bool found = false;
};

struct SubsetOptions {
  // Only subsets containing the last `required_tail` points are enumerated.
  std::size_t required_tail = 0;
  // Additional points every enumerated subset must contain (bit mask).
  std::uint32_t required_mask = 0;
  // Singletons are scored by their exact closed forms; when false they are
  // skipped, which only lowers the reported maxima.
  bool include_singletons = true;
  // Visit masks in increasing instead of decreasing order. Only changes
  // which candidate an early-exit visitor sees first.
  bool ascending = false;
  double eps = kEps;
};

class RadiiError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dense copy of the distances of a small point set.
class MetricTable {
 public:
  template <PointSet S>
  explicit MetricTable(const S& ps) : n_(ps.size()), sigma_(ps.sigma()) {
    if (n_ > kMaxPoints) throw std::length_error("too many points for subset enumeration");
    for (std::size_t i = 0; i < n_; ++i) {
      norm_[i] = ps.norm(i);
      for (std::size_t j = 0; j < n_; ++j) d_[i][j] = ps.distance(i, j);
    }
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (j != i && d_[i][j] <= 0.0) twins_[i] |= 1u << j;
  }

  std::size_t size() const { return n_; }
  double sigma() const { return sigma_; }
  double norm(std::size_t i) const { return norm_[i]; }
  double distance(std::size_t i, std::size_t j) const { return d_[i][j]; }

  // Points other than i at distance zero from i.
  std::uint32_t coincident(std::size_t i) const { return twins_[i]; }

  // True when the mask holds two coincident points that are not both
  // required. One of them is forced to radius zero, so the subset scores
  // exactly like the subset without it, which is enumerated anyway.
  bool degenerate(std::uint32_t mask, std::uint32_t required = 0) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (!(mask >> i & 1u)) continue;
      const std::uint32_t tw = twins_[i] & mask;
      if (tw && !((required >> i & 1u) && (tw & required) == tw)) return true;
    }
    return false;
  }

 private:
  std::size_t n_;
  double sigma_;
  std::array<double, kMaxPoints> norm_{};
  std::array<std::array<double, kMaxPoints>, kMaxPoints> d_{};
  std::array<std::uint32_t, kMaxPoints> twins_{};
};

// ---------------------------------------------------------------------------
// Direct evaluation

template <PointSet S>
void validate_radii(const S& ps, const RadiiAssignment& r, double eps = kEps) {
  const std::size_t n = ps.size();
  if (r.size() != n) throw RadiiError("radii count does not match point count");
  for (std::size_t i = 0; i < n; ++i)
    if (!(r[i] >= 0.0 && r[i] <= 1.0)) throw RadiiError("radius outside [0,1]");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (r[i] > 0 && r[j] > 0 && r[i] + r[j] > ps.distance(i, j) + eps)
        throw RadiiError("balls overlap");
}

namespace detail {

struct Extents {
  double sum = 0.0;
  double enclosing = 0.0;  // R: max |p| + r(p) over positive radii
  double diameter = 0.0;   // max |p - p'| + r(p) + r(p') over positive radii
};

template <PointSet S>
Extents extents(const S& ps, const RadiiAssignment& r) {
  Extents e;
  const std::size_t n = ps.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (r[i] <= 0) continue;
    e.sum += r[i];
    e.enclosing = std::max(e.enclosing, ps.norm(i) + r[i]);
    for (std::size_t j = i; j < n; ++j)
      if (r[j] > 0) e.diameter = std::max(e.diameter, ps.distance(i, j) + r[i] + r[j]);
  }
  return e;
}

}  // namespace detail

template <PointSet S>
double eval_F(const S& ps, const RadiiAssignment& r, double eps = kEps) {
  validate_radii(ps, r, eps);
  const auto e = detail::extents(ps, r);
  if (e.sum == 0.0) return 0.0;
  return e.sum - std::min(e.diameter, 0.5 + e.enclosing) / (2.0 * ps.sigma());
}

template <PointSet S>
double eval_F_sharp(const S& ps, const RadiiAssignment& r, double eps = kEps) {
  validate_radii(ps, r, eps);
  const auto e = detail::extents(ps, r);
  return e.sum - (0.5 + e.enclosing) / (2.0 * ps.sigma());
}

template <PointSet S>
double eval_F_flat(const S& ps, const RadiiAssignment& r, double eps = kEps) {
  validate_radii(ps, r, eps);
  const auto e = detail::extents(ps, r);
  return e.sum - e.diameter / (2.0 * ps.sigma());
}

// Closure forms restricted to the points of `mask`: zero radii still count in
// the enclosing radius and the diameter. Never larger than the branch value at
// the same radii.
template <PointSet S>
double eval_F_plus_sharp(const S& ps, std::uint32_t mask, const RadiiAssignment& r) {
  double sum = 0.0;
  double enclosing = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(mask >> i & 1u)) continue;
    sum += r[i];
    enclosing = std::max(enclosing, ps.norm(i) + r[i]);
  }
  return sum - (enclosing + 0.5) / (2.0 * ps.sigma());
}

template <PointSet S>
double eval_F_plus_flat(const S& ps, std::uint32_t mask, const RadiiAssignment& r) {
  double sum = 0.0;
  double diameter = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(mask >> i & 1u)) continue;
    sum += r[i];
    for (std::size_t j = i; j < ps.size(); ++j)
      if (mask >> j & 1u) diameter = std::max(diameter, ps.distance(i, j) + r[i] + r[j]);
  }
  return sum - diameter / (2.0 * ps.sigma());
}

// ---------------------------------------------------------------------------
// Linear programs for one subset

namespace detail {

struct LpScratch {
  LpProblem problem;
  SimplexWorkspace ws;
  std::array<std::size_t, kMaxPoints> idx{};
};

inline LpScratch& scratch() {
  thread_local LpScratch s;
  return s;
}

inline std::size_t collect(std::uint32_t mask, std::array<std::size_t, kMaxPoints>& idx) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < kMaxPoints; ++i)
    if (mask >> i & 1u) idx[k++] = i;
  return k;
}

inline void add_packing_rows(const MetricTable& t, LpProblem& lp,
                             const std::array<std::size_t, kMaxPoints>& idx, std::size_t k) {
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      double* row = lp.add_row(t.distance(idx[a], idx[b]), RowRole::Packing);
      row[a] = 1.0;
      row[b] = 1.0;
    }
}

// Scatter a subset-local LP point into a full-size assignment.
inline RadiiAssignment scatter(const CertifiedLpResult& res, std::size_t n,
                               const std::array<std::size_t, kMaxPoints>& idx, std::size_t k) {
  RadiiAssignment r{std::vector<double>(n, 0.0)};
  for (std::size_t a = 0; a < k; ++a) r.radii[idx[a]] = res.point[a];
  return r;
}

// Sharp program for subset `mask` anchored at point `anchor` (a member).
// The certified value is recomputed from the closure form at the certified
// point, which never exceeds the linear objective there.
inline CertifiedLpResult sharp_program(const MetricTable& t, std::uint32_t mask,
                                       std::size_t anchor, double eps,
                                       RadiiAssignment* witness = nullptr) {
  auto& s = scratch();
  const std::size_t k = collect(mask, s.idx);
  std::size_t a0 = k;
  for (std::size_t a = 0; a < k; ++a)
    if (s.idx[a] == anchor) a0 = a;
  if (a0 == k) throw std::invalid_argument("anchor is not a member of the subset");

  const double two_sigma = 2.0 * t.sigma();
  LpProblem& lp = s.problem;
  lp.reset(k, {0.0, 1.0});
  const double anchor_norm = t.norm(anchor);
  for (std::size_t a = 0; a < k; ++a) {
    if (a == a0) continue;
    double* row = lp.add_row(anchor_norm - t.norm(s.idx[a]), RowRole::Selector);
    row[a] = 1.0;
    row[a0] = -1.0;
  }
  add_packing_rows(t, lp, s.idx, k);
  for (std::size_t a = 0; a < k; ++a) lp.set_objective(a, 1.0);
  lp.set_objective(a0, 1.0 - 1.0 / two_sigma);
  lp.set_objective_offset(-(anchor_norm + 0.5) / two_sigma);

  LpOptions opt;
  opt.eps = eps;
  opt.shrink = 2 * eps;
  auto res = solve_max(lp, s.ws, opt);
  if (!res.optimal()) return res;
  auto r = scatter(res, t.size(), s.idx, k);
  res.certified_value = eval_F_plus_sharp(t, mask, r) - eps;
  if (witness) *witness = std::move(r);
  return res;
}

// Flat program for subset `mask` with diameter pair (a, b); a == b allowed.
inline CertifiedLpResult flat_program(const MetricTable& t, std::uint32_t mask, std::size_t pa,
                                      std::size_t pb, double eps,
                                      RadiiAssignment* witness = nullptr) {
  auto& s = scratch();
  const std::size_t k = collect(mask, s.idx);
  std::size_t ia = k, ib = k;
  for (std::size_t a = 0; a < k; ++a) {
    if (s.idx[a] == pa) ia = a;
    if (s.idx[a] == pb) ib = a;
  }
  if (ia == k || ib == k) throw std::invalid_argument("diameter pair is not in the subset");

  const double two_sigma = 2.0 * t.sigma();
  LpProblem& lp = s.problem;
  lp.reset(k, {0.0, 1.0});
  const double d_ab = t.distance(pa, pb);
  // |p - p'| + r + r' <= |pa - pb| + ra + rb for every pair (including p == p').
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      if ((a == ia && b == ib) || (a == ib && b == ia)) continue;
      double* row = lp.add_row(d_ab - t.distance(s.idx[a], s.idx[b]), RowRole::Selector);
      row[a] += 1.0;
      row[b] += 1.0;
      row[ia] -= 1.0;
      row[ib] -= 1.0;
    }
  add_packing_rows(t, lp, s.idx, k);
  for (std::size_t a = 0; a < k; ++a) lp.set_objective(a, 1.0);
  lp.set_objective(ia, lp.objective()[ia] - 1.0 / two_sigma);
  lp.set_objective(ib, lp.objective()[ib] - 1.0 / two_sigma);
  lp.set_objective_offset(-d_ab / two_sigma);

  LpOptions opt;
  opt.eps = eps;
  opt.shrink = 2 * eps;
  auto res = solve_max(lp, s.ws, opt);
  if (!res.optimal()) return res;
  auto r = scatter(res, t.size(), s.idx, k);
  res.certified_value = eval_F_plus_flat(t, mask, r) - eps;
  if (witness) *witness = std::move(r);
  return res;
}

inline std::uint32_t required_bits(std::size_t n, const SubsetOptions& opt) {
  if (opt.required_tail > n) throw std::invalid_argument("required_tail exceeds point count");
  std::uint32_t req = opt.required_mask;
  for (std::size_t i = n - opt.required_tail; i < n; ++i) req |= 1u << i;
  if (n < 32 && (req >> n) != 0) throw std::invalid_argument("required_mask outside point set");
  return req;
}

}  // namespace detail

// One enumerated candidate of a sharp or flat maximization.
struct Candidate {
  std::uint32_t mask;
  std::size_t anchor;   // sharp anchor or first diameter point
  std::size_t partner;  // second diameter point (flat); equals anchor for sharp
  double value;         // certified
  double optimum;       // solver optimum, advisory
};

// Visits every sharp candidate (subset, anchor) in decreasing mask order. The
// visitor returns false to stop early.
template <class Visitor>
void visit_sharp_candidates(const MetricTable& t, const SubsetOptions& opt, Visitor&& visit) {
  const std::size_t n = t.size();
  if (n == 0) return;
  const std::uint32_t req = detail::required_bits(n, opt);
  const double two_sigma = 2.0 * t.sigma();
  const std::uint32_t full = (1u << n) - 1;
  for (std::uint32_t step = 0; step < full; ++step) {
    const std::uint32_t mask = opt.ascending ? step + 1 : full - step;
    if ((mask & req) != req || t.degenerate(mask, req)) continue;
    const int size = std::popcount(mask);
    if (size == 1) {
      if (!opt.include_singletons) continue;
      // max over r in [0,1] of r - (|p| + r + 1/2) / (2 sigma), attained at r = 1.
      const std::size_t i = static_cast<std::size_t>(std::countr_zero(mask));
      const double v = 1.0 - (t.norm(i) + 1.5) / two_sigma;
      if (!visit(Candidate{mask, i, i, v, v})) return;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      const auto res = detail::sharp_program(t, mask, i, opt.eps);
      if (!res.optimal()) continue;
      if (!visit(Candidate{mask, i, i, res.certified_value, res.solver_value})) return;
    }
  }
}

template <class Visitor>
void visit_flat_candidates(const MetricTable& t, const SubsetOptions& opt, Visitor&& visit) {
  const std::size_t n = t.size();
  if (n == 0) return;
  const std::uint32_t req = detail::required_bits(n, opt);
  for (std::uint32_t mask = (1u << n) - 1; mask > 0; --mask) {
    if ((mask & req) != req || t.degenerate(mask, req)) continue;
    if (std::popcount(mask) == 1) {
      // A single ball has diameter 2r, so the best radius is 0.
      if (!opt.include_singletons) continue;
      const std::size_t i = static_cast<std::size_t>(std::countr_zero(mask));
      if (!visit(Candidate{mask, i, i, 0.0, 0.0})) return;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (std::size_t j = i; j < n; ++j) {
        if (!(mask >> j & 1u)) continue;
        const auto res = detail::flat_program(t, mask, i, j, opt.eps);
        if (!res.optimal()) continue;
        if (!visit(Candidate{mask, i, j, res.certified_value, res.solver_value})) return;
      }
    }
  }
}

namespace detail {

inline ObjectiveValue materialize(const MetricTable& t, const Candidate& c, Branch branch,
                                  double eps) {
  ObjectiveValue v;
  v.found = true;
  v.branch = branch;
  v.support = c.mask;
  v.value = c.value;
  if (std::popcount(c.mask) == 1) {
    v.witness.radii.assign(t.size(), 0.0);
    if (branch == Branch::Sharp) v.witness.radii[c.anchor] = 1.0;
    return v;
  }
  CertifiedLpResult res = branch == Branch::Sharp
                              ? sharp_program(t, c.mask, c.anchor, eps, &v.witness)
                              : flat_program(t, c.mask, c.anchor, c.partner, eps, &v.witness);
  v.value = res.certified_value;
  return v;
}

template <class Visit>
ObjectiveValue best_candidate(const MetricTable& t, const SubsetOptions& opt, Branch branch,
                              Visit&& visit) {
  bool any = false;
  Candidate best{};
  double optimum = kNoCandidate;
  visit(t, opt, [&](const Candidate& c) {
    if (!any || c.value > best.value) best = c;
    optimum = any ? std::max(optimum, c.optimum) : c.optimum;
    any = true;
    return true;
  });
  if (!any) {
    ObjectiveValue none;
    none.branch = branch;
    none.witness.radii.assign(t.size(), 0.0);
    return none;
  }
  auto v = materialize(t, best, branch, opt.eps);
  v.optimum = optimum;
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public maximizations

// Sharp program of the whole set anchored at `anchor`.
template <PointSet S>
CertifiedLpResult M_plus_sharp(const S& ps, std::size_t anchor, double eps = kEps) {
  MetricTable t(ps);
  if (t.size() == 0) throw std::invalid_argument("empty configuration");
  if (anchor >= t.size()) throw std::out_of_range("anchor index out of range");
  return detail::sharp_program(t, (1u << t.size()) - 1, anchor, eps);
}

// Flat program of the whole set with diameter pair (a, b); a == b allowed.
template <PointSet S>
CertifiedLpResult M_plus_flat(const S& ps, std::size_t a, std::size_t b, double eps = kEps) {
  MetricTable t(ps);
  if (t.size() == 0) throw std::invalid_argument("empty configuration");
  if (a >= t.size() || b >= t.size()) throw std::out_of_range("index out of range");
  return detail::flat_program(t, (1u << t.size()) - 1, a, b, eps);
}

template <PointSet S>
ObjectiveValue M_sharp(const S& ps, const SubsetOptions& opt = {}) {
  MetricTable t(ps);
  return detail::best_candidate(t, opt, Branch::Sharp, [](auto&&... a) {
    visit_sharp_candidates(std::forward<decltype(a)>(a)...);
  });
}

template <PointSet S>
ObjectiveValue M_sharp(const S& ps, std::size_t required_tail) {
  SubsetOptions opt;
  opt.required_tail = required_tail;
  return M_sharp(ps, opt);
}

// Maximum over candidates with at least two points. Without a candidate the
// result has found == false.
template <PointSet S>
ObjectiveValue bar_M_flat(const S& ps, double eps = kEps) {
  MetricTable t(ps);
  SubsetOptions opt;
  opt.include_singletons = false;
  opt.eps = eps;
  return detail::best_candidate(t, opt, Branch::Flat, [](auto&&... a) {
    visit_flat_candidates(std::forward<decltype(a)>(a)...);
  });
}

// Flat maximum including the trivial all-zero assignment (value exactly 0).
template <PointSet S>
ObjectiveValue M_flat(const S& ps, double eps = kEps) {
  auto best = bar_M_flat(ps, eps);
  if (!best.found || best.value < 0.0) {
    ObjectiveValue zero;
    zero.found = true;
    zero.branch = Branch::Flat;
    zero.value = 0.0;
    zero.optimum = best.found ? std::max(0.0, best.optimum) : 0.0;
    zero.witness.radii.assign(ps.size(), 0.0);
    return zero;
  }
  return best;
}

template <PointSet S>
ObjectiveValue M_sigma(const S& ps, double eps = kEps) {
  SubsetOptions opt;
  opt.eps = eps;
  auto sharp = M_sharp(ps, opt);
  auto flat = M_flat(ps, eps);
  auto best = sharp.found && sharp.value > flat.value ? sharp : flat;
  best.optimum = sharp.found ? std::max(sharp.optimum, flat.optimum) : flat.optimum;
  return best;
}

// True as soon as some sharp candidate is strictly above `threshold`
// (or, with `inclusive`, at least `threshold`). Stops at the first one.
inline bool sharp_exceeds(const MetricTable& t, const SubsetOptions& opt, double threshold,
                          bool inclusive = false) {
  bool hit = false;
  visit_sharp_candidates(t, opt, [&](const Candidate& c) {
    hit = inclusive ? c.value >= threshold : c.value > threshold;
    return !hit;
  });
  return hit;
}

}  // namespace sigmaproof
