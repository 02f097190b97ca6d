#pragma once

// Exhaustive search over radii for configurations of at most three points.
// For every support set S the objective restricted to radii positive exactly
// on S extends continuously to the closure, so the supremum over S is a
// maximum over the closure. The first radii run over a grid; the objective
// is concave piecewise linear in the last radius and is maximized there
// exactly over its breakpoints.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sigmaproof/objective.hpp"

namespace sigmaproof {

struct OracleResult {
  double sharp = kNoCandidate;     // sup over nonzero radii of the sharp branch
  double flat = 0.0;               // including r = 0
  double bar_flat = kNoCandidate;  // at least two positive radii
  double sigma_value() const { return std::max(sharp, flat); }
};

namespace detail {

struct Line {
  double a, b;  // a + b t
};

// Max over t in [0, cap] of c t - max_k(lines_k(t)), concave in t.
inline double concave_max(double c, const std::vector<Line>& lines, double cap) {
  std::vector<double> cand{0.0, cap};
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j)
      if (lines[i].b != lines[j].b) {
        const double t = (lines[j].a - lines[i].a) / (lines[i].b - lines[j].b);
        if (t > 0 && t < cap) cand.push_back(t);
      }
  double best = -1e300;
  for (double t : cand) {
    double m = -1e300;
    for (const auto& l : lines) m = std::max(m, l.a + l.b * t);
    best = std::max(best, c * t - m);
  }
  return best;
}

}  // namespace detail

template <PointSet S>
OracleResult grid_oracle(const S& ps, double step = 1e-3) {
  const std::size_t n = ps.size();
  if (n == 0 || n > 3) throw std::invalid_argument("oracle supports 1 to 3 points");
  if (!(step > 0 && step <= 0.5)) throw std::invalid_argument("grid step out of range");
  const double ts = 2.0 * ps.sigma();
  OracleResult out;

  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) idx.push_back(i);
    bool coincident = false;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b)
        if (ps.distance(idx[a], idx[b]) <= 0) coincident = true;
    if (coincident) continue;  // no radii can be positive on both
    const std::size_t k = idx.size();
    const std::size_t last = idx.back();

    std::vector<double> r(k, 0.0);
    // Iterate the first k-1 radii over the grid.
    std::vector<std::size_t> ticks(k, 0);
    const auto top = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
    for (;;) {
      bool ok = true;
      for (std::size_t a = 0; a + 1 < k; ++a) r[a] = std::min(1.0, ticks[a] * step);
      for (std::size_t a = 0; a + 1 < k && ok; ++a)
        for (std::size_t b = a + 1; b + 1 < k; ++b)
          if (r[a] + r[b] > ps.distance(idx[a], idx[b])) ok = false;
      if (ok) {
        double cap = 1.0, sum = 0.0;
        for (std::size_t a = 0; a + 1 < k; ++a) {
          cap = std::min(cap, ps.distance(idx[a], last) - r[a]);
          sum += r[a];
        }
        if (cap >= 0) {
          // Sharp: sum + t - (1/2 + max(|p| + r)) / (2 sigma).
          std::vector<detail::Line> sharp{{ps.norm(last) / ts, 1.0 / ts}};
          for (std::size_t a = 0; a + 1 < k; ++a)
            sharp.push_back({(ps.norm(idx[a]) + r[a]) / ts, 0.0});
          const double vs = sum - 0.5 / ts + detail::concave_max(1.0, sharp, cap);
          out.sharp = std::max(out.sharp, vs);
          // Flat: sum + t - max(|p - p'| + r + r') / (2 sigma).
          std::vector<detail::Line> flat{{0.0, 2.0 / ts}};
          for (std::size_t a = 0; a + 1 < k; ++a) {
            flat.push_back({(ps.distance(idx[a], last) + r[a]) / ts, 1.0 / ts});
            for (std::size_t b = a; b + 1 < k; ++b)
              flat.push_back({(ps.distance(idx[a], idx[b]) + r[a] + r[b]) / ts, 0.0});
          }
          const double vf = sum + detail::concave_max(1.0, flat, cap);
          out.flat = std::max(out.flat, vf);
          if (k >= 2) out.bar_flat = std::max(out.bar_flat, vf);
        }
      }
      std::size_t a = 0;
      while (a + 1 < k && ++ticks[a] > top) ticks[a++] = 0;
      if (a + 1 >= k) break;
    }
  }
  return out;
}

}  // namespace sigmaproof
