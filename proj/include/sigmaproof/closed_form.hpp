#pragma once

// Exact values for the zero- and one-generation problems and the thresholds
// where they change sign.

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigmaproof {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Triangle {O, p1, p2} described by D = |p1 - p2|, d1 = |p1|, d2 = |p2|.
struct TriangleParams {
  double D = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline bool admissible(double sigma, const TriangleParams& t, double tol = 1e-12) {
  return t.d2 >= -tol && t.d2 <= t.d1 + tol && t.d1 <= 1.0 + tol && t.D >= 2.0 * sigma - tol &&
         t.D <= t.d1 + t.d2 + tol;
}

inline double zero_gen_minmax(double sigma) {
  if (!(sigma > 0.5 && sigma <= 1.0)) throw DomainError("sigma must lie in (1/2, 1]");
  return std::max(0.0, 1.0 - 3.0 / (4.0 * sigma));
}

inline double one_gen_numerator(double s) { return 8 * s * s * s + 4 * s * s - 3 * s - 3; }

inline double one_gen_minmax(double sigma) {
  if (!(sigma > 0.5 && sigma <= 0.75)) throw DomainError("sigma must lie in (1/2, 3/4]");
  return std::max(0.0, one_gen_numerator(sigma)) / (4.0 * sigma * (sigma + 1.0));
}

inline double max_diesis(double sigma, const TriangleParams& t) {
  if (!(sigma >= 0.5 && sigma <= 1.0)) throw DomainError("sigma must lie in [1/2, 1]");
  if (!admissible(sigma, t, 1e-9)) throw DomainError("triangle parameters not admissible");
  const double per = t.D + t.d1 + t.d2;
  const double m = std::max({2 * sigma - 1, 2 * sigma * t.D - per / 2,
                             sigma * per - (t.D + 3 * t.d1 - t.d2) / 2});
  return (m - 0.5) / (2 * sigma);
}

inline TriangleParams one_gen_minimizer(double sigma) {
  if (!(sigma > 0.5 && sigma <= 0.75)) throw DomainError("sigma must lie in (1/2, 3/4]");
  return {2 * sigma, 1.0, (2 * sigma * sigma - sigma + 1) / (sigma + 1)};
}

namespace detail {

// Newton steps kept inside a shrinking bracket; falls back to bisection when
// a step would leave it.
template <class F, class DF>
double bracketed_root(F f, DF df, double lo, double hi) {
  double flo = f(lo);
  if (flo * f(hi) > 0) throw DomainError("root not bracketed");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0) == (flo < 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = d != 0.0 ? x - fx / d : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-17 || hi - lo <= 1e-16) return next;
    x = next;
  }
  return x;
}

}  // namespace detail

inline double sigma_pt() {
  static const double root = detail::bracketed_root(
      one_gen_numerator, [](double s) { return 24 * s * s + 8 * s - 3; }, 0.5, 0.75);
  return root;
}

inline double sigma_lower() {
  static const double root = detail::bracketed_root(
      [](double s) { return 32 * s * s * s - 32 * s * s + 12 * s - 3; },
      [](double s) { return 96 * s * s - 64 * s + 12; }, 0.5, 0.75);
  return root;
}

inline constexpr double sigma_b() { return 0.75; }

}  // namespace sigmaproof
