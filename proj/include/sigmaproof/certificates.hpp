#pragma once

// Built-in extremal configurations and the checks that reproduce their
// reported values.
//
// Values called "optimum" below are the simplex optima, which is what the
// published figures are. Each certified lower bound is reported next to it,
// so a reader can see how far the certification moved the value.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sigmaproof/closed_form.hpp"
#include "sigmaproof/geometry.hpp"
#include "sigmaproof/objective.hpp"

namespace sigmaproof {

struct CheckResult {
  std::string description;
  double value = 0.0;
  std::string relation;  // required relation, human readable
  bool pass = false;

  bool operator==(const CheckResult&) const = default;
};

struct CertificateReport {
  std::string name;
  std::vector<CheckResult> checks;

  bool overall() const {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }
  const CheckResult* find(std::string_view prefix) const {
    for (const auto& c : checks)
      if (c.description.starts_with(prefix)) return &c;
    return nullptr;
  }
  void add(std::string description, double value, std::string relation, bool pass) {
    checks.push_back({std::move(description), value, std::move(relation), pass});
  }

  bool operator==(const CertificateReport&) const = default;
};

inline void to_json(nlohmann::json& j, const CheckResult& c) {
  j = {{"description", c.description}, {"value", c.value}, {"relation", c.relation},
       {"pass", c.pass}};
}
inline void from_json(const nlohmann::json& j, CheckResult& c) {
  j.at("description").get_to(c.description);
  j.at("value").get_to(c.value);
  j.at("relation").get_to(c.relation);
  j.at("pass").get_to(c.pass);
}
inline void to_json(nlohmann::json& j, const CertificateReport& r) {
  j = {{"name", r.name}, {"checks", r.checks}, {"overall", r.overall()}};
}
inline void from_json(const nlohmann::json& j, CertificateReport& r) {
  j.at("name").get_to(r.name);
  j.at("checks").get_to(r.checks);
}

class UnknownCertificate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"six_point_0683", "trapezoid_064368",
                                              "metric_quadrilateral_pt"};
  return names;
}

// ---------------------------------------------------------------------------
// Configurations

inline Configuration six_point_config(double sigma = 0.683) {
  return Configuration::planar({{0, 0},
                                {0.306, 0.952},
                                {0.034, -0.387},
                                {0, 0},
                                {0.464, 1.815},
                                {0.031, 0.599},
                                {0.516, -0.679}},
                               sigma, 0, {"O", "a", "b", "a1", "a2", "b1", "b2"});
}

inline FamilyTree six_point_tree() { return {{0, 1, 2}, {1, 3, 4}, {2, 5, 6}}; }

struct TrapezoidLengths {
  double b;
  double B;
};

inline TrapezoidLengths trapezoid_lengths(double sigma) {
  return {2 * (1 - sigma), 2 * (1 - sigma + (8 * sigma - 5) / (4 * (1 - sigma)))};
}

inline Configuration trapezoid_config() {
  const double s = sigma_lower();
  const double c = (8 * s - 5) / (4 * (1 - s));
  const double sn = std::sqrt(1 - c * c);
  return Configuration::planar({{0, 0}, {2 - 2 * s, 0}, {2 - 2 * s + c, -sn}, {-c, -sn}}, s, 0,
                               {"p1", "p2", "p3", "p4"});
}

inline Configuration metric_quadrilateral_config() {
  const double s = sigma_pt();
  const double d12 = (2 * s * s - s + 1) / (s + 1);
  const double d23 = 2 * s / (s + 1);
  const double d34 = 2 * s * s / (s + 1);
  const double d41 = 1.0;
  const double d13 = d12 + d23;
  const double d24 = 2 * s;
  return Configuration::metric({{0, d12, d13, d41},
                                {d12, 0, d23, d24},
                                {d13, d23, 0, d34},
                                {d41, d24, d34, 0}},
                               s, 0, {"p1", "p2", "p3", "p4"});
}

inline Configuration builtin_config(const std::string& name) {
  if (name == "six_point_0683") return six_point_config();
  if (name == "trapezoid_064368") return trapezoid_config();
  if (name == "metric_quadrilateral_pt") return metric_quadrilateral_config();
  throw UnknownCertificate("unknown configuration: " + name);
}

// The one-stability relations shared by the trapezoid and the quadrilateral:
// (p2,p4) around p1, (p1,p3) around p2, (p2,p4) around p3, (p1,p3) around p4.
inline constexpr std::array<FamilyEdge, 4> kCycleRelations{
    {{0, 1, 3}, {1, 0, 2}, {2, 1, 3}, {3, 0, 2}}};

namespace detail {

inline void add_relations(CertificateReport& rep, const Configuration& cfg) {
  for (const auto& e : kCycleRelations) {
    const bool ok = in_delta(cfg, e.child1, e.child2, e.parent, 1.0);
    rep.add("pair relation (" + cfg.label(e.child1) + "," + cfg.label(e.child2) + ") around " +
                cfg.label(e.parent),
            cfg.distance(e.child1, e.child2), ">= 2 sigma, both within 1", ok);
  }
}

// Largest sharp or flat program value over subsets of the given sizes.
struct SubsetMax {
  double optimum = -1e300;
  double certified = -1e300;
};

inline SubsetMax subset_program_max(const Configuration& cfg, Branch branch, int min_size,
                                    int max_size) {
  MetricTable t(cfg);
  SubsetMax out;
  const double two_sigma = 2 * cfg.sigma();
  const std::uint32_t full = (1u << t.size()) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const int k = std::popcount(mask);
    if (k < min_size || k > max_size) continue;
    if (k == 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(mask));
      const double v = branch == Branch::Sharp ? 1 - (t.norm(i) + 1.5) / two_sigma : 0.0;
      out.optimum = std::max(out.optimum, v);
      out.certified = std::max(out.certified, v);
      continue;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      if (branch == Branch::Sharp) {
        const auto r = sharp_program(t, mask, i, kEps);
        if (!r.optimal()) continue;
        out.optimum = std::max(out.optimum, r.solver_value);
        out.certified = std::max(out.certified, r.certified_value);
        continue;
      }
      for (std::size_t j = i; j < t.size(); ++j) {
        if (!(mask >> j & 1u)) continue;
        const auto r = flat_program(t, mask, i, j, kEps);
        if (!r.optimal()) continue;
        out.optimum = std::max(out.optimum, r.solver_value);
        out.certified = std::max(out.certified, r.certified_value);
      }
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Certificates

inline CertificateReport certify_six_point(double sigma = 0.683) {
  CertificateReport rep;
  rep.name = "six_point_0683";
  const auto cfg = six_point_config(sigma);

  const bool member = validate_family(cfg, six_point_tree());
  rep.add("second-generation family membership", member ? 1.0 : 0.0,
          "tree relations hold at radius 1", member);

  const auto sharp = M_sharp(cfg);
  rep.add("M_sharp optimum", sharp.optimum, "-0.00032 +/- 1e-4",
          std::abs(sharp.optimum + 0.00032) <= 1e-4);
  rep.add("M_sharp optimum negative", sharp.optimum, "< 0", sharp.optimum < 0);
  rep.add("M_sharp certified lower bound", sharp.value, "-0.00032 +/- 1e-4, <= optimum",
          std::abs(sharp.value + 0.00032) <= 1e-4 && sharp.value <= sharp.optimum);

  const auto flat = bar_M_flat(cfg);
  rep.add("bar_M_flat optimum", flat.optimum, "-0.1803 +/- 1e-3",
          flat.found && std::abs(flat.optimum + 0.1803) <= 1e-3);
  rep.add("bar_M_flat optimum negative", flat.optimum, "< 0", flat.found && flat.optimum < 0);
  rep.add("bar_M_flat certified lower bound", flat.value, "-0.1803 +/- 1e-3, <= optimum",
          std::abs(flat.value + 0.1803) <= 1e-3 && flat.value <= flat.optimum);

  double min_x = 0;
  for (const auto& p : cfg.points()) min_x = std::min(min_x, p.x);
  rep.add("first coordinates nonnegative", min_x, ">= 0", min_x >= 0);
  return rep;
}

inline CertificateReport certify_trapezoid() {
  CertificateReport rep;
  rep.name = "trapezoid_064368";
  const auto cfg = trapezoid_config();
  const double s = cfg.sigma();
  const auto [b, B] = trapezoid_lengths(s);

  rep.add("long base B", B, "0.92239 +/- 1e-5", std::abs(B - 0.92239) <= 1e-5);
  rep.add("base b", cfg.distance(0, 1), "= 2(1 - sigma)", std::abs(cfg.distance(0, 1) - b) < 1e-12);
  rep.add("long base from coordinates", cfg.distance(2, 3), "= B",
          std::abs(cfg.distance(2, 3) - B) < 1e-12);
  rep.add("legs", std::max(std::abs(cfg.distance(1, 2) - 1), std::abs(cfg.distance(3, 0) - 1)),
          "|leg - 1| < 1e-12",
          std::abs(cfg.distance(1, 2) - 1) < 1e-12 && std::abs(cfg.distance(3, 0) - 1) < 1e-12);
  rep.add("diagonals", std::max(std::abs(cfg.distance(0, 2) - 2 * s), std::abs(cfg.distance(1, 3) - 2 * s)),
          "|diagonal - 2 sigma| < 1e-12",
          std::abs(cfg.distance(0, 2) - 2 * s) < 1e-12 && std::abs(cfg.distance(1, 3) - 2 * s) < 1e-12);
  detail::add_relations(rep, cfg);

  const auto sharp = detail::subset_program_max(cfg, Branch::Sharp, 1, 3);
  rep.add("sharp programs on subsets of size 1-3", sharp.optimum, "<= -0.03014 + 1e-4",
          sharp.optimum <= -0.03014 + 1e-4 && sharp.certified <= sharp.optimum);
  const auto flat = detail::subset_program_max(cfg, Branch::Flat, 2, 3);
  rep.add("flat programs on subsets of size 2-3", flat.optimum, "<= -0.23604 + 1e-4",
          flat.optimum <= -0.23604 + 1e-4 && flat.certified <= flat.optimum);

  const double q = 1 - 1 / (4 * s);
  const double res_sharp = b + q * B - (1 / (2 * s) + 0.5);
  const double res_flat = q * (b + B) - 1;
  rep.add("full-set sharp bound residual", res_sharp, "|.| < 1e-10", std::abs(res_sharp) < 1e-10);
  rep.add("full-set flat bound residual", res_flat, "|.| < 1e-10", std::abs(res_flat) < 1e-10);

  double max_y = -1;
  for (const auto& p : cfg.points()) max_y = std::max(max_y, p.y);
  rep.add("second coordinates nonpositive", max_y, "<= 0", max_y <= 0);
  return rep;
}

inline CertificateReport certify_metric_quadrilateral(std::size_t samples = 1000,
                                                      std::uint64_t seed = 2024) {
  CertificateReport rep;
  rep.name = "metric_quadrilateral_pt";
  const double s = sigma_pt();
  bool valid = true;
  std::optional<Configuration> built;
  try {
    built = metric_quadrilateral_config();
  } catch (const ConfigurationError&) {
    valid = false;
  }
  rep.add("distance matrix valid (symmetric, triangle inequalities)", valid ? 1.0 : 0.0, "valid",
          valid);
  if (!valid) return rep;
  const auto& cfg = *built;

  rep.add("d24 = 2 sigma", cfg.distance(1, 3), "= 2 sigma",
          std::abs(cfg.distance(1, 3) - 2 * s) < 1e-12);
  rep.add("d13 > 2 sigma", cfg.distance(0, 2), "> 2 sigma", cfg.distance(0, 2) > 2 * s);
  detail::add_relations(rep, cfg);

  const auto flat = bar_M_flat(cfg);
  rep.add("bar_M_flat optimum", flat.optimum, "-0.148 +/- 1e-3",
          flat.found && std::abs(flat.optimum + 0.148) <= 1e-3);
  rep.add("bar_M_flat optimum negative", flat.optimum, "< 0", flat.found && flat.optimum < 0);
  rep.add("bar_M_flat certified lower bound", flat.value, "<= optimum", flat.value <= flat.optimum);

  // Sub-triangle {p1, p2, p4}: long side d24, then the two distances from O.
  const double tri = max_diesis(
      s, {cfg.distance(1, 3), std::max(cfg.distance(0, 1), cfg.distance(0, 3)),
          std::min(cfg.distance(0, 1), cfg.distance(0, 3))});
  rep.add("sub-triangle sharp maximum (closed form)", tri, "|.| < 1e-9", std::abs(tri) < 1e-9);
  const std::array<std::size_t, 3> sub{0, 1, 3};
  const auto tri_lp = M_sharp(cfg.subset(sub));
  rep.add("sub-triangle sharp maximum (programs)", tri_lp.optimum, "|.| < 1e-9",
          std::abs(tri_lp.optimum) < 1e-9);

  // Radii with r3 > 0 never beat the competitor that moves r3 onto p2, p4.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t done = 0, bad = 0;
  double worst = -1e300;
  while (done < samples) {
    RadiiAssignment r{{u(rng) * cfg.distance(0, 1), u(rng) * cfg.distance(1, 2),
                       u(rng) * cfg.distance(2, 3), u(rng) * cfg.distance(0, 3)}};
    if (!(r.radii[2] > 0)) continue;
    bool admissible = true;
    for (std::size_t i = 0; i < 4 && admissible; ++i)
      for (std::size_t j = i + 1; j < 4; ++j)
        if (r[i] + r[j] > cfg.distance(i, j)) admissible = false;
    if (!admissible) continue;
    ++done;
    const double r3 = r[2];
    RadiiAssignment shifted{{std::max(0.0, r[0] - r3), r[1] + r3, 0.0, r[3] + r3}};
    try {
      validate_radii(cfg, shifted);
      const double gap = eval_F_sharp(cfg, r) - eval_F_sharp(cfg, shifted);
      worst = std::max(worst, gap);
      if (gap > 1e-12) ++bad;
    } catch (const RadiiError&) {
      ++bad;
    }
  }
  rep.add("radii shift competitor (" + std::to_string(samples) + " samples)", worst,
          "F(r) - F(r') <= 1e-12 and r' admissible", bad == 0);
  return rep;
}

// Truncated union E of I_k = [2^-k, 1.75 * 2^-k] for 0 <= k <= k_max and
// I_{-1} = [-1, 0].
struct IntervalSet {
  std::vector<std::pair<double, double>> parts;  // sorted, disjoint

  explicit IntervalSet(int k_max) {
    parts.push_back({-1.0, 0.0});
    for (int k = k_max; k >= 0; --k) parts.push_back({std::ldexp(1.0, -k), 1.75 * std::ldexp(1.0, -k)});
  }

  double measure_in(double lo, double hi) const {
    double m = 0;
    for (const auto& [a, b] : parts) m += std::max(0.0, std::min(b, hi) - std::max(a, lo));
    return m;
  }
};

inline CertificateReport interval_set_check(int k_max = 30, std::size_t samples = 10000,
                                            std::uint64_t seed = 2024) {
  if (k_max < 2) throw std::invalid_argument("k_max must be at least 2");
  CertificateReport rep;
  rep.name = "interval_set";
  const IntervalSet E(k_max);

  // Each inner interval against its two neighbouring gaps; dyadic, so exact.
  bool lr_ok = true;
  double worst_margin = 1e300;
  for (int k = 1; k <= k_max - 1; ++k) {
    const double lo = std::ldexp(1.0, -k), hi = 1.75 * lo;
    const double gap_right = 2 * lo - hi;
    const double gap_left = lo - 1.75 * std::ldexp(1.0, -k - 1);
    const double a = hi - lo;
    if (a != 0.75 * lo || gap_left + gap_right != 0.25 * (std::ldexp(1.0, -k - 1) + lo))
      lr_ok = false;
    if (!(a >= gap_left + gap_right)) lr_ok = false;
    worst_margin = std::min(worst_margin, (a - gap_left - gap_right) / lo);
  }
  rep.add("interval beats adjacent gaps, 1 <= k <= " + std::to_string(k_max - 1), worst_margin,
          "|A| - |B| - |C| >= 0 (relative to 2^-k)", lr_ok);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double total = E.measure_in(-2, 2);
  const double r0 = 0.25;
  std::size_t failures = 0, trivial_ok = 0, trivial = 0;
  double worst = 1e300;
  for (std::size_t n = 0; n < samples; ++n) {
    // a uniform on E by length, r uniform in (0, r0].
    double pick = u(rng) * total, a = 0;
    for (const auto& [lo, hi] : E.parts) {
      if (pick <= hi - lo) {
        a = lo + pick;
        break;
      }
      pick -= hi - lo;
    }
    const double r = r0 * (1.0 - u(rng));
    const double in = E.measure_in(a - r, a + r);
    const double out = 2 * r - in;
    worst = std::min(worst, (in - out) / r);
    if (in < out) ++failures;

    // Windows holding no whole interval lie half inside the interval of a.
    bool whole = false;
    for (const auto& [lo, hi] : E.parts)
      if (lo >= a - r && hi <= a + r) whole = true;
    if (!whole) {
      ++trivial;
      for (const auto& [lo, hi] : E.parts)
        if (lo <= a && a <= hi && ((a - r >= lo) || (a + r <= hi))) {
          ++trivial_ok;
          break;
        }
    }
  }
  rep.add("density windows (" + std::to_string(samples) + " samples, r <= 1/4)", worst,
          "measure in E >= measure outside", failures == 0);
  rep.add("windows without a whole interval are half covered", static_cast<double>(trivial),
          "all such windows", trivial_ok == trivial);
  return rep;
}

inline CertificateReport certify(const std::string& name) {
  if (name == "six_point_0683") return certify_six_point();
  if (name == "trapezoid_064368") return certify_trapezoid();
  if (name == "metric_quadrilateral_pt") return certify_metric_quadrilateral();
  if (name == "interval_set") return interval_set_check(31);  // k up to 30
  throw UnknownCertificate("unknown certificate: " + name);
}

}  // namespace sigmaproof
