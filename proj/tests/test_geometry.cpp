#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sigmaproof/certificates.hpp"
#include "sigmaproof/config_io.hpp"
#include "sigmaproof/geometry.hpp"

using namespace sigmaproof;

TEST(Distance, PythagoreanTriple) {
  auto cfg = Configuration::planar({{0, 0}, {3, 4}}, 0.7);
  EXPECT_DOUBLE_EQ(cfg.distance(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(cfg.distance(1, 0), 5.0);
  EXPECT_EQ(cfg.distance(1, 1), 0.0);
}

TEST(Distance, IndexOutOfRangeThrows) {
  auto cfg = Configuration::planar({{0, 0}, {3, 4}}, 0.7);
  EXPECT_ANY_THROW(cfg.distance(0, 2));
}

TEST(Distance, QuadrilateralDiagonalIsTwoSigma) {
  auto cfg = metric_quadrilateral_config();
  const double s = cfg.sigma();
  EXPECT_NEAR(cfg.distance(1, 3), 2 * s, 1e-12);
  EXPECT_NEAR(cfg.distance(1, 3), 1.45310, 1e-5);
}

TEST(Configuration, RejectsBadInput) {
  EXPECT_THROW(Configuration::planar({{1, 0}}, 0.7), ConfigurationError);  // origin not at 0
  EXPECT_THROW(Configuration::planar({{0, 0}}, 0.4), ConfigurationError);
  EXPECT_THROW(Configuration::planar({{0, 0}}, 0.7, 3), ConfigurationError);
  EXPECT_THROW(Configuration::metric({{0, 1}, {2, 0}}, 0.7), ConfigurationError);  // asymmetric
  EXPECT_THROW(Configuration::metric({{1, 1}, {1, 0}}, 0.7), ConfigurationError);  // diagonal
  EXPECT_THROW(Configuration::metric({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}, 0.7),
               ConfigurationError);  // triangle inequality
  EXPECT_THROW(Configuration::metric({{0, -1}, {-1, 0}}, 0.7), ConfigurationError);
}

TEST(Configuration, CoincidentPointsAreKept) {
  auto cfg = six_point_config();
  EXPECT_EQ(cfg.size(), 7u);
  EXPECT_EQ(cfg.distance(0, 3), 0.0);
}

TEST(Configuration, MetricAgreesWithPlanar) {
  std::mt19937 g(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int it = 0; it < 200; ++it) {
    std::vector<Point2> pts{{0, 0}};
    const int n = 1 + it % 6;
    for (int i = 0; i < n; ++i) pts.push_back({u(g), u(g)});
    auto a = Configuration::planar(pts, 0.7);
    std::vector<std::vector<double>> m(pts.size(), std::vector<double>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        m[i][j] = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
    auto b = Configuration::metric(m, 0.7);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_NEAR(a.norm(i), b.norm(i), 1e-12);
      for (std::size_t j = 0; j < pts.size(); ++j) EXPECT_NEAR(a.distance(i, j), b.distance(i, j), 1e-12);
    }
  }
}

TEST(Configuration, SubsetKeepsLabelsAndOrigin) {
  auto cfg = six_point_config();
  std::vector<std::size_t> idx{0, 1, 4};
  auto s = cfg.subset(idx);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.label(2), "a2");
  EXPECT_EQ(s.origin_index(), std::optional<std::size_t>(0));
  EXPECT_NEAR(s.distance(1, 2), cfg.distance(1, 4), 0);
}

TEST(InDelta, Examples) {
  auto cfg = Configuration::planar({{0, 0}, {0, 1}, {0, -1}, {0, 0.5}}, 0.7);
  EXPECT_TRUE(in_delta(cfg, 1, 2, 0, 1.0));
  EXPECT_FALSE(in_delta(cfg, 1, 3, 0, 1.0));
  auto six = six_point_config();
  EXPECT_TRUE(in_delta(six, 3, 4, 1, 1.0));
}

TEST(InDelta, SymmetricInThePair) {
  std::mt19937 g(11);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int it = 0; it < 1000; ++it) {
    auto cfg = Configuration::planar({{0, 0}, {u(g), u(g)}, {u(g), u(g)}}, 0.7);
    const double r = 0.2 + 0.8 * (u(g) + 1.2) / 2.4;
    EXPECT_EQ(in_delta(cfg, 1, 2, 0, r), in_delta(cfg, 2, 1, 0, r));
  }
}

TEST(InDelta, ToleranceIsPermissive) {
  // Just outside the ball by less than eps still counts.
  auto cfg = Configuration::planar({{0, 0}, {0, 1 + 0.5 * kEps}, {0, -1}}, 0.7);
  EXPECT_TRUE(in_delta(cfg, 1, 2, 0, 1.0));
  auto far = Configuration::planar({{0, 0}, {0, 1 + 3 * kEps}, {0, -1}}, 0.7);
  EXPECT_FALSE(in_delta(far, 1, 2, 0, 1.0));
}

TEST(Family, SingletonIsGenerationZero) {
  auto cfg = Configuration::planar({{0, 0}}, 0.7);
  EXPECT_TRUE(validate_family(cfg, {}));
  EXPECT_EQ(family_generation(cfg, {}), std::optional<std::size_t>(0));
}

TEST(Family, SixPointIsSecondGeneration) {
  EXPECT_EQ(family_generation(six_point_config(), six_point_tree()), std::optional<std::size_t>(2));
}

TEST(Family, ShortPairFails) {
  auto cfg = Configuration::planar({{0, 0}, {0, 0.5}, {0, -0.5}}, 0.7);
  EXPECT_FALSE(validate_family(cfg, {{0, 1, 2}}));
}

TEST(Family, PerturbedChildBreaksMembership) {
  auto cfg = six_point_config();
  auto pts = cfg.points();
  pts[4].y += 0.2;
  auto moved = Configuration::planar(pts, cfg.sigma(), 0, cfg.labels());
  EXPECT_FALSE(validate_family(moved, six_point_tree()));
}

TEST(Family, MalformedTreeThrows) {
  auto cfg = six_point_config();
  EXPECT_THROW(validate_family(cfg, {{0, 1, 9}}), ConfigurationError);
  EXPECT_THROW(validate_family(cfg, {{0, 1, 2}, {0, 3, 4}}), ConfigurationError);
  EXPECT_THROW(validate_family(cfg, {{0, 1, 2}, {1, 2, 3}}), ConfigurationError);
  EXPECT_THROW(validate_family(cfg, {{0, 1, 1}}), ConfigurationError);
}

TEST(Family, IncompleteGenerationFails) {
  // b has no children while a does.
  auto cfg = six_point_config();
  std::vector<std::size_t> idx{0, 1, 2, 3, 4};
  EXPECT_FALSE(validate_family(cfg.subset(idx), {{0, 1, 2}, {1, 3, 4}}));
}

namespace {

// Children of `parent` drawn in the closed unit ball around it, the pair
// rejected until they are at least 2 sigma apart. Redrawing both matters: a
// first child near the parent may have no admissible partner at all.
std::pair<Point2, Point2> sample_children(std::mt19937& g, Point2 parent, double sigma) {
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> u(0, 1);
  const auto draw = [&] {
    const double r = std::sqrt(u(g)), t = ang(g);
    return Point2{parent.x + r * std::cos(t), parent.y + r * std::sin(t)};
  };
  for (;;) {
    const Point2 a = draw();
    for (int tries = 0; tries < 100; ++tries) {
      const Point2 b = draw();
      if (distance(a, b) >= 2 * sigma) return {a, b};
    }
  }
}

}  // namespace

TEST(Family, RandomSamplerOutputIsValid) {
  std::mt19937 g(3);
  for (int it = 0; it < 1000; ++it) {
    const int k = it % 4;
    const double sigma = 0.5 + 0.1 * (it % 5);
    std::vector<Point2> pts{{0, 0}};
    FamilyTree tree;
    std::vector<std::size_t> frontier{0};
    for (int gen = 0; gen < k; ++gen) {
      std::vector<std::size_t> next;
      for (std::size_t p : frontier) {
        auto [a, b] = sample_children(g, pts[p], sigma);
        pts.push_back(a);
        pts.push_back(b);
        tree.push_back({p, pts.size() - 2, pts.size() - 1});
        next.push_back(pts.size() - 2);
        next.push_back(pts.size() - 1);
      }
      frontier = std::move(next);
    }
    auto cfg = Configuration::planar(pts, sigma);
    ASSERT_EQ(family_generation(cfg, tree), std::optional<std::size_t>(k));
  }
}

TEST(Omega, Examples) {
  EXPECT_TRUE(omega_membership({0, 1}, {0, -1}, 0.7, 0));
  EXPECT_FALSE(omega_membership({0, 0.5}, {0, -0.5}, 0.7, 0));
}

TEST(Omega, SlackenedConstraintsByHand) {
  const Point2 p1{0, 1}, p2{0.4, -0.98};
  const double s = 0.008;
  // |p2| = 1.0585 exceeds |p1| by more than sqrt2 * 0.008.
  const bool expect = norm(p2) <= norm(p1) + std::sqrt(2.0) * s + kEps &&
                      1.4 <= distance(p1, p2) + std::sqrt(2.0) * s + kEps && 0.4 >= -s / 2;
  EXPECT_FALSE(expect);
  EXPECT_EQ(omega_membership(p1, p2, 0.7, s), expect);
  // Shrinking p2 onto the unit circle admits it.
  const Point2 q = p2 * (1.0 / norm(p2));
  EXPECT_TRUE(omega_membership(p1, q, 0.7, s));
}

TEST(Omega, SlackAdmitsNearMisses) {
  // x2 slightly negative: only within half the step.
  EXPECT_FALSE(omega_membership({0, 1}, {-0.003, -1}, 0.7, 0));
  EXPECT_TRUE(omega_membership({0, 1}, {-0.003, -0.99}, 0.7, 0.008));
  EXPECT_FALSE(omega_membership({0, 1}, {-0.005, -0.99}, 0.7, 0.008));
}

TEST(ConfigJson, RoundTripPlanar) {
  auto cfg = six_point_config();
  auto j = config_to_json(cfg, six_point_tree());
  auto back = config_from_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(back.config.size(), cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t k = 0; k < cfg.size(); ++k)
      EXPECT_NEAR(back.config.distance(i, k), cfg.distance(i, k), 1e-15);
  EXPECT_EQ(back.tree.size(), 3u);
  EXPECT_TRUE(validate_family(back.config, back.tree));
}

TEST(ConfigJson, RoundTripMetric) {
  auto cfg = metric_quadrilateral_config();
  auto back = config_from_json(nlohmann::json::parse(config_to_json(cfg).dump()));
  EXPECT_FALSE(back.config.is_planar());
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t k = 0; k < cfg.size(); ++k)
      EXPECT_NEAR(back.config.distance(i, k), cfg.distance(i, k), 1e-15);
}

TEST(ConfigJson, TreeByIndex) {
  auto j = nlohmann::json::parse(R"({"sigma":0.7,"points":[[0,0],[0,1],[0,-1]],
                                     "tree":{"0":[1,2]}})");
  auto f = config_from_json(j);
  EXPECT_TRUE(validate_family(f.config, f.tree));
}

TEST(ConfigJson, Errors) {
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"points":[[0,0]]})")), ConfigurationError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"sigma":0.7})")), ConfigurationError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"sigma":0.7,"points":[[0,0,1]]})")),
               ConfigurationError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(
                   R"({"sigma":0.7,"points":[[0,0],[0,1]],"tree":{"O":["x","y"]}})")),
               ConfigurationError);
  EXPECT_THROW(read_config_file("/nonexistent/config.json"), ConfigurationError);
}
