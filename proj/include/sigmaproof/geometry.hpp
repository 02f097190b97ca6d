#pragma once

// Point configurations, pair sets of the stability relation, generation
// families and the reduced first-generation search region.

#include <algorithm>
#include <array>
#include <initializer_list>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sigmaproof {

// Additive tolerance used by every tolerant comparison in the library.
inline constexpr double kEps = 1e-5;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Point2&) const = default;
};

inline double norm(Point2 p) { return std::sqrt(p.x * p.x + p.y * p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

// Anything the objective can be evaluated on: a finite set of points with a
// distance oracle, the distance of each point from the origin, and sigma.
template <class S>
concept PointSet = requires(const S& s, std::size_t i, std::size_t j) {
  { s.size() } -> std::convertible_to<std::size_t>;
  { s.distance(i, j) } -> std::convertible_to<double>;
  { s.norm(i) } -> std::convertible_to<double>;
  { s.sigma() } -> std::convertible_to<double>;
};

class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A labeled point set together with sigma and a distinguished origin.
//
// Planar configurations store coordinates and derive Euclidean distances;
// metric configurations store an explicit distance matrix. In both modes the
// "norm" of a point is its distance from the origin point. Coincident points
// are allowed.
class Configuration {
 public:
  static Configuration planar(std::vector<Point2> points, double sigma,
                              std::size_t origin = 0,
                              std::vector<std::string> labels = {}) {
    Configuration c;
    c.sigma_ = sigma;
    c.points_ = std::move(points);
    const std::size_t n = c.points_.size();
    c.labels_ = default_labels(std::move(labels), n);
    if (n > 0) {
      if (origin >= n) throw ConfigurationError("origin index out of range");
      if (c.points_[origin] != Point2{0.0, 0.0})
        throw ConfigurationError("planar origin point must be (0,0)");
      c.origin_ = origin;
    }
    for (const auto& p : c.points_)
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw ConfigurationError("non-finite coordinate");
    c.dist_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        c.dist_[i * n + j] = sigmaproof::distance(c.points_[i], c.points_[j]);
    c.norms_.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.norms_[i] = sigmaproof::norm(c.points_[i]);
    c.check_sigma();
    return c;
  }

  static Configuration metric(const std::vector<std::vector<double>>& matrix, double sigma,
                              std::size_t origin = 0, std::vector<std::string> labels = {},
                              double eps = kEps) {
    Configuration c;
    c.planar_ = false;
    c.sigma_ = sigma;
    const std::size_t n = matrix.size();
    c.labels_ = default_labels(std::move(labels), n);
    c.dist_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (matrix[i].size() != n) throw ConfigurationError("distance matrix is not square");
      for (std::size_t j = 0; j < n; ++j) {
        const double d = matrix[i][j];
        if (!std::isfinite(d) || d < 0.0) throw ConfigurationError("invalid distance entry");
        c.dist_[i * n + j] = d;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (c.dist_[i * n + i] != 0.0) throw ConfigurationError("nonzero diagonal");
      for (std::size_t j = 0; j < n; ++j) {
        if (c.dist_[i * n + j] != c.dist_[j * n + i])
          throw ConfigurationError("distance matrix is not symmetric");
        for (std::size_t k = 0; k < n; ++k)
          if (c.dist_[i * n + k] > c.dist_[i * n + j] + c.dist_[j * n + k] + eps)
            throw ConfigurationError("triangle inequality violated");
      }
    }
    if (n > 0) {
      if (origin >= n) throw ConfigurationError("origin index out of range");
      c.origin_ = origin;
      c.norms_.resize(n);
      for (std::size_t i = 0; i < n; ++i) c.norms_[i] = c.dist_[i * n + origin];
    }
    c.check_sigma();
    return c;
  }

  std::size_t size() const { return labels_.size(); }
  double sigma() const { return sigma_; }
  bool is_planar() const { return planar_; }
  std::optional<std::size_t> origin_index() const { return origin_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  const std::vector<Point2>& points() const {
    if (!is_planar()) throw ConfigurationError("metric configuration has no coordinates");
    return points_;
  }

  double distance(std::size_t i, std::size_t j) const {
    const std::size_t n = size();
    if (i >= n || j >= n) throw std::out_of_range("point index out of range");
    return dist_[i * n + j];
  }

  // Distance from the origin point.
  double norm(std::size_t i) const {
    if (i >= size()) throw std::out_of_range("point index out of range");
    return norms_[i];
  }

  std::optional<std::size_t> index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  Configuration with_sigma(double sigma) const {
    Configuration c = *this;
    c.sigma_ = sigma;
    c.check_sigma();
    return c;
  }

  // Sub-configuration on the given indices (in that order). Norms are kept
  // relative to the original origin even when the origin is dropped.
  Configuration subset(std::span<const std::size_t> idx) const {
    Configuration c;
    c.planar_ = planar_;
    c.sigma_ = sigma_;
    const std::size_t n = size();
    const std::size_t m = idx.size();
    for (std::size_t i : idx)
      if (i >= n) throw std::out_of_range("point index out of range");
    c.labels_.reserve(m);
    for (std::size_t i : idx) c.labels_.push_back(labels_[i]);
    if (is_planar())
      for (std::size_t i : idx) c.points_.push_back(points_[i]);
    c.dist_.resize(m * m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) c.dist_[a * m + b] = dist_[idx[a] * n + idx[b]];
    for (std::size_t i : idx) c.norms_.push_back(norms_[i]);
    for (std::size_t a = 0; a < m; ++a)
      if (origin_ && idx[a] == *origin_) {
        c.origin_ = a;
        break;
      }
    return c;
  }

 private:
  Configuration() = default;

  static std::vector<std::string> default_labels(std::vector<std::string> labels, std::size_t n) {
    if (labels.empty()) {
      labels.reserve(n);
      for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
    }
    if (labels.size() != n) throw ConfigurationError("label count does not match point count");
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigurationError("duplicate label");
    return labels;
  }

  void check_sigma() const {
    if (!(sigma_ >= 0.5 && sigma_ <= 1.0)) throw ConfigurationError("sigma must lie in [1/2, 1]");
  }

  std::vector<std::string> labels_;
  std::vector<Point2> points_;
  std::vector<double> dist_;
  std::vector<double> norms_;
  double sigma_ = 0.5;
  std::optional<std::size_t> origin_;
  bool planar_ = true;
};

// Fixed-capacity planar set for hot loops: no allocation, origin at (0,0).
template <std::size_t Capacity>
class SmallPlanarSet {
 public:
  SmallPlanarSet(double sigma, std::initializer_list<Point2> pts) : sigma_(sigma) {
    for (const auto& p : pts) push_back(p);
  }
  explicit SmallPlanarSet(double sigma) : sigma_(sigma) {}

  void push_back(Point2 p) {
    if (n_ == Capacity) throw std::length_error("SmallPlanarSet capacity exceeded");
    pts_[n_++] = p;
  }

  std::size_t size() const { return n_; }
  double sigma() const { return sigma_; }
  Point2 operator[](std::size_t i) const { return pts_[i]; }
  double distance(std::size_t i, std::size_t j) const {
    return sigmaproof::distance(pts_[i], pts_[j]);
  }
  double norm(std::size_t i) const { return sigmaproof::norm(pts_[i]); }

 private:
  std::array<Point2, Capacity> pts_{};
  std::size_t n_ = 0;
  double sigma_;
};

// (q1, q2) belongs to the pair set of `parent` at `radius`: both points in the
// closed ball and at mutual distance at least 2*sigma*radius. Comparisons are
// relaxed by eps in the permissive direction.
template <PointSet S>
bool in_delta(const S& cfg, std::size_t q1, std::size_t q2, std::size_t parent, double radius,
              double eps = kEps) {
  const double s = cfg.sigma();
  return cfg.distance(q1, parent) <= radius + eps && cfg.distance(q2, parent) <= radius + eps &&
         cfg.distance(q1, q2) + eps >= 2.0 * s * radius;
}

struct FamilyEdge {
  std::size_t parent;
  std::size_t child1;
  std::size_t child2;
};

using FamilyTree = std::vector<FamilyEdge>;

// Generation depth k such that the configuration, organised by `tree`, is a
// member of the k-th generation family; nullopt when it is not a member.
//
// Throws ConfigurationError on a malformed tree (index out of range, a parent
// listed twice, a node listed as a child twice, a cycle).
inline std::optional<std::size_t> family_generation(const Configuration& cfg,
                                                    const FamilyTree& tree, double eps = kEps) {
  const std::size_t n = cfg.size();
  if (n == 0) return std::nullopt;
  const auto root = cfg.origin_index();
  if (!root) return std::nullopt;

  std::vector<int> parent_of(n, -1);
  std::vector<int> edge_of(n, -1);
  for (std::size_t e = 0; e < tree.size(); ++e) {
    const auto& [p, c1, c2] = tree[e];
    if (p >= n || c1 >= n || c2 >= n) throw ConfigurationError("tree index out of range");
    if (c1 == c2 || c1 == p || c2 == p) throw ConfigurationError("degenerate tree edge");
    if (edge_of[p] != -1) throw ConfigurationError("parent listed twice");
    edge_of[p] = static_cast<int>(e);
    for (std::size_t c : {c1, c2}) {
      if (parent_of[c] != -1) throw ConfigurationError("child listed twice");
      parent_of[c] = static_cast<int>(p);
    }
  }
  if (parent_of[*root] != -1) return std::nullopt;

  // Breadth-first depths from the root; unreachable nodes fail membership.
  std::vector<int> depth(n, -1);
  depth[*root] = 0;
  std::vector<std::size_t> frontier{*root};
  std::size_t visited = 1;
  while (!frontier.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : frontier) {
      if (edge_of[p] < 0) continue;
      const auto& e = tree[static_cast<std::size_t>(edge_of[p])];
      for (std::size_t c : {e.child1, e.child2}) {
        if (depth[c] != -1) throw ConfigurationError("tree contains a cycle");
        depth[c] = depth[p] + 1;
        next.push_back(c);
        ++visited;
      }
    }
    frontier = std::move(next);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (depth[i] < 0 && (edge_of[i] >= 0 || parent_of[i] >= 0))
      throw ConfigurationError("tree contains a cycle or a detached edge");
  if (visited != n) return std::nullopt;

  const int k = *std::max_element(depth.begin(), depth.end());
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_children = edge_of[i] >= 0;
    if (depth[i] < k && !has_children) return std::nullopt;
  }
  for (const auto& [p, c1, c2] : tree)
    if (!in_delta(cfg, c1, c2, p, 1.0, eps)) return std::nullopt;
  return static_cast<std::size_t>(k);
}

inline bool validate_family(const Configuration& cfg, const FamilyTree& tree, double eps = kEps) {
  return family_generation(cfg, tree, eps).has_value();
}

// Membership of (p1, p2) in the reduced first-generation region, with the
// per-constraint slack of a lattice of step `slack`: half the step on the
// coordinate bounds, sqrt(2) times the step on norm comparisons, plus eps on
// every comparison.
inline bool omega_membership(Point2 p1, Point2 p2, double sigma, double slack, double eps = kEps) {
  const auto le = [eps](double a, double b, double lip) { return a <= b + lip + eps; };
  const double coord = slack / 2.0;
  const double lip = std::sqrt(2.0) * slack;
  return std::abs(p1.x) <= eps && le(0.0, p1.y, coord) && le(p1.y, 1.0, coord) &&
         le(norm(p2), norm(p1), lip) && le(2.0 * sigma, norm(p1 - p2), lip) &&
         le(0.0, p2.x, coord);
}

}  // namespace sigmaproof
