#pragma once

// JSON form of configurations:
//   {"sigma": s, "points": [[x,y],...] | "distances": [[...],...],
//    "origin": i, "labels": [...], "tree": {"parent": ["c1","c2"], ...}}
// Tree entries may name points by label or by index.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigmaproof/geometry.hpp"

namespace sigmaproof {

struct ConfigFile {
  Configuration config;
  FamilyTree tree;
};

namespace detail {

inline std::size_t resolve_node(const Configuration& cfg, const nlohmann::json& j) {
  if (j.is_number_unsigned()) {
    const auto i = j.get<std::size_t>();
    if (i >= cfg.size()) throw ConfigurationError("tree index out of range");
    return i;
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (auto i = cfg.index_of(s)) return *i;
    // Bare indices written as strings ("3") are accepted too.
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
      const auto i = std::stoul(s);
      if (i < cfg.size()) return i;
    }
    throw ConfigurationError("unknown tree label: " + s);
  }
  throw ConfigurationError("tree node must be a label or an index");
}

}  // namespace detail

inline ConfigFile config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigurationError("configuration must be a JSON object");
  if (!j.contains("sigma")) throw ConfigurationError("missing field: sigma");
  const double sigma = j.at("sigma").get<double>();
  const std::size_t origin = j.value("origin", std::size_t{0});
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();

  const bool has_points = j.contains("points");
  const bool has_dist = j.contains("distances");
  if (has_points == has_dist)
    throw ConfigurationError("exactly one of points or distances is required");

  std::optional<Configuration> cfg;
  if (has_points) {
    std::vector<Point2> pts;
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2) throw ConfigurationError("points must be [x, y] pairs");
      pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    cfg = Configuration::planar(std::move(pts), sigma, origin, std::move(labels));
  } else {
    cfg = Configuration::metric(j.at("distances").get<std::vector<std::vector<double>>>(), sigma,
                                origin, std::move(labels));
  }

  FamilyTree tree;
  if (j.contains("tree")) {
    for (const auto& [parent, kids] : j.at("tree").items()) {
      if (!kids.is_array() || kids.size() != 2)
        throw ConfigurationError("each tree parent needs exactly two children");
      tree.push_back({detail::resolve_node(*cfg, nlohmann::json(parent)),
                      detail::resolve_node(*cfg, kids[0]), detail::resolve_node(*cfg, kids[1])});
    }
  }
  return {std::move(*cfg), std::move(tree)};
}

inline nlohmann::json config_to_json(const Configuration& cfg, const FamilyTree& tree = {}) {
  nlohmann::json j;
  j["sigma"] = cfg.sigma();
  j["labels"] = cfg.labels();
  if (auto o = cfg.origin_index()) j["origin"] = *o;
  if (cfg.is_planar()) {
    auto pts = nlohmann::json::array();
    for (const auto& p : cfg.points()) pts.push_back({p.x, p.y});
    j["points"] = pts;
  } else {
    std::vector<std::vector<double>> m(cfg.size(), std::vector<double>(cfg.size()));
    for (std::size_t i = 0; i < cfg.size(); ++i)
      for (std::size_t k = 0; k < cfg.size(); ++k) m[i][k] = cfg.distance(i, k);
    j["distances"] = m;
  }
  if (!tree.empty()) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& e : tree) t[cfg.label(e.parent)] = {cfg.label(e.child1), cfg.label(e.child2)};
    j["tree"] = t;
  }
  return j;
}

inline ConfigFile read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("bad configuration field: ") + e.what());
  }
}

}  // namespace sigmaproof
