#pragma once

// Tree files:
//   {"root": "<id>", "children": {"<id>": ["<id>", ...], ...}, "ray_leaves": ["<id>", ...]}
// Unknown keys are rejected. "children" and "ray_leaves" may be omitted.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "treeshift/error.hpp"
#include "treeshift/tree.hpp"

namespace treeshift {

inline TreeSpec parse_tree_spec(const nlohmann::json& j) {
  auto malformed = [](const std::string& why) { return Error(Errc::MalformedInput, why); };
  if (!j.is_object()) throw malformed("tree file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "root" && key != "children" && key != "ray_leaves") {
      throw malformed("unknown key '" + key + "'");
    }
  }
  if (!j.contains("root") || !j.at("root").is_string()) throw malformed("'root' must be a string");

  auto id_of = [&](const nlohmann::json& v) {
    if (!v.is_string()) throw malformed("vertex ids must be strings");
    auto id = v.get<std::string>();
    if (id.empty() || id.find(kRaySeparator) != std::string::npos) {
      throw malformed("invalid vertex id '" + id + "'");
    }
    return id;
  };

  TreeSpec spec;
  spec.root = id_of(j.at("root"));
  if (j.contains("children")) {
    const auto& ch = j.at("children");
    if (!ch.is_object()) throw malformed("'children' must be an object");
    for (const auto& [parent, kids] : ch.items()) {
      if (!kids.is_array()) throw malformed("children of '" + parent + "' must be an array");
      std::vector<VertexId> list;
      for (const auto& k : kids) list.push_back(id_of(k));
      spec.children.emplace_back(id_of(nlohmann::json(parent)), std::move(list));
    }
  }
  if (j.contains("ray_leaves")) {
    const auto& rl = j.at("ray_leaves");
    if (!rl.is_array()) throw malformed("'ray_leaves' must be an array");
    for (const auto& r : rl) spec.ray_leaves.push_back(id_of(r));
  }
  return spec;
}

inline TreeSpec parse_tree_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::MalformedInput, e.what());
  }
  return parse_tree_spec(j);
}

inline TreeSpec read_tree_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::MalformedInput, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tree_spec(ss.str());
}

inline Tree load_tree(const std::string& path) { return build_tree(read_tree_spec(path)); }

/// Normalized file form: explicit children lists in their stored order,
/// ray leaves sorted.
inline nlohmann::json tree_to_json(const Tree& t) {
  nlohmann::json children = nlohmann::json::object();
  std::vector<std::string> rays;
  for (const auto& node : t.nodes()) {
    if (!node.children.empty()) {
      auto arr = nlohmann::json::array();
      for (auto c : node.children) arr.push_back(t.nodes()[c].id);
      children[node.id] = std::move(arr);
    }
    if (node.ray_leaf) rays.push_back(node.id);
  }
  std::sort(rays.begin(), rays.end());
  return {{"root", t.root_id()}, {"children", children}, {"ray_leaves", rays}};
}

}  // namespace treeshift
