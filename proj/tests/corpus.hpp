#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "treeshift/tree.hpp"

namespace corpus {

using treeshift::Tree;
using treeshift::TreeSpec;

inline Tree make(const std::string& root, std::vector<std::pair<std::string, std::vector<std::string>>> children,
                 std::vector<std::string> rays) {
  return treeshift::build_tree(TreeSpec{root, std::move(children), std::move(rays)});
}

inline Tree line() { return make("r", {}, {"r"}); }
inline Tree fork2() { return make("r", {{"r", {"a", "b"}}}, {"a", "b"}); }
inline Tree fork3() { return make("r", {{"r", {"a", "b", "c"}}}, {"a", "b", "c"}); }
// branching at depths 0 and 1; profile {0:1, 1:1}
inline Tree branch_0_1() { return make("r", {{"r", {"a", "b"}}, {"a", {"c", "d"}}}, {"b", "c", "d"}); }
// branching at depths 1 and 3; profile {1:1, 3:1}
inline Tree branch_1_3() {
  return make("r", {{"r", {"a"}}, {"a", {"b", "c"}}, {"b", {"d"}}, {"d", {"e", "f"}}}, {"c", "e", "f"});
}

struct Named {
  std::string name;
  Tree tree;
};

inline std::vector<Named> all() {
  return {{"line", line()}, {"fork2", fork2()}, {"fork3", fork3()}, {"branch_0_1", branch_0_1()},
          {"branch_1_3", branch_1_3()}};
}

// Equal depth profiles {0:1, 1:2}, different shapes.
inline Tree twin_a() { return make("r", {{"r", {"a", "b"}}, {"a", {"c", "d", "e"}}}, {"b", "c", "d", "e"}); }
inline Tree twin_b() {
  return make("r", {{"r", {"a", "b"}}, {"a", {"c", "d"}}, {"b", {"e", "f"}}}, {"c", "d", "e", "f"});
}

/// Random tree with branching confined to depth < max_depth, every explicit
/// vertex either branching into 1..max_children children or ending in a ray.
inline Tree random_tree(std::mt19937_64& rng, int max_depth, int max_children) {
  std::uniform_int_distribution<int> kids(1, max_children);
  std::bernoulli_distribution stop(0.35);
  std::vector<std::pair<std::string, std::vector<std::string>>> children;
  std::vector<std::string> rays;
  std::vector<std::pair<std::string, int>> frontier{{"v0", 0}};
  int next = 1;
  while (!frontier.empty()) {
    auto [id, depth] = frontier.back();
    frontier.pop_back();
    if (depth >= max_depth || stop(rng)) {
      rays.push_back(id);
      continue;
    }
    std::vector<std::string> list;
    const int c = kids(rng);
    for (int i = 0; i < c; ++i) {
      list.push_back("v" + std::to_string(next++));
      frontier.emplace_back(list.back(), depth + 1);
    }
    children.emplace_back(id, std::move(list));
  }
  return make("v0", std::move(children), std::move(rays));
}

}  // namespace corpus
