#pragma once

// Leafless, locally finite rooted directed trees given as a finite explicit
// prefix plus implicit infinite single-child rays hanging below selected
// explicit leaves ("ray leaves"). The k-th vertex of the ray below leaf `x`
// is named `x~k` (k >= 1).

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "treeshift/error.hpp"
#include "treeshift/numerics.hpp"

namespace treeshift {

using VertexId = std::string;

inline constexpr char kRaySeparator = '~';
inline constexpr int kMaxHorizon = 1 << 20;

/// Unvalidated description of a tree, as read from a tree file.
struct TreeSpec {
  VertexId root;
  std::vector<std::pair<VertexId, std::vector<VertexId>>> children;
  std::vector<VertexId> ray_leaves;
};

class Tree {
 public:
  struct Node {
    VertexId id;
    std::optional<std::size_t> parent;
    int depth = 0;
    std::vector<std::size_t> children;
    bool ray_leaf = false;
  };

  /// An explicit vertex (`ray_steps == 0`) or the `ray_steps`-th vertex of the
  /// ray below an explicit ray leaf.
  struct Vertex {
    std::size_t base = 0;
    int ray_steps = 0;

    friend bool operator==(const Vertex&, const Vertex&) = default;
  };

  Tree() = default;

  [[nodiscard]] const VertexId& root_id() const { return nodes_.front().id; }
  [[nodiscard]] Vertex root() const { return {0, 0}; }

  /// Explicit vertices in breadth-first order; the root comes first and
  /// siblings keep their listed order.
  [[nodiscard]] std::span<const Node> nodes() const { return nodes_; }
  [[nodiscard]] std::size_t explicit_size() const { return nodes_.size(); }

  [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Resolves explicit or synthetic (`leaf~k`) identifiers.
  [[nodiscard]] Vertex resolve(std::string_view id) const {
    if (auto idx = find(id)) return {*idx, 0};
    const auto sep = id.rfind(kRaySeparator);
    if (sep != std::string_view::npos && sep + 1 < id.size()) {
      int steps = 0;
      const auto digits = id.substr(sep + 1);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), steps);
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && steps >= 1) {
        if (auto base = find(id.substr(0, sep)); base && nodes_[*base].ray_leaf) {
          return {*base, steps};
        }
      }
    }
    throw Error(Errc::UnknownVertex, "no vertex named '" + std::string(id) + "'");
  }

  [[nodiscard]] VertexId name(Vertex v) const {
    if (v.ray_steps == 0) return nodes_[v.base].id;
    return nodes_[v.base].id + kRaySeparator + std::to_string(v.ray_steps);
  }

  [[nodiscard]] int depth(Vertex v) const { return nodes_[v.base].depth + v.ray_steps; }

  [[nodiscard]] bool on_ray(Vertex v) const { return v.ray_steps > 0 || nodes_[v.base].ray_leaf; }

  [[nodiscard]] std::size_t child_count(Vertex v) const {
    return on_ray(v) ? 1 : nodes_[v.base].children.size();
  }

  [[nodiscard]] std::vector<Vertex> children(Vertex v) const {
    if (on_ray(v)) return {Vertex{v.base, v.ray_steps + 1}};
    std::vector<Vertex> out;
    out.reserve(nodes_[v.base].children.size());
    for (auto c : nodes_[v.base].children) out.push_back({c, 0});
    return out;
  }

  [[nodiscard]] std::optional<Vertex> parent(Vertex v) const {
    if (v.ray_steps > 0) return Vertex{v.base, v.ray_steps - 1};
    if (auto p = nodes_[v.base].parent) return Vertex{*p, 0};
    return std::nullopt;
  }

  /// card(sib(v)); zero for the root.
  [[nodiscard]] std::size_t sibling_count(Vertex v) const {
    auto p = parent(v);
    return p ? child_count(*p) : 0;
  }

  friend Tree build_tree(const TreeSpec& spec);

 private:
  std::vector<Node> nodes_;
  std::unordered_map<VertexId, std::size_t> index_;
};

inline void validate_vertex_id(std::string_view id) {
  if (id.empty() || id.find(kRaySeparator) != std::string_view::npos) {
    throw Error(Errc::InvalidVertexId,
                "vertex ids must be nonempty and must not contain '~': '" + std::string(id) + "'");
  }
}

inline Tree build_tree(const TreeSpec& spec) {
  std::vector<VertexId> ids;
  std::unordered_map<VertexId, std::size_t> index;
  auto intern = [&](const VertexId& id) {
    validate_vertex_id(id);
    auto [it, inserted] = index.try_emplace(id, ids.size());
    if (inserted) ids.push_back(id);
    return it->second;
  };

  intern(spec.root);
  for (const auto& [p, kids] : spec.children) {
    intern(p);
    for (const auto& c : kids) intern(c);
  }
  std::unordered_set<std::size_t> rays;
  for (const auto& r : spec.ray_leaves) rays.insert(intern(r));

  const std::size_t n = ids.size();
  std::vector<std::optional<std::size_t>> parent(n);
  std::vector<std::vector<std::size_t>> kids_of(n);
  for (const auto& [p, kids] : spec.children) {
    const auto pi = index.at(p);
    for (const auto& c : kids) {
      const auto ci = index.at(c);
      if (ci == pi) throw Error(Errc::CircuitDetected, "self-loop at '" + c + "'");
      if (parent[ci]) throw Error(Errc::MultipleParents, "vertex '" + c + "' has more than one parent");
      parent[ci] = pi;
      kids_of[pi].push_back(ci);
    }
  }

  // Every vertex has at most one parent, so a circuit shows up as a repeated
  // vertex while walking parent links.
  std::vector<int> state(n, 0);  // 0 unseen, 1 on current walk, 2 done
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> walk;
    std::optional<std::size_t> cur = s;
    while (cur && state[*cur] == 0) {
      state[*cur] = 1;
      walk.push_back(*cur);
      cur = parent[*cur];
    }
    if (cur && state[*cur] == 1) {
      throw Error(Errc::CircuitDetected, "circuit through '" + ids[*cur] + "'");
    }
    for (auto w : walk) state[w] = 2;
  }

  const std::size_t root = 0;
  if (parent[root]) {
    throw Error(Errc::MultipleRoots, "declared root '" + ids[root] + "' has a parent");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!parent[i]) {
      throw Error(Errc::MultipleRoots, "'" + ids[i] + "' has no parent but is not the root");
    }
  }

  Tree t;
  std::vector<std::size_t> order{root};
  std::vector<std::size_t> bfs_index(n, n);
  bfs_index[root] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (auto c : kids_of[order[head]]) {
      bfs_index[c] = order.size();
      order.push_back(c);
    }
  }
  if (order.size() != n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (bfs_index[i] == n) {
        throw Error(Errc::Disconnected, "'" + ids[i] + "' is not reachable from the root");
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const bool is_ray = rays.contains(i);
    if (is_ray && !kids_of[i].empty()) {
      throw Error(Errc::RayLeafHasChildren, "ray leaf '" + ids[i] + "' has explicit children");
    }
    if (!is_ray && kids_of[i].empty()) {
      throw Error(Errc::LeafWithoutRay, "'" + ids[i] + "' has no children and is not a ray leaf");
    }
  }

  t.nodes_.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const auto orig = order[pos];
    auto& node = t.nodes_[pos];
    node.id = ids[orig];
    node.ray_leaf = rays.contains(orig);
    if (parent[orig]) {
      node.parent = bfs_index[*parent[orig]];
      node.depth = t.nodes_[*node.parent].depth + 1;
    }
    for (auto c : kids_of[orig]) node.children.push_back(bfs_index[c]);
    t.index_.emplace(node.id, pos);
  }
  return t;
}

inline void check_horizon(int horizon) {
  if (horizon < 0 || horizon > kMaxHorizon) {
    throw Error(Errc::HorizonExceeded,
                "horizon " + std::to_string(horizon) + " outside [0, " + std::to_string(kMaxHorizon) + "]");
  }
}

/// Vertices of depth n in tree order, ray vertices included.
inline std::vector<Tree::Vertex> generation_vertices(const Tree& t, int n) {
  std::vector<Tree::Vertex> gen{t.root()};
  for (int d = 0; d < n; ++d) {
    std::vector<Tree::Vertex> next;
    for (auto v : gen) {
      auto c = t.children(v);
      next.insert(next.end(), c.begin(), c.end());
    }
    gen = std::move(next);
  }
  return gen;
}

inline std::vector<VertexId> generation(const Tree& t, int n, int horizon) {
  check_horizon(horizon);
  if (n < 0 || n > horizon) {
    throw Error(Errc::HorizonExceeded,
                "generation " + std::to_string(n) + " beyond horizon " + std::to_string(horizon));
  }
  std::vector<VertexId> out;
  for (auto v : generation_vertices(t, n)) out.push_back(t.name(v));
  return out;
}

struct BranchingVertex {
  VertexId vertex;
  int child_count;
  int depth;

  friend bool operator==(const BranchingVertex&, const BranchingVertex&) = default;
};

/// Vertices with at least two children. Rays never branch, so scanning the
/// explicit prefix is exhaustive.
inline std::vector<BranchingVertex> branching_vertices(const Tree& t) {
  std::vector<BranchingVertex> out;
  for (const auto& node : t.nodes()) {
    if (node.children.size() >= 2) {
      out.push_back({node.id, static_cast<int>(node.children.size()), node.depth});
    }
  }
  return out;
}

/// 0 without branching vertices, else 1 + the largest branching depth.
inline int branching_index(const Tree& t) {
  int k = 0;
  for (const auto& b : branching_vertices(t)) k = std::max(k, b.depth + 1);
  return k;
}

/// s_{l,v} = card(sib(par^l(v))), defined for 0 <= l < depth(v).
inline std::size_t sibling_count_chain(const Tree& t, Tree::Vertex v, int l) {
  if (l < 0 || l >= t.depth(v)) {
    throw Error(Errc::AncestorOutOfRange, "ancestor " + std::to_string(l) + " of '" + t.name(v) +
                                              "' is the root or does not exist");
  }
  for (int i = 0; i < l; ++i) v = *t.parent(v);
  return t.sibling_count(v);
}

inline std::size_t sibling_count_chain(const Tree& t, std::string_view v, int l) {
  return sibling_count_chain(t, t.resolve(v), l);
}

/// sum over u in Chi^k(v) of prod_{l<k} 1/s_{l,u}; equals 1 on every tree.
inline Rational card_identity_sum(const Tree& t, Tree::Vertex v, int k) {
  std::vector<Tree::Vertex> layer{v};
  for (int i = 0; i < k; ++i) {
    std::vector<Tree::Vertex> next;
    for (auto u : layer) {
      auto c = t.children(u);
      next.insert(next.end(), c.begin(), c.end());
    }
    layer = std::move(next);
  }
  Rational sum = 0;
  for (auto u : layer) {
    BigInt den = 1;
    for (int l = 0; l < k; ++l) den *= sibling_count_chain(t, u, l);
    sum += Rational(BigInt(1), den);
  }
  return sum;
}

struct DepthProfile {
  std::map<int, int> entries;  // nonzero entries only
  int horizon = 0;
  bool exact_beyond_horizon = false;

  [[nodiscard]] int at(int n) const {
    auto it = entries.find(n);
    return it == entries.end() ? 0 : it->second;
  }

  [[nodiscard]] int total() const {
    int s = 0;
    for (const auto& [n, e] : entries) s += e;
    return s;
  }
};

/// n -> sum over branching v at depth n of (card(Chi(v)) - 1), for n <= horizon.
inline DepthProfile depth_profile(const Tree& t, int horizon) {
  check_horizon(horizon);
  DepthProfile p;
  p.horizon = horizon;
  int deepest = -1;
  for (const auto& b : branching_vertices(t)) {
    deepest = std::max(deepest, b.depth);
    if (b.depth <= horizon) p.entries[b.depth] += b.child_count - 1;
  }
  p.exact_beyond_horizon = horizon >= deepest;
  return p;
}

/// AHU-style code of the tree cut at depth `horizon`: each vertex is
/// "(" + sorted child codes + ")". Equal codes iff isomorphic truncations.
inline std::string canonical_form(const Tree& t, int horizon) {
  check_horizon(horizon);
  // Codes of the ray stubs only depend on how many levels remain.
  auto chain = [](int levels) {
    return std::string(static_cast<std::size_t>(levels) + 1, '(') +
           std::string(static_cast<std::size_t>(levels) + 1, ')');
  };
  std::vector<std::string> code(t.explicit_size());
  const auto nodes = t.nodes();
  for (std::size_t i = nodes.size(); i-- > 0;) {
    const auto& node = nodes[i];
    if (node.depth > horizon) continue;
    if (node.ray_leaf) {
      code[i] = chain(horizon - node.depth);
      continue;
    }
    if (node.depth == horizon) {
      code[i] = "()";
      continue;
    }
    std::vector<std::string> kids;
    kids.reserve(node.children.size());
    for (auto c : node.children) kids.push_back(std::move(code[c]));
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (auto& k : kids) s += k;
    s += ')';
    code[i] = std::move(s);
  }
  return code[0];
}

/// Vertices of depth <= D with dense indices; the coordinate space on which
/// truncated operators act.
class Truncation {
 public:
  struct Site {
    VertexId id;
    Tree::Vertex vertex;
    std::optional<std::size_t> parent;
    int depth = 0;
    std::vector<std::size_t> children;  // empty at depth D
    std::size_t child_count = 0;        // in the full tree
    std::size_t sibling_count = 0;
  };

  Truncation(const Tree& tree, int depth_limit) : depth_limit_(depth_limit) {
    if (depth_limit < 0 || depth_limit > kMaxHorizon) {
      throw Error(Errc::InvalidHorizon, "truncation depth " + std::to_string(depth_limit));
    }
    sites_.push_back(make_site(tree, tree.root(), std::nullopt, 0));
    for (std::size_t head = 0; head < sites_.size(); ++head) {
      if (sites_[head].depth == depth_limit) continue;
      const auto kids = tree.children(sites_[head].vertex);
      for (auto c : kids) {
        const auto idx = sites_.size();
        sites_.push_back(make_site(tree, c, head, sites_[head].depth + 1));
        sites_[head].children.push_back(idx);
      }
    }
    for (std::size_t i = 0; i < sites_.size(); ++i) index_.emplace(sites_[i].id, i);
  }

  [[nodiscard]] int depth_limit() const noexcept { return depth_limit_; }
  [[nodiscard]] std::size_t size() const noexcept { return sites_.size(); }
  [[nodiscard]] const Site& site(std::size_t i) const { return sites_[i]; }
  [[nodiscard]] std::span<const Site> sites() const { return sites_; }

  [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] std::size_t index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw Error(Errc::UnknownVertex,
                "'" + std::string(id) + "' is not a vertex within depth " + std::to_string(depth_limit_));
  }

 private:
  static Site make_site(const Tree& t, Tree::Vertex v, std::optional<std::size_t> parent, int depth) {
    return Site{t.name(v), v, parent, depth, {}, t.child_count(v), t.sibling_count(v)};
  }

  int depth_limit_;
  std::vector<Site> sites_;
  std::unordered_map<VertexId, std::size_t> index_;
};

}  // namespace treeshift
