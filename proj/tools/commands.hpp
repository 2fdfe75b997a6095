#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "report.hpp"
#include "treeshift/treeshift.hpp"

namespace treeshift::cli {

struct Options {
  std::string command;
  std::vector<std::string> files;
  int q = 2;
  std::optional<int> horizon;
  std::optional<int> verify_depth;
  std::optional<std::string> vertex;
  int kmax = 6;
  std::string kind = "dirichlet";
  std::string suite;
  std::string format = "json";
  std::uint64_t seed = kDefaultSeed;
};

struct Outcome {
  int exit_code = 0;
  std::string output;
};

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;  // not equivalent / failed assertion
inline constexpr int kMalformed = 2;
inline constexpr int kInvariant = 3;
}  // namespace exit_code

inline int exit_code_for(Errc e) {
  switch (e) {
    case Errc::CircuitDetected:
    case Errc::MultipleParents:
    case Errc::MultipleRoots:
    case Errc::LeafWithoutRay:
    case Errc::Disconnected:
    case Errc::RayLeafHasChildren:
    case Errc::InvalidVertexId:
      return exit_code::kInvariant;
    default:
      return exit_code::kMalformed;
  }
}

inline Json error_report(const std::string& command, const Error& e) {
  Json r = base_report(command);
  r["error"] = {{"code", std::string(errc_name(e.code()))}, {"message", e.what()}};
  return r;
}

inline Json tree_input(const std::string& path, const Tree& t) {
  return {{"path", path}, {"sha256", tree_hash(t)}};
}

inline void require_files(const Options& o, std::size_t n) {
  if (o.files.size() != n) {
    throw Error(Errc::MalformedInput, o.command + " expects " + std::to_string(n) + " tree file(s)");
  }
}

inline void require_json_only(const Options& o) {
  if (o.format != "json") throw Error(Errc::MalformedInput, "csv output is only available for moments and profile");
}

inline Outcome cmd_validate(const Options& o) {
  require_files(o, 1);
  require_json_only(o);
  const Tree t = load_tree(o.files[0]);
  Json branching = Json::array();
  for (const auto& b : branching_vertices(t)) {
    branching.push_back({{"vertex", b.vertex}, {"children", b.child_count}, {"depth", b.depth}});
  }
  std::size_t rays = 0;
  for (const auto& n : t.nodes()) rays += n.ray_leaf ? 1 : 0;

  Json r = base_report("validate");
  r["inputs"] = {{"trees", Json::array({tree_input(o.files[0], t)})}};
  r["results"] = {{"root", t.root_id()},
                  {"explicit_vertices", t.explicit_size()},
                  {"ray_leaves", rays},
                  {"branching_vertices", branching},
                  {"branching_index", branching_index(t)},
                  {"leafless", true},
                  {"locally_finite", true}};
  r["exact"] = true;
  return {exit_code::kOk, render(r)};
}

inline Outcome cmd_profile(const Options& o) {
  require_files(o, 1);
  const Tree t = load_tree(o.files[0]);
  const int horizon = o.horizon.value_or(branching_index(t));
  const auto p = depth_profile(t, horizon);
  const int cokernel = cokernel_dimension(t);
  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "depth,entry\n";
    for (const auto& [n, e] : p.entries) csv << n << ',' << e << '\n';
    return {exit_code::kOk, csv.str()};
  }
  require_json_only(o);
  Json r = base_report("profile");
  r["inputs"] = {{"trees", Json::array({tree_input(o.files[0], t)})}, {"horizon", horizon}};
  r["results"] = {{"profile", profile_json(p)}, {"cokernel_dim", cokernel}, {"exact", p.exact_beyond_horizon}};
  r["exact"] = p.exact_beyond_horizon;
  return {exit_code::kOk, render(r)};
}

inline Outcome cmd_equiv(const Options& o) {
  require_files(o, 2);
  require_json_only(o);
  const Tree t1 = load_tree(o.files[0]);
  const Tree t2 = load_tree(o.files[1]);
  const int deepest = std::max(branching_index(t1), branching_index(t2));
  const int horizon = o.horizon.value_or(deepest);
  const auto v = decide_equivalence(t1, t2, o.q, horizon);

  Json res = {{"verdict", verdict_name(v.result)},
              {"certainty", certainty_name(v.certainty)},
              {"witness_generation", v.witness_generation ? Json(*v.witness_generation) : Json(nullptr)},
              {"profiles", Json::array({profile_json(v.profile1), profile_json(v.profile2)})},
              {"cokernel_dims", Json::array({v.cokernel1, v.cokernel2})},
              {"isomorphic_to_horizon", canonical_form(t1, deepest) == canonical_form(t2, deepest)}};
  Json inputs = {{"trees", Json::array({tree_input(o.files[0], t1), tree_input(o.files[1], t2)})},
                 {"q", o.q},
                 {"horizon", horizon}};
  if (o.verify_depth) {
    inputs["verify_depth"] = *o.verify_depth;
    inputs["seed"] = o.seed;
    if (v.unitary) {
      const auto rep = verify_intertwining(t1, t2, o.q, *v.unitary, *o.verify_depth, o.seed);
      res["intertwining"] = {{"residual", rep.residual},
                             {"norm_defect", rep.norm_defect},
                             {"orbit_ratio_deviation", rep.max_ratio_deviation},
                             {"test_vectors", rep.test_vectors},
                             {"unitary_dimension", v.unitary->dimension()}};
    } else {
      res["intertwining"] = nullptr;
    }
  }
  Json r = base_report("equiv");
  r["inputs"] = inputs;
  r["results"] = res;
  r["exact"] = v.certainty == Certainty::Exact;
  const int code = v.result == Verdict::NotEquivalent ? exit_code::kNegative : exit_code::kOk;
  return {code, render(r)};
}

inline ShiftKind parse_kind(const std::string& kind) {
  if (kind == "dirichlet") return ShiftKind::Dirichlet;
  if (kind == "dual") return ShiftKind::CauchyDual;
  throw Error(Errc::MalformedInput, "unknown kind '" + kind + "'");
}

inline Outcome cmd_moments(const Options& o) {
  require_files(o, 1);
  const Tree t = load_tree(o.files[0]);
  const ShiftKind kind = parse_kind(o.kind);
  const VertexId vertex = o.vertex.value_or(t.root_id());
  const int depth = t.depth(t.resolve(vertex));
  if (o.kmax < 0) throw Error(Errc::DomainError, "kmax must be nonnegative");
  const int horizon = o.horizon.value_or(depth + o.kmax);
  const auto s = make_shift(t, o.q, kind, std::max(horizon, 1));

  std::vector<Rational> exact;
  for (int k = 0; k <= o.kmax; ++k) exact.push_back(moment(s, vertex, k));

  const bool oracle_ran = depth + o.kmax <= horizon;
  double max_rel = 0.0;
  if (oracle_ran) {
    for (int k = 0; k <= o.kmax; ++k) {
      const double m = moment_via_matrix(s, vertex, k);
      const double e = to_double(exact[static_cast<std::size_t>(k)]);
      max_rel = std::max(max_rel, std::abs(m - e) / std::abs(e));
    }
  }
  constexpr double kTolerance = 1e-10;

  if (o.format == "csv") {
    std::ostringstream csv;
    csv << "k,moment\n";
    for (std::size_t k = 0; k < exact.size(); ++k) csv << k << ',' << to_string(exact[k]) << '\n';
    return {exit_code::kOk, csv.str()};
  }
  require_json_only(o);
  Json moments = Json::array();
  for (const auto& m : exact) moments.push_back(rational_json(m));
  Json r = base_report("moments");
  r["inputs"] = {{"trees", Json::array({tree_input(o.files[0], t)})},
                 {"q", o.q},
                 {"horizon", horizon},
                 {"vertex", vertex},
                 {"kmax", o.kmax},
                 {"kind", o.kind}};
  r["results"] = {{"vertex_depth", depth},
                  {"moments", moments},
                  {"float_check",
                   {{"ran", oracle_ran},
                    {"max_relative_error", oracle_ran ? Json(max_rel) : Json(nullptr)},
                    {"passed", oracle_ran ? Json(max_rel <= kTolerance) : Json(nullptr)}}}};
  r["exact"] = true;
  return {exit_code::kOk, render(r)};
}

// ---------------------------------------------------------------------------
// checks

struct Assertions {
  Json list = Json::array();
  std::size_t failures = 0;

  void add(Json entry, bool passed) {
    entry["passed"] = passed;
    if (!passed) ++failures;
    list.push_back(std::move(entry));
  }
};

inline std::vector<Tree::Vertex> vertices_to_depth(const Tree& t, int horizon) {
  std::vector<Tree::Vertex> out;
  for (int n = 0; n <= horizon; ++n) {
    auto g = generation_vertices(t, n);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

inline void suite_defect(const Tree& t, int q, int horizon, Assertions& a) {
  const int d = horizon + q;
  const auto s = make_shift(t, q, ShiftKind::Dirichlet, d);
  for (const auto& v : vertices_to_depth(t, horizon)) {
    const auto id = t.name(v);
    const Rational defect = q_isometry_defect(s, id, q);
    a.add({{"name", "q_defect_zero"}, {"vertex", id}, {"value", rational_json(defect)}}, defect == 0);
    if (q >= 2) {
      const Rational lower = q_isometry_defect(s, id, q - 1);
      a.add({{"name", "lower_defect_nonzero"}, {"vertex", id}, {"value", rational_json(lower)}}, lower != 0);
    }
    const double op = isometry_defect_apply(s, q, s.basis_vector(id)).norm();
    a.add({{"name", "isometry_defect_operator_zero"}, {"vertex", id}, {"norm", op}}, op <= 1e-10);
  }
}

inline void suite_hausdorff(const Tree& t, int q, int horizon, Assertions& a) {
  constexpr int kOrder = 12;
  const auto s_dual = make_shift(t, q, ShiftKind::CauchyDual, horizon + kOrder + 1);
  const auto s_dir = make_shift(t, q, ShiftKind::Dirichlet, horizon + kOrder + 1);
  std::vector<int> depths;
  for (const auto& v : vertices_to_depth(t, horizon)) depths.push_back(t.depth(v));
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  for (int n : depths) {
    const auto v = generation_vertices(t, n).front();
    auto seq_of = [&](const ShiftOperator& s) {
      return MomentSequence::generate(kOrder + 1, [&](std::size_t k) { return moment(s, v, static_cast<int>(k)); });
    };
    const auto dual = hausdorff_check(seq_of(s_dual), kOrder);
    Json entry = {{"name", "dual_completely_monotone"}, {"depth", n}, {"order", kOrder}};
    if (dual.violation) entry["witness"] = {{"m", dual.violation->order}, {"k", dual.violation->index}};
    a.add(entry, dual.passed);
    if (q >= 2) {
      const auto dir = hausdorff_check(seq_of(s_dir), 1);
      a.add({{"name", "dirichlet_fails_order_1"}, {"depth", n}}, !dir.passed);
    }
  }
}

inline void suite_pick(const Tree& t, int q, int horizon, Assertions& a) {
  constexpr int kMaxN = 100;
  for (const auto& b : kernel_block_spec(t).blocks) {
    if (b.l - 1 > horizon) continue;
    const auto [k, l] = pick_parameters(q, b);
    const auto r = pick_property_check(k, l, kMaxN);
    Json entry = {{"name", "log_convex"}, {"block", b.vertex.value_or(t.root_id())}, {"l", b.l}};
    if (r.witness) entry["witness_n"] = *r.witness;
    a.add(entry, r.passed);
    if (q >= 2) {
      const auto rev = pick_property_check(l, k, kMaxN);
      a.add({{"name", "reversed_control_fails"}, {"block", b.vertex.value_or(t.root_id())}, {"l", b.l}},
            !rev.passed);
    }
  }
}

inline void suite_cardid(const Tree& t, int horizon, Assertions& a) {
  constexpr int kMaxK = 5;
  for (const auto& v : vertices_to_depth(t, horizon)) {
    for (int k = 0; k <= kMaxK; ++k) {
      const Rational sum = card_identity_sum(t, v, k);
      a.add({{"name", "card_identity"}, {"vertex", t.name(v)}, {"k", k}, {"value", rational_json(sum)}}, sum == 1);
    }
  }
}

inline void suite_kernel(const Tree& t, int q, int horizon, Assertions& a) {
  constexpr int kMaxPower = 5;
  constexpr double kTolerance = 1e-10;
  const int d = std::max({horizon, branching_index(t) + kMaxPower + 1, kMaxPower + 1});
  const auto s = make_shift(t, q, ShiftKind::CauchyDual, d);
  for (int j = 0; j <= kMaxPower; ++j) {
    for (int k = 0; k <= kMaxPower; ++k) {
      const auto c = kernel_matrix_oracle(s, j, k);
      double worst = 0.0;
      Json witness = nullptr;
      for (Eigen::Index r = 0; r < c.values.rows(); ++r) {
        for (Eigen::Index col = 0; col < c.values.cols(); ++col) {
          double expected = 0.0;
          if (j == k && r == col) expected = to_double(dirichlet_coefficient(q, c.row_l[static_cast<std::size_t>(r)], k));
          const double err = std::abs(c.values(r, col) - expected) / std::max(1.0, std::abs(expected));
          if (err > worst) {
            worst = err;
            witness = {{"row", r}, {"col", col}, {"value", c.values(r, col)}, {"expected", expected}};
          }
        }
      }
      Json entry = {{"name", j == k ? "diagonal_block_scalars" : "off_diagonal_zero"},
                    {"j", j},
                    {"k", k},
                    {"dimension", c.values.rows()},
                    {"max_error", worst}};
      const bool ok = worst <= kTolerance;
      if (!ok) entry["witness"] = witness;
      a.add(entry, ok);
    }
  }
}

inline Outcome cmd_checks(const Options& o) {
  require_files(o, 1);
  require_json_only(o);
  const Tree t = load_tree(o.files[0]);
  if (o.q < 1) throw Error(Errc::InvalidQ, "q must be a positive integer");
  const int horizon = o.horizon.value_or(8);
  check_horizon(horizon);
  Assertions a;
  if (o.suite == "defect") {
    suite_defect(t, o.q, horizon, a);
  } else if (o.suite == "hausdorff") {
    suite_hausdorff(t, o.q, horizon, a);
  } else if (o.suite == "pick") {
    suite_pick(t, o.q, horizon, a);
  } else if (o.suite == "cardid") {
    suite_cardid(t, horizon, a);
  } else if (o.suite == "kernel") {
    suite_kernel(t, o.q, horizon, a);
  } else {
    throw Error(Errc::MalformedInput, "unknown suite '" + o.suite + "'");
  }
  Json r = base_report("checks");
  r["inputs"] = {{"trees", Json::array({tree_input(o.files[0], t)})},
                 {"q", o.q},
                 {"horizon", horizon},
                 {"suite", o.suite}};
  r["results"] = {{"assertions", a.list},
                  {"count", a.list.size()},
                  {"failures", a.failures},
                  {"passed", a.failures == 0}};
  r["exact"] = o.suite != "kernel";
  return {a.failures == 0 ? exit_code::kOk : exit_code::kNegative, render(r)};
}

inline Outcome run(const Options& o) {
  try {
    if (o.command == "validate") return cmd_validate(o);
    if (o.command == "profile") return cmd_profile(o);
    if (o.command == "equiv") return cmd_equiv(o);
    if (o.command == "moments") return cmd_moments(o);
    if (o.command == "checks") return cmd_checks(o);
    throw Error(Errc::MalformedInput, "unknown command '" + o.command + "'");
  } catch (const Error& e) {
    return {exit_code_for(e.code()), render(error_report(o.command, e))};
  }
}

}  // namespace treeshift::cli
