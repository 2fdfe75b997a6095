#pragma once

// Unitary equivalence of Dirichlet shifts on two trees. For q = 1 the shifts
// are isometries and only dim ker S* matters; for integer q >= 2 the depth
// profile n -> sum_{v branching at depth n} (card Chi(v) - 1) decides it. In
// the equivalent case a graded unitary between the kernels of the adjoints is
// built and lifted to the vertex spaces along the orbits S^m(ker S*).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "treeshift/error.hpp"
#include "treeshift/kernel_spaces.hpp"
#include "treeshift/shift.hpp"
#include "treeshift/tree.hpp"

namespace treeshift {

/// dim ker S* = 1 + sum over branching v of (card Chi(v) - 1). The explicit
/// prefix holds every branching vertex, so this is always exact.
inline int cokernel_dimension(const Tree& t) {
  int d = 1;
  for (const auto& b : branching_vertices(t)) d += b.child_count - 1;
  return d;
}

/// One vector of the Helmert basis of a kernel block.
struct KernelSlot {
  std::optional<VertexId> block;  // nullopt: e_root
  std::size_t index = 0;
  int depth = 0;                  // depth of the vector's support

  friend bool operator==(const KernelSlot&, const KernelSlot&) = default;
};

struct UnitaryGrade {
  enum class Kind { RootLine, Generation, Ungraded };
  Kind kind = Kind::RootLine;
  int generation = 0;
  std::vector<KernelSlot> source;
  std::vector<KernelSlot> target;
  Eigen::MatrixXcd matrix;  // target x source
};

struct GradedUnitary {
  int q = 1;
  std::vector<UnitaryGrade> grades;

  [[nodiscard]] std::size_t dimension() const {
    std::size_t d = 0;
    for (const auto& g : grades) d += g.source.size();
    return d;
  }
};

enum class Verdict { Equivalent, NotEquivalent, EquivalentUpToHorizon };
enum class Certainty { Exact, HorizonLimited };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Equivalent: return "Equivalent";
    case Verdict::NotEquivalent: return "NotEquivalent";
    case Verdict::EquivalentUpToHorizon: return "EquivalentUpToHorizon";
  }
  return "?";
}

inline const char* certainty_name(Certainty c) { return c == Certainty::Exact ? "Exact" : "HorizonLimited"; }

struct EquivalenceVerdict {
  int q = 1;
  Verdict result = Verdict::NotEquivalent;
  Certainty certainty = Certainty::Exact;
  std::optional<int> witness_generation;  // first n with different profile entries
  DepthProfile profile1;
  DepthProfile profile2;
  int cokernel1 = 0;
  int cokernel2 = 0;
  std::optional<GradedUnitary> unitary;
};

namespace detail {

/// Helmert slots of each kernel block with branching depth <= horizon, in
/// (depth, tree order).
inline std::vector<KernelSlot> kernel_slots(const Tree& t, int horizon, std::optional<int> generation) {
  std::vector<KernelSlot> out;
  for (const auto& b : kernel_block_spec(t).blocks) {
    if (b.is_root()) continue;
    const int depth = b.l - 1;
    if (depth > horizon) continue;
    if (generation && depth != *generation) continue;
    for (std::size_t i = 0; i < b.dimension(); ++i) out.push_back({b.vertex, i, depth + 1});
  }
  return out;
}

inline UnitaryGrade root_grade(const Tree& t1, const Tree& t2) {
  UnitaryGrade g;
  g.kind = UnitaryGrade::Kind::RootLine;
  g.source = {KernelSlot{std::nullopt, 0, 0}};
  g.target = {KernelSlot{std::nullopt, 0, 0}};
  g.matrix = Eigen::MatrixXcd::Identity(1, 1);
  (void)t1;
  (void)t2;
  return g;
}

inline GradedUnitary make_graded_unitary(const Tree& t1, const Tree& t2, int q, int horizon) {
  GradedUnitary u;
  u.q = q;
  u.grades.push_back(root_grade(t1, t2));
  const auto p1 = depth_profile(t1, horizon);
  const auto p2 = depth_profile(t2, horizon);
  const bool graded = p1.entries == p2.entries;
  if (graded) {
    for (const auto& [n, dim] : p1.entries) {
      UnitaryGrade g;
      g.kind = UnitaryGrade::Kind::Generation;
      g.generation = n;
      g.source = kernel_slots(t1, horizon, n);
      g.target = kernel_slots(t2, horizon, n);
      const auto d = static_cast<Eigen::Index>(dim);
      g.matrix = Eigen::MatrixXcd::Identity(d, d);
      u.grades.push_back(std::move(g));
    }
  } else {
    // Only reachable for q = 1, where every vector of ker S* has the same
    // orbit norms and any unitary of the kernels intertwines.
    UnitaryGrade g;
    g.kind = UnitaryGrade::Kind::Ungraded;
    g.source = kernel_slots(t1, horizon, std::nullopt);
    g.target = kernel_slots(t2, horizon, std::nullopt);
    if (g.source.size() != g.target.size()) {
      throw Error(Errc::DimensionMismatch, "kernels of the adjoints differ in dimension");
    }
    const auto d = static_cast<Eigen::Index>(g.source.size());
    g.matrix = Eigen::MatrixXcd::Identity(d, d);
    u.grades.push_back(std::move(g));
  }
  return u;
}

}  // namespace detail

inline EquivalenceVerdict decide_equivalence(const Tree& t1, const Tree& t2, int q, int horizon) {
  if (q < 1) throw Error(Errc::InvalidQ, "q must be a positive integer");
  EquivalenceVerdict v;
  v.q = q;
  v.profile1 = depth_profile(t1, horizon);
  v.profile2 = depth_profile(t2, horizon);
  v.cokernel1 = cokernel_dimension(t1);
  v.cokernel2 = cokernel_dimension(t2);
  const bool exact = v.profile1.exact_beyond_horizon && v.profile2.exact_beyond_horizon;

  if (q == 1) {
    v.certainty = Certainty::Exact;
    v.result = v.cokernel1 == v.cokernel2 ? Verdict::Equivalent : Verdict::NotEquivalent;
  } else {
    for (int n = 0; n <= horizon; ++n) {
      if (v.profile1.at(n) != v.profile2.at(n)) {
        v.witness_generation = n;
        break;
      }
      if (n >= std::max(v.profile1.entries.empty() ? 0 : v.profile1.entries.rbegin()->first,
                        v.profile2.entries.empty() ? 0 : v.profile2.entries.rbegin()->first)) {
        break;  // both profiles are zero from here up to the horizon
      }
    }
    if (v.witness_generation) {
      v.result = Verdict::NotEquivalent;
      v.certainty = Certainty::Exact;
    } else if (exact) {
      v.result = Verdict::Equivalent;
      v.certainty = Certainty::Exact;
    } else {
      v.result = Verdict::EquivalentUpToHorizon;
      v.certainty = Certainty::HorizonLimited;
    }
  }
  if (v.result != Verdict::NotEquivalent) {
    const int reach = q == 1 ? std::max({horizon, branching_index(t1), branching_index(t2)}) : horizon;
    v.unitary = detail::make_graded_unitary(t1, t2, q, reach);
  }
  return v;
}

/// U = U_root (+) U_0 (+) U_1 (+) ..., identity in Helmert coordinates.
inline GradedUnitary build_graded_unitary(const Tree& t1, const Tree& t2, int q, int horizon) {
  auto verdict = decide_equivalence(t1, t2, q, horizon);
  if (verdict.result == Verdict::NotEquivalent) {
    throw Error(Errc::NotEquivalent, "the Dirichlet shifts are not unitarily equivalent");
  }
  return std::move(*verdict.unitary);
}

/// Test hook: pairs the ordered kernel bases of two trees with equal cokernel
/// dimension, regardless of grading.
inline GradedUnitary build_forced_unitary(const Tree& t1, const Tree& t2, int q) {
  GradedUnitary u;
  u.q = q;
  u.grades.push_back(detail::root_grade(t1, t2));
  UnitaryGrade g;
  g.kind = UnitaryGrade::Kind::Ungraded;
  g.source = detail::kernel_slots(t1, kMaxHorizon, std::nullopt);
  g.target = detail::kernel_slots(t2, kMaxHorizon, std::nullopt);
  if (g.source.size() != g.target.size()) {
    throw Error(Errc::DimensionMismatch, "cokernel dimensions differ");
  }
  const auto d = static_cast<Eigen::Index>(g.source.size());
  g.matrix = Eigen::MatrixXcd::Identity(d, d);
  u.grades.push_back(std::move(g));
  return u;
}

struct LiftedUnitary {
  Eigen::MatrixXcd matrix;       // vertex space of tree 2 x vertex space of tree 1
  double max_ratio_deviation = 0.0;  // max |‖S1^m b‖ / ‖S2^m Ub‖ - 1|
  int depth_offset = 0;          // largest (target depth - source depth) over slots
};

namespace detail {

inline const CoordinateVector& slot_vector(const KernelBasis& basis, const KernelSlot& slot) {
  for (const auto& b : basis.blocks) {
    if (b.vertex == slot.block && slot.index < b.vectors.size()) return b.vectors[slot.index];
  }
  throw Error(Errc::TruncationLoss, "kernel block of '" + slot.block.value_or("root") +
                                        "' lies outside the truncation");
}

}  // namespace detail

/// Extends U from ker S1* to the truncated vertex spaces by sending the
/// orthonormal basis S1^m b/‖S1^m b‖ to S2^m (U b)/‖S2^m (U b)‖.
inline LiftedUnitary lift_unitary(const ShiftOperator& s1, const ShiftOperator& s2, const GradedUnitary& u) {
  const auto basis1 = kernel_basis(s1);
  const auto basis2 = kernel_basis(s2);
  const int depth_limit = std::min(s1.depth_limit(), s2.depth_limit());

  LiftedUnitary out;
  out.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(s2.dimension()),
                                      static_cast<Eigen::Index>(s1.dimension()));
  for (const auto& grade : u.grades) {
    for (std::size_t c = 0; c < grade.source.size(); ++c) {
      const auto& src = grade.source[c];
      CoordinateVector image = s2.zero();
      int target_depth = 0;
      for (std::size_t r = 0; r < grade.target.size(); ++r) {
        const auto coef = grade.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (coef == std::complex<double>(0.0, 0.0)) continue;
        image += coef * detail::slot_vector(basis2, grade.target[r]);
        target_depth = std::max(target_depth, grade.target[r].depth);
      }
      out.depth_offset = std::max(out.depth_offset, target_depth - src.depth);
      CoordinateVector x = detail::slot_vector(basis1, src);
      CoordinateVector y = image;
      for (int m = 0; src.depth + m <= s1.depth_limit() && target_depth + m <= s2.depth_limit(); ++m) {
        const double nx = x.norm();
        const double ny = y.norm();
        out.max_ratio_deviation = std::max(out.max_ratio_deviation, std::abs(nx / ny - 1.0));
        out.matrix += (y / ny) * (x / nx).adjoint();
        if (src.depth + m + 1 > depth_limit || target_depth + m + 1 > s2.depth_limit() ||
            src.depth + m + 1 > s1.depth_limit()) {
          break;
        }
        x = treeshift::apply(s1, x);
        y = treeshift::apply(s2, y);
      }
    }
  }
  return out;
}

struct IntertwiningReport {
  double residual = 0.0;        // max ‖Ũ S1 f - S2 Ũ f‖ / ‖f‖
  double norm_defect = 0.0;     // max |‖Ũ f‖ - ‖f‖| / ‖f‖
  double max_ratio_deviation = 0.0;
  int test_vectors = 0;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Residual of the intertwining relation for the lifted unitary, over every
/// basis vector e_v and `random_vectors` random vectors supported where both
/// sides stay inside the truncation.
inline IntertwiningReport verify_intertwining(const Tree& t1, const Tree& t2, int q, const GradedUnitary& u,
                                              int depth_limit, std::uint64_t seed = kDefaultSeed,
                                              int random_vectors = 8) {
  const auto s1 = make_shift(t1, q, ShiftKind::Dirichlet, depth_limit);
  const auto s2 = make_shift(t2, q, ShiftKind::Dirichlet, depth_limit);
  const auto lifted = lift_unitary(s1, s2, u);
  const int support_cap = depth_limit - 2 - lifted.depth_offset;
  if (support_cap < 0) {
    throw Error(Errc::TruncationLoss, "truncation depth " + std::to_string(depth_limit) +
                                          " leaves no room for test vectors");
  }

  std::vector<CoordinateVector> tests;
  const auto& tr = s1.truncation();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.site(i).depth <= support_cap) {
      CoordinateVector e = s1.zero();
      e[static_cast<Eigen::Index>(i)] = 1.0;
      tests.push_back(std::move(e));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int r = 0; r < random_vectors; ++r) {
    CoordinateVector f = s1.zero();
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr.site(i).depth <= support_cap) f[static_cast<Eigen::Index>(i)] = coord(rng);
    }
    tests.push_back(std::move(f));
  }

  IntertwiningReport rep;
  rep.max_ratio_deviation = lifted.max_ratio_deviation;
  for (const auto& f : tests) {
    const double nf = f.norm();
    if (nf == 0.0) continue;
    const CoordinateVector uf = lifted.matrix * f;
    const CoordinateVector lhs = lifted.matrix * treeshift::apply(s1, f);
    const CoordinateVector rhs = treeshift::apply(s2, uf);
    rep.residual = std::max(rep.residual, (lhs - rhs).norm() / nf);
    rep.norm_defect = std::max(rep.norm_defect, std::abs(uf.norm() - nf) / nf);
    ++rep.test_vectors;
  }
  return rep;
}

}  // namespace treeshift
