#pragma once

// Dirichlet shifts and their Cauchy duals on a tree, realized on the span of
// vertices of depth <= D. Squared weights are kept exact; matrix action uses
// their floating-point square roots.

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "treeshift/error.hpp"
#include "treeshift/numerics.hpp"
#include "treeshift/tree.hpp"

namespace treeshift {

enum class ShiftKind { Dirichlet, CauchyDual };

/// Coordinates indexed by the sites of the operator's Truncation.
using CoordinateVector = Eigen::VectorXcd;

class ShiftOperator {
 public:
  ShiftOperator(Tree tree, Rational q, ShiftKind kind, int depth_limit)
      : tree_(std::move(tree)), q_(std::move(q)), kind_(kind), truncation_(tree_, check_depth(depth_limit)) {
    if (q_ < 1) throw Error(Errc::InvalidQ, "q must be at least 1, got " + to_string(q_));
    squared_.resize(truncation_.size(), Rational(0));
    weights_.resize(truncation_.size(), 0.0);
    for (std::size_t i = 1; i < truncation_.size(); ++i) {
      const auto& site = truncation_.site(i);
      const auto& parent = truncation_.site(*site.parent);
      const Rational n_parent = parent.depth;
      const Rational fanout = static_cast<std::int64_t>(parent.child_count);
      if (kind_ == ShiftKind::Dirichlet) {
        squared_[i] = (n_parent + q_) / ((n_parent + 1) * fanout);
      } else {
        squared_[i] = (n_parent + 1) / ((n_parent + q_) * fanout);
      }
      weights_[i] = std::sqrt(to_double(squared_[i]));
    }
  }

  [[nodiscard]] const Tree& tree() const noexcept { return tree_; }
  [[nodiscard]] const Truncation& truncation() const noexcept { return truncation_; }
  [[nodiscard]] const Rational& q() const noexcept { return q_; }
  [[nodiscard]] ShiftKind kind() const noexcept { return kind_; }
  [[nodiscard]] int depth_limit() const noexcept { return truncation_.depth_limit(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return truncation_.size(); }

  /// q as an integer; identities beyond the weight formulas need one.
  [[nodiscard]] int integer_q() const {
    if (!is_integer(q_)) throw Error(Errc::NonIntegerQ, "q = " + to_string(q_) + " is not an integer");
    return q_.convert_to<int>();
  }

  /// lambda_v^2 at a site; zero at the root.
  [[nodiscard]] const Rational& squared_weight(std::size_t site) const { return squared_.at(site); }
  [[nodiscard]] const Rational& squared_weight(std::string_view id) const {
    return squared_weight(truncation_.index_of(id));
  }
  [[nodiscard]] double weight(std::size_t site) const { return weights_.at(site); }

  [[nodiscard]] CoordinateVector zero() const { return CoordinateVector::Zero(static_cast<Eigen::Index>(dimension())); }

  [[nodiscard]] CoordinateVector basis_vector(std::string_view id) const {
    CoordinateVector e = zero();
    e[static_cast<Eigen::Index>(truncation_.index_of(id))] = 1.0;
    return e;
  }

 private:
  static int check_depth(int d) {
    if (d < 1) throw Error(Errc::InvalidHorizon, "truncation depth must be at least 1");
    return d;
  }

  Tree tree_;
  Rational q_;
  ShiftKind kind_;
  Truncation truncation_;
  std::vector<Rational> squared_;
  std::vector<double> weights_;
};

inline ShiftOperator make_shift(const Tree& t, const Rational& q, ShiftKind kind, int depth_limit) {
  return ShiftOperator(t, q, kind, depth_limit);
}

namespace detail {

inline void check_size(const ShiftOperator& s, const CoordinateVector& f) {
  if (static_cast<std::size_t>(f.size()) != s.dimension()) {
    throw Error(Errc::DimensionMismatch, "vector has " + std::to_string(f.size()) + " coordinates, operator has " +
                                             std::to_string(s.dimension()));
  }
}

/// Largest depth carrying a nonzero coordinate, or -1 for the zero vector.
inline int support_depth(const ShiftOperator& s, const CoordinateVector& f) {
  int deepest = -1;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (f[i] != std::complex<double>(0.0, 0.0)) {
      deepest = std::max(deepest, s.truncation().site(static_cast<std::size_t>(i)).depth);
    }
  }
  return deepest;
}

}  // namespace detail

/// (Sf)(v) = lambda_v f(par v). Mass at depth D would leave the truncation,
/// which is reported instead of dropped.
inline CoordinateVector apply(const ShiftOperator& s, const CoordinateVector& f) {
  detail::check_size(s, f);
  if (detail::support_depth(s, f) >= s.depth_limit()) {
    throw Error(Errc::TruncationLoss, "support reaches depth " + std::to_string(s.depth_limit()));
  }
  CoordinateVector out = s.zero();
  const auto& tr = s.truncation();
  for (std::size_t i = 1; i < tr.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = s.weight(i) * f[static_cast<Eigen::Index>(*tr.site(i).parent)];
  }
  return out;
}

/// (S*f)(v) = sum_{u in Chi(v)} lambda_u f(u).
inline CoordinateVector apply_adjoint(const ShiftOperator& s, const CoordinateVector& f) {
  detail::check_size(s, f);
  CoordinateVector out = s.zero();
  const auto& tr = s.truncation();
  for (std::size_t i = 1; i < tr.size(); ++i) {
    out[static_cast<Eigen::Index>(*tr.site(i).parent)] += s.weight(i) * f[static_cast<Eigen::Index>(i)];
  }
  return out;
}

inline CoordinateVector apply_power(const ShiftOperator& s, CoordinateVector f, int k) {
  for (int i = 0; i < k; ++i) f = treeshift::apply(s, f);
  return f;
}

inline CoordinateVector apply_adjoint_power(const ShiftOperator& s, CoordinateVector f, int k) {
  for (int i = 0; i < k; ++i) f = apply_adjoint(s, f);
  return f;
}

/// ||S^k e_v||^2 in closed form: (n_v+q)_k/(n_v+1)_k for the Dirichlet shift
/// and (n_v+1)_k/(n_v+q)_k for its Cauchy dual.
inline Rational moment(const ShiftOperator& s, Tree::Vertex v, int k) {
  const int q = s.integer_q();
  const std::int64_t n = s.tree().depth(v);
  if (s.kind() == ShiftKind::Dirichlet) return pochhammer_ratio(n + q, n + 1, k);
  return pochhammer_ratio(n + 1, n + q, k);
}

inline Rational moment(const ShiftOperator& s, std::string_view v, int k) {
  return moment(s, s.tree().resolve(v), k);
}

/// ||S^k e_v||^2 by repeated matrix action.
inline double moment_via_matrix(const ShiftOperator& s, std::string_view v, int k) {
  const auto idx = s.truncation().index_of(v);
  if (s.truncation().site(idx).depth + k > s.depth_limit()) {
    throw Error(Errc::TruncationLoss, "depth(" + std::string(v) + ") + " + std::to_string(k) + " exceeds " +
                                          std::to_string(s.depth_limit()));
  }
  return apply_power(s, s.basis_vector(v), k).squaredNorm();
}

/// sum_{k=0}^{order} (-1)^k C(order,k) ||S^k e_v||^2, exact.
inline Rational q_isometry_defect(const ShiftOperator& s, std::string_view v, int order) {
  const auto vertex = s.tree().resolve(v);
  MomentSequence seq = MomentSequence::generate(static_cast<std::size_t>(order) + 1,
                                                [&](std::size_t k) { return moment(s, vertex, static_cast<int>(k)); });
  return alternating_binomial_sum(seq, order, 0);
}

struct KernelBlock {
  std::optional<VertexId> vertex;  // nullopt for the root line
  int depth = 0;                   // depth of the branching vertex; 0 for the root line
  std::vector<std::size_t> support;
  std::vector<CoordinateVector> vectors;

  [[nodiscard]] bool is_root() const noexcept { return !vertex.has_value(); }
  /// Children of a branching vertex at depth n sit at depth n+1; the root line at 0.
  [[nodiscard]] int vector_depth() const noexcept { return is_root() ? 0 : depth + 1; }
};

struct KernelBasis {
  std::vector<KernelBlock> blocks;

  [[nodiscard]] std::size_t dimension() const {
    std::size_t d = 0;
    for (const auto& b : blocks) d += b.vectors.size();
    return d;
  }
};

/// Orthonormal basis of the complement of the constant vector in R^m; the
/// k-th vector is (1,...,1,-k,0,...,0)/sqrt(k(k+1)).
inline std::vector<std::vector<double>> helmert_basis(std::size_t m) {
  std::vector<std::vector<double>> out;
  for (std::size_t k = 1; k < m; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k) * static_cast<double>(k + 1));
    std::vector<double> v(m, 0.0);
    for (std::size_t i = 0; i < k; ++i) v[i] = scale;
    v[k] = -static_cast<double>(k) * scale;
    out.push_back(std::move(v));
  }
  return out;
}

/// ker S* = <e_root> + sum over branching v of l^2(Chi(v)) minus <lambda^v>.
/// Blocks appear in (depth, tree order); only branching vertices of depth < D
/// are represented since their children must be materialized.
inline KernelBasis kernel_basis(const ShiftOperator& s) {
  const auto& tr = s.truncation();
  KernelBasis basis;
  KernelBlock root;
  root.support = {0};
  root.vectors.push_back(s.basis_vector(tr.site(0).id));
  basis.blocks.push_back(std::move(root));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& site = tr.site(i);
    if (site.children.size() < 2) continue;
    KernelBlock block;
    block.vertex = site.id;
    block.depth = site.depth;
    block.support = site.children;
    for (const auto& h : helmert_basis(site.children.size())) {
      CoordinateVector v = s.zero();
      for (std::size_t c = 0; c < h.size(); ++c) v[static_cast<Eigen::Index>(site.children[c])] = h[c];
      block.vectors.push_back(std::move(v));
    }
    basis.blocks.push_back(std::move(block));
  }
  return basis;
}

/// D_T f = sum_{k=0}^{order} (-1)^k C(order,k) T^k T*^k f.
inline CoordinateVector defect_operator_apply(const ShiftOperator& s, int order, const CoordinateVector& f) {
  detail::check_size(s, f);
  if (order < 0) throw Error(Errc::DomainError, "defect order must be nonnegative");
  if (detail::support_depth(s, f) > s.depth_limit() - order) {
    throw Error(Errc::TruncationLoss, "defect operator of order " + std::to_string(order) +
                                          " needs support within depth " + std::to_string(s.depth_limit() - order));
  }
  CoordinateVector acc = s.zero();
  CoordinateVector lowered = f;
  for (int k = 0; k <= order; ++k) {
    const double c = to_double(Rational(binomial(order, k)));
    const CoordinateVector term = apply_power(s, lowered, k);
    if (k % 2 == 0) {
      acc += c * term;
    } else {
      acc -= c * term;
    }
    lowered = apply_adjoint(s, lowered);
  }
  return acc;
}

/// sum_{k=0}^{order} (-1)^k C(order,k) T*^k T^k f; the zero vector when T is an
/// order-isometry.
inline CoordinateVector isometry_defect_apply(const ShiftOperator& s, int order, const CoordinateVector& f) {
  detail::check_size(s, f);
  if (order < 0) throw Error(Errc::DomainError, "defect order must be nonnegative");
  if (detail::support_depth(s, f) > s.depth_limit() - order) {
    throw Error(Errc::TruncationLoss, "isometry defect of order " + std::to_string(order) +
                                          " needs support within depth " + std::to_string(s.depth_limit() - order));
  }
  CoordinateVector acc = s.zero();
  CoordinateVector raised = f;
  for (int k = 0; k <= order; ++k) {
    const double c = to_double(Rational(binomial(order, k)));
    const CoordinateVector term = apply_adjoint_power(s, raised, k);
    if (k % 2 == 0) {
      acc += c * term;
    } else {
      acc -= c * term;
    }
    if (k < order) raised = treeshift::apply(s, raised);
  }
  return acc;
}

struct PartialTrace {
  double trace = 0.0;
  std::vector<double> per_generation;  // index n: sum over depth-n vertices
};

/// Sum over vertices of depth <= cap of <[S*,S] e_v, e_v> = ||S e_v||^2 - ||S* e_v||^2.
inline PartialTrace self_commutator_partial_trace(const ShiftOperator& s, int depth_cap) {
  if (depth_cap < 0 || depth_cap >= s.depth_limit()) {
    throw Error(Errc::TruncationLoss, "depth cap must lie below the truncation depth");
  }
  const auto& tr = s.truncation();
  PartialTrace out;
  out.per_generation.assign(static_cast<std::size_t>(depth_cap) + 1, 0.0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& site = tr.site(i);
    if (site.depth > depth_cap) continue;
    double forward = 0.0;
    for (auto c : site.children) forward += s.weight(c) * s.weight(c);
    const double backward = s.weight(i) * s.weight(i);
    out.per_generation[static_cast<std::size_t>(site.depth)] += forward - backward;
  }
  for (double g : out.per_generation) out.trace += g;
  return out;
}

/// Dense matrix of the truncated operator; columns of depth-D sites are zero.
inline Eigen::MatrixXd dense_matrix(const ShiftOperator& s) {
  const auto n = static_cast<Eigen::Index>(s.dimension());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const auto& tr = s.truncation();
  for (std::size_t i = 1; i < tr.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*tr.site(i).parent)) = s.weight(i);
  }
  return m;
}

}  // namespace treeshift
