#pragma once

// Reproducing-kernel side of the Dirichlet shift: per-block kernel
// coefficients of the Dirichlet space H_q and the Bergman space H_{-q}, norms
// of graded functions, the radial weights w_l of the Bergman measure, and the
// complete Pick log-convexity test.
//
// Blocks are labelled by l: l = 0 for the root line and l = n_v + 1 for the
// block of a branching vertex v. With that labelling every formula reads
//   H_q  kernel coefficient  (l+1)_n / (l+q)_n
//   H_-q kernel coefficient  (l+q)_n / (l+1)_n
// and the H_q norm weight is the H_-q kernel coefficient and vice versa.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "treeshift/error.hpp"
#include "treeshift/numerics.hpp"
#include "treeshift/shift.hpp"
#include "treeshift/tree.hpp"

namespace treeshift {

enum class Space { Dirichlet, Bergman };

struct Block {
  std::optional<VertexId> vertex;  // nullopt: root line
  int l = 0;
  std::vector<VertexId> support;   // children of v, or {root}

  [[nodiscard]] bool is_root() const noexcept { return !vertex.has_value(); }
  /// Dimension inside ker S*.
  [[nodiscard]] std::size_t dimension() const noexcept { return is_root() ? 1 : support.size() - 1; }

  static Block root(const VertexId& root_id) { return Block{std::nullopt, 0, {root_id}}; }
  static Block branching(const VertexId& v, int depth, std::vector<VertexId> children) {
    return Block{v, depth + 1, std::move(children)};
  }
};

struct KernelBlockSpec {
  std::vector<Block> blocks;
};

/// Root line first, then one block per branching vertex in tree order.
inline KernelBlockSpec kernel_block_spec(const Tree& t) {
  KernelBlockSpec spec;
  spec.blocks.push_back(Block::root(t.root_id()));
  for (const auto& node : t.nodes()) {
    if (node.children.size() < 2) continue;
    std::vector<VertexId> kids;
    for (auto c : node.children) kids.push_back(t.nodes()[c].id);
    spec.blocks.push_back(Block::branching(node.id, node.depth, std::move(kids)));
  }
  return spec;
}

inline void check_integer_q(int q) {
  if (q < 1) throw Error(Errc::InvalidQ, "q must be a positive integer, got " + std::to_string(q));
}

inline Rational dirichlet_coefficient(int q, int l, int n) {
  check_integer_q(q);
  return pochhammer_ratio(l + 1, l + q, n);
}
inline Rational dirichlet_coefficient(int q, const Block& b, int n) { return dirichlet_coefficient(q, b.l, n); }

inline Rational bergman_coefficient(int q, int l, int n) {
  check_integer_q(q);
  return pochhammer_ratio(l + q, l + 1, n);
}
inline Rational bergman_coefficient(int q, const Block& b, int n) { return bergman_coefficient(q, b.l, n); }

inline Rational kernel_coefficient(Space space, int q, int l, int n) {
  return space == Space::Dirichlet ? dirichlet_coefficient(q, l, n) : bergman_coefficient(q, l, n);
}

// ---------------------------------------------------------------------------
// Elements of ker S* and graded functions f(z) = sum_n f_n z^n.
//
// A KernelElement stores, per block, the coordinates of the block component on
// its support: the single coefficient a for the root line, and the values
// b(u), u in Chi(v), for a branching block (these must sum to zero).

namespace detail {

inline Rational abs2(const Rational& x) { return x * x; }
inline double abs2(double x) { return x * x; }
inline double abs2(const std::complex<double>& x) { return std::norm(x); }

template <class Scalar>
using norm_t = std::conditional_t<std::is_same_v<Scalar, Rational>, Rational, double>;

template <class Scalar>
norm_t<Scalar> convert_weight(const Rational& w) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return w;
  } else {
    return to_double(w);
  }
}

template <class Scalar>
bool is_zero_sum(const std::vector<Scalar>& v) {
  Scalar s{};
  double scale = 0.0;
  for (const auto& x : v) {
    s += x;
    if constexpr (!std::is_same_v<Scalar, Rational>) scale += std::abs(x);
  }
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return s == 0;
  } else {
    return std::abs(s) <= 1e-12 * std::max(1.0, scale);
  }
}

}  // namespace detail

template <class Scalar>
struct KernelElement {
  std::vector<std::vector<Scalar>> blocks;

  static KernelElement zero(const KernelBlockSpec& spec) {
    KernelElement e;
    for (const auto& b : spec.blocks) e.blocks.emplace_back(b.support.size(), Scalar{});
    return e;
  }

  [[nodiscard]] detail::norm_t<Scalar> block_norm2(std::size_t b) const {
    detail::norm_t<Scalar> s{};
    for (const auto& x : blocks[b]) s += detail::abs2(x);
    return s;
  }
};

template <class Scalar>
void validate_element(const KernelBlockSpec& spec, const KernelElement<Scalar>& e) {
  if (e.blocks.size() != spec.blocks.size()) {
    throw Error(Errc::DimensionMismatch, "kernel element has " + std::to_string(e.blocks.size()) +
                                             " blocks, expected " + std::to_string(spec.blocks.size()));
  }
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    if (e.blocks[b].size() != spec.blocks[b].support.size()) {
      throw Error(Errc::DimensionMismatch, "block " + std::to_string(b) + " has wrong length");
    }
    if (!spec.blocks[b].is_root() && !detail::is_zero_sum(e.blocks[b])) {
      throw Error(Errc::NotInKernel, "block of '" + *spec.blocks[b].vertex + "' does not sum to zero");
    }
  }
}

template <class Scalar>
struct GradedFunction {
  KernelBlockSpec spec;
  std::vector<KernelElement<Scalar>> layers;  // layers[n] = f_n

  void validate() const {
    for (const auto& layer : layers) validate_element(spec, layer);
  }
};

namespace detail {

template <class Scalar, class WeightFn>
norm_t<Scalar> weighted_norm(const GradedFunction<Scalar>& f, WeightFn&& weight) {
  f.validate();
  norm_t<Scalar> acc{};
  for (std::size_t n = 0; n < f.layers.size(); ++n) {
    for (std::size_t b = 0; b < f.spec.blocks.size(); ++b) {
      const auto mass = f.layers[n].block_norm2(b);
      if (mass == norm_t<Scalar>{}) continue;
      acc += mass * convert_weight<Scalar>(weight(f.spec.blocks[b], static_cast<int>(n)));
    }
  }
  return acc;
}

}  // namespace detail

/// ||f||^2 in H_q: layer n of block l weighted by (l+q)_n/(l+1)_n.
template <class Scalar>
detail::norm_t<Scalar> dirichlet_norm(const GradedFunction<Scalar>& f, int q) {
  return detail::weighted_norm(f, [q](const Block& b, int n) { return bergman_coefficient(q, b, n); });
}

/// ||f||^2 in H_-q: layer n of block l weighted by (l+1)_n/(l+q)_n.
template <class Scalar>
detail::norm_t<Scalar> bergman_norm(const GradedFunction<Scalar>& f, int q) {
  return detail::weighted_norm(f, [q](const Block& b, int n) { return dirichlet_coefficient(q, b, n); });
}

/// ||f||^2 in H_q as sum_n ||S^n f_n||^2, each term aggregated from the vertex
/// moments ||S^n e_u||^2 of the Dirichlet shift (distinct e_u at one depth have
/// orthogonal orbits).
template <class Scalar>
detail::norm_t<Scalar> dirichlet_norm_via_moments(const GradedFunction<Scalar>& f, const ShiftOperator& s) {
  if (s.kind() != ShiftKind::Dirichlet) throw Error(Errc::DomainError, "expected the Dirichlet shift");
  f.validate();
  detail::norm_t<Scalar> acc{};
  for (std::size_t n = 0; n < f.layers.size(); ++n) {
    for (std::size_t b = 0; b < f.spec.blocks.size(); ++b) {
      const auto& support = f.spec.blocks[b].support;
      for (std::size_t i = 0; i < support.size(); ++i) {
        const auto mass = detail::abs2(f.layers[n].blocks[b][i]);
        if (mass == detail::norm_t<Scalar>{}) continue;
        acc += mass * detail::convert_weight<Scalar>(moment(s, support[i], static_cast<int>(n)));
      }
    }
  }
  return acc;
}

/// Density weights of the boundary measure for q = 2: 1 on the root line and
/// 1/(n_v+2) on the block of v.
struct MeasureWeight {
  Block block;
  Rational weight;
};

inline std::vector<MeasureWeight> dirichlet_measure_weights(const Tree& t) {
  std::vector<MeasureWeight> out;
  for (auto& b : kernel_block_spec(t).blocks) {
    Rational w(BigInt(1), BigInt(b.l + 1));
    out.push_back({std::move(b), std::move(w)});
  }
  return out;
}

/// ||f||^2_{H_2} = ||f||^2_{H_1} + sum_n n (|a_n|^2 + sum_v ||b_{n,v}||^2/(n_v+2)).
template <class Scalar>
detail::norm_t<Scalar> h2_norm_via_measure_decomposition(const GradedFunction<Scalar>& f, int q = 2) {
  if (q != 2) throw Error(Errc::WrongQ, "the boundary-measure model exists for q = 2 only");
  f.validate();
  detail::norm_t<Scalar> hardy{};
  detail::norm_t<Scalar> energy{};
  for (std::size_t n = 0; n < f.layers.size(); ++n) {
    for (std::size_t b = 0; b < f.spec.blocks.size(); ++b) {
      const auto mass = f.layers[n].block_norm2(b);
      hardy += mass;
      const Rational density(BigInt(1), BigInt(f.spec.blocks[b].l + 1));
      energy += mass * detail::convert_weight<Scalar>(density * static_cast<std::int64_t>(n));
    }
  }
  return hardy + energy;
}

// ---------------------------------------------------------------------------
// Kernel evaluation

struct KernelApplyResult {
  KernelElement<std::complex<double>> value;
  int order = 0;                 // N
  double remainder_bound = 0.0;  // bound on the omitted tail, per unit of ||g||
};

namespace detail {

/// Bound on sum_{n>N} c_n x^n for the block with the largest coefficients.
inline double tail_bound(Space space, int q, int order, double x) {
  if (x == 0.0) return 0.0;
  const double n = order;
  if (space == Space::Dirichlet) {
    // c_n <= 1 and non-increasing.
    return std::pow(x, n + 1) / (1.0 - x);
  }
  // c_n <= (n+q)^{q-1}; successive bounds shrink by at most rho.
  const double rho = std::pow((n + 2 + q) / (n + 1 + q), q - 1) * x;
  if (rho >= 1.0) return std::numeric_limits<double>::infinity();
  return std::pow(n + 1 + q, q - 1) * std::pow(x, n + 1) / (1.0 - rho);
}

}  // namespace detail

inline constexpr double kKernelTailTarget = 1e-12;

/// kappa(z, w) g: each block component of g multiplied by
/// sum_{n<=N} c_n(block) (z conj(w))^n. Without an explicit N, the smallest N
/// whose tail bound is below 1e-12 is used.
inline KernelApplyResult kernel_apply(const Tree& t, int q, Space space, std::complex<double> z,
                                      std::complex<double> w, const KernelElement<std::complex<double>>& g,
                                      std::optional<int> order = std::nullopt) {
  check_integer_q(q);
  if (std::abs(z) >= 1.0 || std::abs(w) >= 1.0) {
    throw Error(Errc::OutsideDisc, "kernel arguments must lie in the open unit disc");
  }
  const auto spec = kernel_block_spec(t);
  validate_element(spec, g);
  const std::complex<double> x = z * std::conj(w);
  const double ax = std::abs(x);

  KernelApplyResult out;
  if (order) {
    if (*order < 0) throw Error(Errc::DomainError, "truncation order must be nonnegative");
    out.order = *order;
  } else {
    int n = 0;
    while (detail::tail_bound(space, q, n, ax) >= kKernelTailTarget) {
      if (++n > 1'000'000) throw Error(Errc::DomainError, "kernel series converges too slowly");
    }
    out.order = n;
  }
  out.remainder_bound = detail::tail_bound(space, q, out.order, ax);

  out.value = KernelElement<std::complex<double>>::zero(spec);
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    const int l = spec.blocks[b].l;
    std::complex<double> sum = 0.0;
    std::complex<double> power = 1.0;
    double c = 1.0;
    for (int n = 0; n <= out.order; ++n) {
      sum += c * power;
      power *= x;
      c *= space == Space::Dirichlet ? double(l + 1 + n) / double(l + q + n) : double(l + q + n) / double(l + 1 + n);
    }
    for (std::size_t i = 0; i < g.blocks[b].size(); ++i) out.value.blocks[b][i] = sum * g.blocks[b][i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Matrix oracle for the kernel coefficients

struct KernelVectorRef {
  std::size_t block;   // index into kernel_basis(S).blocks
  std::size_t vector;  // index within the block
};

struct KernelMatrix {
  std::vector<KernelVectorRef> rows;  // same order for columns
  std::vector<int> row_l;             // block label l of each row
  Eigen::MatrixXd values;
};

/// C_{j,k} = P_E S*^j S^k restricted to E = ker S*, computed from the truncated
/// operator: entry (a, b) = <S^k x_b, S^j x_a> over kernel basis vectors whose
/// orbits stay inside the truncation up to power max(j, k).
inline KernelMatrix kernel_matrix_oracle(const ShiftOperator& s, int j, int k) {
  const int d = s.depth_limit();
  if (j < 0 || k < 0 || j > d - 1 || k > d - 1) {
    throw Error(Errc::TruncationLoss, "powers must lie in [0, D-1]");
  }
  const int reach = std::max(j, k);
  const auto basis = kernel_basis(s);
  KernelMatrix out;
  std::vector<CoordinateVector> left;
  std::vector<CoordinateVector> right;
  for (std::size_t b = 0; b < basis.blocks.size(); ++b) {
    const auto& block = basis.blocks[b];
    if (block.vector_depth() + reach > d) continue;
    for (std::size_t i = 0; i < block.vectors.size(); ++i) {
      out.rows.push_back({b, i});
      out.row_l.push_back(block.is_root() ? 0 : block.depth + 1);
      left.push_back(apply_power(s, block.vectors[i], j));
      right.push_back(apply_power(s, block.vectors[i], k));
    }
  }
  const auto m = static_cast<Eigen::Index>(out.rows.size());
  out.values = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      out.values(a, b) = left[static_cast<std::size_t>(a)].dot(right[static_cast<std::size_t>(b)]).real();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bergman measure: radial weights w_l

struct RadialWeightFamily {
  int q = 2;
  int l = 0;
  std::vector<Rational> coefficients;  // coefficient of |z|^{2j} at index j

  [[nodiscard]] double operator()(double t) const {
    double acc = 0.0;
    for (std::size_t j = coefficients.size(); j-- > 0;) acc = acc * t + to_double(coefficients[j]);
    return acc;
  }
};

/// w_l(z) = (l+1)...(l+q-1) sum_{i=1}^{q-1} |z|^{2(i+l-1)} / prod_{1<=j!=i<=q-1} (j-i)
inline RadialWeightFamily radial_weight(int q, int l) {
  if (q < 2 || l < 0) throw Error(Errc::DomainError, "radial weights need q >= 2 and l >= 0");
  RadialWeightFamily w{q, l, std::vector<Rational>(static_cast<std::size_t>(q + l - 1), Rational(0))};
  const Rational lead = pochhammer(l + 1, q - 1);
  for (int i = 1; i <= q - 1; ++i) {
    BigInt den = 1;
    for (int j = 1; j <= q - 1; ++j) {
      if (j != i) den *= (j - i);
    }
    w.coefficients[static_cast<std::size_t>(i + l - 1)] += lead / Rational(den);
  }
  return w;
}

struct WeightMoment {
  Rational exact;
  double quadrature = 0.0;
};

/// Integral over the disc of |z|^{2n} w_l(z) dA, exactly and by quadrature.
inline WeightMoment bergman_weight_moment(int q, int l, int n) {
  if (n < 0) throw Error(Errc::DomainError, "moment index must be nonnegative");
  const auto w = radial_weight(q, l);
  std::vector<Rational> shifted(static_cast<std::size_t>(n), Rational(0));
  shifted.insert(shifted.end(), w.coefficients.begin(), w.coefficients.end());
  WeightMoment out;
  out.exact = radial_integral(shifted);
  out.quadrature = radial_quadrature([&](double t) { return std::pow(t, n) * w(t); });
  return out;
}

// ---------------------------------------------------------------------------
// Complete Pick property

struct PickResult {
  bool passed = true;
  std::optional<int> witness;  // first n violating the inequality

  explicit operator bool() const noexcept { return passed; }
};

/// ((k)_n/(l)_n)^2 <= ((k)_{n-1}/(l)_{n-1}) ((k)_{n+1}/(l)_{n+1}) for 1 <= n <= N.
inline PickResult pick_property_check(int k, int l, int max_n) {
  if (k < 1 || l < 1 || max_n < 1) throw Error(Errc::DomainError, "pick check needs k, l, N >= 1");
  Rational prev = 1;                              // n - 1
  Rational cur = pochhammer_ratio(k, l, 1);       // n
  for (int n = 1; n <= max_n; ++n) {
    Rational next = cur * Rational(k + n) / Rational(l + n);
    if (cur * cur > prev * next) return {false, n};
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {};
}

/// (k, l) Pochhammer parameters of the H_q kernel on a block: (l_b+1, l_b+q).
inline std::pair<int, int> pick_parameters(int q, const Block& b) { return {b.l + 1, b.l + q}; }

}  // namespace treeshift
