#pragma once

// Exact rational helpers (Pochhammer symbols, finite differences, radial
// moments on the disc) and the one floating-point quadrature rule the library
// uses. All identity checks elsewhere are phrased in terms of these.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "treeshift/error.hpp"

namespace treeshift {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// "p/q" in lowest terms, or "p" when the denominator is 1.
inline std::string to_string(const Rational& r) { return r.str(); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline bool is_integer(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

/// Rising factorial x(x+1)...(x+k-1) for a positive integer base.
inline Rational pochhammer(std::int64_t x, std::int64_t k) {
  if (x < 1 || k < 0) {
    throw Error(Errc::DomainError, "pochhammer needs x >= 1 and k >= 0");
  }
  BigInt acc = 1;
  for (std::int64_t i = 0; i < k; ++i) acc *= (x + i);
  return Rational(acc);
}

/// (a)_k / (b)_k, reduced.
inline Rational pochhammer_ratio(std::int64_t a, std::int64_t b, std::int64_t k) {
  if (a < 1 || b < 1 || k < 0) {
    throw Error(Errc::DomainError, "pochhammer_ratio needs a, b >= 1 and k >= 0");
  }
  BigInt num = 1;
  BigInt den = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    num *= (a + i);
    den *= (b + i);
  }
  return Rational(num, den);
}

/// (x)_{-j} = 1/(x-j)_j, defined here only when x - j >= 1.
inline Rational pochhammer_negative(std::int64_t x, std::int64_t j) {
  if (j < 0 || x - j < 1) {
    throw Error(Errc::DomainError, "pochhammer_negative needs 0 <= j <= x - 1");
  }
  return Rational(1) / pochhammer(x - j, j);
}

inline BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  BigInt acc = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    acc *= (n - k + i);
    acc /= i;
  }
  return acc;
}

struct MomentSequence {
  std::vector<Rational> values;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  const Rational& operator[](std::size_t k) const { return values[k]; }

  template <class F>
  static MomentSequence generate(std::size_t length, F&& term) {
    MomentSequence s;
    s.values.reserve(length);
    for (std::size_t k = 0; k < length; ++k) s.values.push_back(Rational(term(k)));
    return s;
  }
};

/// sum_{k=0}^{q} (-1)^k C(q,k) seq[k0 + k]
inline Rational alternating_binomial_sum(const MomentSequence& seq, int q, std::size_t k0) {
  if (q < 0 || k0 + static_cast<std::size_t>(q) >= seq.size()) {
    throw Error(Errc::IndexOutOfRange, "alternating_binomial_sum window exceeds sequence");
  }
  Rational acc = 0;
  for (int k = 0; k <= q; ++k) {
    Rational term = Rational(binomial(q, k)) * seq[k0 + static_cast<std::size_t>(k)];
    if (k % 2 == 0) {
      acc += term;
    } else {
      acc -= term;
    }
  }
  return acc;
}

struct HausdorffViolation {
  int order;            // m
  std::size_t index;    // k
  Rational value;       // (-1)^m (Delta^m seq)_k, which came out negative
};

struct HausdorffResult {
  bool passed = true;
  std::optional<HausdorffViolation> violation;

  explicit operator bool() const noexcept { return passed; }
};

/// Complete monotonicity up to `order`: (-1)^m (Delta^m seq)_k >= 0 for every
/// m <= order and every k with k + m inside the sequence. Reports the first
/// violation in (m, k) lexicographic order.
inline HausdorffResult hausdorff_check(const MomentSequence& seq, int order) {
  if (order < 0 || static_cast<std::size_t>(order) >= seq.size()) {
    throw Error(Errc::IndexOutOfRange, "hausdorff_check order must be below the sequence length");
  }
  std::vector<Rational> diff = seq.values;
  for (int m = 0; m <= order; ++m) {
    for (std::size_t k = 0; k < diff.size(); ++k) {
      const Rational signed_value = (m % 2 == 0) ? diff[k] : Rational(-diff[k]);
      if (signed_value < 0) {
        return {false, HausdorffViolation{m, k, signed_value}};
      }
    }
    for (std::size_t k = 0; k + 1 < diff.size(); ++k) diff[k] = diff[k + 1] - diff[k];
    diff.pop_back();
  }
  return {};
}

/// Integral over the unit disc, against normalized area measure, of
/// sum_j c_j |z|^{2j}; each monomial contributes c_j / (j + 1).
inline Rational radial_integral(std::span<const Rational> coefficients) {
  Rational acc = 0;
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    acc += coefficients[j] / Rational(static_cast<std::int64_t>(j) + 1);
  }
  return acc;
}

inline constexpr unsigned kRadialQuadratureNodes = 64;

/// Integral over the disc of g(|z|^2) dA. With t = |z|^2 the normalized area
/// measure becomes dt on [0,1], integrated by 64-node Gauss-Legendre.
template <class F>
double radial_quadrature(F&& g) {
  using Rule = boost::math::quadrature::gauss<double, kRadialQuadratureNodes>;
  return Rule::integrate([&](double t) { return static_cast<double>(g(t)); }, 0.0, 1.0);
}

}  // namespace treeshift
