#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "corpus.hpp"
#include "treeshift/treeshift.hpp"

using namespace treeshift;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds; 0 for none
  std::function<Outcome()> body;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

std::vector<Tree::Vertex> vertices_to_depth(const Tree& t, int max_depth) {
  std::vector<Tree::Vertex> out;
  for (int n = 0; n <= max_depth; ++n) {
    auto g = generation_vertices(t, n);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

Outcome moment_identity() {
  Outcome o;
  double worst = 0.0;
  int checks = 0;
  for (const auto& [name, t] : corpus::all()) {
    for (int q = 1; q <= 4; ++q) {
      const auto s = make_shift(t, q, ShiftKind::Dirichlet, 12);
      for (const auto& v : vertices_to_depth(t, 6)) {
        const auto id = t.name(v);
        for (int k = 0; k <= 6; ++k) {
          const double exact = to_double(moment(s, id, k));
          const double rel = std::abs(moment_via_matrix(s, id, k) - exact) / exact;
          worst = std::max(worst, rel);
          ++checks;
          if (rel > 1e-10) o.passed = false;
        }
      }
    }
  }
  o.detail = std::to_string(checks) + " comparisons, max relative error " + sci(worst);
  return o;
}

Outcome q_isometry() {
  Outcome o;
  int zeros = 0;
  int nonzero = 0;
  for (const auto& [name, t] : corpus::all()) {
    for (int q = 1; q <= 6; ++q) {
      const auto s = make_shift(t, q, ShiftKind::Dirichlet, 1);
      for (const auto& v : vertices_to_depth(t, 6)) {
        const auto id = t.name(v);
        if (q_isometry_defect(s, id, q) != 0) {
          o.passed = false;
        } else {
          ++zeros;
        }
        if (q >= 2) {
          if (q_isometry_defect(s, id, q - 1) == 0) {
            o.passed = false;
          } else {
            ++nonzero;
          }
        }
      }
    }
  }
  o.detail = std::to_string(zeros) + " exact zero q-defects, " + std::to_string(nonzero) + " nonzero (q-1)-defects";
  return o;
}

Outcome subnormality() {
  Outcome o;
  int dual_pass = 0;
  int control_fail = 0;
  for (const auto& [name, t] : corpus::all()) {
    for (int q = 2; q <= 4; ++q) {
      const auto dual = make_shift(t, q, ShiftKind::CauchyDual, 1);
      const auto dir = make_shift(t, q, ShiftKind::Dirichlet, 1);
      for (const auto& v : vertices_to_depth(t, 10)) {
        auto seq = [&](const ShiftOperator& s) {
          return MomentSequence::generate(13, [&](std::size_t k) { return moment(s, v, static_cast<int>(k)); });
        };
        if (hausdorff_check(seq(dual), 12).passed) {
          ++dual_pass;
        } else {
          o.passed = false;
        }
        const auto control = hausdorff_check(seq(dir), 1);
        if (!control.passed && control.violation && control.violation->order == 1) {
          ++control_fail;
        } else {
          o.passed = false;
        }
      }
    }
  }
  o.detail = std::to_string(dual_pass) + " dual sequences pass at order 12, " + std::to_string(control_fail) +
             " Dirichlet sequences fail at order 1";
  return o;
}

Outcome kernel_structure() {
  Outcome o;
  double worst = 0.0;
  for (const auto& [name, t] : corpus::all()) {
    for (int q = 1; q <= 4; ++q) {
      const auto s = make_shift(t, q, ShiftKind::CauchyDual, 10);
      for (int j = 0; j <= 5; ++j) {
        for (int k = 0; k <= 5; ++k) {
          const auto c = kernel_matrix_oracle(s, j, k);
          for (Eigen::Index a = 0; a < c.values.rows(); ++a) {
            for (Eigen::Index b = 0; b < c.values.cols(); ++b) {
              const double expected =
                  (j == k && a == b) ? to_double(dirichlet_coefficient(q, c.row_l[static_cast<std::size_t>(a)], k)) : 0.0;
              worst = std::max(worst, std::abs(c.values(a, b) - expected));
            }
          }
        }
      }
    }
  }
  if (worst > 1e-10) o.passed = false;
  int sums = 0;
  for (const auto& [name, t] : corpus::all()) {
    for (const auto& v : vertices_to_depth(t, 6)) {
      for (int k = 0; k <= 5; ++k) {
        if (card_identity_sum(t, v, k) != 1) o.passed = false;
        ++sums;
      }
    }
  }
  o.detail = "max |C_jk - closed form| " + sci(worst) + ", " + std::to_string(sums) +
             " card identity sums exactly 1";
  return o;
}

GradedFunction<Rational> random_function(const Tree& t, std::mt19937_64& rng, int layers) {
  std::uniform_int_distribution<int> u(-4, 4);
  GradedFunction<Rational> f{kernel_block_spec(t), {}};
  for (int n = 0; n < layers; ++n) {
    auto e = KernelElement<Rational>::zero(f.spec);
    for (std::size_t b = 0; b < f.spec.blocks.size(); ++b) {
      auto& coords = e.blocks[b];
      Rational sum = 0;
      for (std::size_t i = 0; i < coords.size(); ++i) {
        coords[i] = Rational(u(rng), 1 + (u(rng) + 4) % 3);
        sum += coords[i];
      }
      if (!f.spec.blocks[b].is_root()) coords.back() -= sum;
    }
    f.layers.push_back(std::move(e));
  }
  return f;
}

Outcome norm_identities() {
  Outcome o;
  std::mt19937_64 rng(kDefaultSeed);
  const auto trees = corpus::all();
  int functions = 0;
  for (int i = 0; i < 100; ++i) {
    const Tree& t = trees[static_cast<std::size_t>(i) % trees.size()].tree;
    const auto f = random_function(t, rng, 1 + i % 9);
    for (int q = 1; q <= 5; ++q) {
      const auto s = make_shift(t, q, ShiftKind::Dirichlet, 1);
      if (dirichlet_norm(f, q) != dirichlet_norm_via_moments(f, s)) o.passed = false;
      if (dirichlet_norm(f, q) < dirichlet_norm(f, 1)) o.passed = false;
    }
    if (h2_norm_via_measure_decomposition(f) != dirichlet_norm(f, 2)) o.passed = false;
    ++functions;
  }
  o.detail = std::to_string(functions) + " random graded functions, q = 1..5";
  return o;
}

Outcome bergman_measure() {
  Outcome o;
  double worst = 0.0;
  for (int q = 2; q <= 5; ++q) {
    for (int l = 0; l <= 6; ++l) {
      for (int n = 0; n <= 10; ++n) {
        const auto m = bergman_weight_moment(q, l, n);
        if (m.exact != dirichlet_coefficient(q, l, n)) o.passed = false;
        worst = std::max(worst, std::abs(m.quadrature - to_double(m.exact)));
      }
    }
  }
  if (worst > 1e-10) o.passed = false;
  o.detail = "exact moments match block coefficients, max quadrature error " + sci(worst);
  return o;
}

Outcome complete_pick() {
  Outcome o;
  int blocks = 0;
  int controls = 0;
  std::vector<Block> all{Block::root("root")};
  for (int nv = 0; nv <= 10; ++nv) all.push_back(Block::branching("v", nv, {"x", "y"}));
  for (const auto& [name, t] : corpus::all()) {
    for (const auto& b : kernel_block_spec(t).blocks) all.push_back(b);
  }
  for (int q = 1; q <= 6; ++q) {
    for (const auto& b : all) {
      const auto [k, l] = pick_parameters(q, b);
      if (!pick_property_check(k, l, 100).passed) o.passed = false;
      ++blocks;
      if (q >= 2) {
        if (pick_property_check(l, k, 100).passed) o.passed = false;
        ++controls;
      }
    }
  }
  o.detail = std::to_string(blocks) + " blocks log-convex to n = 100, " + std::to_string(controls) +
             " reversed controls fail";
  return o;
}

Outcome classification() {
  Outcome o;
  std::ostringstream d;
  const Tree t3 = corpus::fork3();
  const Tree t01 = corpus::branch_0_1();
  const auto q1 = decide_equivalence(t3, t01, 1, 6);
  const auto q2 = decide_equivalence(t3, t01, 2, 6);
  if (q1.result != Verdict::Equivalent || q1.cokernel1 != 3 || q1.cokernel2 != 3) o.passed = false;
  if (q2.result != Verdict::NotEquivalent || q2.witness_generation != 0) o.passed = false;

  const Tree a = corpus::twin_a();
  const Tree b = corpus::twin_b();
  if (canonical_form(a, 12) == canonical_form(b, 12)) o.passed = false;
  if (depth_profile(a, 12).entries != depth_profile(b, 12).entries) o.passed = false;
  double worst = 0.0;
  for (int q = 1; q <= 6; ++q) {
    const auto v = decide_equivalence(a, b, q, 8);
    if (v.result != Verdict::Equivalent || !v.unitary) {
      o.passed = false;
      continue;
    }
    const auto rep = verify_intertwining(a, b, q, *v.unitary, 12);
    worst = std::max(worst, rep.residual);
    if (rep.norm_defect > 1e-10) o.passed = false;
  }
  if (worst > 1e-8) o.passed = false;
  d << "{0:2} vs {0:1,1:1}: q=1 " << verdict_name(q1.result) << ", q=2 " << verdict_name(q2.result)
    << " at n=" << q2.witness_generation.value_or(-1) << "; twin pair residual " << sci(worst) << " at depth 12";
  o.detail = d.str();
  return o;
}

Outcome defect_eigenvalue() {
  Outcome o;
  int configurations = 0;
  double worst = 0.0;
  for (const auto& [name, t] : corpus::all()) {
    for (const auto& bv : branching_vertices(t)) {
      const auto v = t.resolve(bv.vertex);
      std::vector<std::string> grandchildren;
      bool single = true;
      for (const auto& c : t.children(v)) {
        const auto gc = t.children(c);
        if (gc.size() != 1) single = false;
        if (!gc.empty()) grandchildren.push_back(t.name(gc.front()));
      }
      if (!single) continue;
      for (int q = 1; q <= 6; ++q) {
        const auto s = make_shift(t, q, ShiftKind::CauchyDual, bv.depth + 2 + q);
        const double eigen = 1.0 - double(q) * (bv.depth + 2) / double(bv.depth + q + 1);
        for (const auto& h : helmert_basis(grandchildren.size())) {
          CoordinateVector f = s.zero();
          for (std::size_t i = 0; i < h.size(); ++i) f += h[i] * s.basis_vector(grandchildren[i]);
          const double err = (defect_operator_apply(s, q, f) - eigen * f).norm();
          worst = std::max(worst, err);
          if (err > 1e-10) o.passed = false;
          if ((q == 1) != (std::abs(eigen) < 1e-15)) o.passed = false;
          ++configurations;
        }
      }
    }
  }
  if (configurations == 0) o.passed = false;
  o.detail = std::to_string(configurations) + " grandchild configurations, max error " + sci(worst) +
             ", eigenvalue zero exactly when q = 1";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "moment identity, matrix vs Pochhammer ratio", 10.0, moment_identity},
      {2, "q-isometry defect exact zero, (q-1)-defect nonzero", 1.0, q_isometry},
      {3, "Cauchy dual moments completely monotone, Dirichlet control fails", 1.0, subnormality},
      {4, "kernel block structure of C_jk and card identity", 0.0, kernel_structure},
      {5, "Dirichlet norm identities and H_q in H_1 domination", 0.0, norm_identities},
      {6, "Bergman radial weight moments", 0.0, bergman_measure},
      {7, "complete Pick log-convexity", 0.0, complete_pick},
      {8, "classification by depth profile and graded unitary", 30.0, classification},
      {9, "defect operator eigenvalue on grandchild configurations", 0.0, defect_eigenvalue},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      out.passed = false;
      out.detail += "; over the " + std::to_string(c.time_limit) + " s budget";
    }
    if (!out.passed) ++failures;
    std::printf("%s criterion %d: %s (%.3f s) %s\n", out.passed ? "PASS" : "FAIL", c.id, c.title, secs,
                out.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
