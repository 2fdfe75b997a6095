#include <random>
#include <string>

#include <gtest/gtest.h>

#include "corpus.hpp"
#include "treeshift/classify.hpp"

using namespace treeshift;

namespace {

Errc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::DomainError;
}

bool equivalent(const Tree& a, const Tree& b, int q, int horizon = 8) {
  return decide_equivalence(a, b, q, horizon).result != Verdict::NotEquivalent;
}

}  // namespace

TEST(CokernelDimension, Examples) {
  EXPECT_EQ(cokernel_dimension(corpus::line()), 1);
  EXPECT_EQ(cokernel_dimension(corpus::fork3()), 3);
  EXPECT_EQ(cokernel_dimension(corpus::branch_0_1()), 3);
  EXPECT_EQ(cokernel_dimension(corpus::twin_a()), 4);
}

TEST(DecideEquivalence, IsomorphicRelabelling) {
  const Tree t1 = corpus::branch_0_1();
  const Tree t2 = corpus::make("r", {{"r", {"x", "y"}}, {"y", {"u", "w"}}}, {"x", "u", "w"});
  const auto v = decide_equivalence(t1, t2, 3, 5);
  EXPECT_EQ(v.result, Verdict::Equivalent);
  EXPECT_EQ(v.certainty, Certainty::Exact);
  ASSERT_TRUE(v.unitary.has_value());
  ASSERT_EQ(v.unitary->grades.size(), 3u);
  EXPECT_EQ(v.unitary->grades[2].kind, UnitaryGrade::Kind::Generation);
  EXPECT_EQ(v.unitary->grades[2].generation, 1);
  EXPECT_EQ(v.unitary->grades[2].matrix, Eigen::MatrixXcd::Identity(1, 1));
}

TEST(DecideEquivalence, TotalsVersusProfiles) {
  const auto q2 = decide_equivalence(corpus::fork3(), corpus::branch_0_1(), 2, 5);
  EXPECT_EQ(q2.result, Verdict::NotEquivalent);
  EXPECT_EQ(q2.certainty, Certainty::Exact);
  ASSERT_TRUE(q2.witness_generation.has_value());
  EXPECT_EQ(*q2.witness_generation, 0);
  EXPECT_FALSE(q2.unitary.has_value());

  const auto q1 = decide_equivalence(corpus::fork3(), corpus::branch_0_1(), 1, 5);
  EXPECT_EQ(q1.result, Verdict::Equivalent);
  EXPECT_EQ(q1.cokernel1, 3);
  EXPECT_EQ(q1.cokernel2, 3);
  EXPECT_FALSE(q1.witness_generation.has_value());

  EXPECT_EQ(decide_equivalence(corpus::fork2(), corpus::fork3(), 1, 5).result, Verdict::NotEquivalent);
}

TEST(DecideEquivalence, LineWithItself) {
  for (int q = 1; q <= 5; ++q) {
    const auto v = decide_equivalence(corpus::line(), corpus::line(), q, 3);
    EXPECT_EQ(v.result, Verdict::Equivalent);
    ASSERT_TRUE(v.unitary.has_value());
    ASSERT_EQ(v.unitary->grades.size(), 1u);
    EXPECT_EQ(v.unitary->grades[0].kind, UnitaryGrade::Kind::RootLine);
    EXPECT_EQ(v.unitary->grades[0].matrix, Eigen::MatrixXcd::Identity(1, 1));
  }
}

TEST(DecideEquivalence, HorizonLimited) {
  const Tree deep = corpus::branch_1_3();
  const Tree other = corpus::make("r", {{"r", {"a"}}, {"a", {"b", "c"}}}, {"b", "c"});
  const auto v = decide_equivalence(deep, other, 2, 2);
  EXPECT_EQ(v.result, Verdict::EquivalentUpToHorizon);
  EXPECT_EQ(v.certainty, Certainty::HorizonLimited);
  const auto full = decide_equivalence(deep, other, 2, 3);
  EXPECT_EQ(full.result, Verdict::NotEquivalent);
  EXPECT_EQ(*full.witness_generation, 3);
  EXPECT_EQ(decide_equivalence(deep, deep, 2, 3).certainty, Certainty::Exact);
  EXPECT_EQ(error_of([&] { (void)decide_equivalence(deep, other, 0, 3); }), Errc::InvalidQ);
}

TEST(DecideEquivalence, EquivalenceRelationOnRandomTrees) {
  std::mt19937_64 rng(31);
  std::vector<Tree> trees;
  for (int i = 0; i < 14; ++i) trees.push_back(corpus::random_tree(rng, 2, 3));
  for (const auto& [name, t] : corpus::all()) trees.push_back(t);
  for (int q : {1, 2, 3}) {
    for (std::size_t a = 0; a < trees.size(); ++a) {
      EXPECT_TRUE(equivalent(trees[a], trees[a], q));
      for (std::size_t b = 0; b < trees.size(); ++b) {
        const bool ab = equivalent(trees[a], trees[b], q);
        EXPECT_EQ(ab, equivalent(trees[b], trees[a], q));
        if (q >= 2 && ab) {
          EXPECT_TRUE(equivalent(trees[a], trees[b], 1));
        }
        if (canonical_form(trees[a], 8) == canonical_form(trees[b], 8)) {
          EXPECT_TRUE(ab);
        }
        for (std::size_t c = 0; c < trees.size(); ++c) {
          if (ab && equivalent(trees[b], trees[c], q)) {
            EXPECT_TRUE(equivalent(trees[a], trees[c], q));
          }
        }
      }
    }
  }
}

TEST(DecideEquivalence, EquivalentButNotIsomorphic) {
  const Tree a = corpus::twin_a();
  const Tree b = corpus::twin_b();
  EXPECT_EQ(depth_profile(a, 8).entries, depth_profile(b, 8).entries);
  EXPECT_NE(canonical_form(a, 8), canonical_form(b, 8));
  for (int q = 1; q <= 6; ++q) {
    const auto v = decide_equivalence(a, b, q, 8);
    EXPECT_EQ(v.result, Verdict::Equivalent) << q;
    ASSERT_TRUE(v.unitary.has_value());
    EXPECT_EQ(v.unitary->dimension(), 4u);
  }
}

TEST(GradedUnitary, BuildAndErrors) {
  const auto u = build_graded_unitary(corpus::fork3(), corpus::make("x", {{"x", {"p", "q", "s"}}}, {"p", "q", "s"}), 2, 4);
  ASSERT_EQ(u.grades.size(), 2u);
  EXPECT_EQ(u.grades[1].matrix, Eigen::MatrixXcd::Identity(2, 2));
  EXPECT_EQ(u.grades[1].target[1].block, std::optional<VertexId>("x"));
  EXPECT_EQ(error_of([] { (void)build_graded_unitary(corpus::fork3(), corpus::branch_0_1(), 2, 4); }),
            Errc::NotEquivalent);
  const auto q1 = build_graded_unitary(corpus::fork3(), corpus::branch_0_1(), 1, 4);
  ASSERT_EQ(q1.grades.size(), 2u);
  EXPECT_EQ(q1.grades[1].kind, UnitaryGrade::Kind::Ungraded);
  EXPECT_EQ(error_of([] { (void)build_forced_unitary(corpus::fork2(), corpus::fork3(), 2); }),
            Errc::DimensionMismatch);
}

TEST(VerifyIntertwining, EquivalentPairs) {
  const Tree a = corpus::twin_a();
  const Tree b = corpus::twin_b();
  for (int q = 1; q <= 5; ++q) {
    const auto u = build_graded_unitary(a, b, q, 8);
    const auto rep = verify_intertwining(a, b, q, u, 12);
    EXPECT_LT(rep.residual, 1e-8) << q;
    EXPECT_LT(rep.norm_defect, 1e-10);
    EXPECT_LT(rep.max_ratio_deviation, 1e-12);
    EXPECT_GT(rep.test_vectors, 0);
  }
  for (const auto& [name, t] : corpus::all()) {
    const auto u = build_graded_unitary(t, t, 3, 6);
    const auto rep = verify_intertwining(t, t, 3, u, 8);
    EXPECT_LT(rep.residual, 1e-12) << name;
  }
}

TEST(VerifyIntertwining, QOnePairWithDifferentProfiles) {
  const auto u = build_graded_unitary(corpus::fork3(), corpus::branch_0_1(), 1, 4);
  const auto rep = verify_intertwining(corpus::fork3(), corpus::branch_0_1(), 1, u, 10);
  EXPECT_LT(rep.residual, 1e-10);
  EXPECT_LT(rep.norm_defect, 1e-10);
}

TEST(VerifyIntertwining, ForcedNonEquivalentPair) {
  const auto u = build_forced_unitary(corpus::fork3(), corpus::branch_0_1(), 2);
  const auto rep = verify_intertwining(corpus::fork3(), corpus::branch_0_1(), 2, u, 10);
  EXPECT_GT(rep.residual, 0.01);
  EXPECT_GT(rep.max_ratio_deviation, 0.01);
}

TEST(VerifyIntertwining, SeedsAndTruncation) {
  const Tree a = corpus::twin_a();
  const Tree b = corpus::twin_b();
  const auto u = build_graded_unitary(a, b, 2, 8);
  const auto r1 = verify_intertwining(a, b, 2, u, 9, 1);
  const auto r2 = verify_intertwining(a, b, 2, u, 9, 1);
  EXPECT_EQ(r1.residual, r2.residual);
  EXPECT_EQ(error_of([&] { (void)verify_intertwining(a, b, 2, u, 1); }), Errc::TruncationLoss);
}
