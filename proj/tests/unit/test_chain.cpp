#include "../support.hpp"

#include <gtest/gtest.h>

using namespace poisrep;
using poisrep::testing::q;

TEST(ChainParams, Validation) {
  const RootedTree t = path_tree(3);
  EXPECT_NO_THROW(ChainParams::homogeneous(t, q(1, 2), q(1, 3)).validate(t));
  EXPECT_THROW(ChainParams::homogeneous(t, q(3, 2), q(1, 3)).validate(t), std::invalid_argument);
  EXPECT_THROW(ChainParams::homogeneous(t, q(1, 2), q(-1, 3)).validate(t), std::invalid_argument);
  ChainParams short_r = ChainParams::homogeneous(t, q(1, 2), q(1, 2));
  short_r.r.pop_back();
  EXPECT_THROW(short_r.validate(t), std::invalid_argument);
  ChainParams raw = ChainParams::homogeneous(t, q(1, 2), q(1, 2));
  raw.r[0] = Rational(5, 10);  // bypasses canonicalisation on purpose
  EXPECT_THROW(raw.validate(t), std::invalid_argument);
  EXPECT_THROW(make_rational(1, 0), std::domain_error);
}

TEST(ProbAllZero, ClosedFormsOnSmallTrees) {
  const RootedTree one = path_tree(1);
  EXPECT_EQ(prob_all_zero(one, ChainParams::homogeneous(one, q(2, 7), {}), {0}), q(2, 7));

  const RootedTree two = path_tree(2);
  const Rational r = q(1, 3), p = q(1, 4);
  // P(X0 = X1 = 0) = r (1 - p + p r)
  EXPECT_EQ(prob_all_zero(two, ChainParams::homogeneous(two, r, p), {0, 1}), r * (1 - p + p * r));
  EXPECT_THROW(prob_all_zero(two, ChainParams::homogeneous(two, r, p), {}), std::invalid_argument);
  EXPECT_EQ(prob_all_zero(two, ChainParams::homogeneous(two, r, Rational(0)), {0, 1}), r);
  EXPECT_EQ(prob_all_zero(two, ChainParams::homogeneous(two, r, Rational(1)), {0, 1}), r * r);
}

TEST(ProbAllZero, MessagePassingMatchesEnumeration) {
  // 200 trees with up to 12 edges; every set on small trees, a sample on large ones
  std::mt19937_64 g(11);
  for (int i = 0; i < 200; ++i) {
    const RootedTree t = poisrep::testing::random_tree(g, 1 + static_cast<int>(g() % 13));
    const ChainParams params = poisrep::testing::random_params(g, t);
    const VertexSet::Bits all = (VertexSet::Bits{1} << t.order()) - 1;
    std::vector<VertexSet> sets{VertexSet(all)};
    if (t.order() <= 6) {
      for (VertexSet::Bits b = 1; b < all; ++b) sets.push_back(VertexSet(b));
    } else {
      for (int k = 0; k < 10; ++k) sets.push_back(VertexSet(static_cast<VertexSet::Bits>(1 + g() % all)));
    }
    for (VertexSet A : sets)
      ASSERT_EQ(prob_all_zero(t, params, A), brute_force_prob_all_zero(t, params, A)) << i << " " << A.to_string();
  }
}

TEST(ProbAllZero, FrozenChainCopiesTheRoot) {
  const RootedTree t = poisrep::testing::eight_vertex_tree();
  ChainParams params = ChainParams::homogeneous(t, q(1, 2), Rational(0));
  params.r[0] = q(2, 9);
  for (VertexSet A : {VertexSet{5}, VertexSet{1, 7}, t.vertices()}) EXPECT_EQ(prob_all_zero(t, params, A), q(2, 9));
}

TEST(ProbAllZero, HomogeneousLawDoesNotDependOnRoot) {
  const RootedTree t = poisrep::testing::eight_vertex_tree();
  const ChainParams params = ChainParams::homogeneous(t, q(2, 5), q(3, 7));
  const auto base = exact_law(t, params);
  for (Vertex v = 1; v < t.order(); ++v) EXPECT_EQ(exact_law(t.rerooted(v), params), base);
}

TEST(ExactLaw, SumsToOneAndMatchesMarginals) {
  const RootedTree t = spider_tree(3, 2);
  const ChainParams params = ChainParams::homogeneous(t, q(3, 10), q(1, 2));
  const auto law = exact_law(t, params);
  Rational total = 0;
  for (const auto& x : law) total += x;
  EXPECT_EQ(total, 1);
  Rational zero_at_0 = 0;
  for (std::size_t x = 0; x < law.size(); ++x)
    if (!(x & 1)) zero_at_0 += law[x];
  EXPECT_EQ(zero_at_0, q(3, 10));
}

TEST(Samplers, DeterministicAndConsistent) {
  const RootedTree t = path_tree(5);
  const ChainParams params = ChainParams::homogeneous(t, q(1, 2), q(1, 3));
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_EQ(sample_recursive(t, params, s), sample_recursive(t, params, s));
    EXPECT_EQ(sample_percolation(t, params, s), sample_percolation(t, params, s));
  }
  // p = 0 copies the root everywhere; r = 1 forces zeros
  const ChainParams frozen = ChainParams::homogeneous(t, q(1, 2), Rational(0));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Assignment x = sample_recursive(t, frozen, s);
    EXPECT_TRUE(x.empty() || x == t.vertices());
    const Assignment y = sample_percolation(t, frozen, s);
    EXPECT_TRUE(y.empty() || y == t.vertices());
  }
  const ChainParams zeros = ChainParams::homogeneous(t, Rational(1), q(1, 2));
  EXPECT_TRUE(sample_recursive(t, zeros, 3).empty());
}

TEST(ExactBernoulli, Endpoints) {
  CounterRng g(1);
  const ExactBernoulli never(Rational(0)), always(Rational(1));
  for (int i = 0; i < 1000; ++i) {
    EXPECT_FALSE(never(g));
    EXPECT_TRUE(always(g));
  }
}
