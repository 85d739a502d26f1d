#include "../support.hpp"

#include <poisrep/mc.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace poisrep;
using poisrep::testing::q;

TEST(Rng, CounterStreamsReplay) {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  CounterRng c(42);
  EXPECT_NE(c.split(0)(), c.split(1)());
  double mean = 0;
  CounterRng u(7);
  for (int i = 0; i < 100000; ++i) mean += u.uniform();
  EXPECT_NEAR(mean / 100000, 0.5, 0.005);
}

TEST(Rng, PoissonMoments) {
  CounterRng g(3);
  const double lambda = 0.7;
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double k = poisson_count(g, lambda);
    sum += k;
    sq += k * k;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, lambda, 0.01);
  EXPECT_NEAR(sq / n - mean * mean, lambda, 0.015);
  EXPECT_EQ(poisson_count(g, 0.0), 0u);
}

TEST(Field, RejectsNegativeIntensity) {
  const RootedTree t = octopus_tree(3, 2);
  const SignedMeasure m = nu_connected_all(t, ChainParams::homogeneous(t, q(45, 100), q(95, 100)));
  EXPECT_THROW(PoissonField::from_measure(m), std::domain_error);
  const RootedTree p = path_tree(3);
  const PoissonField f = PoissonField::from_measure(nu_full(p, ChainParams::homogeneous(p, q(1, 2), q(1, 2))));
  EXPECT_EQ(f.atoms.size(), 6u);  // six connected sets, all positive
}

TEST(Tally, IndependentOfThreadCount) {
  const RootedTree t = path_tree(4);
  const ChainSampler chain(t, ChainParams::homogeneous(t, q(1, 2), q(1, 3)));
  const Sampler s = [&](CounterRng& g) { return chain.draw_recursive(g); };
  set_thread_limit(1);
  const auto one = tally(s, 4, 20000, 5);
  set_thread_limit(4);
  const auto four = tally(s, 4, 20000, 5);
  set_thread_limit(0);
  EXPECT_EQ(one, four);
  std::uint64_t total = 0;
  for (auto c : one) total += c;
  EXPECT_EQ(total, 20000u);
}

TEST(ZeroPatterns, EmpiricalFromCounts) {
  // two vertices, counts for x = 00, 10, 01, 11 (bit v = X(v))
  const std::vector<std::uint64_t> counts = {4, 3, 2, 1};
  const auto z = empirical_zero_probabilities(counts, 2);
  EXPECT_DOUBLE_EQ(z[0], 1.0);
  EXPECT_DOUBLE_EQ(z[1], 0.6);  // X(0) = 0
  EXPECT_DOUBLE_EQ(z[2], 0.7);  // X(1) = 0
  EXPECT_DOUBLE_EQ(z[3], 0.4);
}

TEST(ChiSquare, DetectsWrongLaw) {
  const RootedTree t = path_tree(3);
  const ChainParams params = ChainParams::homogeneous(t, q(1, 2), q(1, 2));
  const ChainSampler chain(t, params);
  const auto counts = tally([&](CounterRng& g) { return chain.draw_recursive(g); }, 3, 100000, 1);
  EXPECT_TRUE(goodness_of_fit(counts, exact_law(t, params)).pass);
  const auto wrong = exact_law(t, ChainParams::homogeneous(t, q(1, 2), q(3, 5)));
  EXPECT_FALSE(goodness_of_fit(counts, wrong).pass);
  EXPECT_TRUE(compare_laws(counts, counts).pass);
  EXPECT_THROW(compare_laws(counts, std::vector<std::uint64_t>(4)), std::invalid_argument);
}

TEST(ChiSquare, SelfCalibrationAtSmallSampleSize) {
  // 50 independent seeds at alpha = 0.01: P(more than 4 rejections) < 2e-3
  const RootedTree t = star_tree(3);
  const ChainParams params = ChainParams::homogeneous(t, q(1, 2), q(1, 2));
  const ChainSampler chain(t, params);
  const auto law = exact_law(t, params);
  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto counts = tally([&](CounterRng& g) { return chain.draw_percolation(g); }, 4, 2000, 1000 + seed);
    rejections += !goodness_of_fit(counts, law).pass;
  }
  EXPECT_LE(rejections, 4);
}

TEST(Closure, FieldMatchesChainOnSmallTree) {
  const RootedTree t = octopus_tree(3, 1);
  const ChainParams params = ChainParams::homogeneous(t, q(1, 2), q(1, 2));
  const PoissonField field = PoissonField::from_measure(nu_full(t, params));
  const auto counts = tally([&](CounterRng& g) { return sample_poisson_field(field, g); }, 4, 200000, 9);
  EXPECT_TRUE(check_zero_patterns(counts, t, params).pass);
  EXPECT_TRUE(goodness_of_fit(counts, exact_law(t, params)).pass);
}
