#include "../support.hpp"

#include <poisrep/thresholds.hpp>

#include <gtest/gtest.h>

using namespace poisrep;
using poisrep::testing::q;

TEST(Combinatorics, StirlingAndComplementaryBell) {
  EXPECT_EQ(stirling2(5, 2), 15);
  EXPECT_EQ(stirling2(6, 3), 90);
  EXPECT_EQ(stirling2(4, 0), 0);
  EXPECT_EQ(stirling2(0, 0), 1);
  const long bell[] = {1, -1, 0, 1, 1, -2, -9, -9, 50, 267, 413};
  for (int n = 0; n <= 10; ++n) EXPECT_EQ(complementary_bell(n), bell[n]) << n;
  EXPECT_THROW(stirling2(65, 2), std::out_of_range);
}

TEST(Combinatorics, EulerianNumbersAndPolylog) {
  EXPECT_EQ(eulerian(3), (std::vector<Integer>{1, 4, 1}));
  EXPECT_EQ(eulerian(4), (std::vector<Integer>{1, 11, 11, 1}));
  const Rational z = q(-2, 3);
  EXPECT_EQ(polylog_neg_order(1, z), z / (1 - z));
  EXPECT_EQ(polylog_neg_order(2, z), z / ((1 - z) * (1 - z)));
  EXPECT_EQ(polylog_neg_order(3, z), z * (1 + z) / ((1 - z) * (1 - z) * (1 - z)));
}

TEST(Sturm, CountsRoots) {
  // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
  const Polynomial p{6, -7, 0, 1};
  const SturmChain s(p);
  EXPECT_EQ(s.count(0, 3), 2);
  EXPECT_EQ(s.count(-4, 3), 3);
  EXPECT_EQ(s.count(1, 2), 1);
  EXPECT_NEAR(*largest_root(p, -4, 3), 2.0, 1e-12);
  EXPECT_FALSE(largest_root(p, 3, 5).has_value());
}

TEST(Thresholds, KnownValues) {
  EXPECT_EQ(r_star(3), -1.0);
  EXPECT_NEAR(r_star(4), -2.0 + std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(r1(3), 0.5, 1e-12);
  EXPECT_NEAR(r1(4), 0.78868, 1e-5);
  EXPECT_FALSE(r0(3).has_value());
  EXPECT_NEAR(*r0(4), 0.5, 1e-12);
  EXPECT_NEAR(*r0(5), 0.54321, 1e-5);
  EXPECT_THROW(r_star(2), std::invalid_argument);
  const auto rows = threshold_table(3, 8);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GT(rows[i].r_star, rows[i - 1].r_star);
    EXPECT_GT(rows[i].r1, rows[i - 1].r1);
  }
}

TEST(Thresholds, BoundaryFunctionValues) {
  EXPECT_EQ(f_k(3, q(1, 2)), q(1, 4));
  EXPECT_EQ(f_k(4, q(1, 2)), 0);
  EXPECT_GT(f_k(4, q(55, 100)), 0);
  EXPECT_LT(f_k(4, q(45, 100)), 0);
  EXPECT_THROW(f_k(4, Rational(1)), std::domain_error);
  EXPECT_EQ(f_poly(1, q(1, 3)), -1);
  EXPECT_EQ(f_poly(3, q(1, 2)), 0);
}

TEST(Thresholds, PolylogFactorZerosMirrorEulerianRoots) {
  // zeros of f_poly(m, .) on (0, 1) are the images r = 1 / (1 - z) of the m - 2
  // Eulerian roots; the largest is r1(m) and the sign is fixed above it
  for (int m = 3; m <= 7; ++m) {
    int changes = 0;
    int last = 0;
    int last_flip = -1;
    for (int k = 1; k < 1000; ++k) {
      const int s = sgn(f_poly(m, q(k, 1000)));
      if (s == 0) continue;
      if (last != 0 && s != last) {
        ++changes;
        last_flip = k;
      }
      last = s;
    }
    EXPECT_EQ(changes, m - 2) << m;
    EXPECT_NEAR(last_flip / 1000.0, r1(m), 1.5e-3) << m;  // one grid step
  }
}
