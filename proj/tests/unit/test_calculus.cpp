#include "../support.hpp"

#include <poisrep/calculus.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace poisrep;
using poisrep::testing::q;

namespace {

/// Forward (or backward, when step < 0) finite difference of nu(S) along the
/// edge multiset E. The alternating sum of logs is formed as one exact
/// rational, so the only rounding is a single final log.
double finite_difference(const RootedTree& t, const ChainParams& base, VertexSet S, const EdgeMultiset& E,
                         const Rational& step) {
  std::vector<std::pair<int, int>> dirs(E.begin(), E.end());
  std::vector<int> offset(dirs.size(), 0);
  Rational num = 1, den = 1;
  int order = 0;
  for (const auto& [e, c] : dirs) order += c;
  while (true) {
    ChainParams p = base;
    long coeff = 1;
    int parity = 0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const int c = dirs[i].second, k = offset[i];
      p.p[dirs[i].first] += step * k;
      long binom = 1;
      for (int j = 0; j < k; ++j) binom = binom * (c - j) / (j + 1);
      coeff *= binom;
      parity += c - k;
    }
    const Rational ratio = nu_full_entry(t, p, S).ratio();
    const Rational term = power(ratio, static_cast<unsigned long>(coeff));
    if (parity % 2 == 0) num *= term;
    else den *= term;
    std::size_t i = 0;
    while (i < dirs.size() && offset[i] == dirs[i].second) offset[i++] = 0;
    if (i == dirs.size()) break;
    ++offset[i];
  }
  return log_rational(num / den) / std::pow(to_double(step), order);
}

}  // namespace

TEST(Jet, RingOperationsAndDerivatives) {
  auto space = std::make_shared<const JetSpace>(std::vector<int>{2, 1});
  const Jet x = Jet::variable(space, 0, q(3));
  const Jet y = Jet::variable(space, 1, q(1, 2));
  const Jet f = x * x * y;  // x^2 y
  EXPECT_EQ(f.constant(), q(9, 2));
  EXPECT_EQ(f.derivative({1, 0}), 3);   // 2xy
  EXPECT_EQ(f.derivative({2, 0}), 1);   // 2y
  EXPECT_EQ(f.derivative({1, 1}), 6);   // 2x
  EXPECT_EQ(f.derivative({2, 1}), 2);
  const Jet g = log_relative(x);
  EXPECT_EQ(g.derivative({1, 0}), q(1, 3));
  EXPECT_EQ(g.derivative({2, 0}), q(-1, 9));
  const Jet h = reciprocal(x) * x;
  EXPECT_EQ(h.constant(), 1);
  EXPECT_EQ(h.derivative({1, 0}), 0);
  EXPECT_EQ(h.derivative({2, 0}), 0);
  EXPECT_THROW(log_relative(Jet(0)), std::domain_error);
}

TEST(Derivatives, MatchFiniteDifferencesAtInteriorPoints) {
  std::mt19937_64 g(8);
  int checked = 0;
  for (int i = 0; i < 12; ++i) {
    const RootedTree t = poisrep::testing::random_tree(g, 2 + static_cast<int>(g() % 5));
    ChainParams params = poisrep::testing::random_params(g, t);
    for (auto& p : params.p) p = q(1 + static_cast<long>(g() % 8), 10);
    const auto sets = connected_subsets(t);
    const VertexSet S = sets[g() % sets.size()];
    EdgeMultiset E;
    const int order = 1 + static_cast<int>(g() % 3);
    for (int k = 0; k < order; ++k) ++E[static_cast<int>(g() % t.size())];
    const double jet = to_double(d_nu_dp(t, params, S, E));
    const double fd = finite_difference(t, params, S, E, q(1, 1000000));
    EXPECT_NEAR(jet, fd, 1e-3 * (1 + std::fabs(jet))) << "tree " << i << " S " << S.to_string();
    ++checked;
  }
  EXPECT_EQ(checked, 12);
}

TEST(Derivatives, MatchOneSidedDifferencesAtBasePoints) {
  const RootedTree t = spider_tree(4, 2);
  const VertexSet S = octopus_core(4, 2);
  const EdgeMultiset outer = boundary_edges(t, S);
  ASSERT_EQ(outer.size(), 4u);
  for (const Rational& r : {q(1, 2), q(3, 10)}) {
    const ChainParams p0 = ChainParams::homogeneous(t, r, Rational(0));
    const Rational jet = d_nu_dp(t, p0, S, outer, BasePoint::p0);
    EXPECT_NEAR(to_double(jet), finite_difference(t, p0, S, outer, q(1, 1000000)), 1e-3);
    // (1 - r) r^(b-1), not the complementary-Bell closed form
    EXPECT_EQ(jet, p0_boundary_derivative(4, r));
  }
  const ChainParams p1 = ChainParams::homogeneous(t, q(3, 10), Rational(1));
  const EdgeMultiset span = spanning_edges(t, S);
  const Rational jet1 = d_nu_dp(t, p1, S, span, BasePoint::p1);
  EXPECT_NEAR(to_double(jet1), finite_difference(t, p1, S, span, q(-1, 1000000)), 1e-3 * (1 + std::fabs(to_double(jet1))));
  EXPECT_EQ(jet1, closed_form_p1(t, S, q(3, 10)));
}

TEST(Derivatives, ClosedFormPlugIns) {
  EXPECT_EQ(closed_form_p0(3, q(1, 2)), q(1, 4));
  EXPECT_EQ(closed_form_p0(4, q(1, 2)), 0);
  EXPECT_GT(closed_form_p0(4, q(55, 100)), 0);
  EXPECT_THROW(closed_form_p0(1, q(1, 2)), std::invalid_argument);

  const RootedTree two = path_tree(2);
  EXPECT_EQ(closed_form_p1(two, {0, 1}, q(1, 2)), -1);
  EXPECT_EQ(closed_form_p1(two, {0, 1}, q(1, 3)), -2);
  const ChainParams base = ChainParams::homogeneous(two, q(1, 2), q(1, 2));
  EXPECT_EQ(d_nu_dp(two, base, {0, 1}, {{0, 1}}, BasePoint::p1), -1);

  const RootedTree star = star_tree(3);
  EXPECT_EQ(closed_form_p1(star, star.vertices(), q(1, 2)), 0);
  const ChainParams sp = ChainParams::homogeneous(star, q(1, 2), q(1, 2));
  EXPECT_EQ(d_nu_dp(star, sp, star.vertices(), spanning_edges(star, star.vertices()), BasePoint::p1), 0);
}

TEST(Derivatives, BoundaryValuesAtTwoEdgeBoundary) {
  // with |B+(S)| = 2 both descriptions agree
  const RootedTree t = path_tree(4);
  const VertexSet S{1, 2};
  for (long a = 1; a <= 9; ++a) {
    const Rational r = q(a, 10);
    const ChainParams params = ChainParams::homogeneous(t, r, q(1, 2));
    EXPECT_EQ(d_nu_dp(t, params, S, boundary_edges(t, S), BasePoint::p0), closed_form_p0(2, r));
  }
}

TEST(Derivatives, VanishBelowThresholdOrder) {
  std::mt19937_64 g(21);
  int checks = 0;
  for (int i = 0; i < 15; ++i) {
    const RootedTree t = poisrep::testing::random_tree(g, 2 + static_cast<int>(g() % 7));
    const ChainParams params = poisrep::testing::random_params(g, t);
    for (VertexSet S : connected_subsets(t)) {
      const int b = boundaries(t, S).outer.size();
      const int span = static_cast<int>(spanning_edges(t, S).size());
      for (int trial = 0; trial < 3; ++trial) {
        if (b >= 2) {
          EdgeMultiset E;
          const int order = 1 + static_cast<int>(g() % (b - 1));
          for (int k = 0; k < order; ++k) ++E[static_cast<int>(g() % t.size())];
          ASSERT_EQ(d_nu_dp(t, params, S, E, BasePoint::p0), 0) << S.to_string();
          ++checks;
        }
        if (span >= 2 && S.size() >= 2) {
          EdgeMultiset E;
          const int order = 1 + static_cast<int>(g() % (span - 1));
          for (int k = 0; k < order; ++k) ++E[static_cast<int>(g() % t.size())];
          ASSERT_EQ(d_nu_dp(t, params, S, E, BasePoint::p1), 0) << S.to_string();
          ++checks;
        }
      }
    }
  }
  EXPECT_GT(checks, 300);
}

TEST(Derivatives, WrongMultisetOfRightSizeVanishes) {
  const RootedTree t = poisrep::testing::eight_vertex_tree();
  const ChainParams params = ChainParams::homogeneous(t, q(2, 5), q(1, 2));
  const VertexSet S{0, 1, 3};
  const EdgeMultiset ES = boundary_edges(t, S);
  ASSERT_EQ(ES.size(), 4u);
  EXPECT_NE(d_nu_dp(t, params, S, ES, BasePoint::p0), 0);
  EdgeMultiset doubled = ES;
  doubled.erase(doubled.begin());
  ++doubled.begin()->second;
  EXPECT_EQ(d_nu_dp(t, params, S, doubled, BasePoint::p0), 0);
  EdgeMultiset inner = ES;
  inner.erase(inner.begin());
  inner[t.edge_index(0, 1)] = 1;
  EXPECT_EQ(d_nu_dp(t, params, S, inner, BasePoint::p0), 0);

  const EdgeMultiset span = spanning_edges(t, S);
  EXPECT_NE(d_nu_dp(t, params, S, span, BasePoint::p1), 0);
  EdgeMultiset shifted = span;
  shifted.erase(t.edge_index(1, 3));
  shifted[t.edge_index(3, 4)] = 1;
  EXPECT_EQ(d_nu_dp(t, params, S, shifted, BasePoint::p1), 0);
}

TEST(Derivatives, NuVanishesAtFullResampling) {
  std::mt19937_64 g(4);
  for (int i = 0; i < 10; ++i) {
    const RootedTree t = poisrep::testing::random_tree(g, 2 + static_cast<int>(g() % 7));
    ChainParams params = poisrep::testing::random_params(g, t);
    for (auto& p : params.p) p = 1;
    for (VertexSet S : connected_subsets(t))
      if (S.size() >= 2) EXPECT_EQ(nu_sign(nu_connected(t, params, S)), Sign::zero);
  }
}

TEST(Derivatives, Errors) {
  const RootedTree t = path_tree(3);
  const ChainParams params = ChainParams::homogeneous(t, q(1, 2), q(1, 2));
  EXPECT_THROW(d_nu_dp(t, params, {0, 1}, {}), std::invalid_argument);
  EXPECT_THROW(d_nu_dp(t, params, {}, {{0, 1}}), std::invalid_argument);
  EXPECT_THROW(d_nu_dp(t, params, {0, 1}, {{0, 7}}), std::length_error);
  EXPECT_THROW(d_nu_dp(t, params, {0, 1}, {{5, 1}}), std::out_of_range);
}

namespace {

struct Octopus {
  RootedTree tree = octopus_tree(3, 2);
  VertexSet core = octopus_core(3, 2);
  std::vector<int> first, second;  // edge indices per leg
  Octopus() {
    for (int j = 0; j < 3; ++j) {
      const Vertex a = spider_vertex(j, 1, 2), b = spider_vertex(j, 2, 2);
      first.push_back(tree.edge_index(0, a));
      second.push_back(tree.edge_index(a, b));
    }
  }
};

}  // namespace

TEST(OctopusCalculus, CentreDerivativeMatchesProduct) {
  const Octopus o;
  const long num1[] = {1, 2, 1}, den1[] = {2, 3, 5};
  const long num2[] = {3, 1, 4}, den2[] = {4, 7, 9};
  ChainParams params = ChainParams::homogeneous(o.tree, q(2, 3), q(1, 2));
  std::vector<Rational> p1, p2;
  for (int j = 0; j < 3; ++j) {
    p1.push_back(q(num1[j], den1[j]));
    p2.push_back(q(num2[j], den2[j]));
    params.p[o.first[j]] = p1.back();
    params.p[o.second[j]] = p2.back();
  }
  EXPECT_EQ(d_nu_dr(o.tree, params, o.core, {{0, 1}}, BasePoint::r1), d_nu_dr_octopus(p1, p2));
  EXPECT_EQ(d_nu_dr_octopus(std::vector<Rational>(3, q(1, 2)), std::vector<Rational>(3, q(1, 2))), q(-1, 64));
  p2[1] = 0;
  EXPECT_EQ(d_nu_dr_octopus(p1, p2), 0);
  params.p[o.second[1]] = 0;
  EXPECT_EQ(d_nu_dr(o.tree, params, o.core, {{0, 1}}, BasePoint::r1), 0);
  EXPECT_THROW(d_nu_dr_octopus({q(1, 2)}, {q(1, 2)}), std::invalid_argument);
}

TEST(OctopusCalculus, VanishingAwayFromCentre) {
  const Octopus o;
  ChainParams params = ChainParams::homogeneous(o.tree, q(3, 4), q(1, 2));
  params.p[o.first[0]] = q(1, 5);
  params.p[o.second[2]] = q(6, 7);
  ChainParams centre_one = params;
  centre_one.r[0] = 1;
  EXPECT_EQ(nu_sign(nu_connected(o.tree, centre_one, o.core)), Sign::zero);
  for (Vertex v = 1; v < o.tree.order(); ++v) {
    EXPECT_EQ(d_nu_dr(o.tree, params, o.core, {{v, 1}}, BasePoint::r1), 0);
    EXPECT_EQ(d_nu_dr(o.tree, params, o.core, {{v, 2}}, BasePoint::r1), 0);
  }
}

TEST(OctopusCalculus, SecondDerivativeRatioStaysBounded) {
  // |d2 nu / dr_v dr_w| r^m / prod (1 - p_j1) p_j2, fitted on moderate
  // parameters and then checked where the product is tiny
  const Octopus o;
  std::mt19937_64 g(3);
  const long grid[] = {1, 5, 9};
  const std::vector<VertexMultiset> pairs = {{{0, 2}}, {{0, 1}, {1, 1}}, {{1, 1}, {3, 1}}, {{1, 2}}};
  for (long rr : {5L, 8L, 10L}) {
    const Rational r = q(rr, 10);
    double fitted = 0, stressed = 0;
    for (int it = 0; it < 40; ++it) {
      ChainParams params = ChainParams::homogeneous(o.tree, r, q(1, 2));
      Rational prod = 1;
      for (int j = 0; j < 3; ++j) {
        const Rational a = q(grid[g() % 3], 10);
        const Rational b = it < 20 ? q(grid[g() % 3], 10) : q(1, 1000);
        params.p[o.first[j]] = a;
        params.p[o.second[j]] = b;
        prod *= (1 - a) * b;
      }
      for (const auto& K : pairs) {
        const double d = std::fabs(to_double(nu_derivative(o.tree, params, o.core, {}, K)));
        const double ratio = d * std::pow(to_double(r), 3) / to_double(prod);
        (it < 20 ? fitted : stressed) = std::max(it < 20 ? fitted : stressed, ratio);
      }
    }
    EXPECT_GT(fitted, 0);
    EXPECT_LE(stressed, 2 * fitted) << "r = " << rr << "/10";
  }
}
