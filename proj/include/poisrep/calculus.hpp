#pragma once

// Exact partial derivatives of nu(S) in the edge parameters p_e and vertex
// parameters r_v, by forward-mode jets over the rationals, together with the
// closed forms they are compared against.

#include <poisrep/chain.hpp>
#include <poisrep/jet.hpp>
#include <poisrep/measure.hpp>
#include <poisrep/thresholds.hpp>
#include <poisrep/tree.hpp>

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace poisrep {

inline constexpr int kDefaultJetCap = 6;

/// Parameter index -> multiplicity; d/dp_E means the mixed partial with
/// each direction repeated mult times.
using Multiset = std::map<int, int>;
using EdgeMultiset = Multiset;
using VertexMultiset = Multiset;

inline int total_multiplicity(const Multiset& m) {
  int t = 0;
  for (const auto& [k, c] : m) {
    if (c < 0) throw std::invalid_argument("negative multiplicity");
    t += c;
  }
  return t;
}

inline Multiset multiset_of(const std::vector<int>& items) {
  Multiset m;
  for (int x : items) ++m[x];
  return m;
}

enum class BasePoint { given, p0, p1, r1 };

/// The parameters with the base point substituted.
inline ChainParams at_base(const ChainParams& params, BasePoint at) {
  ChainParams out = params;
  switch (at) {
    case BasePoint::p0: for (auto& x : out.p) x = 0; break;
    case BasePoint::p1: for (auto& x : out.p) x = 1; break;
    case BasePoint::r1: for (auto& x : out.r) x = 1; break;
    case BasePoint::given: break;
  }
  return out;
}

/// Mixed partial of nu(S) with respect to edges E and vertices K, at params.
/// Every P(X(A) == 0) is a polynomial in the parameters, so 0/1 base points
/// are fine as long as all r_v > 0.
inline Rational nu_derivative(const RootedTree& tree, const ChainParams& params, VertexSet S,
                              const EdgeMultiset& E, const VertexMultiset& K, int jet_cap = kDefaultJetCap) {
  params.validate(tree);
  detail::require_positive_r(params);
  require_nonempty(S, tree);
  const int order = total_multiplicity(E) + total_multiplicity(K);
  if (order < 1) throw std::invalid_argument("derivative needs a nonempty multiset");
  if (order > jet_cap)
    throw std::length_error("derivative order " + std::to_string(order) + " exceeds jet cap " + std::to_string(jet_cap));

  std::vector<int> caps;
  std::vector<int> exponents;
  for (const auto& [e, c] : E) {
    if (e < 0 || e >= tree.size()) throw std::out_of_range("edge index out of range");
    if (c == 0) continue;
    caps.push_back(c);
    exponents.push_back(c);
  }
  for (const auto& [v, c] : K) {
    if (v < 0 || v >= tree.order()) throw std::out_of_range("vertex index out of range");
    if (c == 0) continue;
    caps.push_back(c);
    exponents.push_back(c);
  }
  auto space = std::make_shared<const JetSpace>(caps);

  std::vector<Jet> r(params.r.begin(), params.r.end());
  std::vector<Jet> p(params.p.begin(), params.p.end());
  int dir = 0;
  for (const auto& [e, c] : E)
    if (c > 0) { p[e] = Jet::variable(space, dir, params.p[e]); ++dir; }
  for (const auto& [v, c] : K)
    if (c > 0) { r[v] = Jet::variable(space, dir, params.r[v]); ++dir; }

  const auto terms = (S.size() >= 2 && is_connected(tree, S)) || S.size() == 1
                         ? connected_terms(tree, S)
                         : inversion_terms(tree, S);
  Jet acc(0);
  for (const auto& t : terms) {
    if (t.event.empty()) continue;
    const Jet prob = detail::zero_probability<Jet>(tree, r, p, t.event);
    acc += log_relative(prob).scaled(Rational(t.exponent));
  }
  return acc.derivative(exponents);
}

inline Rational d_nu_dp(const RootedTree& tree, const ChainParams& params, VertexSet S, const EdgeMultiset& E,
                        BasePoint at = BasePoint::given, int jet_cap = kDefaultJetCap) {
  return nu_derivative(tree, at_base(params, at), S, E, {}, jet_cap);
}

inline Rational d_nu_dr(const RootedTree& tree, const ChainParams& params, VertexSet S, const VertexMultiset& K,
                        BasePoint at = BasePoint::given, int jet_cap = kDefaultJetCap) {
  return nu_derivative(tree, at_base(params, at), S, {}, K, jet_cap);
}

/// E_S: edges joining the inner and outer boundary of S, each once.
inline EdgeMultiset boundary_edges(const RootedTree& tree, VertexSet S) {
  const BoundaryReport b = boundaries(tree, S);
  EdgeMultiset E;
  for (int e = 0; e < tree.size(); ++e) {
    const Edge& ed = tree.edge(e);
    if ((b.inner.contains(ed.u) && b.outer.contains(ed.v)) || (b.inner.contains(ed.v) && b.outer.contains(ed.u)))
      E[e] = 1;
  }
  return E;
}

/// E(T_S), each edge once.
inline EdgeMultiset spanning_edges(const RootedTree& tree, VertexSet S) {
  const VertexSet vs = spanning_subtree(tree, S).vertices;
  EdgeMultiset E;
  for (int e = 0; e < tree.size(); ++e)
    if (vs.contains(tree.edge(e).u) && vs.contains(tree.edge(e).v)) E[e] = 1;
  return E;
}

/// (1-r) r^(b-1) - (-1)^b B~_b (1-r)^b, the p -> 0 closed form.
inline Rational closed_form_p0(int b, const Rational& r) {
  if (b < 2) throw std::invalid_argument("closed_form_p0 needs |B+(S)| >= 2");
  return f_k(b, r);
}

/// (1-r) r^(b-1): the derivative of nu(S) along E_S at p == 0 as the jets
/// compute it for homogeneous r.
inline Rational p0_boundary_derivative(int b, const Rational& r) {
  if (b < 1) throw std::invalid_argument("boundary size must be positive");
  return (Rational(1) - r) * power(r, b - 1);
}

/// (-1)^|E(T_S)| (1-r)/r prod_{j >= 2} (-Li_{1-j}(-(1-r)/r) / (r^(j-1) (1-r)))^(k_j)
/// with k_j the number of degree-j vertices of T_S.
inline Rational closed_form_p1(const RootedTree& tree, VertexSet S, const Rational& r) {
  if (S.size() < 2) throw std::invalid_argument("closed_form_p1 needs |S| >= 2");
  const SpanningSubtree ts = spanning_subtree(tree, S);
  const RootedTree& sub = ts.tree;
  Rational acc = (Rational(1) - r) / r;
  if (sub.size() % 2 == 1) acc = -acc;
  for (Vertex v = 0; v < sub.order(); ++v) {
    const int j = sub.degree(v);
    if (j >= 2) acc *= -f_poly(j, r);
  }
  return acc;
}

/// -prod_j (1 - p_{j,1}) p_{j,2}
inline Rational d_nu_dr_octopus(const std::vector<Rational>& p1, const std::vector<Rational>& p2) {
  if (p1.size() != p2.size() || p1.size() < 3) throw std::invalid_argument("need m >= 3 pairs of edge parameters");
  Rational acc = -1;
  for (std::size_t j = 0; j < p1.size(); ++j) acc *= (Rational(1) - p1[j]) * p2[j];
  return acc;
}

/// Centre plus first ring of octopus_tree(m, depth).
inline VertexSet octopus_core(int m, int depth) {
  VertexSet S{0};
  for (int j = 0; j < m; ++j) S.insert(spider_vertex(j, 1, depth));
  return S;
}

}  // namespace poisrep
