#pragma once

// Tree-indexed Markov chains with per-vertex parameters r_v = P(R(v) = 0) and
// per-edge resampling probabilities p_e: exact zero-pattern probabilities by
// message passing, the percolation (divide-and-colour) oracle, the exact law
// of the whole process, and the two samplers.

#include <poisrep/random.hpp>
#include <poisrep/rational.hpp>
#include <poisrep/tree.hpp>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace poisrep {

struct ChainParams {
  std::vector<Rational> r;  ///< per vertex
  std::vector<Rational> p;  ///< per edge, indexed like RootedTree::edges()

  static ChainParams homogeneous(const RootedTree& tree, const Rational& r, const Rational& p) {
    return {std::vector<Rational>(tree.order(), r), std::vector<Rational>(tree.size(), p)};
  }

  /// Throws std::invalid_argument on size mismatch or values outside [0, 1].
  void validate(const RootedTree& tree) const {
    if (static_cast<int>(r.size()) != tree.order())
      throw std::invalid_argument("expected one r value per vertex");
    if (static_cast<int>(p.size()) != tree.size())
      throw std::invalid_argument("expected one p value per edge");
    for (const auto& x : r)
      if (!is_canonical(x)) throw std::invalid_argument("r_v not in lowest terms: " + to_string(x));
    for (const auto& x : p)
      if (!is_canonical(x)) throw std::invalid_argument("p_e not in lowest terms: " + to_string(x));
    for (const auto& x : r)
      if (x < 0 || x > 1) throw std::invalid_argument("r_v outside [0,1]: " + to_string(x));
    for (const auto& x : p)
      if (x < 0 || x > 1) throw std::invalid_argument("p_e outside [0,1]: " + to_string(x));
  }

  bool positive_r() const {
    for (const auto& x : r)
      if (sgn(x) <= 0) return false;
    return true;
  }
};

namespace detail {

/// Message passing from the leaves to the root. Works for any commutative
/// ring T (rationals, jets); the empty event has probability one.
template <typename T>
T zero_probability(const RootedTree& tree, std::span<const T> r, std::span<const T> p, VertexSet A) {
  const int n = tree.order();
  if (A.empty()) return T(1);
  std::vector<T> f0(n, T(1));
  std::vector<T> f1(n, T(1));
  std::vector<char> active(n, 0);
  const auto& order = tree.order_from_root();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Vertex v = *it;
    bool act = A.contains(v);
    T g0(1);
    T g1(1);
    for (Vertex c : tree.children(v)) {
      if (!active[c]) continue;
      act = true;
      const T& pe = p[tree.parent_edge(c)];
      T mix = r[c] * f0[c] + (T(1) - r[c]) * f1[c];
      T keep = T(1) - pe;
      T pm = pe * mix;
      g0 = g0 * (keep * f0[c] + pm);
      g1 = g1 * (keep * f1[c] + pm);
    }
    active[v] = act;
    if (!act) continue;
    f0[v] = std::move(g0);
    f1[v] = A.contains(v) ? T(0) : std::move(g1);
  }
  const Vertex o = tree.root();
  return r[o] * f0[o] + (T(1) - r[o]) * f1[o];
}

}  // namespace detail

/// Exact P(X(A) == 0).
inline Rational prob_all_zero(const RootedTree& tree, const ChainParams& params, VertexSet A) {
  require_nonempty(A, tree);
  return detail::zero_probability<Rational>(tree, params.r, params.p, A);
}

/// Same probability from the percolation picture: sum over all 2^|E| edge
/// deletion patterns; each cluster copies R at its vertex closest to the root.
inline Rational brute_force_prob_all_zero(const RootedTree& tree, const ChainParams& params,
                                          VertexSet A) {
  require_nonempty(A, tree);
  if (tree.size() > 20) throw std::length_error("brute force limited to 20 edges");
  const int m = tree.size();
  Rational total = 0;
  for (std::uint32_t removed = 0; removed < (1u << m); ++removed) {
    Rational weight = 1;
    for (int e = 0; e < m; ++e) weight *= ((removed >> e) & 1u) ? params.p[e] : Rational(1 - params.p[e]);
    if (weight == 0) continue;
    VertexSet tops;
    for (Vertex a : A) {
      Vertex x = a;
      while (tree.parent(x) >= 0 && !((removed >> tree.parent_edge(x)) & 1u)) x = tree.parent(x);
      tops.insert(x);
    }
    Rational cond = 1;
    for (Vertex t : tops) cond *= params.r[t];
    total += weight * cond;
  }
  return total;
}

/// Law of the whole process: entry `ones.bits()` is P(X = 1 exactly on `ones`),
/// by inclusion-exclusion over zero-pattern probabilities.
inline std::vector<Rational> exact_law(const RootedTree& tree, const ChainParams& params) {
  const int n = tree.order();
  if (n > 16) throw std::length_error("exact law limited to 16 vertices");
  const VertexSet all = tree.vertices();
  std::vector<Rational> zero(std::size_t{1} << n);
  for (std::uint32_t a = 0; a < zero.size(); ++a)
    zero[a] = detail::zero_probability<Rational>(tree, params.r, params.p, VertexSet(a));
  std::vector<Rational> law(zero.size());
  for (std::uint32_t x = 0; x < law.size(); ++x) {
    const VertexSet ones(x);
    const VertexSet zeros = all - ones;
    Rational acc = 0;
    for_each_subset(ones, [&](VertexSet u) {
      if (u.size() % 2 == 0) acc += zero[(zeros | u).bits()];
      else acc -= zero[(zeros | u).bits()];
    });
    law[x] = acc;
  }
  return law;
}

/// Bit v of an assignment is X(v).
using Assignment = VertexSet;

/// Both constructions of the chain with exact Bernoulli thresholds
/// precomputed; draws are pure functions of the generator state.
class ChainSampler {
 public:
  ChainSampler(RootedTree tree, const ChainParams& params) : tree_(std::move(tree)) {
    params.validate(tree_);
    for (const auto& x : params.r) zero_.emplace_back(x);
    for (const auto& x : params.p) resample_.emplace_back(x);
  }

  /// Root-to-leaf recursion: copy the parent w.p. 1-p_e, else draw afresh.
  Assignment draw_recursive(CounterRng& rng) const {
    Assignment x;
    const Vertex o = tree_.root();
    if (!zero_[o](rng)) x.insert(o);
    for (Vertex v : tree_.order_from_root()) {
      if (v == o) continue;
      bool one;
      if (resample_[tree_.parent_edge(v)](rng)) one = !zero_[v](rng);
      else one = x.contains(tree_.parent(v));
      if (one) x.insert(v);
    }
    return x;
  }

  /// Divide and colour: delete edges independently, colour each cluster by R
  /// at its top vertex.
  Assignment draw_percolation(CounterRng& rng) const {
    const int m = tree_.size();
    std::vector<char> removed(m);
    for (int e = 0; e < m; ++e) removed[e] = resample_[e](rng);
    std::vector<char> colour(tree_.order());
    for (Vertex v = 0; v < tree_.order(); ++v) colour[v] = !zero_[v](rng);
    Assignment x;
    for (Vertex v : tree_.order_from_root()) {
      const int e = tree_.parent_edge(v);
      if (e >= 0 && !removed[e]) colour[v] = colour[tree_.parent(v)];
      if (colour[v]) x.insert(v);
    }
    return x;
  }

  const RootedTree& tree() const { return tree_; }

 private:
  RootedTree tree_;
  std::vector<ExactBernoulli> zero_;
  std::vector<ExactBernoulli> resample_;
};

inline Assignment sample_recursive(const RootedTree& tree, const ChainParams& params, std::uint64_t seed) {
  CounterRng rng(seed);
  return ChainSampler(tree, params).draw_recursive(rng);
}

inline Assignment sample_percolation(const RootedTree& tree, const ChainParams& params, std::uint64_t seed) {
  CounterRng rng(seed);
  return ChainSampler(tree, params).draw_percolation(rng);
}

}  // namespace poisrep
