#pragma once

// The signed measure nu of a finite tree-indexed chain, characterised by
// nu(sets meeting I) = -log P(X(I) == 0) for every nonempty I.
//
// Values are kept as exact product pairs: nu(K) = log(num / den) where num
// collects the probabilities entering with a plus sign and den those with a
// minus sign. Signs are decided on the pair, never on the float.

#include <poisrep/chain.hpp>
#include <poisrep/parallel.hpp>
#include <poisrep/rational.hpp>
#include <poisrep/tree.hpp>

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace poisrep {

/// Largest order for which nu_full materialises every entry; beyond it use
/// nu_full_entry per set.
inline constexpr int kMaxMaterializedOrder = 16;

enum class Sign { negative, zero, positive };

inline char sign_char(Sign s) {
  switch (s) {
    case Sign::negative: return '-';
    case Sign::zero: return '0';
    default: return '+';
  }
}

struct MeasureValue {
  Rational num = 1;
  Rational den = 1;
  double log_value = 0.0;

  static MeasureValue from_pair(Rational num, Rational den) {
    if (sgn(num) <= 0 || sgn(den) <= 0) throw std::domain_error("product pair must be positive");
    MeasureValue v;
    v.num = std::move(num);
    v.den = std::move(den);
    v.log_value = log_rational(v.ratio());
    return v;
  }

  /// exp(nu)
  Rational ratio() const { return num / den; }
};

inline Sign nu_sign(const MeasureValue& v) {
  const int c = cmp(v.num, v.den);
  return c < 0 ? Sign::negative : (c == 0 ? Sign::zero : Sign::positive);
}

/// Same measure value (pairs may differ, ratios may not).
inline bool same_value(const MeasureValue& a, const MeasureValue& b) {
  return a.num * b.den == b.num * a.den;
}

/// One term of an inversion: nu += exponent * log P(X(event) == 0).
struct InversionTerm {
  VertexSet event;
  int exponent;
};

struct CanonicalOrder {
  bool operator()(VertexSet a, VertexSet b) const { return canonical_less(a, b); }
};

class SignedMeasure {
 public:
  using Entries = std::map<VertexSet, MeasureValue, CanonicalOrder>;

  SignedMeasure() = default;
  SignedMeasure(VertexSet ground, Entries entries, bool connected_only)
      : ground_(ground), entries_(std::move(entries)), connected_only_(connected_only) {}

  VertexSet ground() const { return ground_; }
  const Entries& entries() const { return entries_; }
  bool connected_only() const { return connected_only_; }
  std::size_t size() const { return entries_.size(); }

  bool contains(VertexSet K) const { return entries_.count(K) != 0; }

  /// nu(K). On a connected-only measure, absent sets are disconnected and
  /// carry the exact zero pair.
  MeasureValue at(VertexSet K) const {
    if (K.empty() || !K.subset_of(ground_)) throw std::out_of_range("set outside the measure's ground set");
    auto it = entries_.find(K);
    if (it != entries_.end()) return it->second;
    if (connected_only_) return MeasureValue{};
    throw std::out_of_range("no entry for " + K.to_string());
  }

 private:
  VertexSet ground_;
  Entries entries_;
  bool connected_only_ = false;
};

namespace detail {

inline void require_positive_r(const ChainParams& params) {
  if (!params.positive_r()) throw std::domain_error("nu requires r_v > 0 at every vertex");
}

inline void require_materializable(const RootedTree& tree) {
  if (tree.order() > kMaxMaterializedOrder)
    throw std::length_error("tree order " + std::to_string(tree.order()) +
                            " exceeds the materialisation cap; use nu_full_entry");
}

template <typename Terms>
MeasureValue value_from_terms(const RootedTree& tree, const ChainParams& params, const Terms& terms) {
  std::vector<Rational> plus;
  std::vector<Rational> minus;
  for (const InversionTerm& t : terms) {
    if (t.event.empty()) continue;
    Rational q = zero_probability<Rational>(tree, params.r, params.p, t.event);
    for (int k = 0; k < std::abs(t.exponent); ++k) (t.exponent > 0 ? plus : minus).push_back(q);
  }
  return MeasureValue::from_pair(product(plus), product(minus));
}

}  // namespace detail

/// P(X(A) == 0) for every A, indexed by A.bits(); entry 0 is 1.
inline std::vector<Rational> zero_table(const RootedTree& tree, const ChainParams& params) {
  params.validate(tree);
  if (tree.order() > kMaxMaterializedOrder) throw std::length_error("probability table too large");
  std::vector<Rational> table(std::size_t{1} << tree.order());
  parallel_for(table.size(), [&](std::size_t a) {
    table[a] = detail::zero_probability<Rational>(tree, params.r, params.p,
                                                  VertexSet(static_cast<VertexSet::Bits>(a)));
  });
  return table;
}

/// Terms of the plain inversion nu(K) = sum_{I subset K} (-1)^{|K-I|} log P(X(V-I) == 0).
inline std::vector<InversionTerm> inversion_terms(const RootedTree& tree, VertexSet K) {
  require_nonempty(K, tree);
  const VertexSet all = tree.vertices();
  std::vector<InversionTerm> out;
  for_each_subset(K, [&](VertexSet I) {
    out.push_back({all - I, ((K - I).size() % 2 == 0) ? 1 : -1});
  });
  return out;
}

/// nu(K) straight from the inversion formula; no size cap beyond the tree's.
inline MeasureValue nu_full_entry(const RootedTree& tree, const ChainParams& params, VertexSet K) {
  params.validate(tree);
  detail::require_positive_r(params);
  return detail::value_from_terms(tree, params, inversion_terms(tree, K));
}

/// All 2^n - 1 values by a multiplicative Moebius transform of the table
/// g(I) = P(X(V-I) == 0), carried on (num, den) pairs.
inline SignedMeasure nu_full(const RootedTree& tree, const ChainParams& params) {
  params.validate(tree);
  detail::require_positive_r(params);
  detail::require_materializable(tree);
  const int n = tree.order();
  const std::size_t m = std::size_t{1} << n;
  const std::vector<Rational> zero = zero_table(tree, params);
  std::vector<std::pair<Rational, Rational>> f(m);
  for (std::size_t I = 0; I < m; ++I) f[I] = {zero[(m - 1) ^ I], Rational(1)};
  for (int bit = 0; bit < n; ++bit) {
    const std::size_t b = std::size_t{1} << bit;
    parallel_for(m / 2, [&](std::size_t k) {
      // k-th set with `bit` present
      const std::size_t low = k & (b - 1);
      const std::size_t U = ((k - low) << 1) | b | low;
      auto& hi = f[U];
      const auto& lo = f[U ^ b];
      hi.first *= lo.second;
      hi.second *= lo.first;
    });
  }
  std::vector<MeasureValue> values(m);
  parallel_for(m - 1, [&](std::size_t k) {
    values[k + 1] = MeasureValue::from_pair(std::move(f[k + 1].first), std::move(f[k + 1].second));
  }, 16);
  SignedMeasure::Entries entries;
  for (std::size_t K = 1; K < m; ++K)
    entries.emplace_hint(entries.end(), VertexSet(static_cast<VertexSet::Bits>(K)), std::move(values[K]));
  return SignedMeasure(tree.vertices(), std::move(entries), false);
}

/// Terms of the connected-set formula. For |S| >= 2 the index set is the
/// inner boundary together with the leaves of S; each J contributes
/// (-1)^|J| log P(X(J + (B+ minus the outer neighbours of J)) == 0).
/// A singleton {v} uses the Markov property at v:
/// nu({v}) = log P(X(N(v)) == 0) - log P(X(N(v) + v) == 0).
inline std::vector<InversionTerm> connected_terms(const RootedTree& tree, VertexSet S) {
  require_nonempty(S, tree);
  if (!is_connected(tree, S)) throw std::invalid_argument("set " + S.to_string() + " is not connected");
  const BoundaryReport b = boundaries(tree, S);
  std::vector<InversionTerm> out;
  if (S.size() == 1) {
    out.push_back({b.outer, 1});
    out.push_back({b.outer | S, -1});
    return out;
  }
  const VertexSet index = b.inner | induced_leaves(tree, S);
  for_each_subset(index, [&](VertexSet J) {
    out.push_back({J | (b.outer - b.outer_of(J)), J.size() % 2 == 0 ? 1 : -1});
  });
  return out;
}

/// nu(S) for connected S at the cost of 2^{|index set|} probabilities.
inline MeasureValue nu_connected(const RootedTree& tree, const ChainParams& params, VertexSet S) {
  params.validate(tree);
  detail::require_positive_r(params);
  return detail::value_from_terms(tree, params, connected_terms(tree, S));
}

/// nu on connected sets only; disconnected sets are exactly zero.
inline SignedMeasure nu_connected_all(const RootedTree& tree, const ChainParams& params) {
  params.validate(tree);
  detail::require_positive_r(params);
  const auto sets = connected_subsets(tree);
  std::vector<MeasureValue> values(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) { values[i] = nu_connected(tree, params, sets[i]); }, 4);
  SignedMeasure::Entries entries;
  for (std::size_t i = 0; i < sets.size(); ++i) entries.emplace(sets[i], std::move(values[i]));
  return SignedMeasure(tree.vertices(), std::move(entries), true);
}

/// Law of X restricted to B: nu_B(A) = sum of nu(A') over A' with A' & B = A.
inline SignedMeasure restrict_measure(const SignedMeasure& m, VertexSet B) {
  if (B.empty()) throw std::invalid_argument("restriction to the empty set");
  if (!B.subset_of(m.ground())) throw std::invalid_argument("restriction set outside the ground set");
  const VertexSet outside = m.ground() - B;
  SignedMeasure::Entries entries;
  for_each_subset(B, [&](VertexSet A) {
    if (A.empty()) return;
    std::vector<Rational> nums;
    std::vector<Rational> dens;
    for_each_subset(outside, [&](VertexSet C) {
      if (m.connected_only() && !m.contains(A | C)) return;
      const MeasureValue v = m.at(A | C);
      nums.push_back(v.num);
      dens.push_back(v.den);
    });
    entries.emplace(A, MeasureValue::from_pair(product(nums), product(dens)));
  });
  return SignedMeasure(B, std::move(entries), false);
}

/// Measure of X given X == 0 off B: the entries on subsets of B.
inline SignedMeasure condition_measure(const SignedMeasure& m, VertexSet B) {
  if (B.empty()) throw std::invalid_argument("conditioning on the empty set");
  if (!B.subset_of(m.ground())) throw std::invalid_argument("conditioning set outside the ground set");
  SignedMeasure::Entries entries;
  for (const auto& [K, v] : m.entries())
    if (K.subset_of(B)) entries.emplace(K, v);
  return SignedMeasure(B, std::move(entries), m.connected_only());
}

/// exp(-nu(sets meeting I)) for every I, indexed by I.bits() relative to the
/// ground set's bit positions. Computed by a multiplicative zeta transform of
/// exp(nu), independently of how the measure was produced.
inline std::vector<Rational> union_zero_probabilities(const SignedMeasure& m) {
  const VertexSet ground = m.ground();
  const int span = ground.span();
  if (span > kMaxMaterializedOrder) throw std::length_error("ground set too large");
  const std::size_t size = std::size_t{1} << span;
  std::vector<Rational> z(size, Rational(1));
  for (const auto& [K, v] : m.entries()) z[K.bits()] = v.ratio();
  // z[U] <- product of exp(nu(K)) over nonempty K within U
  for (int bit = 0; bit < span; ++bit) {
    const std::size_t b = std::size_t{1} << bit;
    for (std::size_t U = 0; U < size; ++U)
      if (U & b) z[U] *= z[U ^ b];
  }
  const std::size_t g = ground.bits();
  const Rational total = z[g];
  std::vector<Rational> out(size, Rational(0));
  for_each_subset(ground, [&](VertexSet I) { out[I.bits()] = z[g & ~static_cast<std::size_t>(I.bits())] / total; });
  return out;
}

/// First nonempty I with exp(-nu(sets meeting I)) != P(X(I) == 0), if any.
inline std::optional<VertexSet> inversion_mismatch(const SignedMeasure& m, const RootedTree& tree,
                                                   const ChainParams& params) {
  const auto lhs = union_zero_probabilities(m);
  std::optional<VertexSet> bad;
  for_each_subset(m.ground(), [&](VertexSet I) {
    if (I.empty() || bad) return;
    if (lhs[I.bits()] != prob_all_zero(tree, params, I)) bad = I;
  });
  return bad;
}

}  // namespace poisrep
