#pragma once

// Is the chain a Poisson representable process? Exactly when its signed
// measure is nonnegative; disconnected sets carry zero, so by default only
// connected sets are examined.

#include <poisrep/measure.hpp>
#include <poisrep/parallel.hpp>
#include <poisrep/tree.hpp>

#include <optional>
#include <stdexcept>
#include <vector>

namespace poisrep {

/// Upper bound on tree order for connected-set verdicts.
inline constexpr int kMaxVerdictOrder = 20;

struct Verdict {
  bool representable = true;
  std::optional<VertexSet> witness;          ///< first negative set in (size, bits) order
  std::optional<MeasureValue> witness_value;
  std::size_t checked_sets = 0;
  bool restricted_to_connected = true;
};

enum class SearchSpace { connected, all_subsets };

inline Verdict is_representable(const RootedTree& tree, const ChainParams& params,
                                SearchSpace space = SearchSpace::connected) {
  params.validate(tree);
  detail::require_positive_r(params);
  Verdict v;
  v.restricted_to_connected = space == SearchSpace::connected;
  if (space == SearchSpace::all_subsets) {
    const SignedMeasure m = nu_full(tree, params);
    v.checked_sets = m.size();
    for (const auto& [K, value] : m.entries())
      if (nu_sign(value) == Sign::negative) {
        v.representable = false;
        v.witness = K;
        v.witness_value = value;
        break;
      }
    return v;
  }
  if (tree.order() > kMaxVerdictOrder) throw std::length_error("tree too large for a full verdict");
  const auto sets = connected_subsets(tree);
  std::vector<MeasureValue> values(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) { values[i] = nu_connected(tree, params, sets[i]); }, 4);
  v.checked_sets = sets.size();
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (nu_sign(values[i]) == Sign::negative) {
      v.representable = false;
      v.witness = sets[i];
      v.witness_value = values[i];
      break;
    }
  return v;
}

struct PhasePoint {
  Rational r;
  Rational p;
  Verdict verdict;
};

/// Homogeneous parameters over the grid, r-major.
inline std::vector<PhasePoint> phase_scan(const RootedTree& tree, const std::vector<Rational>& r_grid,
                                          const std::vector<Rational>& p_grid) {
  for (const auto& r : r_grid)
    if (sgn(r) <= 0 || r > 1) throw std::invalid_argument("r grid value outside (0,1]: " + to_string(r));
  for (const auto& p : p_grid)
    if (sgn(p) < 0 || p > 1) throw std::invalid_argument("p grid value outside [0,1]: " + to_string(p));
  std::vector<PhasePoint> out;
  for (const auto& r : r_grid)
    for (const auto& p : p_grid) out.push_back({r, p, {}});
  for (auto& pt : out) pt.verdict = is_representable(tree, ChainParams::homogeneous(tree, pt.r, pt.p));
  return out;
}

/// The chain on the k-fold subdivision, observed at the original vertices,
/// has the law of the chain on the tree with p' = 1 - (1-p)^k; compare the
/// two signed measures entry by entry.
inline bool scaling_check(const RootedTree& tree, const Rational& r, const Rational& p, int k) {
  if (k < 1) throw std::invalid_argument("subdivision factor must be >= 1");
  const Subdivision sub = subdivide(tree, k, kMaxMaterializedOrder);
  const SignedMeasure fine = restrict_measure(nu_full(sub.tree, ChainParams::homogeneous(sub.tree, r, p)), sub.original);
  const Rational p_coarse = Rational(1) - power(Rational(1) - p, static_cast<unsigned long>(k));
  const SignedMeasure coarse = nu_full(tree, ChainParams::homogeneous(tree, r, p_coarse));
  if (fine.size() != coarse.size()) return false;
  for (const auto& [K, value] : coarse.entries())
    if (!fine.contains(K) || !same_value(fine.at(K), value)) return false;
  return true;
}

}  // namespace poisrep
