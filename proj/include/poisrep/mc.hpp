#pragma once

// Monte-Carlo closure: sample the union process of a Poisson field of sets
// and compare empirical laws with each other and with the exact law.

#include <poisrep/chain.hpp>
#include <poisrep/measure.hpp>
#include <poisrep/parallel.hpp>
#include <poisrep/random.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace poisrep {

struct PoissonField {
  std::vector<std::pair<VertexSet, double>> atoms;  ///< positive intensities only

  /// Requires every entry to have exact sign >= 0; zero entries are dropped.
  static PoissonField from_measure(const SignedMeasure& m) {
    PoissonField f;
    for (const auto& [K, v] : m.entries()) {
      const Sign s = nu_sign(v);
      if (s == Sign::negative) throw std::domain_error("negative intensity at " + K.to_string());
      if (s == Sign::positive) f.atoms.emplace_back(K, v.log_value);
    }
    return f;
  }
};

/// One draw of the union of all atoms hit at least once.
inline Assignment sample_poisson_field(const PoissonField& field, CounterRng& rng) {
  Assignment x;
  for (const auto& [K, lambda] : field.atoms) {
    if (lambda < 0) throw std::domain_error("negative intensity");
    if (poisson_count(rng, lambda) > 0) x |= K;
  }
  return x;
}

inline Assignment sample_poisson_field(const PoissonField& field, std::uint64_t seed) {
  CounterRng rng(seed);
  return sample_poisson_field(field, rng);
}

using Sampler = std::function<Assignment(CounterRng&)>;

/// Fixed number of independent streams so that counts do not depend on the
/// number of worker threads.
inline constexpr std::size_t kTallyStreams = 64;

/// counts[x.bits()] over `draws` draws.
inline std::vector<std::uint64_t> tally(const Sampler& sampler, int n, std::uint64_t draws, std::uint64_t seed) {
  if (n < 0 || n > 20) throw std::length_error("tally limited to 20 vertices");
  const std::size_t cells = std::size_t{1} << n;
  std::vector<std::vector<std::uint64_t>> parts(kTallyStreams, std::vector<std::uint64_t>(cells, 0));
  parallel_for(kTallyStreams, [&](std::size_t s) {
    CounterRng rng = CounterRng(seed).split(s);
    const std::uint64_t share = draws / kTallyStreams + (s < draws % kTallyStreams ? 1 : 0);
    for (std::uint64_t i = 0; i < share; ++i) ++parts[s][sampler(rng).bits()];
  }, 1);
  std::vector<std::uint64_t> total(cells, 0);
  for (const auto& part : parts)
    for (std::size_t c = 0; c < cells; ++c) total[c] += part[c];
  return total;
}

struct ChiSquareReport {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  double alpha = 0.01;
  bool pass = true;
  std::size_t cells = 0;  ///< after pooling
};

namespace detail {

inline ChiSquareReport finish_chi_square(double stat, int dof, double alpha, std::size_t cells) {
  if (dof < 1) throw std::runtime_error("chi-square needs at least two pooled cells");
  ChiSquareReport rep;
  rep.statistic = stat;
  rep.dof = dof;
  rep.alpha = alpha;
  rep.cells = cells;
  boost::math::chi_squared dist(dof);
  rep.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  rep.pass = rep.p_value >= alpha;
  return rep;
}

/// Groups cell indices, smallest weight first, until each group weighs at
/// least `min_weight`; the remainder joins the last group.
inline std::vector<std::vector<std::size_t>> pool_cells(const std::vector<double>& weight, double min_weight) {
  std::vector<std::size_t> order(weight.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weight[a] < weight[b]; });
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> current;
  double acc = 0;
  for (std::size_t idx : order) {
    current.push_back(idx);
    acc += weight[idx];
    if (acc >= min_weight) {
      groups.push_back(std::move(current));
      current.clear();
      acc = 0;
    }
  }
  if (!current.empty()) {
    if (groups.empty()) groups.push_back(std::move(current));
    else groups.back().insert(groups.back().end(), current.begin(), current.end());
  }
  return groups;
}

}  // namespace detail

/// Two-sample chi-square homogeneity test over all cells, pooled so that
/// every expected count is at least 5.
inline ChiSquareReport compare_laws(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                    double alpha = 0.01) {
  if (a.size() != b.size()) throw std::invalid_argument("samples over different vertex sets");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (na == 0 || nb == 0) throw std::invalid_argument("empty sample");
  const double small = std::min(na, nb) / (na + nb);
  std::vector<double> combined(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) combined[i] = static_cast<double>(a[i] + b[i]);
  const auto groups = detail::pool_cells(combined, 5.0 / small);
  double stat = 0;
  for (const auto& g : groups) {
    double oa = 0, ob = 0;
    for (std::size_t i : g) {
      oa += static_cast<double>(a[i]);
      ob += static_cast<double>(b[i]);
    }
    const double tot = oa + ob;
    const double ea = na * tot / (na + nb);
    const double eb = nb * tot / (na + nb);
    if (ea < 5 || eb < 5) throw std::runtime_error("insufficient expected counts after pooling");
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  return detail::finish_chi_square(stat, static_cast<int>(groups.size()) - 1, alpha, groups.size());
}

/// Goodness of fit of counts to exact cell probabilities.
inline ChiSquareReport goodness_of_fit(const std::vector<std::uint64_t>& counts, const std::vector<Rational>& law,
                                       double alpha = 0.01) {
  if (counts.size() != law.size()) throw std::invalid_argument("law and counts differ in size");
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> expected(law.size());
  for (std::size_t i = 0; i < law.size(); ++i) expected[i] = n * to_double(law[i]);
  const auto groups = detail::pool_cells(expected, 5.0);
  double stat = 0;
  std::size_t cells = 0;
  for (const auto& g : groups) {
    double o = 0, e = 0;
    for (std::size_t i : g) {
      o += static_cast<double>(counts[i]);
      e += expected[i];
    }
    if (e <= 0) {
      if (o > 0) stat = std::numeric_limits<double>::infinity();
      continue;
    }
    if (e < 5) throw std::runtime_error("insufficient expected counts after pooling");
    stat += (o - e) * (o - e) / e;
    ++cells;
  }
  return detail::finish_chi_square(stat, static_cast<int>(cells) - 1, alpha, cells);
}

struct ZeroPatternReport {
  double max_z = 0.0;  ///< max over I of |empirical - exact| / binomial sigma
  VertexSet worst;
  double tolerance = 4.0;
  bool pass = true;
};

/// Empirical P(X(I) == 0) for every I, indexed by I.bits().
inline std::vector<double> empirical_zero_probabilities(const std::vector<std::uint64_t>& counts, int n) {
  const std::size_t cells = std::size_t{1} << n;
  if (counts.size() != cells) throw std::invalid_argument("counts do not match the vertex count");
  // zeros[U] = number of draws whose ones lie inside U
  std::vector<double> within(counts.begin(), counts.end());
  for (int bit = 0; bit < n; ++bit)
    for (std::size_t U = 0; U < cells; ++U)
      if (U & (std::size_t{1} << bit)) within[U] += within[U ^ (std::size_t{1} << bit)];
  const double total = within[cells - 1];
  std::vector<double> out(cells);
  for (std::size_t I = 0; I < cells; ++I) out[I] = within[(cells - 1) ^ I] / total;
  return out;
}

inline ZeroPatternReport check_zero_patterns(const std::vector<std::uint64_t>& counts, const RootedTree& tree,
                                             const ChainParams& params, double tolerance = 4.0) {
  const int n = tree.order();
  const auto emp = empirical_zero_probabilities(counts, n);
  const double draws = std::accumulate(counts.begin(), counts.end(), 0.0);
  ZeroPatternReport rep;
  rep.tolerance = tolerance;
  for (std::size_t I = 1; I < emp.size(); ++I) {
    const VertexSet set(static_cast<VertexSet::Bits>(I));
    const double exact = to_double(prob_all_zero(tree, params, set));
    const double sigma = std::sqrt(exact * (1 - exact) / draws);
    const double diff = std::fabs(emp[I] - exact);
    double z = 0;
    if (sigma > 0) z = diff / sigma;
    else if (diff > 0) z = std::numeric_limits<double>::infinity();
    if (z > rep.max_z) {
      rep.max_z = z;
      rep.worst = set;
    }
  }
  rep.pass = rep.max_z <= tolerance;
  return rep;
}

}  // namespace poisrep
