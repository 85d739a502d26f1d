#pragma once

#include <poisrep/chain.hpp>
#include <poisrep/tree.hpp>

#include <algorithm>
#include <random>
#include <vector>

namespace poisrep::testing {

/// Random recursive tree: vertex v attaches to a uniform earlier vertex,
/// then the labels are shuffled and a random root is chosen.
inline RootedTree random_tree(std::mt19937_64& g, int n) {
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i) label[i] = i;
  std::shuffle(label.begin(), label.end(), g);
  std::vector<Edge> edges;
  for (int v = 1; v < n; ++v) edges.push_back({label[g() % v], label[v]});
  return build_tree(n, edges, static_cast<Vertex>(g() % n));
}

/// r in {1/d, ..., (d-1)/d}, p in {0, 1/d, ..., 1}, for a random d.
inline ChainParams random_params(std::mt19937_64& g, const RootedTree& t) {
  static const long dens[] = {2, 3, 4, 5, 7, 10};
  ChainParams out;
  for (int v = 0; v < t.order(); ++v) {
    const long d = dens[g() % 6];
    out.r.push_back(make_rational(1 + static_cast<long>(g() % (d - 1)), d));
  }
  for (int e = 0; e < t.size(); ++e) {
    const long d = dens[g() % 6];
    out.p.push_back(make_rational(static_cast<long>(g() % (d + 1)), d));
  }
  return out;
}

/// Eight-vertex fixture with a branching inner vertex:
/// 0-1, 1-2, 1-3, 3-4, 3-5, 0-6, 6-7.
inline RootedTree eight_vertex_tree() {
  return build_tree(8, {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {3, 5}, {0, 6}, {6, 7}}, 0);
}

inline Rational q(long a, long b = 1) { return make_rational(a, b); }

}  // namespace poisrep::testing
