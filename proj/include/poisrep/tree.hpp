#pragma once

// Rooted-tree combinatorics: construction, vertex boundaries, spanning
// subtrees and closures, subdivision, connected-subset enumeration and the
// standard generators (paths, stars, spiders, octopus truncations).

#include <poisrep/vertex_set.hpp>

#include <algorithm>
#include <charconv>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace poisrep {

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  bool operator==(const Edge&) const = default;
};

class RootedTree {
 public:
  RootedTree() = default;

  int order() const { return n_; }
  int size() const { return static_cast<int>(edges_.size()); }
  Vertex root() const { return root_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(e); }

  /// -1 for the root.
  Vertex parent(Vertex v) const { return parent_[v]; }
  /// Index of the edge joining v to its parent, -1 for the root.
  int parent_edge(Vertex v) const { return parent_edge_[v]; }
  const std::vector<Vertex>& children(Vertex v) const { return children_[v]; }
  VertexSet neighbors(Vertex v) const { return adjacency_[v]; }
  int degree(Vertex v) const { return adjacency_[v].size(); }
  /// Vertices in breadth-first order from the root.
  const std::vector<Vertex>& order_from_root() const { return bfs_; }

  VertexSet vertices() const { return VertexSet::full(n_); }
  VertexSet leaves() const {
    VertexSet out;
    for (Vertex v = 0; v < n_; ++v)
      if (degree(v) == 1) out.insert(v);
    return out;
  }

  /// Index of the edge {a, b}, or -1.
  int edge_index(Vertex a, Vertex b) const {
    for (int e = 0; e < size(); ++e) {
      const auto& ed = edges_[e];
      if ((ed.u == a && ed.v == b) || (ed.u == b && ed.v == a)) return e;
    }
    return -1;
  }

  /// Child endpoint of edge e (the endpoint further from the root).
  Vertex lower_endpoint(int e) const {
    const auto& ed = edges_.at(e);
    return parent_[ed.v] == ed.u ? ed.v : ed.u;
  }

  RootedTree rerooted(Vertex new_root) const;

  friend RootedTree build_tree(int n, std::vector<Edge> edges, Vertex root, int max_order);

 private:
  int n_ = 0;
  Vertex root_ = 0;
  std::vector<Edge> edges_;
  std::vector<Vertex> parent_;
  std::vector<int> parent_edge_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<VertexSet> adjacency_;
  std::vector<Vertex> bfs_;
};

/// Builds and orients a tree on vertices 0..n-1. Throws std::invalid_argument
/// for cycles (including repeated pairs and self-loops), disconnected input or
/// an absent root, and std::length_error when n exceeds max_order.
inline RootedTree build_tree(int n, std::vector<Edge> edges, Vertex root = 0,
                             int max_order = kDefaultMaxOrder) {
  if (n < 1) throw std::invalid_argument("tree must have at least one vertex");
  if (max_order > kMaxEncodableOrder) max_order = kMaxEncodableOrder;
  if (n > max_order)
    throw std::length_error("tree order " + std::to_string(n) + " exceeds cap " +
                            std::to_string(max_order));
  if (root < 0 || root >= n) throw std::invalid_argument("root absent from vertex set");

  std::vector<int> dsu(n);
  std::iota(dsu.begin(), dsu.end(), 0);
  auto find = [&](int x) {
    while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
    return x;
  };
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw std::invalid_argument("edge endpoint out of range");
    int a = find(e.u), b = find(e.v);
    if (a == b) throw std::invalid_argument("cycle detected");
    dsu[a] = b;
  }
  if (static_cast<int>(edges.size()) != n - 1) throw std::invalid_argument("disconnected input");

  RootedTree t;
  t.n_ = n;
  t.root_ = root;
  t.edges_ = std::move(edges);
  t.adjacency_.assign(n, VertexSet{});
  for (const auto& e : t.edges_) {
    t.adjacency_[e.u].insert(e.v);
    t.adjacency_[e.v].insert(e.u);
  }
  t.parent_.assign(n, -1);
  t.parent_edge_.assign(n, -1);
  t.children_.assign(n, {});
  std::vector<std::vector<std::pair<Vertex, int>>> incident(n);
  for (int i = 0; i < t.size(); ++i) {
    incident[t.edges_[i].u].push_back({t.edges_[i].v, i});
    incident[t.edges_[i].v].push_back({t.edges_[i].u, i});
  }
  std::vector<char> seen(n, 0);
  t.bfs_.reserve(n);
  t.bfs_.push_back(root);
  seen[root] = 1;
  for (std::size_t head = 0; head < t.bfs_.size(); ++head) {
    Vertex x = t.bfs_[head];
    for (auto [y, e] : incident[x]) {
      if (seen[y]) continue;
      seen[y] = 1;
      t.parent_[y] = x;
      t.parent_edge_[y] = e;
      t.children_[x].push_back(y);
      t.bfs_.push_back(y);
    }
  }
  if (static_cast<int>(t.bfs_.size()) != n) throw std::invalid_argument("disconnected input");
  return t;
}

/// Infers n from the largest endpoint (a single vertex when there are no edges).
inline RootedTree build_tree(std::vector<Edge> edges, Vertex root = 0) {
  int n = 1;
  for (const auto& e : edges) n = std::max({n, e.u + 1, e.v + 1});
  return build_tree(n, std::move(edges), root);
}

inline RootedTree RootedTree::rerooted(Vertex new_root) const {
  return build_tree(n_, edges_, new_root, kMaxEncodableOrder);
}

// ---------------------------------------------------------------------------
// Boundaries and connectivity

struct BoundaryReport {
  VertexSet inner;  ///< vertices of S with a neighbour outside S
  VertexSet outer;  ///< vertices outside S with a neighbour in S
  VertexSet full;   ///< inner | outer
  std::vector<VertexSet> outer_neighbors;  ///< per vertex of S: its neighbours in `outer`

  /// Outer-boundary vertices adjacent to some vertex of I (I a subset of S).
  VertexSet outer_of(VertexSet I) const {
    VertexSet out;
    for (Vertex v : I) out |= outer_neighbors[v];
    return out;
  }
};

inline void require_nonempty(VertexSet S, const RootedTree& tree) {
  if (S.empty()) throw std::invalid_argument("vertex set must be nonempty");
  if (!S.subset_of(tree.vertices())) throw std::invalid_argument("vertex set exceeds tree order");
}

inline BoundaryReport boundaries(const RootedTree& tree, VertexSet S) {
  require_nonempty(S, tree);
  BoundaryReport rep;
  rep.outer_neighbors.assign(tree.order(), VertexSet{});
  for (Vertex v : S) {
    VertexSet out = tree.neighbors(v) - S;
    rep.outer_neighbors[v] = out;
    if (!out.empty()) rep.inner.insert(v);
    rep.outer |= out;
  }
  rep.full = rep.inner | rep.outer;
  return rep;
}

inline bool is_connected(const RootedTree& tree, VertexSet S) {
  require_nonempty(S, tree);
  VertexSet reached = VertexSet::single(S.min());
  VertexSet frontier = reached;
  while (!frontier.empty()) {
    VertexSet next;
    for (Vertex v : frontier) next |= tree.neighbors(v) & S;
    frontier = next - reached;
    reached |= frontier;
  }
  return reached == S;
}

/// Leaves of the subgraph induced by S (vertices with exactly one neighbour
/// in S); a singleton counts as its own leaf.
inline VertexSet induced_leaves(const RootedTree& tree, VertexSet S) {
  if (S.size() == 1) return S;
  VertexSet out;
  for (Vertex v : S)
    if ((tree.neighbors(v) & S).size() == 1) out.insert(v);
  return out;
}

// ---------------------------------------------------------------------------
// Spanning subtrees

struct SpanningSubtree {
  RootedTree tree;                  ///< T_S relabelled 0..k-1
  std::vector<Vertex> to_original;  ///< label in T_S -> vertex of T
  VertexSet vertices;               ///< V(T_S) as a subset of V(T)
  VertexSet closure;                ///< smallest T-closed superset
  VertexSet branching_inner;        ///< inner-boundary vertices of degree >= 2 in T_S

  int degree_in_subtree(Vertex original) const {
    return (tree_neighbors_(original)).size();
  }

 private:
  friend SpanningSubtree spanning_subtree(const RootedTree&, VertexSet);
  std::vector<VertexSet> original_adjacency_;
  VertexSet tree_neighbors_(Vertex v) const { return original_adjacency_.at(v) & vertices; }
};

namespace detail {

/// Vertex set of the smallest subtree containing S: prune leaves outside S.
inline VertexSet steiner_vertices(const RootedTree& tree, VertexSet S) {
  VertexSet keep = tree.vertices();
  std::vector<int> deg(tree.order());
  std::vector<Vertex> stack;
  for (Vertex v = 0; v < tree.order(); ++v) {
    deg[v] = tree.degree(v);
    if (deg[v] <= 1 && !S.contains(v)) stack.push_back(v);
  }
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    if (!keep.contains(v)) continue;
    keep.erase(v);
    for (Vertex w : tree.neighbors(v) & keep) {
      if (--deg[w] <= 1 && !S.contains(w)) stack.push_back(w);
    }
  }
  return keep;
}

inline RootedTree induced_subtree(const RootedTree& tree, VertexSet vs,
                                  std::vector<Vertex>& to_original) {
  to_original.clear();
  std::vector<int> label(tree.order(), -1);
  for (Vertex v : tree.order_from_root())
    if (vs.contains(v)) {
      label[v] = static_cast<int>(to_original.size());
      to_original.push_back(v);
    }
  std::vector<Edge> edges;
  for (const auto& e : tree.edges())
    if (vs.contains(e.u) && vs.contains(e.v)) edges.push_back({label[e.u], label[e.v]});
  return build_tree(static_cast<int>(to_original.size()), std::move(edges), 0, kMaxEncodableOrder);
}

}  // namespace detail

/// T_S, the T-closure of V(T_S) and R_{T,S} = {v in B^-(S) : deg_{T_S}(v) >= 2}.
/// The subtree is rooted at its vertex closest to the root of T.
inline SpanningSubtree spanning_subtree(const RootedTree& tree, VertexSet S) {
  require_nonempty(S, tree);
  SpanningSubtree out;
  out.vertices = detail::steiner_vertices(tree, S);
  out.tree = detail::induced_subtree(tree, out.vertices, out.to_original);
  out.original_adjacency_.resize(tree.order());
  for (Vertex v = 0; v < tree.order(); ++v) out.original_adjacency_[v] = tree.neighbors(v);

  auto deg_in = [&](VertexSet set, Vertex v) {
    return set.size() == 1 ? 0 : (tree.neighbors(v) & set).size();
  };
  const VertexSet inner = boundaries(tree, S).inner;
  for (Vertex v : inner)
    if (deg_in(out.vertices, v) >= 2) out.branching_inner.insert(v);

  // Adding the outside neighbours of a branching inner vertex removes it from
  // the inner boundary; the added vertices are leaves of the new subtree.
  VertexSet closed = out.vertices;
  while (true) {
    VertexSet grow;
    for (Vertex v : boundaries(tree, closed).inner)
      if (deg_in(closed, v) >= 2) grow |= tree.neighbors(v) - closed;
    if (grow.empty()) break;
    closed |= grow;
  }
  out.closure = closed;
  return out;
}

// ---------------------------------------------------------------------------
// Subdivision

struct Subdivision {
  RootedTree tree;
  VertexSet original;  ///< V_0: the embedded vertices of the input tree
};

/// Replaces every edge by a path of k edges. Original vertices keep their
/// ids; the k-1 new vertices of edge e are appended in edge order.
inline Subdivision subdivide(const RootedTree& tree, int k, int max_order = kDefaultMaxOrder) {
  if (k < 1) throw std::invalid_argument("subdivision factor must be >= 1");
  const int n = tree.order();
  const long total = static_cast<long>(tree.size()) * k + 1;
  if (total > max_order) throw std::length_error("subdivided tree exceeds order cap");
  std::vector<Edge> edges;
  Vertex next = n;
  for (const auto& e : tree.edges()) {
    Vertex prev = e.u;
    for (int i = 1; i < k; ++i) {
      edges.push_back({prev, next});
      prev = next++;
    }
    edges.push_back({prev, e.v});
  }
  return {build_tree(static_cast<int>(total), std::move(edges), tree.root(), max_order),
          VertexSet::full(n)};
}

// ---------------------------------------------------------------------------
// Connected subsets

/// All nonempty connected subsets of `within` (default: every vertex), each
/// generated once, sorted by (size, bit pattern).
inline std::vector<VertexSet> connected_subsets(const RootedTree& tree,
                                                std::optional<VertexSet> within = std::nullopt) {
  const VertexSet allowed = within.value_or(tree.vertices());
  std::vector<VertexSet> out;
  // Extension-set enumeration: sets are grown from their minimum vertex, and a
  // candidate enters the extension set only through its first discoverer.
  auto extend = [&](auto&& self, VertexSet current, VertexSet ext, VertexSet closed_nbhd,
                    Vertex anchor) -> void {
    out.push_back(current);
    while (!ext.empty()) {
      Vertex w = ext.min();
      ext.erase(w);
      VertexSet fresh = (tree.neighbors(w) & allowed) - closed_nbhd;
      VertexSet next_ext = ext;
      for (Vertex u : fresh)
        if (u > anchor) next_ext.insert(u);
      VertexSet sub = current;
      sub.insert(w);
      self(self, sub, next_ext, closed_nbhd | fresh, anchor);
    }
  };
  for (Vertex v : allowed) {
    VertexSet start = VertexSet::single(v);
    VertexSet ext;
    for (Vertex u : tree.neighbors(v) & allowed)
      if (u > v) ext.insert(u);
    extend(extend, start, ext, start | tree.neighbors(v), v);
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

// ---------------------------------------------------------------------------
// Generators

inline RootedTree path_tree(int n) {
  if (n < 1) throw std::invalid_argument("path needs n >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return build_tree(n, std::move(edges), 0);
}

/// Centre 0; leg j occupies vertices 1 + j*leg_len ... (j+1)*leg_len, inner to outer.
inline RootedTree spider_tree(int legs, int leg_len) {
  if (legs < 1 || leg_len < 1) throw std::invalid_argument("spider needs legs >= 1 and leg length >= 1");
  const long n = 1L + static_cast<long>(legs) * leg_len;
  if (n > kMaxEncodableOrder) throw std::length_error("spider exceeds order cap");
  std::vector<Edge> edges;
  Vertex next = 1;
  for (int j = 0; j < legs; ++j) {
    Vertex prev = 0;
    for (int d = 0; d < leg_len; ++d) {
      edges.push_back({prev, next});
      prev = next++;
    }
  }
  return build_tree(static_cast<int>(n), std::move(edges), 0);
}

inline RootedTree star_tree(int leaves) { return spider_tree(leaves, 1); }

/// Depth-limited truncation of the octopus tree of degree m.
inline RootedTree octopus_tree(int m, int depth) {
  if (m < 3) throw std::invalid_argument("octopus needs degree m >= 3");
  return spider_tree(m, depth);
}

/// Vertex at distance `depth` (1-based) along leg `leg` of spider_tree(legs, leg_len).
inline Vertex spider_vertex(int leg, int depth, int leg_len) { return 1 + leg * leg_len + (depth - 1); }

/// Parses generator shorthands: "path:5", "star:4", "spider:4x2", "octopus:3x2".
inline RootedTree tree_from_generator(std::string_view spec) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("expected kind:size in '" + std::string(spec) + "'");
  std::string_view kind = spec.substr(0, colon);
  std::string_view rest = spec.substr(colon + 1);
  auto parse_int = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw std::invalid_argument("bad size in tree generator '" + std::string(spec) + "'");
    return v;
  };
  auto two = [&]() {
    auto x = rest.find('x');
    if (x == std::string_view::npos) throw std::invalid_argument("expected AxB in '" + std::string(spec) + "'");
    return std::pair{parse_int(rest.substr(0, x)), parse_int(rest.substr(x + 1))};
  };
  if (kind == "path") return path_tree(parse_int(rest));
  if (kind == "star") return star_tree(parse_int(rest));
  if (kind == "spider") {
    auto [a, b] = two();
    return spider_tree(a, b);
  }
  if (kind == "octopus") {
    auto [a, b] = two();
    return octopus_tree(a, b);
  }
  throw std::invalid_argument("unknown tree generator '" + std::string(kind) + "'");
}

}  // namespace poisrep
