#pragma once

// Command-line front end. run_cli() is the whole program; tools/poisrep.cpp
// only forwards argv. Exit codes: 0 ok, 1 failed check or --expect mismatch,
// 2 usage or input error.

#include <poisrep/calculus.hpp>
#include <poisrep/io.hpp>
#include <poisrep/mc.hpp>
#include <poisrep/measure.hpp>
#include <poisrep/parallel.hpp>
#include <poisrep/representability.hpp>
#include <poisrep/thresholds.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace poisrep {

namespace cli_detail {

struct Sink {
  std::ostream& fallback;
  std::string path;

  void write(const std::string& text) const {
    if (path.empty()) {
      fallback << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + path + "'");
    f << text;
  }
};

struct ParamOptions {
  std::string params_file;
  std::string r;
  std::string p;

  void attach(CLI::App* app) {
    app->add_option("--params", params_file, "params JSON file");
    app->add_option("--r", r, "homogeneous r (fraction or decimal)");
    app->add_option("--p", p, "homogeneous p (fraction or decimal)");
  }

  ChainParams load(const RootedTree& tree) const {
    if (!params_file.empty()) {
      if (!r.empty() || !p.empty()) throw std::invalid_argument("give either --params or --r/--p, not both");
      return params_from_json(parse_json_exact(read_file(params_file)), tree);
    }
    if (r.empty() || p.empty()) throw std::invalid_argument("parameters missing: use --params FILE or both --r and --p");
    ChainParams out = ChainParams::homogeneous(tree, parse_rational(r), parse_rational(p));
    out.validate(tree);
    return out;
  }
};

inline std::string sign_string(Sign s) { return std::string(1, sign_char(s)); }

inline json value_json(VertexSet K, const MeasureValue& v) {
  return {{"set", vertex_set_json(K)},
          {"sign", sign_string(nu_sign(v))},
          {"log_value", v.log_value},
          {"num", to_string(v.num)},
          {"den", to_string(v.den)}};
}

inline json verdict_json(const Verdict& v) {
  json j = {{"representable", v.representable},
            {"witness", nullptr},
            {"checked_sets", v.checked_sets},
            {"restricted_to_connected", v.restricted_to_connected}};
  if (v.witness) {
    j["witness"] = vertex_set_json(*v.witness);
    j["witness_log_value"] = v.witness_value->log_value;
  }
  return j;
}

inline json report_json(const ChiSquareReport& r) {
  return {{"statistic", r.statistic}, {"dof", r.dof},       {"p_value", r.p_value},
          {"alpha", r.alpha},         {"cells", r.cells},   {"pass", r.pass}};
}

inline json multiset_json(const EdgeMultiset& E, const VertexMultiset& K, const RootedTree& tree) {
  json edges = json::object();
  for (const auto& [e, c] : E)
    if (c > 0) edges[std::to_string(tree.edge(e).u) + "-" + std::to_string(tree.edge(e).v)] = c;
  json verts = json::object();
  for (const auto& [v, c] : K)
    if (c > 0) verts[std::to_string(v)] = c;
  return {{"edges", edges}, {"vertices", verts}};
}

inline std::optional<Rational> common_value(const std::vector<Rational>& xs) {
  if (xs.empty()) return std::nullopt;
  for (const auto& x : xs)
    if (x != xs.front()) return std::nullopt;
  return xs.front();
}

inline bool same_multiset(const Multiset& a, const Multiset& b) {
  auto strip = [](const Multiset& m) {
    Multiset out;
    for (const auto& [k, c] : m)
      if (c > 0) out[k] = c;
    return out;
  };
  return strip(a) == strip(b);
}

struct Prediction {
  std::optional<Rational> value;
  std::string rule;
};

/// What the closed forms say about d/dp_E nu(S) at p == 0.
inline Prediction predict_p0(const RootedTree& tree, const ChainParams& params, VertexSet S, const EdgeMultiset& E) {
  if (S.size() < 2 || !is_connected(tree, S)) return {std::nullopt, "needs connected S with |S| >= 2"};
  const int b = boundaries(tree, S).outer.size();
  const int order = total_multiplicity(E);
  if (order < b) return {Rational(0), "order below |B+(S)|"};
  if (order > b) return {std::nullopt, "order above |B+(S)|: no closed form"};
  if (!same_multiset(E, boundary_edges(tree, S))) return {Rational(0), "order |B+(S)| but E differs from E_S"};
  auto r = common_value(params.r);
  if (!r) return {std::nullopt, "closed form needs homogeneous r"};
  if (b < 2) return {std::nullopt, "closed form needs |B+(S)| >= 2"};
  return {closed_form_p0(b, *r), "E = E_S"};
}

inline Prediction predict_p1(const RootedTree& tree, const ChainParams& params, VertexSet S, const EdgeMultiset& E) {
  if (S.size() < 2 || !is_connected(tree, S)) return {std::nullopt, "needs connected S with |S| >= 2"};
  const EdgeMultiset ts = spanning_edges(tree, S);
  const int order = total_multiplicity(E);
  const int size = static_cast<int>(ts.size());
  if (order < size) return {Rational(0), "order below |E(T_S)|"};
  if (order > size) return {std::nullopt, "order above |E(T_S)|: no closed form"};
  if (!same_multiset(E, ts)) return {Rational(0), "order |E(T_S)| but E differs from E(T_S)"};
  auto r = common_value(params.r);
  if (!r || sgn(*r) <= 0 || *r >= 1) return {std::nullopt, "closed form needs homogeneous r in (0,1)"};
  return {closed_form_p1(tree, S, *r), "E = E(T_S)"};
}

/// S must be a centre c of degree >= 3 with its neighbours, each neighbour
/// continuing by exactly one further edge.
inline Prediction predict_r1(const RootedTree& tree, const ChainParams& params, VertexSet S, const VertexMultiset& K) {
  std::optional<Vertex> centre;
  for (Vertex v : S)
    if (tree.degree(v) >= 3 && (tree.neighbors(v) | VertexSet::single(v)) == S) centre = v;
  if (!centre) return {std::nullopt, "S is not a centre of degree >= 3 with its neighbours"};
  std::vector<Rational> p1, p2;
  for (Vertex j : tree.neighbors(*centre)) {
    const VertexSet further = tree.neighbors(j) - VertexSet::single(*centre);
    if (further.size() != 1) return {std::nullopt, "each arm must continue by exactly one edge"};
    p1.push_back(params.p[tree.edge_index(*centre, j)]);
    p2.push_back(params.p[tree.edge_index(j, further.min())]);
  }
  bool touches_centre = false;
  for (const auto& [v, c] : K)
    if (c > 0 && v == *centre) touches_centre = true;
  if (!touches_centre) return {Rational(0), "multiset avoids the centre"};
  if (total_multiplicity(K) == 1) return {d_nu_dr_octopus(p1, p2), "K = {centre}"};
  return {std::nullopt, "higher-order centre derivative: no closed form"};
}

inline std::string witness_cell(const std::optional<VertexSet>& w) {
  if (!w) return "";
  std::string s;
  for (Vertex v : *w) {
    if (!s.empty()) s += ";";
    s += std::to_string(v);
  }
  return s;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Exact analysis of Poisson representability for tree-indexed Markov chains", "poisrep"};
  app.require_subcommand(1);
  app.fallthrough();  // global options such as --threads may follow the subcommand
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = all cores)");
  app.set_version_flag("--version", std::string(POISREP_VERSION));

  std::string tree_src;
  std::string out_path;
  ParamOptions popts;

  // analyze
  auto* analyze = app.add_subcommand("analyze", "signed measure and representability verdict (JSON)");
  bool connected_only = false;
  std::string expect;
  analyze->add_option("--tree", tree_src, "generator (path:5, star:4, spider:4x2, octopus:3x2) or tree JSON")->required();
  popts.attach(analyze);
  analyze->add_flag("--connected-only", connected_only, "only list connected sets (the others are exactly zero)");
  analyze->add_option("--expect", expect, "exit 1 unless the verdict matches")
      ->check(CLI::IsMember({"representable", "not-representable"}));
  analyze->add_option("--out", out_path, "output file (default stdout)");

  // scan
  auto* scan = app.add_subcommand("scan", "verdicts over an (r, p) grid (CSV)");
  std::string r_grid, p_grid;
  scan->add_option("--tree", tree_src, "tree source")->required();
  scan->add_option("--r", r_grid, "r grid: start:stop:step or a,b,c")->required();
  scan->add_option("--p", p_grid, "p grid: start:stop:step or a,b,c")->required();
  scan->add_option("--out", out_path, "output file (default stdout)");

  // thresholds
  auto* thresholds = app.add_subcommand("thresholds", "complementary Bell numbers and thresholds (CSV)");
  std::string n_range = "3..8";
  thresholds->add_option("--n", n_range, "index range lo..hi")->capture_default_str();
  thresholds->add_option("--out", out_path, "output file (default stdout)");

  // deriv-check
  auto* deriv = app.add_subcommand("deriv-check", "exact jet derivative versus closed forms (JSON)");
  std::string set_text, at_text = "p0", multiset_text;
  deriv->add_option("--tree", tree_src, "tree source")->required();
  popts.attach(deriv);
  deriv->add_option("--set", set_text, "vertex set, e.g. 0,1,3")->required();
  deriv->add_option("--at", at_text, "base point p0, p1 or r1")->capture_default_str()->check(CLI::IsMember({"p0", "p1", "r1"}));
  deriv->add_option("--multiset", multiset_text, "directions: eK (edge index), u-v (edge), vK (vertex r)");
  deriv->add_option("--out", out_path, "output file (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Monte-Carlo closure reports (JSON)");
  std::uint64_t draws = 1000000, seed = 42;
  double alpha = 0.01;
  verify->add_option("--tree", tree_src, "tree source")->required();
  popts.attach(verify);
  verify->add_option("--draws", draws, "draws per sampler")->capture_default_str();
  verify->add_option("--seed", seed, "64-bit seed")->capture_default_str();
  verify->add_option("--alpha", alpha, "chi-square level")->capture_default_str();
  verify->add_option("--out", out_path, "output file (default stdout)");

  // scaling-check
  auto* scaling = app.add_subcommand("scaling-check", "subdivision consistency of the signed measure (JSON)");
  std::string r_text, p_text;
  int k = 2;
  scaling->add_option("--tree", tree_src, "tree source")->required();
  scaling->add_option("--r", r_text, "homogeneous r")->required();
  scaling->add_option("--p", p_text, "homogeneous p")->required();
  scaling->add_option("--k", k, "subdivision factor")->capture_default_str();
  scaling->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  set_thread_limit(threads);
  const Sink sink{out, out_path};

  try {
    if (*analyze) {
      const RootedTree tree = load_tree(tree_src);
      const ChainParams params = popts.load(tree);
      const Verdict verdict = is_representable(tree, params);
      json measure = json::array();
      if (connected_only) {
        const SignedMeasure m = nu_connected_all(tree, params);
        for (const auto& [K, v] : m.entries()) measure.push_back(value_json(K, v));
      } else {
        if (tree.order() > kMaxMaterializedOrder)
          throw std::length_error("tree order above " + std::to_string(kMaxMaterializedOrder) +
                                  "; rerun with --connected-only");
        const SignedMeasure m = nu_full(tree, params);
        for (const auto& [K, v] : m.entries()) measure.push_back(value_json(K, v));
      }
      json doc = {{"tree", tree_to_json(tree)},
                  {"params", params_to_json(params, tree)},
                  {"verdict", verdict_json(verdict)},
                  {"connected_only", connected_only},
                  {"measure", measure}};
      sink.write(doc.dump(2) + "\n");
      if (!expect.empty() && (expect == "representable") != verdict.representable) {
        err << "verdict " << (verdict.representable ? "representable" : "not-representable") << " differs from --expect "
            << expect << "\n";
        return 1;
      }
      return 0;
    }

    if (*scan) {
      const RootedTree tree = load_tree(tree_src);
      const auto rs = parse_grid(r_grid);
      const auto ps = parse_grid(p_grid);
      const auto points = phase_scan(tree, rs, ps);
      std::ostringstream csv;
      csv << "r,p,representable,witness\n";
      for (const auto& pt : points)
        csv << decimal_string(pt.r) << "," << decimal_string(pt.p) << "," << (pt.verdict.representable ? "true" : "false")
            << "," << witness_cell(pt.verdict.witness) << "\n";
      csv << csv_metadata("scan tree=" + tree_to_json(tree).dump() + " r=" + r_grid + " p=" + p_grid) << "\n";
      sink.write(csv.str());
      return 0;
    }

    if (*thresholds) {
      const auto [lo, hi] = parse_int_range(n_range);
      std::ostringstream csv;
      csv << "n,bell_c,r_star,r0,r1\n";
      std::vector<int> undefined;
      for (const auto& row : threshold_table(lo, hi)) {
        csv << row.n << "," << row.bell_c.get_str() << "," << fixed_string(row.r_star) << ","
            << (row.r0 ? fixed_string(*row.r0) : std::string("undefined")) << "," << fixed_string(row.r1) << "\n";
        if (!row.r0) undefined.push_back(row.n);
      }
      for (int n : undefined)
        csv << "# r0(" << n << ") undefined: no 2 <= j <= " << n << " has (-1)^j B~_j > 0\n";
      csv << csv_metadata("thresholds n=" + std::to_string(lo) + ".." + std::to_string(hi)) << "\n";
      sink.write(csv.str());
      return 0;
    }

    if (*deriv) {
      const RootedTree tree = load_tree(tree_src);
      const ChainParams given = popts.load(tree);
      const VertexSet S = parse_vertex_set(set_text, tree);
      const BasePoint at = at_text == "p0" ? BasePoint::p0 : (at_text == "p1" ? BasePoint::p1 : BasePoint::r1);
      const ChainParams base = at_base(given, at);
      ParamMultiset m;
      if (!multiset_text.empty()) {
        m = parse_multiset(multiset_text, tree);
      } else if (at == BasePoint::p0) {
        m.edges = boundary_edges(tree, S);
      } else if (at == BasePoint::p1) {
        m.edges = spanning_edges(tree, S);
      } else {
        for (Vertex v : S)
          if (tree.degree(v) >= 3 && (tree.neighbors(v) | VertexSet::single(v)) == S) m.vertices[v] = 1;
        if (m.vertices.empty()) throw std::invalid_argument("no default r-multiset for this set; pass --multiset");
      }
      const Rational jet = nu_derivative(tree, base, S, m.edges, m.vertices);
      Prediction pred;
      const bool mixed = !m.edges.empty() && !m.vertices.empty();
      if (mixed) pred = {std::nullopt, "mixed edge/vertex multiset: no closed form"};
      else if (at == BasePoint::r1) pred = m.edges.empty() ? predict_r1(tree, base, S, m.vertices) : Prediction{std::nullopt, "edge multiset at r1: no closed form"};
      else if (!m.vertices.empty()) pred = {std::nullopt, "vertex multiset at a p base point: no closed form"};
      else if (at == BasePoint::p0) pred = predict_p0(tree, base, S, m.edges);
      else pred = predict_p1(tree, base, S, m.edges);

      json doc = {{"tree", tree_to_json(tree)},
                  {"set", vertex_set_json(S)},
                  {"at", at_text},
                  {"multiset", multiset_json(m.edges, m.vertices, tree)},
                  {"jet", to_string(jet)},
                  {"closed_form", pred.value ? json(to_string(*pred.value)) : json(nullptr)},
                  {"rule", pred.rule},
                  {"equal", pred.value ? json(*pred.value == jet) : json(nullptr)}};
      if (at == BasePoint::p0 && pred.rule == "E = E_S") {
        const int b = boundaries(tree, S).outer.size();
        doc["boundary_derivative"] = to_string(p0_boundary_derivative(b, *common_value(base.r)));
      }
      sink.write(doc.dump(2) + "\n");
      return (pred.value && *pred.value != jet) ? 1 : 0;
    }

    if (*verify) {
      const RootedTree tree = load_tree(tree_src);
      const ChainParams params = popts.load(tree);
      if (tree.order() > 12) throw std::length_error("verify enumerates 2^n atoms; n must be <= 12");
      const int n = tree.order();
      const ChainSampler chain(tree, params);
      const Verdict verdict = is_representable(tree, params);
      const auto rec = tally([&](CounterRng& g) { return chain.draw_recursive(g); }, n, draws, derive_seed(seed, 0));
      const auto perc = tally([&](CounterRng& g) { return chain.draw_percolation(g); }, n, draws, derive_seed(seed, 1));
      json reports = json::object();
      const ChiSquareReport ab = compare_laws(rec, perc, alpha);
      reports["recursive_vs_percolation"] = report_json(ab);
      bool ok = ab.pass;
      if (verdict.representable) {
        const PoissonField field = PoissonField::from_measure(nu_connected_all(tree, params));
        const auto pf = tally([&](CounterRng& g) { return sample_poisson_field(field, g); }, n, draws, derive_seed(seed, 2));
        const ZeroPatternReport zp = check_zero_patterns(pf, tree, params);
        reports["field_zero_patterns"] = {{"max_z", zp.max_z}, {"worst", vertex_set_json(zp.worst)},
                                          {"tolerance", zp.tolerance}, {"pass", zp.pass}};
        const ChiSquareReport fr = compare_laws(pf, rec, alpha);
        reports["field_vs_recursive"] = report_json(fr);
        ok = ok && zp.pass && fr.pass;
      } else {
        reports["field_zero_patterns"] = {{"skipped", "measure has a negative entry"}};
        reports["field_vs_recursive"] = {{"skipped", "measure has a negative entry"}};
      }
      json doc = {{"tree", tree_to_json(tree)},
                  {"params", params_to_json(params, tree)},
                  {"draws", draws},
                  {"seed", seed},
                  {"representable", verdict.representable},
                  {"reports", reports},
                  {"pass", ok}};
      sink.write(doc.dump(2) + "\n");
      return ok ? 0 : 1;
    }

    if (*scaling) {
      const RootedTree tree = load_tree(tree_src);
      const Rational r = parse_rational(r_text);
      const Rational p = parse_rational(p_text);
      ChainParams::homogeneous(tree, r, p).validate(tree);
      const bool pass = scaling_check(tree, r, p, k);
      const Rational p_prime = Rational(1) - power(Rational(1) - p, static_cast<unsigned long>(k));
      json doc = {{"tree", tree_to_json(tree)}, {"r", to_string(r)}, {"p", to_string(p)},
                  {"k", k},                     {"p_prime", to_string(p_prime)}, {"pass", pass}};
      sink.write(doc.dump(2) + "\n");
      return pass ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace poisrep
