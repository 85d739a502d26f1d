#pragma once

// File formats: tree and parameter JSON with exact decimals, grids, vertex
// sets and derivative multisets on the command line, CSV metadata.

#include <poisrep/calculus.hpp>
#include <poisrep/chain.hpp>
#include <poisrep/rational.hpp>
#include <poisrep/tree.hpp>

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace poisrep {

using json = nlohmann::json;

namespace detail {

/// Builds a json value like the DOM parser, but keeps floating literals as
/// their source text so "0.45" can become 9/20 exactly.
class ExactNumberBuilder : public nlohmann::json_sax<json> {
 public:
  json result;

  bool null() override { return put(nullptr); }
  bool boolean(bool v) override { return put(v); }
  bool number_integer(number_integer_t v) override { return put(v); }
  bool number_unsigned(number_unsigned_t v) override { return put(v); }
  bool number_float(number_float_t, const string_t& s) override { return put(s); }
  bool string(string_t& v) override { return put(v); }
  bool binary(binary_t&) override { throw std::invalid_argument("binary JSON values are not supported"); }
  bool start_object(std::size_t) override {
    stack_.push_back(slot(json::object()));
    return true;
  }
  bool key(string_t& k) override {
    key_ = k;
    return true;
  }
  bool end_object() override {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    stack_.push_back(slot(json::array()));
    return true;
  }
  bool end_array() override {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) override {
    throw std::invalid_argument(std::string("malformed JSON: ") + ex.what());
  }

 private:
  json* slot(json v) {
    if (stack_.empty()) {
      result = std::move(v);
      return &result;
    }
    json& top = *stack_.back();
    if (top.is_array()) {
      top.push_back(std::move(v));
      return &top.back();
    }
    top[key_] = std::move(v);
    return &top[key_];
  }
  template <typename V>
  bool put(V&& v) {
    slot(json(std::forward<V>(v)));
    return true;
  }

  std::vector<json*> stack_;
  std::string key_;
};

}  // namespace detail

inline json parse_json_exact(std::string_view text) {
  detail::ExactNumberBuilder builder;
  json::sax_parse(text, &builder);
  return builder.result;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Rational rational_from_json(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw std::invalid_argument("expected a number or fraction string, got " + v.dump());
}

inline RootedTree tree_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("tree JSON must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "n" && k != "root" && k != "edges") throw std::invalid_argument("unknown tree field '" + k + "'");
  if (!j.contains("edges") || !j["edges"].is_array()) throw std::invalid_argument("tree JSON needs an \"edges\" array");
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw std::invalid_argument("edges must be [u, v] integer pairs");
    edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  const int root = j.value("root", 0);
  if (j.contains("n")) {
    if (!j["n"].is_number_integer()) throw std::invalid_argument("\"n\" must be an integer");
    return build_tree(j["n"].get<int>(), std::move(edges), root);
  }
  return build_tree(std::move(edges), root);
}

inline json tree_to_json(const RootedTree& t) {
  json edges = json::array();
  for (const auto& e : t.edges()) edges.push_back({e.u, e.v});
  return {{"n", t.order()}, {"root", t.root()}, {"edges", edges}};
}

/// "path:5" style generators, otherwise a tree JSON file.
inline RootedTree load_tree(const std::string& source) {
  static const char* kinds[] = {"path:", "star:", "spider:", "octopus:"};
  for (const char* k : kinds)
    if (source.rfind(k, 0) == 0) return tree_from_generator(source);
  return tree_from_json(parse_json_exact(read_file(source)));
}

/// {"r": value | {"v": value}, "p": value | {"u-v": value}}
inline ChainParams params_from_json(const json& j, const RootedTree& tree) {
  if (!j.is_object()) throw std::invalid_argument("params JSON must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "r" && k != "p") throw std::invalid_argument("unknown params field '" + k + "'");
  if (!j.contains("r") || !j.contains("p")) throw std::invalid_argument("params JSON needs both \"r\" and \"p\"");
  ChainParams out;
  const json& r = j["r"];
  if (r.is_object()) {
    std::vector<bool> seen(tree.order(), false);
    out.r.assign(tree.order(), Rational(0));
    for (const auto& [k, v] : r.items()) {
      std::size_t used = 0;
      int vertex = -1;
      try {
        vertex = std::stoi(k, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != k.size() || vertex < 0 || vertex >= tree.order()) throw std::invalid_argument("bad vertex key '" + k + "' in r");
      out.r[vertex] = rational_from_json(v);
      seen[vertex] = true;
    }
    for (int v = 0; v < tree.order(); ++v)
      if (!seen[v]) throw std::invalid_argument("missing r for vertex " + std::to_string(v));
  } else {
    out.r.assign(tree.order(), rational_from_json(r));
  }
  const json& p = j["p"];
  if (p.is_object()) {
    std::vector<bool> seen(tree.size(), false);
    out.p.assign(tree.size(), Rational(0));
    for (const auto& [k, v] : p.items()) {
      const auto dash = k.find('-');
      int a = -1, b = -1;
      try {
        if (dash == std::string::npos) throw std::invalid_argument(k);
        a = std::stoi(k.substr(0, dash));
        b = std::stoi(k.substr(dash + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad edge key '" + k + "' in p (expected \"u-v\")");
      }
      const int e = tree.edge_index(a, b);
      if (e < 0) throw std::invalid_argument("no edge " + k + " in tree");
      out.p[e] = rational_from_json(v);
      seen[e] = true;
    }
    for (int e = 0; e < tree.size(); ++e)
      if (!seen[e])
        throw std::invalid_argument("missing p for edge " + std::to_string(tree.edge(e).u) + "-" + std::to_string(tree.edge(e).v));
  } else {
    out.p.assign(tree.size(), rational_from_json(p));
  }
  out.validate(tree);
  return out;
}

inline json params_to_json(const ChainParams& params, const RootedTree& tree) {
  json r = json::object();
  for (int v = 0; v < tree.order(); ++v) r[std::to_string(v)] = to_string(params.r[v]);
  json p = json::object();
  for (int e = 0; e < tree.size(); ++e)
    p[std::to_string(tree.edge(e).u) + "-" + std::to_string(tree.edge(e).v)] = to_string(params.p[e]);
  return {{"r", r}, {"p", p}};
}

/// "start:stop:step" (inclusive, exact steps), "a,b,c", or a single value.
inline std::vector<Rational> parse_grid(std::string_view text) {
  std::vector<Rational> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
      const auto c = text.find(':', pos);
      parts.push_back(text.substr(pos, c - pos));
      if (c == std::string_view::npos) break;
      pos = c + 1;
    }
    if (parts.size() != 3) throw std::invalid_argument("grid must be start:stop:step, got '" + std::string(text) + "'");
    const Rational start = parse_rational(parts[0]);
    const Rational stop = parse_rational(parts[1]);
    const Rational step = parse_rational(parts[2]);
    if (sgn(step) <= 0) throw std::invalid_argument("grid step must be positive");
    if (stop < start) throw std::invalid_argument("grid stop is below start");
    for (Rational x = start; x <= stop; x += step) {
      out.push_back(x);
      if (out.size() > 100000) throw std::length_error("grid too long");
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto c = text.find(',', pos);
    out.push_back(parse_rational(text.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos)));
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  return out;
}

/// "3..8" or "5".
inline std::pair<int, int> parse_int_range(std::string_view text) {
  auto to_int = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("bad integer range '" + std::string(text) + "'");
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const int v = to_int(text);
    return {v, v};
  }
  const int lo = to_int(text.substr(0, dots)), hi = to_int(text.substr(dots + 2));
  if (hi < lo) throw std::invalid_argument("empty integer range '" + std::string(text) + "'");
  return {lo, hi};
}

namespace detail {
inline std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '{' || c == '}') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline int parse_index(const std::string& s, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("bad " + what + " '" + s + "'");
  return v;
}
}  // namespace detail

/// "0,1,3" or "{0,1,3}".
inline VertexSet parse_vertex_set(std::string_view text, const RootedTree& tree) {
  VertexSet s;
  for (const auto& tok : detail::split_tokens(text)) {
    const int v = detail::parse_index(tok, "vertex");
    if (v < 0 || v >= tree.order()) throw std::invalid_argument("vertex " + tok + " not in tree");
    s.insert(v);
  }
  if (s.empty()) throw std::invalid_argument("empty vertex set");
  return s;
}

struct ParamMultiset {
  EdgeMultiset edges;
  VertexMultiset vertices;
};

/// Tokens "e3" (edge index), "1-2" (edge by endpoints), "v0" (vertex r).
inline ParamMultiset parse_multiset(std::string_view text, const RootedTree& tree) {
  ParamMultiset m;
  for (const auto& tok : detail::split_tokens(text)) {
    if (tok[0] == 'e') {
      const int e = detail::parse_index(tok.substr(1), "edge index");
      if (e < 0 || e >= tree.size()) throw std::invalid_argument("edge " + tok + " not in tree");
      ++m.edges[e];
    } else if (tok[0] == 'v') {
      const int v = detail::parse_index(tok.substr(1), "vertex");
      if (v < 0 || v >= tree.order()) throw std::invalid_argument("vertex " + tok + " not in tree");
      ++m.vertices[v];
    } else if (const auto dash = tok.find('-'); dash != std::string::npos) {
      const int a = detail::parse_index(tok.substr(0, dash), "vertex");
      const int b = detail::parse_index(tok.substr(dash + 1), "vertex");
      const int e = tree.edge_index(a, b);
      if (e < 0) throw std::invalid_argument("no edge " + tok + " in tree");
      ++m.edges[e];
    } else {
      throw std::invalid_argument("bad multiset token '" + tok + "' (use eK, u-v or vK)");
    }
  }
  return m;
}

inline json vertex_set_json(VertexSet s) {
  json a = json::array();
  for (Vertex v : s) a.push_back(v);
  return a;
}

/// Exact decimal when the denominator divides a power of ten, else 12
/// significant digits.
inline std::string decimal_string(const Rational& q) {
  Integer d = q.get_den();
  int twos = 0, fives = 0;
  while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) { d /= 2; ++twos; }
  while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) { d /= 5; ++fives; }
  if (d == 1) {
    const int digits = std::max(twos, fives);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
    Integer scaled = q.get_num() * scale / q.get_den();
    const bool neg = scaled < 0;
    std::string s = Integer(abs(scaled)).get_str();
    if (digits > 0) {
      if (static_cast<int>(s.size()) <= digits) s.insert(0, digits - s.size() + 1, '0');
      s.insert(s.size() - digits, ".");
    }
    return neg ? "-" + s : s;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", to_double(q));
  return buf;
}

inline std::string fixed_string(double x, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

#ifndef POISREP_VERSION
#define POISREP_VERSION "0.1.0"
#endif

inline std::string csv_metadata(std::string_view config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config)));
  return std::string("# poisrep ") + POISREP_VERSION + " config=" + buf;
}

}  // namespace poisrep
