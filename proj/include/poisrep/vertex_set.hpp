#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace poisrep {

using Vertex = int;

/// Hard ceiling imposed by the 32-bit encoding. Subset enumeration is
/// exponential, so the working cap (see kDefaultMaxOrder) is lower.
inline constexpr int kMaxEncodableOrder = 32;
inline constexpr int kDefaultMaxOrder = 24;

/// Subset of the vertices 0..n-1 of a tree, encoded as a bit set.
class VertexSet {
 public:
  using Bits = std::uint32_t;

  constexpr VertexSet() = default;
  constexpr explicit VertexSet(Bits bits) : bits_(bits) {}
  VertexSet(std::initializer_list<Vertex> vs) {
    for (Vertex v : vs) insert(v);
  }

  static VertexSet from(const std::vector<Vertex>& vs) {
    VertexSet s;
    for (Vertex v : vs) s.insert(v);
    return s;
  }
  static constexpr VertexSet full(int n) {
    return VertexSet(n >= 32 ? ~Bits{0} : ((Bits{1} << n) - 1));
  }
  static constexpr VertexSet single(Vertex v) { return VertexSet(Bits{1} << v); }

  constexpr Bits bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(Vertex v) const { return (bits_ >> v) & 1u; }
  constexpr bool subset_of(VertexSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool intersects(VertexSet o) const { return (bits_ & o.bits_) != 0; }
  /// Largest member plus one, 0 for the empty set.
  constexpr int span() const { return 32 - std::countl_zero(bits_); }
  constexpr Vertex min() const { return std::countr_zero(bits_); }

  void insert(Vertex v) {
    if (v < 0 || v >= kMaxEncodableOrder) throw std::out_of_range("vertex id out of range");
    bits_ |= Bits{1} << v;
  }
  void erase(Vertex v) { bits_ &= ~(Bits{1} << v); }

  constexpr VertexSet operator|(VertexSet o) const { return VertexSet(bits_ | o.bits_); }
  constexpr VertexSet operator&(VertexSet o) const { return VertexSet(bits_ & o.bits_); }
  constexpr VertexSet operator-(VertexSet o) const { return VertexSet(bits_ & ~o.bits_); }
  constexpr VertexSet operator^(VertexSet o) const { return VertexSet(bits_ ^ o.bits_); }
  VertexSet& operator|=(VertexSet o) { bits_ |= o.bits_; return *this; }
  VertexSet& operator&=(VertexSet o) { bits_ &= o.bits_; return *this; }
  VertexSet& operator-=(VertexSet o) { bits_ &= ~o.bits_; return *this; }

  constexpr bool operator==(const VertexSet&) const = default;
  /// Raw bit order; use canonical_less for the (size, bits) order.
  constexpr auto operator<=>(const VertexSet&) const = default;

  std::vector<Vertex> members() const {
    std::vector<Vertex> out;
    for (Bits b = bits_; b; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  /// Iterates over members in increasing order.
  class iterator {
   public:
    constexpr explicit iterator(Bits b) : b_(b) {}
    constexpr Vertex operator*() const { return std::countr_zero(b_); }
    constexpr iterator& operator++() { b_ &= b_ - 1; return *this; }
    constexpr bool operator==(const iterator&) const = default;
   private:
    Bits b_;
  };
  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (Vertex v : *this) {
      if (!first) s += ",";
      s += std::to_string(v);
      first = false;
    }
    return s + "}";
  }

 private:
  Bits bits_ = 0;
};

/// Order used for witnesses and reports: by cardinality, then bit pattern.
inline bool canonical_less(VertexSet a, VertexSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.bits() < b.bits();
}

/// Calls f(sub) for every subset of `set`, including the empty set and `set`.
template <typename F>
void for_each_subset(VertexSet set, F&& f) {
  const auto mask = set.bits();
  VertexSet::Bits sub = mask;
  while (true) {
    f(VertexSet(sub));
    if (sub == 0) break;
    sub = (sub - 1) & mask;
  }
}

}  // namespace poisrep
