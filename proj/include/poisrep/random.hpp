#pragma once

#include <poisrep/rational.hpp>

#include <cmath>
#include <cstdint>

namespace poisrep {

/// Counter-based generator: draw i of stream `key` is a pure function of
/// (key, i), so sequences replay identically on every platform and streams
/// can be split without shared state.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  constexpr std::uint64_t operator()() { return mix(key_ ^ mix(counter_++)); }

  /// Independent child stream.
  constexpr CounterRng split(std::uint64_t stream) const {
    return CounterRng(mix(key_ + 0x632be59bd9b4e019ULL * (stream + 1)));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Bernoulli draw against an exact probability: with U = k / 2^53 the event
/// U < q is decided on integers, so no rounding of q is involved.
class ExactBernoulli {
 public:
  ExactBernoulli() = default;
  explicit ExactBernoulli(const Rational& q) {
    Integer scaled = q.get_num();
    scaled <<= 53;
    Integer t;
    mpz_cdiv_q(t.get_mpz_t(), scaled.get_mpz_t(), q.get_den_mpz_t());
    if (t <= 0) threshold_ = 0;
    else if (t >= (Integer(1) << 53)) threshold_ = std::uint64_t{1} << 53;
    else threshold_ = t.get_ui();
  }
  bool operator()(CounterRng& rng) const { return (rng() >> 11) < threshold_; }

 private:
  std::uint64_t threshold_ = 0;
};

/// Poisson(lambda) by sequential inversion; intended for the small
/// intensities that arise as measure values.
inline unsigned poisson_count(CounterRng& rng, double lambda) {
  if (lambda <= 0.0) return 0;
  const double u = rng.uniform();
  double term = std::exp(-lambda);
  double cdf = term;
  unsigned k = 0;
  while (u >= cdf && k < 10000) {
    ++k;
    term *= lambda / k;
    cdf += term;
    if (term == 0.0) break;
  }
  return k;
}

/// Seed of draw `index` within a run seeded by `seed`.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return CounterRng::mix(CounterRng::mix(seed) ^ (index * 0xd1b54a32d192ed03ULL));
}

}  // namespace poisrep
