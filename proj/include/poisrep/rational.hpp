#pragma once

// Exact rational arithmetic on top of GMP, plus the handful of helpers the
// rest of the library needs: exact parsing of decimal and fraction strings,
// "a/b" formatting, balanced products and an accurate log of a ratio.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace poisrep {

using Integer = mpz_class;
using Rational = mpq_class;

/// a / b in lowest terms. mpq_class(a, b) does not reduce, and gmp
/// comparisons assume reduced operands.
inline Rational make_rational(long a, long b) {
  if (b == 0) throw std::domain_error("zero denominator");
  Rational q(a, b);
  q.canonicalize();
  return q;
}

inline bool is_canonical(const Rational& q) {
  return q.get_den() > 0 && gcd(q.get_num(), q.get_den()) == 1;
}

/// Parses "a/b", "-a/b", integers and decimals with an optional exponent
/// ("0.45", "2.5e-3") into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
  };
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) fail();

  auto is_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    bool neg = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
      neg = num.front() == '-';
      num.remove_prefix(1);
    }
    if (!is_digits(num) || !is_digits(den)) fail();
    Integer n(std::string(num), 10);
    Integer d(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    Rational q(neg ? Integer(-n) : n, d);
    q.canonicalize();
    return q;
  }

  std::string_view s = text;
  bool neg = false;
  if (s.front() == '-' || s.front() == '+') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_neg = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_neg = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!is_digits(exp_part) || exp_part.size() > 6) fail();
    exponent = std::stol(std::string(exp_part));
    if (exp_neg) exponent = -exponent;
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot);
    std::string_view fp = s.substr(dot + 1);
    if (ip.empty() && fp.empty()) fail();
    if ((!ip.empty() && !is_digits(ip)) || (!fp.empty() && !is_digits(fp))) fail();
    digits = std::string(ip) + std::string(fp);
    exponent -= static_cast<long>(fp.size());
  } else {
    if (!is_digits(s)) fail();
    digits = std::string(s);
  }
  Integer mant(digits, 10);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent < 0 ? Rational(mant, scale) : Rational(mant * scale, 1);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

/// Always "a/b", also for integers.
inline std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline double to_double(const Rational& q) { return q.get_d(); }

namespace detail {

inline double log_abs_integer(const Integer& z) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

inline Integer product_range(std::span<const Integer> xs) {
  if (xs.empty()) return Integer(1);
  if (xs.size() == 1) return xs[0];
  auto mid = xs.size() / 2;
  return product_range(xs.first(mid)) * product_range(xs.subspan(mid));
}

}  // namespace detail

/// log(x) for a positive rational, accurate to a few ulps even when x is
/// extremely close to one or far outside the double range.
inline double log_rational(const Rational& x) {
  if (sgn(x) <= 0) throw std::domain_error("log of a non-positive rational");
  Rational delta = x - 1;
  if (abs(delta) < Rational(1, 2)) return std::log1p(delta.get_d());
  return detail::log_abs_integer(x.get_num()) - detail::log_abs_integer(x.get_den());
}

/// Exact product of rationals. Numerators and denominators are multiplied in
/// balanced trees and reduced once at the end.
inline Rational product(std::span<const Rational> xs) {
  std::vector<Integer> nums;
  std::vector<Integer> dens;
  nums.reserve(xs.size());
  dens.reserve(xs.size());
  for (const auto& x : xs) {
    nums.push_back(x.get_num());
    dens.push_back(x.get_den());
  }
  Rational out(detail::product_range(nums), detail::product_range(dens));
  out.canonicalize();
  return out;
}

inline Rational power(const Rational& base, unsigned long e) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
  out.canonicalize();
  return out;
}

}  // namespace poisrep
