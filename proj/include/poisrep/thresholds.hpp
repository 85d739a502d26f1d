#pragma once

// Complementary Bell numbers, negative-order polylogarithms via Eulerian
// polynomials, their largest negative roots, and the derived thresholds.

#include <poisrep/rational.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace poisrep {

inline constexpr int kMaxBellIndex = 64;

namespace detail {

/// S(n, k) for 0 <= k <= n <= kMaxBellIndex.
inline const std::vector<std::vector<Integer>>& stirling2_table() {
  static const std::vector<std::vector<Integer>> table = [] {
    std::vector<std::vector<Integer>> s(kMaxBellIndex + 1, std::vector<Integer>(kMaxBellIndex + 1, 0));
    s[0][0] = 1;
    for (int n = 1; n <= kMaxBellIndex; ++n)
      for (int k = 1; k <= n; ++k) s[n][k] = k * s[n - 1][k] + s[n - 1][k - 1];
    return s;
  }();
  return table;
}

}  // namespace detail

inline Integer stirling2(int n, int k) {
  if (n < 0 || n > kMaxBellIndex) throw std::out_of_range("Stirling index outside [0, 64]");
  if (k < 0 || k > n) return 0;
  return detail::stirling2_table()[n][k];
}

/// sum_k (-1)^k S(n, k)
inline Integer complementary_bell(int n) {
  if (n < 0 || n > kMaxBellIndex) throw std::out_of_range("complementary Bell index outside [0, 64]");
  Integer acc = 0;
  for (int k = 0; k <= n; ++k) {
    if (k % 2 == 0) acc += stirling2(n, k);
    else acc -= stirling2(n, k);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Polynomials with rational coefficients, lowest degree first.

using Polynomial = std::vector<Rational>;

namespace detail {

inline void trim(Polynomial& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

inline Polynomial derivative(const Polynomial& p) {
  Polynomial d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

/// Remainder of a / b.
inline Polynomial remainder(Polynomial a, const Polynomial& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    const Rational f = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

}  // namespace detail

inline Rational evaluate(const Polynomial& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

/// Eulerian polynomial A_m(z) = sum_k A(m, k) z^k, with A_0 = 1.
inline std::vector<Integer> eulerian(int m) {
  if (m < 0) throw std::invalid_argument("Eulerian index must be nonnegative");
  std::vector<Integer> row{1};
  for (int n = 1; n <= m; ++n) {
    std::vector<Integer> next(n, 0);
    for (int k = 0; k < n; ++k) {
      if (k < static_cast<int>(row.size())) next[k] += (k + 1) * row[k];
      if (k >= 1 && k - 1 < static_cast<int>(row.size())) next[k] += (n - k) * row[k - 1];
    }
    row = std::move(next);
  }
  return row;
}

inline Polynomial eulerian_polynomial(int m) {
  Polynomial p;
  for (const auto& c : eulerian(m)) p.emplace_back(c);
  return p;
}

/// Li_{1-n}(z) = z A_{n-1}(z) / (1 - z)^n, exact.
inline Rational polylog_neg_order(int n, const Rational& z) {
  if (n < 1) throw std::invalid_argument("polylog order index must be >= 1");
  if (z == 1) throw std::domain_error("polylogarithm pole at z = 1");
  return z * evaluate(eulerian_polynomial(n - 1), z) / power(Rational(1) - z, static_cast<unsigned long>(n));
}

/// Sturm sequence of a squarefree polynomial.
class SturmChain {
 public:
  explicit SturmChain(Polynomial p) {
    detail::trim(p);
    chain_.push_back(p);
    chain_.push_back(detail::derivative(p));
    while (!chain_.back().empty()) {
      Polynomial r = detail::remainder(chain_[chain_.size() - 2], chain_.back());
      for (auto& c : r) c = -c;
      if (r.empty()) break;
      chain_.push_back(std::move(r));
    }
  }

  int sign_changes(const Rational& x) const {
    int changes = 0;
    int last = 0;
    for (const auto& q : chain_) {
      const int s = sgn(evaluate(q, x));
      if (s == 0) continue;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  }

  /// Distinct real roots in (a, b].
  int count(const Rational& a, const Rational& b) const { return sign_changes(a) - sign_changes(b); }

 private:
  std::vector<Polynomial> chain_;
};

/// Largest real root of p in (lo, hi], bisected on exact dyadic points to
/// width `tol`; nullopt when there is none.
inline std::optional<double> largest_root(const Polynomial& p, Rational lo, Rational hi, double tol = 1e-13) {
  const SturmChain sturm(p);
  if (sturm.count(lo, hi) == 0) return std::nullopt;
  if (sgn(evaluate(p, hi)) == 0) return to_double(hi);
  // invariant: a root in (lo, hi], none in (hi, original hi]
  const Rational top = hi;
  while (to_double(hi - lo) > tol) {
    const Rational mid = (lo + hi) / 2;
    if (sgn(evaluate(p, mid)) == 0 && sturm.count(mid, top) == 0) return to_double(mid);
    if (sturm.count(mid, top) > 0) lo = mid;
    else hi = mid;
  }
  return to_double((lo + hi) / 2);
}

/// r^(n): the largest strictly negative root of Li_{1-n}, n >= 3.
inline double r_star(int n) {
  if (n < 3) throw std::invalid_argument("r_star needs n >= 3");
  // Eulerian roots are real, simple, negative and closed under z -> 1/z, so
  // the largest one lies in [-1, 0).
  const Polynomial a = eulerian_polynomial(n - 1);
  auto root = largest_root(a, Rational(-2), Rational(0));
  if (!root) throw std::logic_error("Eulerian polynomial without a negative root");
  return *root;
}

inline double r1(int m) {
  if (m < 3) throw std::invalid_argument("r1 needs m >= 3");
  return 1.0 / (1.0 - r_star(m));
}

/// x / (1 + x) with x = ((-1)^k B~_k)^(1/(k-1)) when that base is positive:
/// the root in (0, 1) of f_k.
inline std::optional<double> r_tilde(int k) {
  if (k < 2) throw std::invalid_argument("r_tilde needs k >= 2");
  Integer c = complementary_bell(k);
  if (k % 2 == 1) c = -c;
  if (c <= 0) return std::nullopt;
  const double x = std::pow(c.get_d(), 1.0 / (k - 1));
  return x / (1.0 + x);
}

/// max over 2 <= j <= k of r_tilde(j); nullopt when no j qualifies.
inline std::optional<double> r0(int k) {
  if (k < 2) throw std::invalid_argument("r0 needs k >= 2");
  std::optional<double> best;
  for (int j = 2; j <= k; ++j) {
    auto t = r_tilde(j);
    if (t && (!best || *t > *best)) best = t;
  }
  return best;
}

namespace detail {
inline void require_open_unit(const Rational& r) {
  if (sgn(r) <= 0 || r >= 1) throw std::domain_error("r must lie in (0, 1)");
}
}  // namespace detail

/// f_k(r) = (1-r) r^(k-1) - (-1)^k B~_k (1-r)^k
inline Rational f_k(int k, const Rational& r) {
  detail::require_open_unit(r);
  if (k < 2) throw std::invalid_argument("f_k needs k >= 2");
  const Rational q = Rational(1) - r;
  Rational bell(complementary_bell(k));
  if (k % 2 == 1) bell = -bell;
  return q * power(r, k - 1) - bell * power(q, k);
}

/// Li_{1-j}(-(1-r)/r) / (r^(j-1) (1-r))
inline Rational f_poly(int j, const Rational& r) {
  detail::require_open_unit(r);
  if (j < 1) throw std::invalid_argument("f_poly needs j >= 1");
  const Rational q = Rational(1) - r;
  return polylog_neg_order(j, -q / r) / (power(r, j - 1) * q);
}

struct ThresholdRow {
  int n;
  Integer bell_c;
  double r_star;
  std::optional<double> r0;
  double r1;
};

inline std::vector<ThresholdRow> threshold_table(int lo, int hi) {
  if (lo < 3 || hi < lo || hi > kMaxBellIndex) throw std::invalid_argument("threshold range must satisfy 3 <= lo <= hi <= 64");
  std::vector<ThresholdRow> rows;
  for (int n = lo; n <= hi; ++n) rows.push_back({n, complementary_bell(n), r_star(n), r0(n), r1(n)});
  return rows;
}

}  // namespace poisrep
