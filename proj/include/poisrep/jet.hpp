#pragma once

// Truncated multivariate Taylor polynomials ("jets") over exact rationals.
//
// A JetSpace fixes d infinitesimal directions e_1..e_d and a per-direction
// degree cap c_i; monomials e^a with some a_i > c_i are dropped. That
// truncation is an ideal, so sums and products are exact, and the
// coefficient of e^a times a! is the mixed partial derivative of order a.

#include <poisrep/rational.hpp>

#include <memory>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace poisrep {

class JetSpace {
 public:
  explicit JetSpace(std::vector<int> caps) : caps_(std::move(caps)) {
    size_ = 1;
    strides_.resize(caps_.size());
    for (std::size_t i = 0; i < caps_.size(); ++i) {
      if (caps_[i] < 0) throw std::invalid_argument("negative jet cap");
      strides_[i] = size_;
      size_ *= caps_[i] + 1;
      if (size_ > (1 << 20)) throw std::length_error("jet space too large");
    }
    digits_.assign(static_cast<std::size_t>(size_) * caps_.size(), 0);
    degree_.assign(size_, 0);
    for (int idx = 0; idx < size_; ++idx) {
      int rest = idx;
      for (std::size_t i = 0; i < caps_.size(); ++i) {
        int dgt = rest % (caps_[i] + 1);
        rest /= caps_[i] + 1;
        digits_[idx * caps_.size() + i] = dgt;
        degree_[idx] += dgt;
      }
    }
  }

  int directions() const { return static_cast<int>(caps_.size()); }
  int size() const { return size_; }
  int cap(int dir) const { return caps_[dir]; }
  int total_degree() const { return std::accumulate(caps_.begin(), caps_.end(), 0); }
  int degree(int idx) const { return degree_[idx]; }
  int digit(int idx, int dir) const { return digits_[idx * caps_.size() + dir]; }
  int unit(int dir) const { return strides_[dir]; }

  int index(const std::vector<int>& exponents) const {
    if (exponents.size() != caps_.size()) throw std::invalid_argument("exponent arity mismatch");
    int idx = 0;
    for (std::size_t i = 0; i < caps_.size(); ++i) {
      if (exponents[i] < 0 || exponents[i] > caps_[i]) throw std::out_of_range("exponent outside jet caps");
      idx += exponents[i] * strides_[i];
    }
    return idx;
  }

  /// True when e^a * e^b survives truncation; then its index is a + b.
  bool compatible(int a, int b) const {
    for (std::size_t i = 0; i < caps_.size(); ++i)
      if (digits_[a * caps_.size() + i] + digits_[b * caps_.size() + i] > caps_[i]) return false;
    return true;
  }

 private:
  std::vector<int> caps_;
  std::vector<int> strides_;
  std::vector<int> digits_;
  std::vector<int> degree_;
  int size_ = 1;
};

class Jet {
 public:
  Jet() : coeffs_(1, Rational(0)) {}
  Jet(int c) : coeffs_(1, Rational(c)) {}  // NOLINT: implicit like a scalar
  Jet(const Rational& c) : coeffs_(1, c) {}  // NOLINT

  /// value + e_dir
  static Jet variable(std::shared_ptr<const JetSpace> space, int dir, const Rational& value) {
    Jet j(std::move(space));
    j.coeffs_[0] = value;
    if (j.space_->cap(dir) > 0) j.coeffs_[j.space_->unit(dir)] = 1;
    return j;
  }

  bool is_constant() const { return coeffs_.size() == 1; }
  const Rational& constant() const { return coeffs_[0]; }
  const std::shared_ptr<const JetSpace>& space() const { return space_; }

  Rational coefficient(int idx) const { return is_constant() ? (idx == 0 ? coeffs_[0] : Rational(0)) : coeffs_.at(idx); }

  /// Mixed partial derivative: coefficient times the product of factorials.
  Rational derivative(const std::vector<int>& exponents) const {
    if (is_constant()) {
      for (int e : exponents)
        if (e != 0) return 0;
      return coeffs_[0];
    }
    Rational c = coeffs_.at(space_->index(exponents));
    Integer f = 1;
    for (int e : exponents)
      for (int k = 2; k <= e; ++k) f *= k;
    return c * f;
  }

  Jet& operator+=(const Jet& o) { return accumulate(o, 1); }
  Jet& operator-=(const Jet& o) { return accumulate(o, -1); }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(const Jet& a) { return Jet(0) - a; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.is_constant()) return b.scaled(a.coeffs_[0]);
    if (b.is_constant()) return a.scaled(b.coeffs_[0]);
    const JetSpace& sp = *a.space_;
    Jet out(a.space_);
    const int m = sp.size();
    for (int i = 0; i < m; ++i) {
      if (sgn(a.coeffs_[i]) == 0) continue;
      for (int j = 0; i + j < m; ++j) {
        if (sgn(b.coeffs_[j]) == 0 || !sp.compatible(i, j)) continue;
        out.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
      }
    }
    return out;
  }

  Jet scaled(const Rational& s) const {
    Jet out = *this;
    for (auto& c : out.coeffs_) c *= s;
    return out;
  }

  /// Nonconstant part.
  Jet infinitesimal() const {
    Jet out = *this;
    out.coeffs_[0] = 0;
    return out;
  }

  bool operator==(const Jet& o) const {
    const std::size_t m = std::max(coeffs_.size(), o.coeffs_.size());
    for (std::size_t i = 0; i < m; ++i)
      if (coefficient(static_cast<int>(i)) != o.coefficient(static_cast<int>(i))) return false;
    return true;
  }

 private:
  explicit Jet(std::shared_ptr<const JetSpace> space)
      : space_(std::move(space)), coeffs_(space_->size(), Rational(0)) {}

  Jet& accumulate(const Jet& o, int sign) {
    if (!o.is_constant() && is_constant()) {
      Rational c = coeffs_[0];
      space_ = o.space_;
      coeffs_.assign(space_->size(), Rational(0));
      coeffs_[0] = c;
    }
    if (o.is_constant()) {
      if (sign > 0) coeffs_[0] += o.coeffs_[0];
      else coeffs_[0] -= o.coeffs_[0];
      return *this;
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (sign > 0) coeffs_[i] += o.coeffs_[i];
      else coeffs_[i] -= o.coeffs_[i];
    }
    return *this;
  }

  std::shared_ptr<const JetSpace> space_;
  std::vector<Rational> coeffs_;
};

/// log(u) - log(u(0)), as a jet with zero constant term. Requires u(0) > 0.
inline Jet log_relative(const Jet& u) {
  if (sgn(u.constant()) <= 0) throw std::domain_error("log of a jet with non-positive constant term");
  if (u.is_constant()) return Jet(0);
  const Jet w = u.infinitesimal().scaled(Rational(1) / u.constant());
  const int top = u.space()->total_degree();
  Jet acc(0);
  Jet power = w;
  for (int k = 1; k <= top; ++k) {
    Rational coef(k % 2 == 1 ? 1 : -1, k);
    acc += power.scaled(coef);
    power = power * w;
  }
  return acc;
}

/// 1/u for u(0) != 0.
inline Jet reciprocal(const Jet& u) {
  if (sgn(u.constant()) == 0) throw std::domain_error("jet is not invertible");
  const Rational inv = Rational(1) / u.constant();
  if (u.is_constant()) return Jet(inv);
  const Jet w = u.infinitesimal().scaled(inv);
  const int top = u.space()->total_degree();
  Jet acc(1);
  Jet power(1);
  for (int k = 1; k <= top; ++k) {
    power = power * w;
    acc += power.scaled(k % 2 == 1 ? Rational(-1) : Rational(1));
  }
  return acc.scaled(inv);
}

}  // namespace poisrep
