#pragma once

// Truncated Taylor series arithmetic ("jets").
//
// A Jet stores the Taylor coefficients c[k] = f^(k)(t0) / k! of a function at a
// point, up to a tracked order. Arithmetic propagates the coefficients exactly,
// so composite curves (envelopes, evolutoids, auxiliary families) get their
// derivatives to machine precision without symbolic expression swell.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "circenv/error.hpp"

namespace circenv {

class Jet {
 public:
  static constexpr int kMaxOrder = 4;

  Jet() { c_.fill(0.0); }

  static Jet constant(double v, int order = kMaxOrder) {
    Jet j;
    j.c_[0] = v;
    j.order_ = order;
    return j;
  }

  /// The identity function t evaluated at t0.
  static Jet variable(double t0, int order = kMaxOrder) {
    Jet j = constant(t0, order);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  /// Antiderivative jet: value v at t0 and derivative jet d.
  static Jet from_derivative(double v, const Jet& d) {
    Jet j;
    j.order_ = std::min(kMaxOrder, d.order_ + 1);
    j.c_[0] = v;
    for (int k = 1; k <= j.order_; ++k) j.c_[k] = d.c_[k - 1] / k;
    return j;
  }

  int order() const noexcept { return order_; }
  double value() const noexcept { return c_[0]; }
  double coeff(int k) const { return c_.at(static_cast<std::size_t>(k)); }

  /// k-th derivative at the expansion point.
  double derivative(int k) const {
    if (k > order_) throw std::out_of_range("jet derivative beyond tracked order");
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c_[static_cast<std::size_t>(k)] * f;
  }

  /// Jet with the given Taylor coefficients.
  static Jet from_coefficients(const double* c, int order = kMaxOrder) {
    Jet r;
    r.order_ = order;
    for (int k = 0; k <= order; ++k) r.c_[k] = c[k];
    return r;
  }

  /// Jet of (f(t0 + s) - (terms below s^k)) / s^k; loses k orders.
  Jet shifted(int k) const {
    if (k < 0 || k > order_) throw std::out_of_range("jet shift beyond tracked order");
    Jet r;
    r.order_ = order_ - k;
    for (int j = 0; j <= r.order_; ++j) r.c_[j] = c_[j + k];
    return r;
  }

  /// Jet of the derivative function; loses one order.
  Jet derivative() const {
    if (order_ < 1) throw std::out_of_range("jet has no derivative information left");
    Jet d;
    d.order_ = order_ - 1;
    for (int k = 0; k <= d.order_; ++k) d.c_[k] = (k + 1) * c_[k + 1];
    return d;
  }

  Jet truncated(int order) const {
    Jet j = *this;
    j.order_ = std::min(order_, order);
    for (int k = j.order_ + 1; k <= kMaxOrder; ++k) j.c_[k] = 0.0;
    return j;
  }

  /// Jet of s -> f(-s) at -t0, given the jet of f at t0.
  Jet reflected() const {
    Jet r = *this;
    for (int k = 1; k <= kMaxOrder; k += 2) r.c_[k] = -r.c_[k];
    return r;
  }

  bool is_finite() const {
    for (int k = 0; k <= order_; ++k)
      if (!std::isfinite(c_[k])) return false;
    return true;
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  Jet& operator+=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator+=(double v) {
    c_[0] += v;
    return *this;
  }
  Jet& operator*=(double v) {
    for (auto& x : c_) x *= v;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(Jet a, double b) { return a += -b; }
  friend Jet operator-(double a, const Jet& b) { return (-b) + a; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator/(Jet a, double b) { return a *= 1.0 / b; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.order_ = std::min(a.order_, b.order_);
    for (int k = 0; k <= r.order_; ++k) {
      double s = 0.0;
      for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.c_[0] == 0.0) throw DomainError("jet division by zero");
    Jet q;
    q.order_ = std::min(a.order_, b.order_);
    for (int k = 0; k <= q.order_; ++k) {
      double s = a.c_[k];
      for (int i = 1; i <= k; ++i) s -= b.c_[i] * q.c_[k - i];
      q.c_[k] = s / b.c_[0];
    }
    return q;
  }
  friend Jet operator/(double a, const Jet& b) { return constant(a, b.order_) / b; }

  friend Jet sqrt(const Jet& a) {
    if (a.c_[0] < 0.0) throw DomainError("jet sqrt of negative value");
    Jet s;
    s.order_ = a.order_;
    s.c_[0] = std::sqrt(a.c_[0]);
    if (s.order_ > 0 && s.c_[0] == 0.0) throw DomainError("jet sqrt at zero has no derivatives");
    for (int k = 1; k <= s.order_; ++k) {
      double v = a.c_[k];
      for (int i = 1; i < k; ++i) v -= s.c_[i] * s.c_[k - i];
      s.c_[k] = v / (2.0 * s.c_[0]);
    }
    return s;
  }

  /// a^n for an integer exponent.
  friend Jet ipow(const Jet& a, int n) {
    switch (n) {
      case 0: return constant(1.0, a.order_);
      case 1: return a;
      case 2: return a * a;
      case -1: return 1.0 / a;
      default: break;
    }
    if (a.c_[0] == 0.0) {
      if (n < 0) throw DomainError("jet pow of zero base with negative exponent");
      Jet base = a;
      Jet r = constant(1.0, a.order_);
      for (unsigned e = static_cast<unsigned>(n); e; e >>= 1U) {
        if (e & 1U) r = r * base;
        base = base * base;
      }
      return r;
    }
    double y0 = 1.0;
    const double b = n < 0 ? 1.0 / a.c_[0] : a.c_[0];
    for (int k = 0; k < std::abs(n); ++k) y0 *= b;
    return detail_power_series(a, static_cast<double>(n), y0);
  }

  /// a^p for a constant exponent. Integer exponents work for any base;
  /// non-integer exponents need a positive base.
  friend Jet pow(const Jet& a, double p) {
    double ip = 0.0;
    const bool integral = std::modf(p, &ip) == 0.0 && std::abs(p) <= 64.0;
    if (integral && a.c_[0] == 0.0) {
      if (p < 0.0) throw DomainError("jet pow of zero base with negative exponent");
      auto e = static_cast<unsigned long>(ip);
      Jet base = a;
      Jet r = constant(1.0, a.order_);
      while (e) {
        if (e & 1UL) r = r * base;
        base = base * base;
        e >>= 1UL;
      }
      return r;
    }
    if (!integral && a.c_[0] <= 0.0) throw DomainError("jet pow of non-positive base with fractional exponent");
    return detail_power_series(a, p, integral ? std::pow(a.c_[0], static_cast<int>(ip)) : std::pow(a.c_[0], p));
  }

  // y = a^p with y(0) = y0 satisfies a y' = p a' y; compare Taylor coefficients.
  static Jet detail_power_series(const Jet& a, double p, double y0) {
    Jet y;
    y.order_ = a.order_;
    y.c_[0] = y0;
    for (int k = 1; k <= y.order_; ++k) {
      double s = 0.0;
      for (int j = 1; j <= k; ++j) s += ((p + 1.0) * j - k) * a.c_[j] * y.c_[k - j];
      y.c_[k] = s / (k * a.c_[0]);
    }
    return y;
  }

  friend void sincos(const Jet& a, Jet& s, Jet& c) {
    s = Jet();
    c = Jet();
    s.order_ = c.order_ = a.order_;
    s.c_[0] = std::sin(a.c_[0]);
    c.c_[0] = std::cos(a.c_[0]);
    for (int k = 1; k <= a.order_; ++k) {
      double ss = 0.0;
      double cc = 0.0;
      for (int j = 1; j <= k; ++j) {
        ss += j * a.c_[j] * c.c_[k - j];
        cc -= j * a.c_[j] * s.c_[k - j];
      }
      s.c_[k] = ss / k;
      c.c_[k] = cc / k;
    }
  }
  friend Jet sin(const Jet& a) {
    Jet s, c;
    sincos(a, s, c);
    return s;
  }
  friend Jet cos(const Jet& a) {
    Jet s, c;
    sincos(a, s, c);
    return c;
  }

  /// |a|; at an exact zero the sign of the first nonzero coefficient is used.
  friend Jet abs(const Jet& a) {
    for (int k = 0; k <= a.order_; ++k) {
      if (a.c_[k] > 0.0) return a;
      if (a.c_[k] < 0.0) return -a;
    }
    return a;
  }

 private:
  std::array<double, kMaxOrder + 1> c_{};
  int order_ = kMaxOrder;
};

}  // namespace circenv
