#pragma once

#include <cmath>

#include "circenv/jet.hpp"

namespace circenv {

/// Plane vector over a scalar type (double or Jet).
template <class T>
struct BasicVec2 {
  T x{};
  T y{};

  BasicVec2& operator+=(const BasicVec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  BasicVec2& operator-=(const BasicVec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }

  friend BasicVec2 operator+(BasicVec2 a, const BasicVec2& b) { return a += b; }
  friend BasicVec2 operator-(BasicVec2 a, const BasicVec2& b) { return a -= b; }
  friend BasicVec2 operator-(const BasicVec2& a) { return {-a.x, -a.y}; }
  friend BasicVec2 operator*(const T& s, const BasicVec2& a) { return {s * a.x, s * a.y}; }
  friend BasicVec2 operator*(const BasicVec2& a, const T& s) { return {a.x * s, a.y * s}; }
  friend BasicVec2 operator/(const BasicVec2& a, const T& s) { return {a.x / s, a.y / s}; }
  friend T dot(const BasicVec2& a, const BasicVec2& b) { return a.x * b.x + a.y * b.y; }
  friend T cross(const BasicVec2& a, const BasicVec2& b) { return a.x * b.y - a.y * b.x; }
};

using Vec2 = BasicVec2<double>;
using JetVec2 = BasicVec2<Jet>;

inline JetVec2 operator*(double s, const JetVec2& a) { return {s * a.x, s * a.y}; }
inline JetVec2 operator*(const Jet& s, const Vec2& a) { return {s * a.x, s * a.y}; }
inline JetVec2 operator+(const JetVec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline JetVec2 operator-(const JetVec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }

/// Anti-clockwise rotation by pi/2: (x, y) -> (-y, x).
template <class T>
BasicVec2<T> rotate90(const BasicVec2<T>& v) {
  return {-v.y, v.x};
}

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Jet norm(const JetVec2& v) { return sqrt(dot(v, v)); }

inline Vec2 value(const JetVec2& v) { return {v.x.value(), v.y.value()}; }
inline Vec2 derivative(const JetVec2& v, int k) { return {v.x.derivative(k), v.y.derivative(k)}; }
inline JetVec2 derivative(const JetVec2& v) { return {v.x.derivative(), v.y.derivative()}; }
inline JetVec2 constant_jet(const Vec2& v, int order = Jet::kMaxOrder) {
  return {Jet::constant(v.x, order), Jet::constant(v.y, order)};
}

inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

}  // namespace circenv
