#pragma once

// Smooth functions of the curve parameter, represented by their Taylor jets.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "circenv/expr.hpp"
#include "circenv/jet.hpp"
#include "circenv/vec2.hpp"

namespace circenv {

using ScalarFunction = std::function<Jet(double)>;
using CurveFunction = std::function<JetVec2(double)>;

/// Jets of a parsed expression by forward-mode evaluation of its compiled
/// tree; derivatives are exact up to rounding.
inline ScalarFunction from_expr(const Expr& e) {
  auto code = std::make_shared<const CompiledExpr>(e);
  return [code](double t) { return code->eval_jet(t); };
}

inline CurveFunction from_exprs(const Expr& x, const Expr& y) {
  ScalarFunction fx = from_expr(x);
  ScalarFunction fy = from_expr(y);
  return [fx, fy](double t) { return JetVec2{fx(t), fy(t)}; };
}

inline ScalarFunction constant_function(double v) {
  return [v](double) { return Jet::constant(v); };
}

inline CurveFunction constant_curve(Vec2 p) {
  return [p](double) { return constant_jet(p); };
}

/// s -> f(-s).
inline ScalarFunction reflected(ScalarFunction f) {
  return [f](double t) { return f(-t).reflected(); };
}

inline CurveFunction reflected(CurveFunction f) {
  return [f](double t) {
    JetVec2 v = f(-t);
    return JetVec2{v.x.reflected(), v.y.reflected()};
  };
}

namespace detail {

// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 4> kGaussNodes = {0.1834346424956498, 0.5255324099163290,
                                                      0.7966664774136267, 0.9602898564975363};
inline constexpr std::array<double, 4> kGaussWeights = {0.3626837833783620, 0.3137066458778873,
                                                        0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss8(const F& g, double lo, double hi) {
  const double m = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k)
    s += kGaussWeights[k] * (g(m - r * kGaussNodes[k]) + g(m + r * kGaussNodes[k]));
  return s * r;
}

}  // namespace detail

/// Primitive F(t) = c0 + int_a^t g(u) du. The integral is tabulated on
/// `cells` equal cells of [a, b] with an 8-point Gauss rule per cell. Between
/// nodes the Taylor series of g at the nearest node is integrated; the jet of
/// F carries the jet of g as its derivative.
inline ScalarFunction integral_function(ScalarFunction g, double a, double b, double c0,
                                        int cells = 2000) {
  struct Table {
    std::vector<double> value;
    std::vector<Jet> jet;  // g at the nodes
  };
  auto table = std::make_shared<Table>();
  table->value.assign(static_cast<std::size_t>(cells) + 1, c0);
  table->jet.reserve(static_cast<std::size_t>(cells) + 1);
  const double h = (b - a) / cells;
  auto gv = [&g](double u) { return g(u).value(); };
  for (int k = 0; k <= cells; ++k) {
    table->jet.push_back(g(k == cells ? b : a + k * h));
    if (k < cells) table->value[k + 1] = table->value[k] + detail::gauss8(gv, a + k * h, a + (k + 1) * h);
  }
  return [g, table, a, h, cells](double t) {
    const int k = std::clamp(static_cast<int>(std::lround((t - a) / h)), 0, cells);
    const double d = t - (a + k * h);
    const Jet& gk = table->jet[k];
    double v = 0.0, dp = d;
    for (int j = 0; j <= gk.order(); ++j, dp *= d) v += gk.coeff(j) * dp / (j + 1);
    return Jet::from_derivative(table->value[k] + v, g(t).truncated(Jet::kMaxOrder - 1));
  };
}

}  // namespace circenv
