#pragma once

// Expression trees in one real parameter t, closed under differentiation.

#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "circenv/error.hpp"
#include "circenv/jet.hpp"

namespace circenv {

enum class Op { Constant, Param, Pi, Negate, Add, Sub, Mul, Div, Pow, Sqrt, Sin, Cos, Abs };

/// Exact exponent such as 3/2. `den` is always positive.
struct Rational {
  long long num = 0;
  long long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }
  friend bool operator==(const Rational&, const Rational&) = default;
};

class Expr;

namespace detail {

struct Node {
  Op op = Op::Constant;
  // Constant value, or the exponent of a Pow node.
  double number = 0.0;
  std::optional<Rational> exact;
  std::vector<Expr> children;
};

}  // namespace detail

/// Immutable, shareable expression handle.
class Expr {
 public:
  Expr() : Expr(make_constant(0.0)) {}

  Op op() const { return node_->op; }
  const void* id() const { return node_.get(); }
  const std::vector<Expr>& children() const { return node_->children; }
  const Expr& child(std::size_t i = 0) const { return node_->children.at(i); }
  double number() const { return node_->number; }
  const std::optional<Rational>& exact() const { return node_->exact; }

  bool is_constant(double v) const { return op() == Op::Constant && number() == v; }

  // Raw constructors: no folding, so parsed trees keep their exact shape.
  static Expr make_constant(double v) {
    detail::Node n;
    n.op = Op::Constant;
    n.number = v;
    double ip = 0.0;
    if (std::modf(v, &ip) == 0.0 && std::abs(v) < 1e15) n.exact = Rational{static_cast<long long>(ip), 1};
    return Expr(std::move(n));
  }
  static Expr make_leaf(Op op) {
    detail::Node n;
    n.op = op;
    return Expr(std::move(n));
  }
  static Expr make_unary(Op op, Expr a) {
    detail::Node n;
    n.op = op;
    n.children = {std::move(a)};
    return Expr(std::move(n));
  }
  static Expr make_binary(Op op, Expr a, Expr b) {
    detail::Node n;
    n.op = op;
    n.children = {std::move(a), std::move(b)};
    return Expr(std::move(n));
  }
  static Expr make_pow(Expr base, double exponent, std::optional<Rational> exact = std::nullopt) {
    detail::Node n;
    n.op = Op::Pow;
    n.number = exponent;
    n.exact = exact;
    double ip = 0.0;
    if (!n.exact && std::modf(exponent, &ip) == 0.0 && std::abs(exponent) < 1e15)
      n.exact = Rational{static_cast<long long>(ip), 1};
    n.children = {std::move(base)};
    return Expr(std::move(n));
  }

 private:
  explicit Expr(detail::Node n) : node_(std::make_shared<const detail::Node>(std::move(n))) {}
  std::shared_ptr<const detail::Node> node_;
};

inline Expr param() { return Expr::make_leaf(Op::Param); }
inline Expr pi_constant() { return Expr::make_leaf(Op::Pi); }
inline Expr constant(double v) { return Expr::make_constant(v); }

// Folding builders used by differentiate() and by programmatic construction.
// They keep results readable; correctness never depends on them.

inline bool is_const(const Expr& e) { return e.op() == Op::Constant; }

inline Expr operator-(const Expr& a) {
  if (is_const(a)) return constant(-a.number());
  if (a.op() == Op::Negate) return a.child();
  return Expr::make_unary(Op::Negate, a);
}

inline Expr operator+(const Expr& a, const Expr& b) {
  if (is_const(a) && is_const(b)) return constant(a.number() + b.number());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::make_binary(Op::Add, a, b);
}

inline Expr operator-(const Expr& a, const Expr& b) {
  if (is_const(a) && is_const(b)) return constant(a.number() - b.number());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr::make_binary(Op::Sub, a, b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
  if (is_const(a) && is_const(b)) return constant(a.number() * b.number());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return Expr::make_binary(Op::Mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (is_const(a) && is_const(b) && b.number() != 0.0) return constant(a.number() / b.number());
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return constant(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr::make_binary(Op::Div, a, b);
}

inline Expr operator+(const Expr& a, double b) { return a + constant(b); }
inline Expr operator+(double a, const Expr& b) { return constant(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - constant(b); }
inline Expr operator-(double a, const Expr& b) { return constant(a) - b; }
inline Expr operator*(double a, const Expr& b) { return constant(a) * b; }
inline Expr operator*(const Expr& a, double b) { return a * constant(b); }
inline Expr operator/(const Expr& a, double b) { return a / constant(b); }
inline Expr operator/(double a, const Expr& b) { return constant(a) / b; }

inline Expr pow(const Expr& base, Rational p) {
  if (p.num == 0) return constant(1.0);
  if (p.num == p.den) return base;
  return Expr::make_pow(base, p.value(), p);
}
inline Expr pow(const Expr& base, double p) {
  if (p == 0.0) return constant(1.0);
  if (p == 1.0) return base;
  return Expr::make_pow(base, p);
}
inline Expr sqrt(const Expr& a) { return Expr::make_unary(Op::Sqrt, a); }
inline Expr sin(const Expr& a) {
  if (a.is_constant(0.0)) return constant(0.0);
  return Expr::make_unary(Op::Sin, a);
}
inline Expr cos(const Expr& a) {
  if (a.is_constant(0.0)) return constant(1.0);
  return Expr::make_unary(Op::Cos, a);
}
inline Expr abs(const Expr& a) { return Expr::make_unary(Op::Abs, a); }

/// True when the tree does not mention t.
inline bool is_parameter_free(const Expr& e) {
  if (e.op() == Op::Param) return false;
  for (const auto& c : e.children())
    if (!is_parameter_free(c)) return false;
  return true;
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return false;
  if ((a.op() == Op::Constant || a.op() == Op::Pow) && a.number() != b.number()) return false;
  if (a.children().size() != b.children().size()) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i)
    if (!structurally_equal(a.child(i), b.child(i))) return false;
  return true;
}

namespace detail {

inline Rational rational_minus_one(const Rational& r) { return {r.num - r.den, r.den}; }

inline double checked(double v, double t, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what, t);
  return v;
}

inline double eval_pow(double base, const Expr& e, double t) {
  const double p = e.number();
  const bool integral = e.exact() && e.exact()->is_integer();
  if (base < 0.0 && !integral) throw EvalError("pow of negative base with non-integer exponent", t);
  if (base == 0.0 && p < 0.0) throw EvalError("division by zero in pow", t);
  return std::pow(base, p);
}

}  // namespace detail

/// IEEE double value of e at t. Domain violations raise EvalError.
inline double eval(const Expr& e, double t) {
  switch (e.op()) {
    case Op::Constant: return e.number();
    case Op::Param: return t;
    case Op::Pi: return std::numbers::pi;
    case Op::Negate: return -eval(e.child(), t);
    case Op::Add: return detail::checked(eval(e.child(0), t) + eval(e.child(1), t), t, "add");
    case Op::Sub: return detail::checked(eval(e.child(0), t) - eval(e.child(1), t), t, "sub");
    case Op::Mul: return detail::checked(eval(e.child(0), t) * eval(e.child(1), t), t, "mul");
    case Op::Div: {
      const double den = eval(e.child(1), t);
      if (den == 0.0) throw EvalError("division by zero", t);
      return detail::checked(eval(e.child(0), t) / den, t, "div");
    }
    case Op::Pow:
      return detail::checked(detail::eval_pow(eval(e.child(), t), e, t), t, "pow");
    case Op::Sqrt: {
      const double v = eval(e.child(), t);
      if (v < 0.0) throw EvalError("sqrt of negative value", t);
      return std::sqrt(v);
    }
    case Op::Sin: return std::sin(eval(e.child(), t));
    case Op::Cos: return std::cos(eval(e.child(), t));
    case Op::Abs: return std::abs(eval(e.child(), t));
  }
  throw EvalError("unknown node", t);
}

/// Taylor jet of e at t (forward-mode differentiation of the tree).
inline Jet eval_jet(const Expr& e, double t, int order = Jet::kMaxOrder) {
  try {
    switch (e.op()) {
      case Op::Constant: return Jet::constant(e.number(), order);
      case Op::Param: return Jet::variable(t, order);
      case Op::Pi: return Jet::constant(std::numbers::pi, order);
      case Op::Negate: return -eval_jet(e.child(), t, order);
      case Op::Add: return eval_jet(e.child(0), t, order) + eval_jet(e.child(1), t, order);
      case Op::Sub: return eval_jet(e.child(0), t, order) - eval_jet(e.child(1), t, order);
      case Op::Mul: return eval_jet(e.child(0), t, order) * eval_jet(e.child(1), t, order);
      case Op::Div: {
        Jet den = eval_jet(e.child(1), t, order);
        if (den.value() == 0.0) throw EvalError("division by zero", t);
        return eval_jet(e.child(0), t, order) / den;
      }
      case Op::Pow: {
        Jet base = eval_jet(e.child(), t, order);
        detail::eval_pow(base.value(), e, t);
        return pow(base, e.number());
      }
      case Op::Sqrt: {
        Jet v = eval_jet(e.child(), t, order);
        if (v.value() < 0.0) throw EvalError("sqrt of negative value", t);
        return sqrt(v);
      }
      case Op::Sin: return sin(eval_jet(e.child(), t, order));
      case Op::Cos: return cos(eval_jet(e.child(), t, order));
      case Op::Abs: return abs(eval_jet(e.child(), t, order));
    }
  } catch (const DomainError& ex) {
    throw EvalError(ex.what(), t);
  }
  throw EvalError("unknown node", t);
}

/// d e / dt by structural rules. Total on the type.
inline Expr differentiate(const Expr& e) {
  switch (e.op()) {
    case Op::Constant:
    case Op::Pi: return constant(0.0);
    case Op::Param: return constant(1.0);
    case Op::Negate: return -differentiate(e.child());
    case Op::Add: return differentiate(e.child(0)) + differentiate(e.child(1));
    case Op::Sub: return differentiate(e.child(0)) - differentiate(e.child(1));
    case Op::Mul: {
      const Expr& u = e.child(0);
      const Expr& v = e.child(1);
      return differentiate(u) * v + u * differentiate(v);
    }
    case Op::Div: {
      const Expr& u = e.child(0);
      const Expr& v = e.child(1);
      if (is_parameter_free(v)) return differentiate(u) / v;
      return (differentiate(u) * v - u * differentiate(v)) / pow(v, Rational{2, 1});
    }
    case Op::Pow: {
      const Expr& u = e.child();
      Expr lowered = e.exact() ? pow(u, detail::rational_minus_one(*e.exact()))
                               : pow(u, e.number() - 1.0);
      return constant(e.number()) * lowered * differentiate(u);
    }
    case Op::Sqrt: return differentiate(e.child()) / (constant(2.0) * e);
    case Op::Sin: return cos(e.child()) * differentiate(e.child());
    case Op::Cos: return -(sin(e.child()) * differentiate(e.child()));
    // d|u| = u' sign(u), with sign(u) written as u/|u| (valid away from zeros).
    case Op::Abs: return differentiate(e.child()) * (e.child() / e);
  }
  return constant(0.0);
}

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline bool is_atom(const Expr& e) {
  switch (e.op()) {
    case Op::Param:
    case Op::Pi:
    case Op::Sqrt:
    case Op::Sin:
    case Op::Cos:
    case Op::Abs: return true;
    case Op::Constant: return e.number() >= 0.0;
    default: return false;
  }
}

}  // namespace detail

/// Fully parenthesized text that the DSL parser reads back into an equal tree.
inline std::string to_string(const Expr& e) {
  using detail::format_number;
  switch (e.op()) {
    case Op::Constant:
      return e.number() < 0.0 ? "(" + format_number(e.number()) + ")" : format_number(e.number());
    case Op::Param: return "t";
    case Op::Pi: return "pi";
    case Op::Negate: return "-" + to_string(e.child());
    case Op::Add: return "(" + to_string(e.child(0)) + " + " + to_string(e.child(1)) + ")";
    case Op::Sub: return "(" + to_string(e.child(0)) + " - " + to_string(e.child(1)) + ")";
    case Op::Mul: return "(" + to_string(e.child(0)) + " * " + to_string(e.child(1)) + ")";
    case Op::Div: return "(" + to_string(e.child(0)) + " / " + to_string(e.child(1)) + ")";
    case Op::Pow: {
      std::string base = to_string(e.child());
      switch (e.child().op()) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
        case Op::Constant: break;  // already enclosed
        default:
          if (!detail::is_atom(e.child())) base = "(" + base + ")";
      }
      std::string exponent;
      if (e.exact() && e.exact()->is_integer() && e.exact()->num >= 0) {
        exponent = std::to_string(e.exact()->num);
      } else if (e.exact()) {
        exponent = "(" + std::to_string(e.exact()->num) +
                   (e.exact()->is_integer() ? "" : "/" + std::to_string(e.exact()->den)) + ")";
      } else {
        exponent = "(" + format_number(e.number()) + ")";
      }
      return base + "^" + exponent;
    }
    case Op::Sqrt: return "sqrt(" + to_string(e.child()) + ")";
    case Op::Sin: return "sin(" + to_string(e.child()) + ")";
    case Op::Cos: return "cos(" + to_string(e.child()) + ")";
    case Op::Abs: return "abs(" + to_string(e.child()) + ")";
  }
  return "?";
}

inline std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& c : e.children()) n += node_count(c);
  return n;
}

/// Flattened expression for repeated jet evaluation. Shared subtrees are
/// evaluated once.
class CompiledExpr {
 public:
  explicit CompiledExpr(const Expr& e) { emit(e); }

  Jet eval_jet(double t, int order = Jet::kMaxOrder) const {
    thread_local std::vector<Jet> r;
    r.resize(code_.size());
    try {
      for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        switch (in.op) {
          case Op::Constant: r[i] = Jet::constant(in.number, order); break;
          case Op::Param: r[i] = Jet::variable(t, order); break;
          case Op::Pi: r[i] = Jet::constant(std::numbers::pi, order); break;
          case Op::Negate: r[i] = -r[in.a]; break;
          case Op::Add: r[i] = r[in.a] + r[in.b]; break;
          case Op::Sub: r[i] = r[in.a] - r[in.b]; break;
          case Op::Mul: r[i] = r[in.a] * r[in.b]; break;
          case Op::Div:
            if (r[in.b].value() == 0.0) throw EvalError("division by zero", t);
            r[i] = r[in.a] / r[in.b];
            break;
          case Op::Pow: {
            const double base = r[in.a].value();
            if (base < 0.0 && !in.integral) throw EvalError("pow of negative base with non-integer exponent", t);
            if (base == 0.0 && in.number < 0.0) throw EvalError("division by zero in pow", t);
            r[i] = in.small_int ? ipow(r[in.a], in.exponent) : pow(r[in.a], in.number);
            break;
          }
          case Op::Sqrt:
            if (r[in.a].value() < 0.0) throw EvalError("sqrt of negative value", t);
            r[i] = sqrt(r[in.a]);
            break;
          case Op::Sin: r[i] = sin(r[in.a]); break;
          case Op::Cos: r[i] = cos(r[in.a]); break;
          case Op::Abs: r[i] = abs(r[in.a]); break;
        }
      }
    } catch (const DomainError& ex) {
      throw EvalError(ex.what(), t);
    }
    const Jet& out = r.back();
    if (!out.is_finite()) throw EvalError("non-finite result", t);
    return out;
  }

  std::size_t size() const { return code_.size(); }

 private:
  struct Instr {
    Op op;
    double number = 0.0;
    bool integral = false;
    bool small_int = false;
    int exponent = 0;
    int a = -1;
    int b = -1;
  };

  int emit(const Expr& e) {
    if (auto it = seen_.find(e.id()); it != seen_.end()) return it->second;
    Instr in{e.op()};
    in.number = e.number();
    in.integral = e.exact() && e.exact()->is_integer();
    if (in.integral && std::abs(e.exact()->num) <= 64) {
      in.small_int = true;
      in.exponent = static_cast<int>(e.exact()->num);
    }
    if (!e.children().empty()) in.a = emit(e.child(0));
    if (e.children().size() > 1) in.b = emit(e.child(1));
    code_.push_back(in);
    const int slot = static_cast<int>(code_.size()) - 1;
    seen_.emplace(e.id(), slot);
    return slot;
  }

  std::vector<Instr> code_;
  std::unordered_map<const void*, int> seen_;
};

}  // namespace circenv
