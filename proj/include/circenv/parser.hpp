#pragma once

// Text DSL for curves and circle families.
//
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' signed-number)?
//   atom  := number | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func  := sin | cos | sqrt | abs
//
// A signed-number exponent is `2`, `-1`, `0.5`, `(3/2)` or `(-1/2)`; the
// parenthesized form is read as one rational literal.
//
// Family files are line oriented `key value` pairs; `#` starts a comment:
//
//   curve  x=-4*t^3; y=3*t^2+1/2
//   nu     x=1/sqrt(1+4*t^2); y=2*t/sqrt(1+4*t^2)
//   alpha  (1+4*t^2)^(3/2)/2
//   radius (1+4*t^2)^(3/2)/2
//   domain (-1, 1)
//   samples 2001

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "circenv/error.hpp"
#include "circenv/expr.hpp"

namespace circenv {

struct CurveExprs {
  Expr x;
  Expr y;
};

/// Parsed family description. `radius` absent means "curve only".
struct FamilySpec {
  CurveExprs curve;
  std::optional<CurveExprs> nu;
  std::optional<Expr> alpha;
  std::optional<Expr> radius;
  double a = 0.0;
  double b = 1.0;
  int samples = 2001;
};

namespace detail {

enum class TokenKind { Number, Ident, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  double number = 0.0;
  bool integral = false;
  int column = 1;
};

inline std::vector<Token> tokenize(std::string_view s, int line, int column0) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char ch = s[i];
    const int col = column0 + static_cast<int>(i);
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t j = i;
      bool integral = true;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        integral = false;
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          integral = false;
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      Token tok;
      tok.kind = TokenKind::Number;
      tok.text = std::string(s.substr(i, j - i));
      tok.column = col;
      auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
      if (res.ec != std::errc() || res.ptr != tok.text.data() + tok.text.size())
        throw ParseError("malformed number '" + tok.text + "'", line, col);
      tok.integral = integral;
      out.push_back(std::move(tok));
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      Token tok;
      tok.kind = TokenKind::Ident;
      tok.text = std::string(s.substr(i, j - i));
      tok.column = col;
      out.push_back(std::move(tok));
      i = j;
      continue;
    }
    if (std::string_view("+-*/^(),;=").find(ch) != std::string_view::npos) {
      Token tok;
      tok.kind = TokenKind::Symbol;
      tok.text = std::string(1, ch);
      tok.column = col;
      out.push_back(std::move(tok));
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + ch + "'", line, col);
  }
  Token end;
  end.kind = TokenKind::End;
  end.column = column0 + static_cast<int>(s.size());
  out.push_back(end);
  return out;
}

class ExprParser {
 public:
  ExprParser(std::vector<Token> tokens, int line) : toks_(std::move(tokens)), line_(line) {}

  Expr expression() {
    Expr lhs = term();
    while (is_symbol("+") || is_symbol("-")) {
      const bool plus = next().text == "+";
      Expr rhs = term();
      lhs = Expr::make_binary(plus ? Op::Add : Op::Sub, lhs, rhs);
    }
    return lhs;
  }

  const Token& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool is_symbol(std::string_view s) const {
    return peek().kind == TokenKind::Symbol && peek().text == s;
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg, line_, at.column);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, peek()); }

  void expect(std::string_view sym, const char* context) {
    if (!is_symbol(sym)) fail(std::string("expected '") + std::string(sym) + "' " + context);
    next();
  }

 private:
  Expr term() {
    Expr lhs = unary();
    while (is_symbol("*") || is_symbol("/")) {
      const bool mul = next().text == "*";
      Expr rhs = unary();
      lhs = Expr::make_binary(mul ? Op::Mul : Op::Div, lhs, rhs);
    }
    return lhs;
  }

  Expr unary() {
    if (is_symbol("-")) {
      next();
      return Expr::make_unary(Op::Negate, unary());
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (!is_symbol("^")) return base;
    next();
    if (is_symbol("(")) {
      const Token& open = next();
      const bool negative = is_symbol("-") ? (next(), true) : false;
      const Token num = expect_number("in exponent");
      if (is_symbol("/")) {
        next();
        const Token den = expect_number("as exponent denominator");
        if (!num.integral || !den.integral) fail("rational exponent needs integer parts", num);
        if (den.number == 0.0) fail("zero denominator in exponent", den);
        long long p = std::llround(num.number) * (negative ? -1 : 1);
        long long q = std::llround(den.number);
        const long long g = std::gcd(p < 0 ? -p : p, q);
        if (g > 1) {
          p /= g;
          q /= g;
        }
        if (!is_symbol(")")) fail("unmatched '(' in exponent", open);
        next();
        return Expr::make_pow(base, static_cast<double>(p) / static_cast<double>(q), Rational{p, q});
      }
      if (!is_symbol(")")) fail("unmatched '(' in exponent", open);
      next();
      return Expr::make_pow(base, negative ? -num.number : num.number);
    }
    const bool negative = is_symbol("-") ? (next(), true) : false;
    const Token num = expect_number("as exponent");
    return Expr::make_pow(base, negative ? -num.number : num.number);
  }

  Token expect_number(const char* context) {
    if (peek().kind != TokenKind::Number) fail(std::string("expected a number ") + context);
    return next();
  }

  Expr atom() {
    const Token& tok = peek();
    switch (tok.kind) {
      case TokenKind::Number: next(); return Expr::make_constant(tok.number);
      case TokenKind::Ident: {
        const Token id = next();
        if (id.text == "t") return Expr::make_leaf(Op::Param);
        if (id.text == "pi") return Expr::make_leaf(Op::Pi);
        Op op;
        if (id.text == "sin") op = Op::Sin;
        else if (id.text == "cos") op = Op::Cos;
        else if (id.text == "sqrt") op = Op::Sqrt;
        else if (id.text == "abs") op = Op::Abs;
        else fail("unknown identifier '" + id.text + "'", id);
        if (!is_symbol("(")) fail("expected '(' after " + id.text);
        const Token& open = next();
        Expr arg = expression();
        if (!is_symbol(")")) fail("unmatched '('", open);
        next();
        return Expr::make_unary(op, arg);
      }
      case TokenKind::Symbol:
        if (tok.text == "(") {
          const Token& open = next();
          Expr inner = expression();
          if (!is_symbol(")")) fail("unmatched '('", open);
          next();
          return inner;
        }
        fail("unexpected '" + tok.text + "'");
      case TokenKind::End: fail("unexpected end of expression");
    }
    fail("unexpected token");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

inline Expr parse_whole_expr(std::string_view text, int line, int column0) {
  ExprParser p(tokenize(text, line, column0), line);
  Expr e = p.expression();
  if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "' after expression");
  return e;
}

// `x=<expr>; y=<expr>`
inline CurveExprs parse_xy(std::string_view text, int line, int column0) {
  ExprParser p(tokenize(text, line, column0), line);
  std::optional<Expr> x, y;
  for (int part = 0; part < 2; ++part) {
    const Token& name = p.peek();
    if (name.kind != TokenKind::Ident || (name.text != "x" && name.text != "y"))
      p.fail("expected 'x=' or 'y='");
    const std::string which = p.next().text;
    p.expect("=", ("after " + which).c_str());
    Expr e = p.expression();
    auto& slot = which == "x" ? x : y;
    if (slot) p.fail("component '" + which + "' given twice", name);
    slot = e;
    if (part == 0) p.expect(";", "between components");
  }
  if (p.is_symbol(";")) p.next();
  if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "'");
  return {*x, *y};
}

inline double constant_value(const Expr& e, const ExprParser& p, const Token& at) {
  if (!is_parameter_free(e)) p.fail("domain endpoints must not depend on t", at);
  try {
    return eval(e, 0.0);
  } catch (const EvalError& ex) {
    p.fail(std::string("cannot evaluate endpoint: ") + ex.what(), at);
  }
}

}  // namespace detail

/// Parse a single expression.
inline Expr parse_expr(std::string_view text) { return detail::parse_whole_expr(text, 1, 1); }

/// Parse a family file. Unknown or repeated keys, missing `curve`/`domain`
/// and malformed values raise ParseError with a 1-based line/column.
inline FamilySpec parse_family(std::string_view text) {
  FamilySpec spec;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t k0 = 0;
    while (k0 < line.size() && std::isspace(static_cast<unsigned char>(line[k0]))) ++k0;
    if (k0 == line.size()) {
      if (end == text.size()) break;
      continue;
    }
    std::size_t k1 = k0;
    while (k1 < line.size() && !std::isspace(static_cast<unsigned char>(line[k1]))) ++k1;
    const std::string key(line.substr(k0, k1 - k0));
    const int key_col = static_cast<int>(k0) + 1;
    const std::string_view value = line.substr(k1);
    const int value_col = static_cast<int>(k1) + 1;

    static const std::set<std::string> known = {"curve", "nu", "alpha", "radius", "domain", "samples"};
    if (!known.count(key)) throw ParseError("unknown key '" + key + "'", line_no, key_col);
    if (!seen.insert(key).second) throw ParseError("key '" + key + "' given twice", line_no, key_col);

    if (key == "curve") {
      spec.curve = detail::parse_xy(value, line_no, value_col);
    } else if (key == "nu") {
      spec.nu = detail::parse_xy(value, line_no, value_col);
    } else if (key == "alpha") {
      spec.alpha = detail::parse_whole_expr(value, line_no, value_col);
    } else if (key == "radius") {
      spec.radius = detail::parse_whole_expr(value, line_no, value_col);
    } else if (key == "domain") {
      detail::ExprParser p(detail::tokenize(value, line_no, value_col), line_no);
      const detail::Token open = p.peek();
      p.expect("(", "to open the domain interval");
      const detail::Token at_a = p.peek();
      Expr ea = p.expression();
      p.expect(",", "between domain endpoints");
      const detail::Token at_b = p.peek();
      Expr eb = p.expression();
      if (!p.is_symbol(")")) p.fail("unmatched '('", open);
      p.next();
      if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "' after domain");
      spec.a = detail::constant_value(ea, p, at_a);
      spec.b = detail::constant_value(eb, p, at_b);
      if (!(spec.a < spec.b)) p.fail("domain needs a < b", open);
    } else if (key == "samples") {
      detail::ExprParser p(detail::tokenize(value, line_no, value_col), line_no);
      if (p.is_symbol("-")) p.fail("samples must be positive");
      const detail::Token tok = p.peek();
      if (tok.kind != detail::TokenKind::Number || !tok.integral) p.fail("samples must be an integer");
      p.next();
      if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "' after samples");
      if (tok.number < 3.0) p.fail("samples must be at least 3", tok);
      if (tok.number > 1e8) p.fail("samples too large", tok);
      spec.samples = static_cast<int>(tok.number);
    }
    if (end == text.size()) break;
  }
  if (!seen.count("curve")) throw ParseError("missing mandatory key 'curve'", line_no, 1);
  if (!seen.count("domain")) throw ParseError("missing mandatory key 'domain'", line_no, 1);
  return spec;
}

/// Render a spec back to DSL text.
inline std::string to_dsl(const FamilySpec& spec) {
  std::ostringstream os;
  os << "curve x=" << to_string(spec.curve.x) << "; y=" << to_string(spec.curve.y) << '\n';
  if (spec.nu) os << "nu x=" << to_string(spec.nu->x) << "; y=" << to_string(spec.nu->y) << '\n';
  if (spec.alpha) os << "alpha " << to_string(*spec.alpha) << '\n';
  if (spec.radius) os << "radius " << to_string(*spec.radius) << '\n';
  os << "domain (" << detail::format_number(spec.a) << ", " << detail::format_number(spec.b) << ")\n";
  os << "samples " << spec.samples << '\n';
  return os.str();
}

}  // namespace circenv
