#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "circenv/parser.hpp"

using namespace circenv;

namespace {

double at(const std::string& text, double t) { return eval(parse_expr(text), t); }

double dat(const std::string& text, double t) { return eval(differentiate(parse_expr(text)), t); }

// Random polynomial and trigonometric expression with bounded growth.
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  switch (pick(rng)) {
    case 0: return param();
    case 1: return constant(std::round(coef(rng) * 100.0) / 100.0);
    case 2: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 3: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 4: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 5: return sin(random_expr(rng, depth - 1));
    case 6: return cos(random_expr(rng, depth - 1));
    case 7: return pow(random_expr(rng, depth - 1), Rational{std::uniform_int_distribution<int>(2, 3)(rng), 1});
    default: return random_expr(rng, depth - 1) / (2.0 + cos(random_expr(rng, depth - 1)));
  }
}

}  // namespace

TEST(ParseFamily, ParabolaExample) {
  const FamilySpec spec = parse_family(
      "curve x=-4*t^3; y=3*t^2+1/2\n"
      "radius (1+4*t^2)^(3/2)/2\n"
      "domain (-1,1)\n");
  ASSERT_TRUE(spec.radius.has_value());
  EXPECT_FALSE(spec.nu.has_value());
  EXPECT_DOUBLE_EQ(spec.a, -1.0);
  EXPECT_DOUBLE_EQ(spec.b, 1.0);
  for (double t : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    EXPECT_NEAR(eval(spec.curve.x, t), -4.0 * t * t * t, 1e-15);
    EXPECT_NEAR(eval(spec.curve.y, t), 3.0 * t * t + 0.5, 1e-15);
    EXPECT_NEAR(eval(*spec.radius, t), 0.5 * std::pow(1.0 + 4.0 * t * t, 1.5), 1e-14);
  }
}

TEST(ParseFamily, CurveOnlyHasNoRadius) {
  const FamilySpec spec = parse_family("curve x=t; y=t\ndomain (0,1)\n");
  EXPECT_FALSE(spec.radius.has_value());
  EXPECT_DOUBLE_EQ(eval(spec.curve.y, 0.25), 0.25);
}

TEST(ParseFamily, WhitespaceAndCommentsAreIgnored) {
  const FamilySpec a = parse_family("curve x=t^2; y=sin(t)\ndomain (0,1)\nsamples 11\n");
  const FamilySpec b = parse_family("# header\n  curve   x = t ^ 2 ;  y = sin( t )  # trailing\n\ndomain ( 0 , 1 )\nsamples 11\n");
  EXPECT_TRUE(structurally_equal(a.curve.x, b.curve.x));
  EXPECT_TRUE(structurally_equal(a.curve.y, b.curve.y));
  EXPECT_EQ(a.samples, b.samples);
}

TEST(ParseFamily, UnmatchedParenthesisReportsPosition) {
  try {
    parse_family("curve x=(t");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 9);
    EXPECT_NE(std::string(e.what()).find("unmatched"), std::string::npos);
  }
}

TEST(ParseFamily, MissingMandatoryKeys) {
  EXPECT_THROW(parse_family("curve x=t; y=t\n"), ParseError);
  EXPECT_THROW(parse_family("domain (0,1)\n"), ParseError);
}

TEST(ParseFamily, RejectsUnknownKeyAndBadValues) {
  try {
    parse_family("curve x=t; y=t\ndomain (0,1)\nfoo 1\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("unknown key"), std::string::npos);
  }
  EXPECT_THROW(parse_family("curve x=t; y=t\ndomain (0,1)\nsamples -3\n"), ParseError);
  EXPECT_THROW(parse_family("curve x=t; y=t\ndomain (1,0)\n"), ParseError);
  EXPECT_THROW(parse_family("curve x=t; y=t\ndomain (0,1)\nradius 1+\n"), ParseError);
  EXPECT_THROW(parse_family("curve x=t^t; y=t\ndomain (0,1)\n"), ParseError);
}

TEST(Differentiate, Examples) {
  EXPECT_EQ(to_string(differentiate(parse_expr("t^2"))), "(2 * t)");
  EXPECT_EQ(to_string(differentiate(parse_expr("sin(t)"))), "cos(t)");
  for (double t : {-1.0, -0.4, 0.0, 0.5, 1.0}) {
    EXPECT_NEAR(dat("t^2", t), 2.0 * t, 1e-15);
    EXPECT_NEAR(dat("(1+4*t^2)^(3/2)/2", t), 6.0 * t * std::sqrt(1.0 + 4.0 * t * t), 1e-13);
    EXPECT_NEAR(dat("sin(t)", t), std::cos(t), 1e-15);
  }
}

TEST(Differentiate, ConstantAndParameter) {
  EXPECT_TRUE(differentiate(parse_expr("5")).is_constant(0.0));
  EXPECT_TRUE(differentiate(parse_expr("pi")).is_constant(0.0));
  EXPECT_TRUE(differentiate(parse_expr("t")).is_constant(1.0));
}

TEST(Differentiate, SqrtAbsQuotient) {
  EXPECT_NEAR(dat("sqrt(t)", 4.0), 0.25, 1e-15);
  EXPECT_NEAR(dat("abs(t)", -2.0), -1.0, 1e-15);
  EXPECT_NEAR(dat("abs(t)", 3.0), 1.0, 1e-15);
  EXPECT_NEAR(dat("1/(1+t^2)", 1.0), -0.5, 1e-15);
  EXPECT_NEAR(dat("cos(2*t)", 0.3), -2.0 * std::sin(0.6), 1e-15);
}

TEST(Eval, Examples) {
  EXPECT_DOUBLE_EQ(at("3*t^2+1/2", 1.0), 3.5);
  EXPECT_DOUBLE_EQ(at("(1+4*t^2)^(3/2)/2", 0.0), 0.5);
  EXPECT_NEAR(at("2*pi", 0.0), 2.0 * std::acos(-1.0), 1e-15);
  EXPECT_DOUBLE_EQ(at("-t^2", 3.0), -9.0);
}

TEST(Eval, DomainErrorsCarryParameter) {
  try {
    at("sqrt(t)", -1.0);
    FAIL() << "expected an evaluation error";
  } catch (const EvalError& e) {
    EXPECT_DOUBLE_EQ(e.t(), -1.0);
  }
  EXPECT_THROW(at("1/t", 0.0), EvalError);
  EXPECT_THROW(at("t^(1/2)", -1.0), EvalError);
  EXPECT_DOUBLE_EQ(at("t^3", -2.0), -8.0);
}

TEST(Differentiate, MatchesCentralDifferencesOnRandomExpressions) {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> tdist(-2.0, 2.0);
  const double h = 1e-6;
  for (int k = 0; k < 1000; ++k) {
    const Expr e = random_expr(rng, 4);
    const Expr d = differentiate(e);
    const double t = tdist(rng);
    const double exact = eval(d, t);
    const double fd = (eval(e, t + h) - eval(e, t - h)) / (2.0 * h);
    ASSERT_LT(std::abs(exact - fd), 1e-5 * (1.0 + std::abs(exact))) << to_string(e) << " at t=" << t;
  }
}

TEST(PrettyPrint, ParsePrintParseIsIdempotent) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    const Expr first = parse_expr(to_string(random_expr(rng, 4)));
    const Expr second = parse_expr(to_string(first));
    ASSERT_TRUE(structurally_equal(first, second)) << to_string(first) << " vs " << to_string(second);
  }
  for (const char* text : {"-4*t^3", "(1+4*t^2)^(3/2)/2", "t^(-1/2)", "abs(sin(t))-pi", "-(t-1)^2", "2^3"}) {
    const Expr first = parse_expr(text);
    EXPECT_TRUE(structurally_equal(first, parse_expr(to_string(first)))) << text;
  }
}

TEST(PrettyPrint, FamilyRoundTrip) {
  const FamilySpec spec = parse_family(
      "curve x=t^3/6; y=t^6/12\nnu x=-t^3/sqrt(1+t^6); y=1/sqrt(1+t^6)\nalpha 2*t\n"
      "radius t^3*sqrt(4+t^6)/12\ndomain (0.05,1.5)\nsamples 101\n");
  const FamilySpec again = parse_family(to_dsl(spec));
  EXPECT_TRUE(structurally_equal(spec.curve.x, again.curve.x));
  EXPECT_TRUE(structurally_equal(spec.nu->y, again.nu->y));
  EXPECT_TRUE(structurally_equal(*spec.alpha, again.alpha.value()));
  EXPECT_TRUE(structurally_equal(*spec.radius, again.radius.value()));
  EXPECT_EQ(spec.a, again.a);
  EXPECT_EQ(spec.b, again.b);
  EXPECT_EQ(spec.samples, again.samples);
}
