#pragma once

// Seeded random creative circle families and the property suite run on them.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "circenv/assoc.hpp"
#include "circenv/envelope.hpp"
#include "circenv/io.hpp"
#include "circenv/parser.hpp"
#include "circenv/verify.hpp"

namespace circenv {

/// A random family: polynomial centers of degree <= 4 on (-1, 1) with a
/// declared Gauss map, and lambda = c + int cos(theta_hat) beta, which is
/// creative by construction. With `unit_cos` theta_hat is 0, so the family
/// has a unique envelope.
struct RandomFixture {
  std::uint64_t seed = 0;
  int index = 0;
  bool unit_cos = false;
  std::string curve_dsl;  // center curve and Gauss map in DSL form
  double amplitude = 0.0, omega = 0.0, phase = 0.0, offset = 0.0;
  FamilySource source;
  Grid grid;
};

namespace detail {

inline std::string poly_text(const std::vector<double>& c) {
  std::string s;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!s.empty()) s += " + ";
    s += "(" + format_number(c[k]) + ")";
    if (k == 1) s += "*t";
    else if (k > 1) s += "*t^" + std::to_string(k);
  }
  return s;
}

// Jet of sum c[n] t^n at t by repeated synthetic division by (x - t).
inline Jet poly_jet(const std::vector<double>& c, double t) {
  std::array<double, Jet::kMaxOrder + 1> d{};
  std::array<double, 8> w{};
  const std::size_t m = std::min(c.size(), w.size());
  std::copy_n(c.begin(), m, w.begin());
  for (std::size_t k = 0; k < d.size() && k < m; ++k) {
    // Horner in place: w[n] becomes the quotient, the remainder is the value.
    for (std::size_t n = m - 1; n-- > k;) w[n] += t * w[n + 1];
    d[k] = w[k];
  }
  return Jet::from_coefficients(d.data());
}

}  // namespace detail

inline RandomFixture random_fixture(std::uint64_t seed, int index, bool unit_cos, int samples = 2001) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), unit_cos ? 1u : 0u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> degree(2, 4);
  RandomFixture fx;
  fx.seed = seed;
  fx.index = index;
  fx.unit_cos = unit_cos;
  fx.grid = Grid(-1.0, 1.0, samples);

  for (int attempt = 0;; ++attempt) {
    if (attempt > 1000) throw Error("could not draw a regular random curve");
    const int dx = degree(rng), dy = degree(rng);
    std::vector<double> cx(dx + 1), cy(dy + 1);
    // Three decimals keep the DSL text short and exact enough.
    for (auto& v : cx) v = std::round(coef(rng) * 1000.0) / 1000.0;
    for (auto& v : cy) v = std::round(coef(rng) * 1000.0) / 1000.0;
    const Expr x = parse_expr(detail::poly_text(cx));
    const Expr y = parse_expr(detail::poly_text(cy));
    const Expr xd = differentiate(x), yd = differentiate(y);
    double min_speed = INFINITY;
    for (int i = 0; i <= 200; ++i) {
      const double t = -1.0 + i * 0.01;
      min_speed = std::min(min_speed, std::hypot(eval(xd, t), eval(yd, t)));
    }
    if (min_speed < 0.2) continue;
    const Expr speed = sqrt(pow(xd, Rational{2, 1}) + pow(yd, Rational{2, 1}));
    FamilySpec spec;
    spec.curve = {x, y};
    spec.nu = CurveExprs{yd / speed, -xd / speed};
    spec.a = -1.0;
    spec.b = 1.0;
    spec.samples = samples;
    fx.curve_dsl = to_dsl(spec);
    // Direct polynomial jets; equal to the DSL description up to rounding.
    fx.source.frontal.gamma = [cx, cy](double t) { return JetVec2{detail::poly_jet(cx, t), detail::poly_jet(cy, t)}; };
    fx.source.frontal.nu = [g = fx.source.frontal.gamma](double t) {
      const JetVec2 d = derivative(g(t));
      const Jet s = norm(d);
      return JetVec2{d.y / s, -d.x / s};
    };
    break;
  }

  if (!unit_cos) {
    fx.amplitude = std::uniform_real_distribution<double>(0.0, std::numbers::pi / 2.0 - 0.3)(rng);
    fx.omega = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    fx.phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  }
  const FrontalSource frontal = fx.source.frontal;
  const double amp = fx.amplitude, om = fx.omega, ph = fx.phase;
  const bool flat = unit_cos;
  ScalarFunction integrand = [frontal, amp, om, ph, flat](double t) {
    // beta = |gamma'| for the declared Gauss map (y', -x') / |gamma'|.
    const Jet beta = norm(derivative(frontal.gamma(t)));
    if (flat) return beta;
    const Jet theta = std::numbers::pi / 2.0 + amp * sin(om * Jet::variable(t) + ph);
    return cos(theta) * beta;
  };
  ScalarFunction primitive = integral_function(integrand, fx.grid.a(), fx.grid.b(), 0.0, samples - 1);
  double lowest = 0.0;
  for (int i = 0; i < fx.grid.size(); i += 10) lowest = std::min(lowest, primitive(fx.grid[i]).value());
  lowest = std::min(lowest, primitive(fx.grid.b()).value());
  fx.offset = 0.5 + std::uniform_real_distribution<double>(0.0, 1.0)(rng) - lowest;
  const double off = fx.offset;
  fx.source.radius = [primitive, off](double t) { return primitive(t) + off; };
  return fx;
}

struct SuiteEntry {
  int index = 0;
  std::string kind;  // fixture profile
  VerificationReport report;
};

struct SuiteReport {
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<SuiteEntry> entries;
  bool pass = true;
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.report.pass ? 0 : 1;
    return n;
  }
};

namespace detail {

template <class F>
void run_check(SuiteReport& suite, int index, const char* kind, const char* relation_id, F&& check) {
  SuiteEntry e;
  e.index = index;
  e.kind = kind;
  try {
    e.report = check();
  } catch (const Error& ex) {
    e.report.relation = relation_id;
    e.report.max_residual = std::numeric_limits<double>::infinity();
    e.report.pass = false;
    e.report.detail = ex.what();
  }
  suite.pass = suite.pass && e.report.pass;
  suite.entries.push_back(std::move(e));
}

}  // namespace detail

/// Smallest distance from a random base point to the center curve and to
/// the evolutoid excluded by the pedaloid relation, in absolute terms and in
/// sample steps of the curve.
inline constexpr double kBasePointMargin = 0.05;
inline constexpr double kBasePointSteps = 20.0;

namespace detail {

inline bool well_separated(const std::vector<Vec2>& curve, Vec2 p) {
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double step = distance(curve[k], curve[k + 1 < curve.size() ? k + 1 : k - 1]);
    if (distance(curve[k], p) < std::max(kBasePointMargin, kBasePointSteps * step)) return false;
  }
  return true;
}

}  // namespace detail

struct SuiteOptions {
  int count = 50;           // general creative families
  int unit_count = 50;      // families with cos(theta) = 1
  int pedaloid_count = 20;  // pedaloid/evolutoid fixtures
  bool aux_relations = true;
  int samples = 2001;
};

/// Envelope definition on both branches of `count` random families; evolute
/// and singular-point relations, plus the evolutoid/contrapedal/pedaloid
/// relations with random phi and P, on unique-envelope families; the
/// pedaloid-evolutoid identity on the first `pedaloid_count` of those.
inline SuiteReport run_random_suite(std::uint64_t seed, const SuiteOptions& opt = {}) {
  SuiteReport suite;
  suite.seed = seed;
  suite.count = opt.count;
  for (int i = 0; i < opt.count; ++i) {
    RandomFixture fx = random_fixture(seed, i, false, opt.samples);
    std::optional<CircleFamily> fam;
    detail::run_check(suite, i, "general", relation::kEnvelopeDef, [&] {
      fam = build_family(fx.source, fx.grid);
      const CreativeWitness w = creative_check(*fam);
      const auto [plus, minus] = build_envelopes(*fam, w);
      const VerificationReport a = verify_envelope_def(*fam, curve_of(plus), 1e-5);
      const VerificationReport b = verify_envelope_def(*fam, curve_of(minus), 1e-5);
      VerificationReport r = a.max_residual >= b.max_residual ? a : b;
      r.detail += a.max_residual >= b.max_residual ? " (plus branch)" : " (minus branch)";
      return r;
    });
  }
  const int unit = std::max(opt.unit_count, opt.pedaloid_count);
  for (int i = 0; i < unit; ++i) {
    RandomFixture fx = random_fixture(seed, i, true, opt.samples);
    std::seed_seq pseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(i), 7u};
    std::mt19937_64 rng(pseq);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    const double phi_open = std::uniform_real_distribution<double>(0.05, std::numbers::pi / 2.0 - 0.05)(rng);
    const double phi_any = std::uniform_real_distribution<double>(0.0, std::numbers::pi)(rng);
    std::optional<CircleFamily> fam;
    Vec2 p;
    try {
      fam = build_family(fx.source, fx.grid);
      // Keep P away from the loci the auxiliary families exclude, so the
      // grid resolves the auxiliary radii.
      const FrontalData ff = envelope_frontal(*fam, build_envelope(*fam, creators(*fam, creative_check(*fam)).first));
      const std::vector<Vec2> excluded = evolutoid(ff, phi_any + std::numbers::pi / 2.0).points;
      for (int attempt = 0;; ++attempt) {
        if (attempt > 1000) throw Error("could not draw a base point away from the excluded loci");
        p = {coord(rng), coord(rng)};
        if (detail::well_separated(fam->frontal.gamma, p) && detail::well_separated(excluded, p)) break;
      }
    } catch (const Error& ex) {
      detail::run_check(suite, i, "unit", relation::kEvolute, [&]() -> VerificationReport { throw ex; });
      continue;
    }
    if (i < opt.unit_count) {
      detail::run_check(suite, i, "unit", relation::kEvolute, [&] { return verify_2i(*fam); });
      detail::run_check(suite, i, "unit", relation::kSingular, [&] { return verify_prop41(*fam); });
      if (opt.aux_relations) {
        detail::run_check(suite, i, "unit", relation::kEvolutoid, [&] { return verify_2ii(*fam, phi_open, 1e-6); });
        detail::run_check(suite, i, "unit", relation::kContrapedal, [&] { return verify_2iii(*fam, p, 1e-6); });
        detail::run_check(suite, i, "unit", relation::kPedaloid,
                          [&] { return verify_2iv(*fam, p, phi_any, 1e-6); });
      }
    }
    if (i < opt.pedaloid_count) {
      detail::run_check(suite, i, "unit", relation::kPedaloidEvolutoid,
                        [&] { return verify_prop44(unique_envelope(*fam), p, phi_any, 1e-6); });
    }
  }
  return suite;
}

}  // namespace circenv
