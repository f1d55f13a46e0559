#pragma once

// Numerical checks of the envelope relations, each producing a report with
// the worst residual over the grid.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circenv/assoc.hpp"
#include "circenv/envelope.hpp"
#include "circenv/error.hpp"
#include "circenv/frontal.hpp"

namespace circenv {

namespace relation {
inline constexpr const char* kEnvelopeDef = "envelope-definition";
inline constexpr const char* kFrontal = "envelope-frontal";
inline constexpr const char* kEvolute = "evolute";
inline constexpr const char* kEvolutoid = "evolutoid";
inline constexpr const char* kContrapedal = "contrapedal";
inline constexpr const char* kPedaloid = "pedaloid";
inline constexpr const char* kPedalOfDouble = "pedal-of-double";
inline constexpr const char* kSingular = "singular-points";
inline constexpr const char* kOsculating = "osculating-circle";
inline constexpr const char* kConstantOne = "constant-one";
inline constexpr const char* kConstantBisector = "constant-bisector";
inline constexpr const char* kConstantLine = "constant-line";
inline constexpr const char* kPedaloidEvolutoid = "pedaloid-evolutoid";
}  // namespace relation

/// Default tolerance per relation: 1e-8 where everything is computed from
/// exact derivatives, looser where finite differences enter.
inline double default_tolerance(const std::string& id) {
  if (id == relation::kEnvelopeDef || id == relation::kConstantOne) return 1e-5;
  if (id == relation::kFrontal) return 1e-4;
  return 1e-8;
}

struct VerificationReport {
  std::string relation;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double worst_t = 0.0;
  std::string detail;
};

namespace detail {

class ReportBuilder {
 public:
  ReportBuilder(std::string id, double tol) {
    r_.relation = std::move(id);
    r_.tolerance = tol;
  }
  void add(double residual, double t, const char* what) {
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    if (first_ || residual > r_.max_residual) {
      r_.max_residual = residual;
      r_.worst_t = t;
      what_ = what;
    }
    first_ = false;
  }
  void note(std::string text) { extra_ = std::move(text); }
  VerificationReport done() {
    r_.pass = r_.max_residual <= r_.tolerance;
    r_.detail = what_;
    if (!extra_.empty()) r_.detail += (r_.detail.empty() ? "" : "; ") + extra_;
    return r_;
  }

 private:
  VerificationReport r_;
  std::string what_;
  std::string extra_;
  bool first_ = true;
};

inline double rel_dist(Vec2 a, Vec2 b) { return distance(a, b) / (1.0 + norm(b)); }

/// Largest pointwise relative distance between two sampled curves.
inline std::pair<double, std::size_t> curve_gap(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  double m = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = rel_dist(a[i], b[i]);
    if (!(d <= m)) {
      m = std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
      at = i;
    }
  }
  return {m, at};
}

inline std::vector<Vec2> grid_derivative(const std::vector<Vec2>& p, double h) {
  std::vector<double> x(p.size()), y(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    x[i] = p[i].x;
    y[i] = p[i].y;
  }
  const auto dx = grid_derivative(x, h), dy = grid_derivative(y, h);
  std::vector<Vec2> d(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) d[i] = {dx[i], dy[i]};
  return d;
}

inline void require_unique(const CircleFamily& fam, const CreativeWitness& w) {
  const EnvelopeClassification c = classify_count(fam, w);
  if (c.variant != EnvelopeCount::Unique)
    throw PreconditionError(std::string("relation needs a family with a unique envelope, found ") +
                            to_string(c.variant));
}

inline FrontalData unique_envelope_frontal(const CircleFamily& fam, const CreativeWitness& w) {
  require_unique(fam, w);
  auto [plus, minus] = creators(fam, w);
  FrontalData fd = envelope_frontal(fam, build_envelope(fam, plus));
  fd.source = unique_envelope_source(fam);
  return fd;
}

inline Vec2 centroid(const std::vector<Vec2>& p) {
  Vec2 c{0.0, 0.0};
  for (const Vec2& q : p) c = c + q;
  return c / static_cast<double>(p.size());
}

inline double deviation_from(const std::vector<Vec2>& p, Vec2 c) {
  double m = 0.0;
  for (const Vec2& q : p) m = std::max(m, distance(q, c));
  return m;
}

/// Assign two computed curves to two expected ones, minimizing the larger
/// of the two gaps. Returns (gap, worst index).
inline std::pair<double, std::size_t> match_pair(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                                                 const std::vector<Vec2>& e1, const std::vector<Vec2>& e2) {
  const auto a1 = curve_gap(a, e1), b2 = curve_gap(b, e2);
  const auto a2 = curve_gap(a, e2), b1 = curve_gap(b, e1);
  const auto straight = a1.first >= b2.first ? a1 : b2;
  const auto swapped = a2.first >= b1.first ? a2 : b1;
  return straight.first <= swapped.first ? straight : swapped;
}

}  // namespace detail

/// A sampled curve is constant when it stays within 1e-8 (1 + |centroid|) of
/// its centroid.
inline bool is_constant_curve(const std::vector<Vec2>& p) {
  const Vec2 c = detail::centroid(p);
  return detail::deviation_from(p, c) < 1e-8 * (1.0 + norm(c));
}

/// f lies on every circle and is tangent to it; the tangency defect uses
/// finite differences of f.
inline VerificationReport verify_envelope_def(const CircleFamily& fam, const SampledCurve& f,
                                              std::optional<double> tol = {}) {
  if (f.points.size() != fam.size() || f.t.size() != fam.size())
    throw PreconditionError("curve samples are not aligned with the family grid");
  for (std::size_t i = 0; i < fam.size(); ++i)
    if (std::abs(f.t[i] - fam.frontal.t[i]) > 1e-12 * (1.0 + std::abs(fam.frontal.t[i])))
      throw PreconditionError("curve samples are not aligned with the family grid");
  detail::ReportBuilder rb(relation::kEnvelopeDef, tol.value_or(default_tolerance(relation::kEnvelopeDef)));
  const auto df = detail::grid_derivative(f.points, fam.grid().h());
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const Vec2 r = f.points[i] - fam.frontal.gamma[i];
    const double lam = fam.lambda[i];
    rb.add(std::abs(dot(r, r) - lam * lam) / (1.0 + lam * lam), f.t[i], "point off circle");
    rb.add(std::abs(dot(df[i], r)) / (1.0 + norm(df[i]) * lam), f.t[i], "not tangent");
  }
  return rb.done();
}

/// The envelope is a frontal with Gauss map nu~ and curvature (l_f, beta_f):
/// finite differences of f and nu~ against beta_f mu~ and l_f mu~.
inline VerificationReport verify_frontal_structure(const CircleFamily& fam, const EnvelopeBranch& br,
                                                   std::optional<double> tol = {}) {
  detail::ReportBuilder rb(relation::kFrontal, tol.value_or(default_tolerance(relation::kFrontal)));
  const double h = fam.grid().h();
  const auto df = detail::grid_derivative(br.f, h);
  const auto dn = detail::grid_derivative(br.nu_tilde, h);
  for (std::size_t i = 1; i + 1 < br.t.size(); ++i) {
    rb.add(norm(df[i] - br.beta_f[i] * br.mu_tilde[i]) / (1.0 + std::abs(br.beta_f[i])), br.t[i],
           "f' differs from beta_f mu~");
    rb.add(norm(dn[i] - br.l_f[i] * br.mu_tilde[i]) / (1.0 + std::abs(br.l_f[i])), br.t[i],
           "nu~' differs from l_f mu~");
  }
  return rb.done();
}

/// The center curve is the evolute of the unique envelope.
inline VerificationReport verify_2i(const CircleFamily& fam, std::optional<double> tol = {}) {
  const CreativeWitness w = creative_check(fam);
  detail::require_unique(fam, w);
  auto [plus, minus] = creators(fam, w);
  const FrontalData ff = envelope_frontal(fam, build_envelope(fam, plus));
  const SampledCurve ev = evolute(ff);
  detail::ReportBuilder rb(relation::kEvolute, tol.value_or(default_tolerance(relation::kEvolute)));
  const auto [gap, at] = detail::curve_gap(ev.points, fam.frontal.gamma);
  rb.add(gap, fam.frontal.t[at], "evolute of envelope differs from center curve");
  return rb.done();
}

/// The family with radius cos(phi) lambda has the evolutoids Ev_f[phi] and
/// Ev_f[pi - phi] of the unique envelope f as its envelopes.
inline VerificationReport verify_2ii(const CircleFamily& fam, double phi, std::optional<double> tol = {}) {
  if (is_odd_half_pi(phi)) throw DomainError("forbidden angle: phi is pi/2 modulo pi");
  const double c = std::cos(phi);
  if (c < 0.0) throw DomainError("cos(phi) < 0 gives a negative scaled radius");
  const CreativeWitness w = creative_check(fam);
  detail::require_unique(fam, w);
  auto [plus, minus] = creators(fam, w);
  const FrontalData ff = envelope_frontal(fam, build_envelope(fam, plus));

  FamilySource scaled = family_source(fam);
  ScalarFunction r = fam.radius;
  scaled.radius = [r, c](double t) { return c * r(t); };
  const CircleFamily sf = build_family(scaled, fam.grid(), fam.tol());
  const CreativeWitness sw = creative_check(sf);
  if (!sw.creative) throw DomainError("scaled family is not creative: " + sw.reason);
  const auto [e1, e2] = build_envelopes(sf, sw);

  const SampledCurve x1 = evolutoid(ff, phi);
  const SampledCurve x2 = evolutoid(ff, std::numbers::pi - phi);
  detail::ReportBuilder rb(relation::kEvolutoid, tol.value_or(default_tolerance(relation::kEvolutoid)));
  const auto [gap, at] = detail::match_pair(e1.f, e2.f, x1.points, x2.points);
  rb.add(gap, fam.frontal.t[at], "envelopes of scaled family differ from evolutoids");
  return rb.done();
}

namespace detail {

inline VerificationReport check_point_and_curve(const char* id, double tol, const CircleFamily& aux,
                                                Vec2 p, const SampledCurve& expected) {
  const CreativeWitness w = creative_check(aux);
  if (!w.creative) throw DomainError("auxiliary family is not creative: " + w.reason);
  const auto [e1, e2] = build_envelopes(aux, w);
  const std::vector<Vec2> pts(aux.size(), p);
  ReportBuilder rb(id, tol);
  const auto [gap, at] = match_pair(e1.f, e2.f, pts, expected.points);
  rb.add(gap, aux.frontal.t[at], "envelopes differ from {P, expected curve}");
  return rb.done();
}

}  // namespace detail

/// The family centered at (gamma + P) / 2 through P has envelopes P and the
/// contrapedal of f relative to P.
inline VerificationReport verify_2iii(const CircleFamily& fam, Vec2 p, std::optional<double> tol = {}) {
  const CreativeWitness w = creative_check(fam);
  const FrontalData ff = detail::unique_envelope_frontal(fam, w);
  const CircleFamily aux = auxiliary_family_2iii(fam, p);
  return detail::check_point_and_curve(relation::kContrapedal,
                                       tol.value_or(default_tolerance(relation::kContrapedal)), aux, p,
                                       contrapedal(ff, p));
}

/// The family centered at (Ev_f[phi + pi/2] + P) / 2 through P has envelopes
/// P and the phi-pedaloid of f relative to P.
inline VerificationReport verify_2iv(const CircleFamily& fam, Vec2 p, double phi,
                                     std::optional<double> tol = {}) {
  const CreativeWitness w = creative_check(fam);
  const FrontalData ff = detail::unique_envelope_frontal(fam, w);
  const CircleFamily aux = auxiliary_family_2iv(fam, p, phi);
  return detail::check_point_and_curve(relation::kPedaloid, tol.value_or(default_tolerance(relation::kPedaloid)),
                                       aux, p, pedaloid(ff, p, phi));
}

/// When one envelope f1 is a point, the other is the pedal of 2 gamma - f1
/// relative to f1.
inline VerificationReport verify_3(const CircleFamily& fam, std::optional<double> tol = {}) {
  const CreativeWitness w = creative_check(fam);
  const auto [e1, e2] = build_envelopes(fam, w);
  const Vec2 c1 = detail::centroid(e1.f), c2 = detail::centroid(e2.f);
  const double d1 = detail::deviation_from(e1.f, c1) / (1.0 + norm(c1));
  const double d2 = detail::deviation_from(e2.f, c2) / (1.0 + norm(c2));
  if (!(std::min(d1, d2) < 1e-8)) throw PreconditionError("no constant envelope found");
  const Vec2 f1 = d1 <= d2 ? c1 : c2;
  const EnvelopeBranch& f2 = d1 <= d2 ? e2 : e1;
  detail::ReportBuilder rb(relation::kPedalOfDouble, tol.value_or(default_tolerance(relation::kPedalOfDouble)));
  for (std::size_t i = 0; i < fam.size(); ++i) {
    // 2 gamma - f1 has tangent 2 gamma', so gamma's frame serves for it.
    const Vec2 q = 2.0 * fam.frontal.gamma[i] - f1;
    const Vec2 mu = fam.frontal.mu[i];
    const Vec2 ped = q + dot(f1 - q, mu) * mu;
    rb.add(detail::rel_dist(f2.f[i], ped), fam.frontal.t[i], "second envelope differs from pedal of 2 gamma - f1");
  }
  return rb.done();
}

/// Singular points of the unique envelope are the inflections of gamma, with
/// curvature (l, l lambda).
inline VerificationReport verify_prop41(const CircleFamily& fam, std::optional<double> tol = {}) {
  const CreativeWitness w = creative_check(fam);
  const FrontalData ff = detail::unique_envelope_frontal(fam, w);
  detail::ReportBuilder rb(relation::kSingular, tol.value_or(default_tolerance(relation::kSingular)));
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const double expect = fam.frontal.l[i] * fam.lambda[i];
    rb.add(std::abs(ff.beta[i] - expect) / (1.0 + std::abs(expect)), ff.t[i], "beta_f differs from l lambda");
    rb.add(std::abs(ff.l[i] - fam.frontal.l[i]) / (1.0 + std::abs(fam.frontal.l[i])), ff.t[i],
           "l_f differs from l");
  }
  const ZeroSet zl = inflection_points(fam.frontal);
  const ZeroSet zf = sampled_zeros(ff.t, ff.beta, fam.tol().zero);
  if (!zero_sets_match(zl, zf, fam.grid().h())) {
    rb.add(1.0, ff.t.front(), "singular points of f do not match inflections of gamma");
  }
  rb.note(std::to_string(zl.all().size()) + " inflection samples/roots");
  return rb.done();
}

/// Where |cos theta(t0)| = 1 the family circle at t0 osculates the envelope:
/// lambda l_f = beta_f and gamma = f - lambda nu~.
inline VerificationReport verify_prop42(const CircleFamily& fam, double t0, std::optional<double> tol = {}) {
  if (!fam.grid().contains(t0)) throw DomainError("t0 outside the parameter interval");
  const CreativeWitness w = creative_check(fam);
  if (!w.creative) throw PreconditionError("circle family is not creative: " + w.reason);
  const auto i = static_cast<std::size_t>(fam.grid().nearest(t0));
  if (std::abs(std::abs(w.cos_theta[i]) - 1.0) > 1e-9)
    throw PreconditionError("|cos theta(t0)| is not 1 (cos theta = " + std::to_string(w.cos_theta[i]) + ")");
  const auto [e1, e2] = build_envelopes(fam, w);
  detail::ReportBuilder rb(relation::kOsculating, tol.value_or(default_tolerance(relation::kOsculating)));
  for (const EnvelopeBranch* br : {&e1, &e2}) {
    if (std::abs(br->l_f[i]) <= fam.tol().zero) throw PreconditionError("t0 is an inflection point of f");
    const double lam = fam.lambda[i];
    rb.add(std::abs(lam * br->l_f[i] - br->beta_f[i]) / (1.0 + std::abs(br->beta_f[i])), br->t[i],
           "radius differs from curvature radius of f");
    rb.add(detail::rel_dist(br->f[i] - lam * br->nu_tilde[i], fam.frontal.gamma[i]), br->t[i],
           "center differs from f - lambda nu~");
  }
  return rb.done();
}

/// Geometry of families with constant envelopes: dispatches on the pattern.
inline VerificationReport verify_prop43(const CircleFamily& fam, std::optional<double> tol = {}) {
  const CreativeWitness w = creative_check(fam);
  const auto [e1, e2] = build_envelopes(fam, w);
  const bool k1 = is_constant_curve(e1.f), k2 = is_constant_curve(e2.f);
  if (!k1 && !k2) throw PreconditionError("no constant envelope: relation not applicable");
  const auto& g = fam.frontal.gamma;
  double scale = 0.0;
  for (const Vec2& q : g) scale = std::max(scale, norm(q));
  if (k1 && k2) {
    const Vec2 f1 = detail::centroid(e1.f), f2 = detail::centroid(e2.f);
    if (distance(f1, f2) > 1e-8 * (1.0 + norm(f1))) {
      detail::ReportBuilder rb(relation::kConstantBisector,
                               tol.value_or(default_tolerance(relation::kConstantBisector)));
      const Vec2 mid = 0.5 * (f1 + f2);
      const Vec2 dir = (f2 - f1) / distance(f1, f2);
      for (std::size_t i = 0; i < g.size(); ++i)
        rb.add(std::abs(dot(g[i] - mid, dir)) / (1.0 + scale), fam.frontal.t[i], "center off the bisector");
      return rb.done();
    }
    // Centers on one line through the common point: principal direction of
    // the centered second moments.
    detail::ReportBuilder rb(relation::kConstantLine, tol.value_or(default_tolerance(relation::kConstantLine)));
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const Vec2& q : g) {
      const Vec2 d = q - f1;
      sxx += d.x * d.x;
      sxy += d.x * d.y;
      syy += d.y * d.y;
    }
    const double ang = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    const Vec2 dir{std::cos(ang), std::sin(ang)};
    for (std::size_t i = 0; i < g.size(); ++i)
      rb.add(std::abs(cross(g[i] - f1, dir)) / (1.0 + scale), fam.frontal.t[i], "center off the line");
    return rb.done();
  }
  const EnvelopeBranch& f2 = k1 ? e2 : e1;
  detail::ReportBuilder rb(relation::kConstantOne, tol.value_or(default_tolerance(relation::kConstantOne)));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double expect = 2.0 * fam.lambda[i] * fam.frontal.l[i];
    rb.add(std::abs(f2.beta_f[i] - expect) / (1.0 + std::abs(expect)), f2.t[i], "beta_f2 differs from 2 lambda l");
  }
  const ZeroSet zl = inflection_points(fam.frontal);
  const ZeroSet zf = sampled_zeros(f2.t, f2.beta_f, fam.tol().zero);
  if (!zero_sets_match(zl, zf, fam.grid().h())) rb.add(1.0, f2.t.front(), "singular points of f2 do not match inflections");
  return rb.done();
}

/// The phi-pedaloid of f equals the pedal of the (phi + pi/2)-evolutoid of f,
/// both relative to P. The two sides are computed independently.
inline VerificationReport verify_prop44(const FrontalData& f, Vec2 p, double phi, std::optional<double> tol = {}) {
  const SampledCurve lhs = pedaloid(f, p, phi);
  const FrontalData ev = build_frontal(evolutoid_source(f, phi + std::numbers::pi / 2.0), f.grid, f.tol);
  const double margin = min_distance(ev.gamma, p);
  if (!(margin > 1e-9)) throw DomainError("base point lies on the evolutoid");
  const SampledCurve rhs = pedal(ev, p);
  detail::ReportBuilder rb(relation::kPedaloidEvolutoid,
                           tol.value_or(default_tolerance(relation::kPedaloidEvolutoid)));
  const auto [gap, at] = detail::curve_gap(lhs.points, rhs.points);
  rb.add(gap, f.t[at], "pedaloid differs from pedal of evolutoid");
  return rb.done();
}

/// Unique envelope of a family as a frontal with a smooth description.
inline FrontalData unique_envelope(const CircleFamily& fam) {
  return detail::unique_envelope_frontal(fam, creative_check(fam));
}

}  // namespace circenv
