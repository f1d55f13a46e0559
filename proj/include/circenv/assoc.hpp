#pragma once

// Curves associated with a frontal: involute, evolute, evolutoids,
// pedaloids, and the auxiliary circle families built from an envelope.

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "circenv/envelope.hpp"
#include "circenv/error.hpp"
#include "circenv/frontal.hpp"
#include "circenv/io.hpp"

namespace circenv {

/// Angles within 1e-12 of pi/2 + k pi.
inline bool is_odd_half_pi(double phi) {
  const double k = std::round((phi - std::numbers::pi / 2.0) / std::numbers::pi);
  return std::abs(phi - std::numbers::pi / 2.0 - k * std::numbers::pi) < 1e-12;
}

struct InvoluteResult {
  SampledCurve curve;
  double error_estimate = 0.0;  // bound on the quadrature error of the integral of beta
};

namespace detail {

inline double beta_at(const FrontalData& fd, double u) {
  try {
    return fd.frame_at(u).beta.value();
  } catch (const DomainError&) {
    const Vec2 gd = derivative(fd.source.gamma(u), 1);
    if (norm(gd) < 1e-9) return 0.0;
    throw;
  }
}

// Simpson's rule with 4 and 2 subintervals on [lo, hi].
inline std::pair<double, double> simpson_pair(const FrontalData& fd, double lo, double hi) {
  const double h = (hi - lo) / 4.0;
  double f[5];
  for (int k = 0; k < 5; ++k) f[k] = beta_at(fd, k == 4 ? hi : lo + k * h);
  const double s4 = h / 3.0 * (f[0] + 4.0 * f[1] + 2.0 * f[2] + 4.0 * f[3] + f[4]);
  const double s2 = 2.0 * h / 3.0 * (f[0] + 4.0 * f[2] + f[4]);
  return {s4, s2};
}

}  // namespace detail

/// Inv(gamma, t0)(t) = gamma(t) - (int_{t0}^t beta) mu(t). The integral uses
/// composite Simpson on each grid cell split in four when the frontal has a
/// smooth description, the trapezoid rule on the samples otherwise.
inline InvoluteResult involute(const FrontalData& fd, double t0) {
  if (!fd.grid.contains(t0)) throw DomainError("t0 outside the parameter interval");
  const std::size_t n = fd.size();
  std::vector<double> cum(n, 0.0);
  double err = 0.0;
  double partial = 0.0;  // integral from t[0] to t0
  const int k0 = std::min(static_cast<int>((t0 - fd.grid.a()) / fd.grid.h()), fd.grid.size() - 2);
  if (fd.source.gamma) {
    for (std::size_t i = 1; i < n; ++i) {
      const auto [s4, s2] = detail::simpson_pair(fd, fd.t[i - 1], fd.t[i]);
      cum[i] = cum[i - 1] + s4;
      err += std::abs(s4 - s2) / 15.0;
    }
    const auto [s4, s2] = detail::simpson_pair(fd, fd.t[k0], t0);
    partial = cum[k0] + s4;
    err += std::abs(s4 - s2) / 15.0;
  } else {
    const double h = fd.grid.h();
    double second = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      cum[i] = cum[i - 1] + 0.5 * h * (fd.beta[i - 1] + fd.beta[i]);
      if (i + 1 < n) second = std::max(second, std::abs(fd.beta[i + 1] - 2.0 * fd.beta[i] + fd.beta[i - 1]));
    }
    const double w = (t0 - fd.t[k0]) / h;
    const double b0 = (1.0 - w) * fd.beta[k0] + w * fd.beta[k0 + 1];
    partial = cum[k0] + 0.5 * (t0 - fd.t[k0]) * (fd.beta[k0] + b0);
    err = (fd.grid.b() - fd.grid.a()) * second / 12.0;
  }
  InvoluteResult res;
  res.curve.t = fd.t;
  res.curve.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.curve.points[i] = fd.gamma[i] - (cum[i] - partial) * fd.mu[i];
  res.error_estimate = err;
  return res;
}

inline double alpha_or_throw(const FrontalData& fd, std::size_t i) {
  if (!fd.alpha[i]) throw DomainError("evolute undefined at inflection t=" + std::to_string(fd.t[i]));
  return *fd.alpha[i];
}

/// Ev(gamma) = gamma - alpha nu.
inline SampledCurve evolute(const FrontalData& fd) {
  SampledCurve c{fd.t, std::vector<Vec2>(fd.size())};
  for (std::size_t i = 0; i < fd.size(); ++i) c.points[i] = fd.gamma[i] - alpha_or_throw(fd, i) * fd.nu[i];
  return c;
}

/// Ev_gamma[phi] = gamma - alpha sin(phi) (cos(phi) mu + sin(phi) nu).
inline SampledCurve evolutoid(const FrontalData& fd, double phi) {
  const double s = std::sin(phi), c = std::cos(phi);
  SampledCurve out{fd.t, std::vector<Vec2>(fd.size())};
  for (std::size_t i = 0; i < fd.size(); ++i) {
    out.points[i] = fd.gamma[i];
    if (s != 0.0) out.points[i] = out.points[i] - (alpha_or_throw(fd, i) * s) * (c * fd.mu[i] + s * fd.nu[i]);
  }
  return out;
}

/// Pe_{gamma,P}[phi] = gamma + ((P - gamma) . d) d with d = sin(phi) mu - cos(phi) nu.
inline SampledCurve pedaloid(const FrontalData& fd, Vec2 p, double phi) {
  const double s = std::sin(phi), c = std::cos(phi);
  SampledCurve out{fd.t, std::vector<Vec2>(fd.size())};
  for (std::size_t i = 0; i < fd.size(); ++i) {
    const Vec2 d = s * fd.mu[i] - c * fd.nu[i];
    out.points[i] = fd.gamma[i] + dot(p - fd.gamma[i], d) * d;
  }
  return out;
}

inline SampledCurve pedal(const FrontalData& fd, Vec2 p) { return pedaloid(fd, p, std::numbers::pi / 2.0); }
inline SampledCurve contrapedal(const FrontalData& fd, Vec2 p) { return pedaloid(fd, p, 0.0); }

/// Smallest distance from p to the samples of a curve.
inline double min_distance(const std::vector<Vec2>& pts, Vec2 p) {
  double m = std::numeric_limits<double>::infinity();
  for (const Vec2& q : pts) m = std::min(m, distance(q, p));
  return m;
}

/// Smooth phi-evolutoid of a frontal with a smooth description. Its Gauss map
/// is left to the computed convention.
inline FrontalSource evolutoid_source(const FrontalData& fd, double phi) {
  if (!fd.source.gamma) throw PreconditionError("evolutoid source needs a smooth frontal");
  auto shared = std::make_shared<const FrontalData>(fd);
  const double s = std::sin(phi), c = std::cos(phi);
  FrontalSource src;
  src.gamma = [shared, s, c](double t) {
    const FrameJets fr = shared->frame_at(t);
    if (s == 0.0) return fr.gamma;
    if (!fr.alpha) throw DomainError("evolutoid undefined at inflection t=" + std::to_string(t));
    return fr.gamma - (*fr.alpha * s) * (c * fr.mu + s * fr.nu);
  };
  return src;
}

/// Circles centered at (gamma + P) / 2 through P; P is one of their envelopes.
inline FamilySource auxiliary_source_2iii(const CircleFamily& fam, Vec2 p) {
  const double margin = min_distance(fam.frontal.gamma, p);
  if (!(margin > 1e-9))
    throw DomainError("base point lies on the center curve (distance " + std::to_string(margin) + ")");
  CurveFunction gamma = fam.frontal.source.gamma;
  FamilySource src;
  src.frontal.gamma = [gamma, p](double t) { return 0.5 * (gamma(t) + p); };
  src.radius = [gamma, p](double t) { return 0.5 * norm(gamma(t) - p); };
  return src;
}

inline CircleFamily auxiliary_family_2iii(const CircleFamily& fam, Vec2 p) {
  return build_family(auxiliary_source_2iii(fam, p), fam.grid(), fam.tol());
}

/// Circles centered at (E + P) / 2 through P, where
/// E = gamma + lambda sin(phi) (-sin(phi) mu + cos(phi) nu) is the
/// (phi + pi/2)-evolutoid of the envelope. The frame is oriented so that
/// lambda' = +beta.
inline FamilySource auxiliary_source_2iv(const CircleFamily& fam, Vec2 p, double phi) {
  auto shared = std::make_shared<const CircleFamily>(fam);
  const double c0 = unit_cos_sign(fam);
  const double s = std::sin(phi), c = std::cos(phi);
  auto e_of = [shared, c0, s, c](double t) {
    const FrameJets fr = shared->frontal.frame_at(t);
    const Jet lam = shared->radius(t);
    return fr.gamma + (lam * s) * (c0 * (c * fr.nu - s * fr.mu));
  };
  double margin = std::numeric_limits<double>::infinity();
  for (double t : fam.frontal.t) margin = std::min(margin, distance(value(e_of(t)), p));
  if (!(margin > 1e-9))
    throw DomainError("base point lies on the excluded evolutoid (distance " + std::to_string(margin) + ")");
  FamilySource src;
  src.frontal.gamma = [e_of, p](double t) { return 0.5 * (e_of(t) + p); };
  src.radius = [e_of, p](double t) { return 0.5 * norm(e_of(t) - p); };
  return src;
}

inline CircleFamily auxiliary_family_2iv(const CircleFamily& fam, Vec2 p, double phi) {
  return build_family(auxiliary_source_2iv(fam, p, phi), fam.grid(), fam.tol());
}

}  // namespace circenv
