#pragma once

// Circle families, the creative condition and their envelopes.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "circenv/error.hpp"
#include "circenv/frontal.hpp"

namespace circenv {

/// Smooth description of a circle family: centers and radius function.
struct FamilySource {
  FrontalSource frontal;
  ScalarFunction radius;
};

inline FamilySource family_source(const FamilySpec& spec) {
  if (!spec.radius) throw PreconditionError("family description has no radius");
  return {frontal_source(spec), from_expr(*spec.radius)};
}

struct CircleFamily {
  FrontalData frontal;
  ScalarFunction radius;
  std::vector<double> lambda;
  std::vector<double> lambda_dot;

  std::size_t size() const { return lambda.size(); }
  const Grid& grid() const { return frontal.grid; }
  const Tolerances& tol() const { return frontal.tol; }
};

inline CircleFamily build_family(const FamilySource& src, const Grid& grid, const Tolerances& tol = {}) {
  CircleFamily fam;
  fam.frontal = build_frontal(src.frontal, grid, tol);
  fam.radius = src.radius;
  const std::size_t n = fam.frontal.size();
  fam.lambda.resize(n);
  fam.lambda_dot.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Jet r = src.radius(fam.frontal.t[i]);
    if (!r.is_finite()) throw DomainError("non-finite radius at t=" + std::to_string(fam.frontal.t[i]));
    if (!(r.value() > 0.0))
      throw DomainError("radius not positive at t=" + std::to_string(fam.frontal.t[i]));
    fam.lambda[i] = r.value();
    fam.lambda_dot[i] = r.derivative(1);
  }
  return fam;
}

inline CircleFamily build_family(const FamilySpec& spec, const Tolerances& tol = {}) {
  return build_family(family_source(spec), Grid(spec.a, spec.b, spec.samples), tol);
}

/// Smooth source of a family whose sampled data are already built.
inline FamilySource family_source(const CircleFamily& fam) { return {fam.frontal.source, fam.radius}; }

/// Evidence for the creative condition lambda' = cos(theta) beta.
struct CreativeWitness {
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;  // >= 0
  std::vector<char> defined;      // beta != 0 at the sample
  bool creative = false;
  std::vector<double> failure_samples;
  std::string reason;
};

namespace detail {

// lambda' / beta at a zero of beta as the ratio of the leading Taylor
// coefficients; empty when the jets are unavailable or inconclusive.
inline std::optional<double> singular_ratio(const CircleFamily& fam, double t) {
  if (!fam.frontal.source.gamma || !fam.radius) return std::nullopt;
  try {
    const Jet beta = fam.frontal.frame_at(t).beta;
    const Jet ld = fam.radius(t).derivative();
    const double zero = fam.tol().zero;
    for (int k = 1; k <= std::min(beta.order(), ld.order()); ++k) {
      if (std::abs(ld.coeff(k - 1)) > 2.0 * zero) return std::nullopt;
      if (std::abs(beta.coeff(k)) > zero) return ld.coeff(k) / beta.coeff(k);
    }
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

}  // namespace detail

inline CreativeWitness creative_check(const CircleFamily& fam) {
  const Tolerances& tol = fam.tol();
  const auto& beta = fam.frontal.beta;
  const auto& t = fam.frontal.t;
  const std::size_t n = fam.size();
  CreativeWitness w;
  w.cos_theta.assign(n, 0.0);
  w.sin_theta.assign(n, 1.0);
  w.defined.assign(n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    const double ld = fam.lambda_dot[i];
    if (std::abs(beta[i]) > tol.zero) {
      double c = ld / beta[i];
      if (std::abs(c) > 1.0 + tol.clamp) {
        w.failure_samples.push_back(t[i]);
        continue;
      }
      w.cos_theta[i] = c;
      w.defined[i] = 1;
    } else if (std::abs(ld) > 2.0 * tol.zero) {
      // lambda' = cos(theta) beta cannot hold where beta vanishes and lambda' does not.
      w.failure_samples.push_back(t[i]);
    } else if (auto c = detail::singular_ratio(fam, t[i])) {
      if (std::abs(*c) > 1.0 + tol.clamp) {
        w.failure_samples.push_back(t[i]);
        continue;
      }
      w.cos_theta[i] = *c;
      w.defined[i] = 1;
    }
  }
  // Snap |cos(theta)| to 1 on runs of near-unit samples. An isolated near-unit
  // sample is a tangential crossing of the two branches; snapping it would
  // shift the envelope by lambda sqrt(2 clamp).
  auto near_unit = [&](std::size_t i) {
    return w.defined[i] && std::abs(std::abs(w.cos_theta[i]) - 1.0) <= tol.clamp;
  };
  std::vector<char> snap(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!near_unit(i)) continue;
    snap[i] = std::abs(w.cos_theta[i]) > 1.0 || (i > 0 && near_unit(i - 1)) || (i + 1 < n && near_unit(i + 1));
  }
  for (std::size_t i = 0; i < n; ++i)
    if (snap[i]) w.cos_theta[i] = w.cos_theta[i] > 0.0 ? 1.0 : -1.0;
  if (!w.failure_samples.empty()) {
    w.reason = "|lambda'| exceeds |beta| at " + std::to_string(w.failure_samples.size()) +
               " samples, first at t=" + std::to_string(w.failure_samples.front());
  }

  // Fill samples where cos(theta) is not determined by linear interpolation.
  std::vector<std::size_t> def;
  for (std::size_t i = 0; i < n; ++i)
    if (w.defined[i]) def.push_back(i);
  if (!def.empty()) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (w.defined[i]) continue;
      while (k < def.size() && def[k] < i) ++k;
      if (k == 0) {
        w.cos_theta[i] = w.cos_theta[def.front()];
      } else if (k == def.size()) {
        w.cos_theta[i] = w.cos_theta[def.back()];
      } else {
        const std::size_t lo = def[k - 1], hi = def[k];
        const double s = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
        w.cos_theta[i] = (1.0 - s) * w.cos_theta[lo] + s * w.cos_theta[hi];
      }
    }
  }
  for (std::size_t k = 1; k < def.size() && w.failure_samples.empty(); ++k) {
    const double jump = std::abs(w.cos_theta[def[k]] - w.cos_theta[def[k - 1]]);
    if (jump > tol.max_cos_jump) {
      w.failure_samples.push_back(t[def[k]]);
      w.reason = "cos(theta) jumps by " + std::to_string(jump) + " at t=" + std::to_string(t[def[k]]);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    w.sin_theta[i] = std::sqrt(std::max(0.0, 1.0 - w.cos_theta[i] * w.cos_theta[i]));
  w.creative = w.failure_samples.empty();
  return w;
}

enum class EnvelopeCount { Unique, ExactlyTwo, UncountablyMany, NotCreative };

inline const char* to_string(EnvelopeCount c) {
  switch (c) {
    case EnvelopeCount::Unique: return "Unique";
    case EnvelopeCount::ExactlyTwo: return "ExactlyTwo";
    case EnvelopeCount::UncountablyMany: return "UncountablyMany";
    case EnvelopeCount::NotCreative: return "NotCreative";
  }
  return "?";
}

struct EnvelopeClassification {
  EnvelopeCount variant = EnvelopeCount::NotCreative;
  bool creative = false;
  double density_beta_nonzero = 0.0;  // |D| / n
  double density_cos_unit = 0.0;      // fraction of D with |cos theta| = 1
  std::optional<double> witness_t0;   // sample with |lambda'| < |beta| strictly
  Tolerances tol;
};

inline EnvelopeClassification classify_count(const CircleFamily& fam, const CreativeWitness& w) {
  EnvelopeClassification c;
  c.tol = fam.tol();
  c.creative = w.creative;
  const std::size_t n = fam.size();
  std::size_t in_d = 0, unit = 0;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(fam.frontal.beta[i]) <= c.tol.zero) continue;
    ++in_d;
    if (std::abs(std::abs(w.cos_theta[i]) - 1.0) <= c.tol.equality) {
      ++unit;
    } else if (!best || std::abs(w.cos_theta[i]) < std::abs(w.cos_theta[*best])) {
      best = i;
    }
  }
  c.density_beta_nonzero = static_cast<double>(in_d) / static_cast<double>(n);
  c.density_cos_unit = in_d ? static_cast<double>(unit) / static_cast<double>(in_d) : 0.0;
  if (!w.creative) {
    c.variant = EnvelopeCount::NotCreative;
  } else if (c.density_beta_nonzero < c.tol.density) {
    c.variant = EnvelopeCount::UncountablyMany;
  } else if (c.density_cos_unit >= c.tol.density) {
    c.variant = EnvelopeCount::Unique;
  } else {
    c.variant = EnvelopeCount::ExactlyTwo;
    if (best) c.witness_t0 = fam.frontal.t[*best];
  }
  return c;
}

inline EnvelopeClassification classify_count(const CircleFamily& fam) {
  return classify_count(fam, creative_check(fam));
}

enum class Branch { Plus, Minus };

inline const char* to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

/// Creator field nu~ = -cos(theta) mu + sin(theta) nu along one branch. The
/// angle is followed continuously, so the sign of sin(theta) may change where
/// the branch crosses |cos theta| = 1 transversally.
struct CreatorSeed {
  Branch sign = Branch::Plus;
  std::vector<double> theta;
  std::vector<Vec2> nu_tilde;
};

namespace detail {

inline std::vector<double> track_angle(const CreativeWitness& w, double initial_sign) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t n = w.cos_theta.size();
  std::vector<double> th(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = w.cos_theta[i], s = w.sin_theta[i];
    if (i == 0) {
      th[0] = std::atan2(initial_sign * s, c);
      continue;
    }
    double p = th[i - 1];
    if (i >= 3) p = 3.0 * th[i - 1] - 3.0 * th[i - 2] + th[i - 3];
    else if (i == 2) p = 2.0 * th[1] - th[0];
    double best = 0.0, dist = INFINITY;
    for (double sign : {1.0, -1.0}) {
      const double base = std::atan2(sign * s, c);
      const double cand = base + two_pi * std::round((p - base) / two_pi);
      if (std::abs(cand - p) < dist) {
        dist = std::abs(cand - p);
        best = cand;
      }
    }
    th[i] = best;
  }
  return th;
}

/// Derivative of samples on a uniform grid: fourth-order differences, one
/// sided near the ends; second order below five samples.
inline std::vector<double> grid_derivative(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  if (n < 3) throw PreconditionError("finite differences need at least three samples");
  std::vector<double> d(n);
  if (n < 5) {
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    return d;
  }
  const double w = 12.0 * h;
  for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / w;
  d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / w;
  d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / w;
  d[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) / w;
  d[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) / w;
  return d;
}

}  // namespace detail

inline std::pair<CreatorSeed, CreatorSeed> creators(const CircleFamily& fam, const CreativeWitness& w) {
  if (!w.creative) throw PreconditionError("circle family is not creative: " + w.reason);
  auto make = [&](Branch b) {
    CreatorSeed seed;
    seed.sign = b;
    seed.theta = detail::track_angle(w, b == Branch::Plus ? 1.0 : -1.0);
    seed.nu_tilde.resize(fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const double c = w.cos_theta[i];
      const double s = std::sin(seed.theta[i]) >= 0.0 ? w.sin_theta[i] : -w.sin_theta[i];
      seed.nu_tilde[i] = -c * fam.frontal.mu[i] + s * fam.frontal.nu[i];
    }
    return seed;
  };
  return {make(Branch::Plus), make(Branch::Minus)};
}

struct EnvelopeBranch {
  Branch sign = Branch::Plus;
  std::vector<double> t;
  std::vector<Vec2> nu_tilde;
  std::vector<Vec2> mu_tilde;
  std::vector<Vec2> f;
  std::vector<double> l_f;
  std::vector<double> beta_f;
  std::vector<double> theta;
  std::vector<double> theta_dot;
};

/// f = gamma + lambda nu~ with curvature (l + theta', lambda (l + theta') + beta sin(theta)).
inline EnvelopeBranch build_envelope(const CircleFamily& fam, const CreatorSeed& seed) {
  const std::size_t n = fam.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(seed.theta[i] - seed.theta[i - 1]) > std::numbers::pi / 2.0)
      throw DomainError("angle jumps by more than pi/2 at t=" + std::to_string(fam.frontal.t[i]) +
                        "; refine the grid");
  }
  EnvelopeBranch br;
  br.sign = seed.sign;
  br.t = fam.frontal.t;
  br.theta = seed.theta;
  br.theta_dot = detail::grid_derivative(seed.theta, fam.grid().h());
  br.nu_tilde = seed.nu_tilde;
  br.mu_tilde.resize(n);
  br.f.resize(n);
  br.l_f.resize(n);
  br.beta_f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = fam.lambda[i];
    const double s = dot(br.nu_tilde[i], fam.frontal.nu[i]);  // sin(theta)
    br.mu_tilde[i] = rotate90(br.nu_tilde[i]);
    br.f[i] = fam.frontal.gamma[i] + lam * br.nu_tilde[i];
    br.l_f[i] = fam.frontal.l[i] + br.theta_dot[i];
    br.beta_f[i] = lam * br.l_f[i] + fam.frontal.beta[i] * s;
  }
  return br;
}

/// Both envelopes (plus, minus) of a creative family.
inline std::pair<EnvelopeBranch, EnvelopeBranch> build_envelopes(const CircleFamily& fam,
                                                                 const CreativeWitness& w) {
  auto [plus, minus] = creators(fam, w);
  return {build_envelope(fam, plus), build_envelope(fam, minus)};
}

inline void write_branch_csv(std::ostream& os, const EnvelopeBranch& br) {
  CsvWriter w(os, {"t", "fx", "fy", "nutx", "nuty", "l_f", "beta_f"});
  for (std::size_t i = 0; i < br.t.size(); ++i)
    w.row({br.t[i], br.f[i].x, br.f[i].y, br.nu_tilde[i].x, br.nu_tilde[i].y, br.l_f[i], br.beta_f[i]});
}

inline SampledCurve curve_of(const EnvelopeBranch& br) { return {br.t, br.f}; }

/// Sign c0 of cos(theta) for a family with |cos theta| = 1: lambda' = c0 beta.
inline double unit_cos_sign(const CircleFamily& fam) {
  double s = 0.0;
  for (std::size_t i = 0; i < fam.size(); ++i) s += fam.lambda_dot[i] * fam.frontal.beta[i];
  return s < 0.0 ? -1.0 : 1.0;
}

/// Smooth envelope f = gamma - c0 lambda mu of a family with |cos theta| = 1,
/// with Gauss map -c0 mu and alpha = lambda.
inline FrontalSource unique_envelope_source(const CircleFamily& fam) {
  auto shared = std::make_shared<const CircleFamily>(fam);
  const double c0 = unit_cos_sign(fam);
  FrontalSource src;
  src.gamma = [shared, c0](double t) {
    const FrameJets fr = shared->frontal.frame_at(t);
    return fr.gamma - (c0 * shared->radius(t)) * fr.mu;
  };
  src.nu = [shared, c0](double t) { return -c0 * shared->frontal.frame_at(t).mu; };
  src.alpha = shared->radius;
  return src;
}

/// The envelope branch as sampled frontal data. alpha is beta_f / l_f where
/// l_f does not vanish; elsewhere lambda when beta_f = lambda l_f holds there.
inline FrontalData envelope_frontal(const CircleFamily& fam, const EnvelopeBranch& br) {
  FrontalData fd;
  fd.grid = fam.grid();
  fd.tol = fam.tol();
  fd.t = br.t;
  fd.gamma = br.f;
  fd.nu = br.nu_tilde;
  fd.mu = br.mu_tilde;
  fd.l = br.l_f;
  fd.beta = br.beta_f;
  fd.singular.assign(br.t.size(), 0);
  fd.gamma_dot.resize(br.t.size());
  fd.alpha.resize(br.t.size());
  for (std::size_t i = 0; i < br.t.size(); ++i) {
    fd.gamma_dot[i] = br.beta_f[i] * br.mu_tilde[i];
    if (std::abs(br.l_f[i]) > fd.tol.zero)
      fd.alpha[i] = br.beta_f[i] / br.l_f[i];
    else if (std::abs(br.beta_f[i] - fam.lambda[i] * br.l_f[i]) <= fd.tol.frame * (1.0 + std::abs(br.beta_f[i])))
      fd.alpha[i] = fam.lambda[i];
  }
  return fd;
}

}  // namespace circenv
