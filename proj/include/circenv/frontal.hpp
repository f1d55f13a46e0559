#pragma once

// Sampled frontals: Gauss map nu, frame mu = J(nu), curvature pair (l, beta).

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "circenv/error.hpp"
#include "circenv/functions.hpp"
#include "circenv/io.hpp"
#include "circenv/parser.hpp"
#include "circenv/vec2.hpp"

namespace circenv {

struct Tolerances {
  double frame = 1e-9;         // unit length / orthogonality of a declared Gauss map
  double zero = 1e-10;         // |beta| or |l| below this counts as zero
  double clamp = 1e-9;         // |cos theta| in (1, 1 + clamp] snaps to 1
  double equality = 1e-8;      // |cos theta| within this of 1 counts as "equal"
  double density = 0.995;      // fraction of samples that makes a clause "dense"
  double max_cos_jump = 0.25;  // largest admissible change of cos theta per step
};

/// Uniform grid t[i] = a + i (b - a) / (n - 1).
class Grid {
 public:
  Grid() = default;
  Grid(double a, double b, int n) : a_(a), b_(b), n_(n) {
    if (!(a < b)) throw DomainError("grid needs a < b");
    if (n < 3) throw DomainError("grid needs at least 3 samples");
  }

  double a() const { return a_; }
  double b() const { return b_; }
  int size() const { return n_; }
  double h() const { return (b_ - a_) / (n_ - 1); }
  double operator[](int i) const { return i == n_ - 1 ? b_ : a_ + i * h(); }
  bool contains(double t) const { return t >= a_ && t <= b_; }
  std::vector<double> points() const {
    std::vector<double> t(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) t[i] = (*this)[i];
    return t;
  }
  /// Index of the sample closest to t (clamped to the grid).
  int nearest(double t) const {
    const long i = std::lround((t - a_) / h());
    return static_cast<int>(std::clamp<long>(i, 0, n_ - 1));
  }
  bool operator==(const Grid& o) const { return a_ == o.a_ && b_ == o.b_ && n_ == o.n_; }

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  int n_ = 3;
};

/// Smooth description of a frontal: the curve, optionally its Gauss map and
/// the function alpha with beta = l alpha.
struct FrontalSource {
  CurveFunction gamma;
  std::optional<CurveFunction> nu;
  std::optional<ScalarFunction> alpha;
};

inline FrontalSource frontal_source(const FamilySpec& spec) {
  FrontalSource src;
  src.gamma = from_exprs(spec.curve.x, spec.curve.y);
  if (spec.nu) src.nu = from_exprs(spec.nu->x, spec.nu->y);
  if (spec.alpha) src.alpha = from_expr(*spec.alpha);
  return src;
}

/// Jets of the moving frame at one parameter value.
struct FrameJets {
  JetVec2 gamma;
  JetVec2 gamma_dot;
  JetVec2 nu;
  JetVec2 mu;
  Jet l;
  Jet beta;
  std::optional<Jet> alpha;
};

namespace detail {

inline constexpr double kSingularSpeed = 1e-12;

inline void check_finite(const Vec2& v, double t, const char* what) {
  if (!std::isfinite(v.x) || !std::isfinite(v.y))
    throw DomainError(std::string("non-finite ") + what + " at t=" + std::to_string(t));
}

inline void finish_frame(FrameJets& f, const FrontalSource& src, const Tolerances& tol, double t) {
  f.mu = rotate90(f.nu);
  f.l = dot(derivative(f.nu), f.mu);
  f.beta = dot(f.gamma_dot, f.mu);
  if (src.alpha) {
    f.alpha = (*src.alpha)(t);
  } else if (std::abs(f.l.value()) > tol.zero) {
    f.alpha = f.beta / f.l;
  }
}

}  // namespace detail

/// Frame jets at t. A computed Gauss map (no declared nu) is (y', -x') / |gamma'|
/// with the sign flipped to agree with `hint` when one is given; at a singular
/// point it follows the leading Taylor term of gamma'.
inline FrameJets compute_frame(const FrontalSource& src, double t, const Tolerances& tol = {},
                               const Vec2* hint = nullptr, const JetVec2* gamma = nullptr) {
  FrameJets f;
  f.gamma = gamma ? *gamma : src.gamma(t);
  f.gamma_dot = derivative(f.gamma);
  detail::check_finite(value(f.gamma), t, "curve value");
  const Vec2 gd = value(f.gamma_dot);
  detail::check_finite(gd, t, "curve derivative");
  if (src.nu) {
    JetVec2 nu = (*src.nu)(t);
    const Vec2 v = value(nu);
    detail::check_finite(v, t, "Gauss map");
    if (std::abs(norm(v) - 1.0) > tol.frame)
      throw DomainError("declared nu is not a unit vector at t=" + std::to_string(t));
    if (std::abs(dot(gd, v)) > tol.frame * (1.0 + norm(gd)))
      throw DomainError("declared nu is not orthogonal to the tangent at t=" + std::to_string(t));
    const Jet len = norm(nu);
    f.nu = {nu.x / len, nu.y / len};
  } else {
    JetVec2 v = f.gamma_dot;
    if (norm(gd) < detail::kSingularSpeed) {
      // gamma' = s^k w(s) with w(0) != 0 near a singular point; nu follows w.
      int k = 1;
      const int top = std::min(v.x.order(), v.y.order());
      while (k <= top && std::hypot(v.x.coeff(k), v.y.coeff(k)) < detail::kSingularSpeed) ++k;
      if (k > top - 1) throw DomainError("tangent undefined at t=" + std::to_string(t) + "; declare nu explicitly");
      v = {v.x.shifted(k), v.y.shifted(k)};
    }
    const Jet speed = norm(v);
    f.nu = {v.y / speed, -v.x / speed};
    if (hint && dot(value(f.nu), *hint) < 0.0) f.nu = -f.nu;
  }
  detail::finish_frame(f, src, tol, t);
  return f;
}

struct FrontalData {
  Grid grid;
  std::vector<double> t;
  std::vector<Vec2> gamma;
  std::vector<Vec2> gamma_dot;
  std::vector<Vec2> nu;
  std::vector<Vec2> mu;
  std::vector<double> l;
  std::vector<double> beta;
  std::vector<std::optional<double>> alpha;
  std::vector<char> singular;  // samples where gamma' vanishes
  FrontalSource source;
  Tolerances tol;

  std::size_t size() const { return t.size(); }

  /// Continuous frame at any parameter; a computed Gauss map takes the sign
  /// of the nearest sample.
  FrameJets frame_at(double s) const {
    if (!source.gamma) throw PreconditionError("frontal has no smooth description between samples");
    const Vec2 hint = nu[static_cast<std::size_t>(grid.nearest(s))];
    return compute_frame(source, s, tol, &hint);
  }
};

/// Sample a frontal on a grid. Without a declared nu the Gauss map is
/// (y', -x') / |gamma'| continued in sign along the grid; isolated samples
/// with vanishing gamma' take their direction from the first nonvanishing
/// higher derivative.
inline FrontalData build_frontal(const FrontalSource& src, const Grid& grid, const Tolerances& tol = {}) {
  FrontalData fd;
  fd.grid = grid;
  fd.source = src;
  fd.tol = tol;
  const auto n = static_cast<std::size_t>(grid.size());
  fd.t = grid.points();
  fd.gamma.resize(n);
  fd.gamma_dot.resize(n);
  fd.nu.resize(n);
  fd.mu.resize(n);
  fd.l.resize(n);
  fd.beta.resize(n);
  fd.alpha.resize(n);
  fd.singular.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = fd.t[i];
    const Vec2* prev = i > 0 ? &fd.nu[i - 1] : nullptr;
    JetVec2 g = src.gamma(t);
    const Vec2 gd = derivative(g, 1);
    const bool singular = !src.nu && norm(gd) < detail::kSingularSpeed;
    if (singular && i > 0 && fd.singular[i - 1])
      throw DomainError("tangent undefined on a non-isolated set near t=" + std::to_string(t));
    FrameJets f = compute_frame(src, t, tol, prev, &g);
    fd.gamma[i] = value(f.gamma);
    fd.gamma_dot[i] = gd;
    fd.nu[i] = value(f.nu);
    fd.l[i] = f.l.value();
    fd.beta[i] = f.beta.value();
    fd.singular[i] = singular ? 1 : 0;
    if (f.alpha) fd.alpha[i] = f.alpha->value();
    fd.mu[i] = rotate90(fd.nu[i]);
    if (!src.nu && prev) {
      const double jump = std::atan2(std::abs(cross(*prev, fd.nu[i])), dot(*prev, fd.nu[i]));
      if (jump > 0.1)
        throw DomainError("Gauss map jumps by " + std::to_string(jump) + " rad at t=" + std::to_string(t) +
                          "; refine the grid or declare nu");
    }
    if (!std::isfinite(fd.l[i]) || !std::isfinite(fd.beta[i]))
      throw DomainError("non-finite curvature at t=" + std::to_string(t));
  }
  return fd;
}

inline FrontalData build_frontal(const FamilySpec& spec, const Tolerances& tol = {}) {
  return build_frontal(frontal_source(spec), Grid(spec.a, spec.b, spec.samples), tol);
}

/// Zeros of a sampled function: sign changes refined by bisection, plus
/// samples that touch zero.
struct ZeroSet {
  std::vector<double> roots;
  std::vector<double> touching;
  bool identically_zero = false;

  std::vector<double> all() const {
    std::vector<double> z = roots;
    z.insert(z.end(), touching.begin(), touching.end());
    std::sort(z.begin(), z.end());
    return z;
  }
};

inline ZeroSet sampled_zeros(const std::vector<double>& t, const std::vector<double>& v, double tol_zero,
                             const std::function<double(double)>& fn = {}) {
  ZeroSet z;
  const std::size_t n = v.size();
  std::size_t touching = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(v[i]) <= tol_zero) {
      z.touching.push_back(t[i]);
      ++touching;
    }
  }
  z.identically_zero = n > 0 && touching == n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(v[i]) <= tol_zero || std::abs(v[i + 1]) <= tol_zero) continue;
    if ((v[i] < 0.0) == (v[i + 1] < 0.0)) continue;
    double lo = t[i], hi = t[i + 1];
    double root = lo + (hi - lo) * v[i] / (v[i] - v[i + 1]);
    if (fn) {
      try {
        double flo = v[i];
        for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = fn(mid);
          if (fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        root = 0.5 * (lo + hi);
      } catch (const Error&) {
        // keep the secant estimate
      }
    }
    z.roots.push_back(root);
  }
  return z;
}

/// Each zero of one set lies within `spacing` of a zero of the other.
inline bool zero_sets_match(const ZeroSet& a, const ZeroSet& b, double spacing) {
  const auto za = a.all();
  const auto zb = b.all();
  auto covered = [spacing](const std::vector<double>& from, const std::vector<double>& to) {
    for (double x : from) {
      auto it = std::lower_bound(to.begin(), to.end(), x - spacing * (1.0 + 1e-9));
      if (it == to.end() || *it > x + spacing * (1.0 + 1e-9)) return false;
    }
    return true;
  };
  return covered(za, zb) && covered(zb, za);
}

/// Inflection points: zeros of l.
inline ZeroSet inflection_points(const FrontalData& fd) {
  return sampled_zeros(fd.t, fd.l, fd.tol.zero, [&fd](double s) { return fd.frame_at(s).l.value(); });
}

inline void write_frontal_csv(std::ostream& os, const FrontalData& fd) {
  CsvWriter w(os, {"t", "x", "y", "nu_x", "nu_y", "l", "beta"});
  for (std::size_t i = 0; i < fd.size(); ++i)
    w.row({fd.t[i], fd.gamma[i].x, fd.gamma[i].y, fd.nu[i].x, fd.nu[i].y, fd.l[i], fd.beta[i]});
}

}  // namespace circenv
