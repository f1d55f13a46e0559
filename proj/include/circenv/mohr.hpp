#pragma once

// Mohr circles of triaxial tests at failure, the fitted failure line and the
// curved failure envelope of the interpolated circle family.

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "circenv/envelope.hpp"
#include "circenv/error.hpp"
#include "circenv/functions.hpp"
#include "circenv/io.hpp"

namespace circenv {

/// Effective principal stresses at failure, in kPa.
struct StressRecord {
  double sigma1 = 0.0;
  double sigma3 = 0.0;
  std::string label;
};

/// Circle in the (sigma, tau) plane centered at (center, 0).
struct MohrCircle {
  double center = 0.0;
  double radius = 0.0;
  std::string label;
};

/// tau = sigma tan(phi) + c.
struct FailureLine {
  double phi_deg = 0.0;
  double c_kpa = 0.0;
  double rms_residual = 0.0;
  std::vector<std::string> warnings;

  double phi() const { return phi_deg * std::numbers::pi / 180.0; }
  double tau(double sigma) const { return sigma * std::tan(phi()) + c_kpa; }
  /// Distance from (sigma, tau) to the line.
  double distance(Vec2 p) const { return std::abs(p.y - tau(p.x)) * std::cos(phi()); }
};

/// Header sigma1,sigma3 and an optional label column.
inline std::vector<StressRecord> load_stress_csv(std::istream& is) {
  const CsvTable table = read_csv(is);
  const int c1 = table.column("sigma1"), c3 = table.column("sigma3"), cl = table.column("label");
  if (table.header.empty() && table.rows.empty()) throw DomainError("no records");
  if (c1 < 0 || c3 < 0) throw ParseError("stress CSV needs columns sigma1,sigma3", 1, 1);
  std::vector<StressRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const int line = table.row_lines[r];
    StressRecord rec;
    rec.sigma1 = parse_double(table.rows[r][c1], line, c1 + 1);
    rec.sigma3 = parse_double(table.rows[r][c3], line, c3 + 1);
    if (cl >= 0) rec.label = table.rows[r][cl];
    if (rec.sigma1 < 0.0 || rec.sigma3 < 0.0)
      throw DomainError("negative stress on line " + std::to_string(line));
    if (!(rec.sigma1 > rec.sigma3))
      throw DomainError("sigma1 must exceed sigma3 on line " + std::to_string(line));
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw DomainError("no records");
  return out;
}

inline std::vector<StressRecord> load_stress_csv(const std::string& path) {
  std::istringstream is(read_file(path));
  return load_stress_csv(is);
}

/// Circles in record order.
inline std::vector<MohrCircle> mohr_circles(const std::vector<StressRecord>& records) {
  std::vector<MohrCircle> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({0.5 * (r.sigma1 + r.sigma3), 0.5 * (r.sigma1 - r.sigma3), r.label});
  return out;
}

inline std::vector<MohrCircle> sorted_by_center(std::vector<MohrCircle> circles) {
  std::stable_sort(circles.begin(), circles.end(),
                   [](const MohrCircle& a, const MohrCircle& b) { return a.center < b.center; });
  return circles;
}

/// The line tangent to all circles satisfies r = s sin(phi) + c cos(phi);
/// ordinary least squares of r on s gives sin(phi) and c cos(phi).
inline FailureLine fit_failure_line(const std::vector<MohrCircle>& circles) {
  const std::size_t n = circles.size();
  if (n < 2) throw DomainError("need at least 2 circles to fit a failure line");
  double ms = 0.0, mr = 0.0;
  for (const auto& c : circles) {
    ms += c.center;
    mr += c.radius;
  }
  ms /= static_cast<double>(n);
  mr /= static_cast<double>(n);
  double sss = 0.0, ssr = 0.0;
  for (const auto& c : circles) {
    sss += (c.center - ms) * (c.center - ms);
    ssr += (c.center - ms) * (c.radius - mr);
  }
  if (!(sss > 0.0)) throw DomainError("circle centers are identical");
  const double m = ssr / sss;
  const double b = mr - m * ms;
  if (!(std::abs(m) < 1.0)) throw DomainError("no admissible friction angle: slope " + format_double(m));
  const double phi = std::asin(m);
  FailureLine line;
  line.phi_deg = phi * 180.0 / std::numbers::pi;
  line.c_kpa = b / std::cos(phi);
  double ss = 0.0;
  for (const auto& c : circles) {
    const double e = c.radius - c.center * std::sin(phi) - line.c_kpa * std::cos(phi);
    ss += e * e;
  }
  line.rms_residual = std::sqrt(ss / static_cast<double>(n));
  if (line.c_kpa < 0.0) line.warnings.push_back("negative cohesion intercept");
  if (m < 0.0) line.warnings.push_back("negative friction angle");
  return line;
}

/// Monotone piecewise cubic Hermite interpolation on the nodes 0, 1, ..., n-1.
class Pchip {
 public:
  explicit Pchip(std::vector<double> y) : y_(std::move(y)), d_(y_.size(), 0.0) {
    const std::size_t n = y_.size();
    if (n < 2) throw PreconditionError("interpolation needs at least 2 values");
    std::vector<double> delta(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) delta[k] = y_[k + 1] - y_[k];
    if (n == 2) {
      d_[0] = d_[1] = delta[0];
      return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double a = delta[k - 1], b = delta[k];
      d_[k] = a * b > 0.0 ? 2.0 / (1.0 / a + 1.0 / b) : 0.0;
    }
    d_[0] = end_slope(delta[0], delta[1]);
    d_[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
  }

  double lo() const { return 0.0; }
  double hi() const { return static_cast<double>(y_.size() - 1); }

  /// Jet of the interpolant at u; the cubic of the containing cell is exact.
  Jet operator()(double u) const {
    const int last = static_cast<int>(y_.size()) - 2;
    const int k = std::clamp(static_cast<int>(std::floor(u)), 0, last);
    const Jet s = Jet::variable(u) - static_cast<double>(k);
    const Jet s2 = s * s, s3 = s2 * s;
    const Jet h00 = 2.0 * s3 - 3.0 * s2 + 1.0, h10 = s3 - 2.0 * s2 + s;
    const Jet h01 = -2.0 * s3 + 3.0 * s2, h11 = s3 - s2;
    return h00 * y_[k] + h10 * d_[k] + h01 * y_[k + 1] + h11 * d_[k + 1];
  }

 private:
  static double end_slope(double d0, double d1) {
    double d = 0.5 * (3.0 * d0 - d1);
    if (d * d0 <= 0.0) d = 0.0;
    else if (d0 * d1 < 0.0 && std::abs(d) > 3.0 * std::abs(d0)) d = 3.0 * d0;
    return d;
  }

  std::vector<double> y_;
  std::vector<double> d_;
};

struct MohrEnvelope {
  SampledCurve curve;      // upper envelope; t is the interpolation parameter
  FailureLine line;        // least-squares line of the same circles
  double max_deviation = 0.0;  // largest distance from the curve to the line
  double scale = 0.0;          // largest radius
  CircleFamily family;
};

/// Circle family through the sorted circles: centers and radii interpolated
/// monotonically over the circle index.
inline FamilySource mohr_family_source(const std::vector<MohrCircle>& sorted) {
  std::vector<double> s, r;
  for (const auto& c : sorted) {
    s.push_back(c.center);
    r.push_back(c.radius);
  }
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!(s[k] > s[k - 1])) throw DomainError("circle centers must be distinct");
  auto sc = std::make_shared<const Pchip>(s);
  auto rc = std::make_shared<const Pchip>(r);
  FamilySource src;
  src.frontal.gamma = [sc](double u) { return JetVec2{(*sc)(u), Jet::constant(0.0)}; };
  // nu = (0, -1) gives mu = (1, 0) and beta = ds/du > 0.
  src.frontal.nu = [](double) { return constant_jet({0.0, -1.0}); };
  src.radius = [rc](double u) { return (*rc)(u); };
  return src;
}

inline MohrEnvelope mohr_envelope_curve(const std::vector<MohrCircle>& circles, int samples = 2001) {
  if (circles.size() < 4) throw DomainError("need >= 4 circles for the curved envelope");
  const std::vector<MohrCircle> sorted = sorted_by_center(circles);
  const Grid grid(0.0, static_cast<double>(sorted.size() - 1), samples);
  MohrEnvelope out{{}, fit_failure_line(sorted), 0.0, 0.0, build_family(mohr_family_source(sorted), grid)};
  const CreativeWitness w = creative_check(out.family);
  if (!w.creative) {
    throw DomainError("interpolated family is not creative for u in [" + format_double(w.failure_samples.front()) +
                      ", " + format_double(w.failure_samples.back()) + "]: " + w.reason);
  }
  const auto [plus, minus] = build_envelopes(out.family, w);
  const std::size_t mid = plus.f.size() / 2;
  out.curve = curve_of(plus.f[mid].y >= minus.f[mid].y ? plus : minus);
  for (const auto& c : sorted) out.scale = std::max(out.scale, c.radius);
  for (const Vec2& p : out.curve.points) out.max_deviation = std::max(out.max_deviation, out.line.distance(p));
  return out;
}

}  // namespace circenv
