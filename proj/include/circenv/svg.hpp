#pragma once

// Plane scenes of circles, polylines and point markers written as SVG 1.1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "circenv/envelope.hpp"
#include "circenv/error.hpp"
#include "circenv/expr.hpp"
#include "circenv/io.hpp"
#include "circenv/vec2.hpp"

namespace circenv {

enum class Style { Thin, Thick, Dashed, Marker };

struct CircleItem {
  Vec2 center;
  double radius = 0.0;
};

struct PolylineItem {
  std::vector<Vec2> points;
};

struct MarkerItem {
  Vec2 point;
};

struct SceneItem {
  std::variant<CircleItem, PolylineItem, MarkerItem> shape;
  Style style = Style::Thin;
};

struct Scene {
  std::string title;
  std::vector<SceneItem> items;

  void circle(Vec2 c, double r, Style s = Style::Thin) { items.push_back({CircleItem{c, r}, s}); }
  void polyline(std::vector<Vec2> pts, Style s = Style::Thick) { items.push_back({PolylineItem{std::move(pts)}, s}); }
  void marker(Vec2 p) { items.push_back({MarkerItem{p}, Style::Marker}); }
};

struct BoundingBox {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void add(Vec2 p) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
};

namespace detail {

inline void require_finite(Vec2 p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("scene coordinate is not finite");
}

inline BoundingBox scene_bounds(const Scene& scene) {
  BoundingBox b;
  for (const auto& item : scene.items) {
    if (const auto* c = std::get_if<CircleItem>(&item.shape)) {
      require_finite(c->center);
      if (!std::isfinite(c->radius) || c->radius < 0.0) throw DomainError("circle radius must be finite and >= 0");
      b.add({c->center.x - c->radius, c->center.y - c->radius});
      b.add({c->center.x + c->radius, c->center.y + c->radius});
    } else if (const auto* p = std::get_if<PolylineItem>(&item.shape)) {
      if (p->points.empty()) throw DomainError("polyline without points");
      for (const Vec2& q : p->points) {
        require_finite(q);
        b.add(q);
      }
    } else {
      const Vec2 q = std::get<MarkerItem>(item.shape).point;
      require_finite(q);
      b.add(q);
    }
  }
  return b;
}

inline std::string num(double v) { return format_number(v == 0.0 ? 0.0 : v); }

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

/// Output width in pixels; stroke widths are given in these pixels.
inline constexpr double kSvgWidth = 800.0;

/// SVG document whose viewBox is the bounding box of the items expanded by 5%
/// per side, with the y axis pointing up. A degenerate box becomes a unit box.
inline std::string render_svg(const Scene& scene) {
  if (scene.items.empty()) throw DomainError("empty scene");
  BoundingBox b = detail::scene_bounds(scene);
  double w = b.xmax - b.xmin, h = b.ymax - b.ymin;
  if (w <= 0.0 && h <= 0.0) {
    const Vec2 c{0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax)};
    b = {c.x - 0.5, c.y - 0.5, c.x + 0.5, c.y + 0.5};
  } else if (w <= 0.0) {
    b.xmin -= 0.5 * h;
    b.xmax += 0.5 * h;
  } else if (h <= 0.0) {
    b.ymin -= 0.5 * w;
    b.ymax += 0.5 * w;
  }
  w = b.xmax - b.xmin;
  h = b.ymax - b.ymin;
  const double x0 = b.xmin - 0.05 * w, vw = 1.1 * w;
  const double y0 = -(b.ymax + 0.05 * h), vh = 1.1 * h;
  const double px = vw / kSvgWidth;  // user units per output pixel

  auto stroke = [&](Style s) {
    std::string a = " fill=\"none\" stroke=\"black\" stroke-width=\"";
    a += detail::num((s == Style::Thick ? 2.0 : 0.5) * px) + "\"";
    if (s == Style::Dashed) a += " stroke-dasharray=\"" + detail::num(4.0 * px) + " " + detail::num(3.0 * px) + "\"";
    return a;
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << detail::num(kSvgWidth)
     << "\" height=\"" << detail::num(std::round(kSvgWidth * vh / vw)) << "\" viewBox=\"" << detail::num(x0) << ' '
     << detail::num(y0) << ' ' << detail::num(vw) << ' ' << detail::num(vh) << "\">\n";
  if (!scene.title.empty()) os << "<title>" << detail::escape_xml(scene.title) << "</title>\n";
  os << "<g transform=\"scale(1,-1)\">\n";
  for (const auto& item : scene.items) {
    if (const auto* c = std::get_if<CircleItem>(&item.shape)) {
      os << "<circle cx=\"" << detail::num(c->center.x) << "\" cy=\"" << detail::num(c->center.y) << "\" r=\""
         << detail::num(c->radius) << "\"" << stroke(item.style) << "/>\n";
    } else if (const auto* p = std::get_if<PolylineItem>(&item.shape)) {
      os << "<polyline points=\"";
      for (std::size_t i = 0; i < p->points.size(); ++i)
        os << (i ? " " : "") << detail::num(p->points[i].x) << ',' << detail::num(p->points[i].y);
      os << "\"" << stroke(item.style) << "/>\n";
    } else {
      const Vec2 q = std::get<MarkerItem>(item.shape).point;
      const double s = 3.0 * px;
      os << "<rect x=\"" << detail::num(q.x - s) << "\" y=\"" << detail::num(q.y - s) << "\" width=\""
         << detail::num(2.0 * s) << "\" height=\"" << detail::num(2.0 * s) << "\" fill=\"black\"/>\n";
    }
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

/// `count` circles of the family at evenly spread samples (both ends
/// included) with the given curves drawn thick.
inline Scene family_scene(const CircleFamily& fam, const std::vector<SampledCurve>& curves, int count = 60,
                          const std::string& title = {}) {
  const int n = static_cast<int>(fam.size());
  const int m = std::clamp(count, 1, n);
  Scene scene;
  scene.title = title;
  for (int j = 0; j < m; ++j) {
    const auto i = static_cast<std::size_t>(m == 1 ? 0 : std::lround(static_cast<double>(j) * (n - 1) / (m - 1)));
    scene.circle(fam.frontal.gamma[i], std::abs(fam.lambda[i]), Style::Thin);
  }
  for (const auto& c : curves) scene.polyline(c.points, Style::Thick);
  return scene;
}

}  // namespace circenv
