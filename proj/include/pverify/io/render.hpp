#pragma once

// 2-D slices of result regions as SVG. Clipping runs in exact rationals; only
// the final pixel coordinates are rounded (6 decimals).

#include "pverify/io/result.hpp"

#include <cstdio>

namespace pverify::io {

struct Bounds2 {
  Rational xmin = 0, xmax = 2, ymin = 0, ymax = 2;

  void validate() const {
    if (xmin >= xmax || ymin >= ymax) throw ValidationError("plot bounds must have positive width and height");
  }
};

struct Point2 {
  Rational x, y;
  bool operator==(const Point2&) const = default;
  auto operator<=>(const Point2& o) const {
    if (x != o.x) return x < o.x ? std::strong_ordering::less : std::strong_ordering::greater;
    if (y != o.y) return y < o.y ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

/// a*x + b*y - c >= 0 (strictness is irrelevant for drawing closures).
struct Constraint2 {
  Rational a, b, c;
  Rational eval(const Point2& p) const { return a * p.x + b * p.y - c; }
};

struct SliceAxes {
  std::size_t i = 0, j = 1;
};

namespace detail {

inline void check_axes(const SliceAxes& axes, std::size_t dim) {
  if (axes.i == axes.j) throw ValidationError("plot axes must differ");
  if (axes.i >= dim || axes.j >= dim)
    throw ValidationError("plot axes out of range for dimension " + std::to_string(dim));
}

inline std::string describe(const Halfspace& h) {
  return h.hyperplane.normal().str() + " . x " + sense_symbol(h.sense) + " " + to_string(h.hyperplane.offset());
}

}  // namespace detail

/// Restricts a region to the plane through `fixed` spanned by the two axes.
/// Half-spaces that do not involve either axis are settled by the fixed
/// coordinates: satisfied ones drop out, violated ones make the slice
/// unrepresentable and are reported.
inline std::vector<Constraint2> slice_constraints(const ConvexRegion& r, const SliceAxes& axes, const Vector& fixed) {
  require_same_dim(fixed.size(), r.dim() == 0 ? fixed.size() : r.dim());
  detail::check_axes(axes, fixed.size());
  std::vector<Constraint2> out;
  std::vector<std::string> offending;
  for (const auto& h : r.halfspaces()) {
    const Vector& n = h.hyperplane.normal();
    Rational rest = h.hyperplane.offset();
    for (std::size_t k = 0; k < n.size(); ++k)
      if (k != axes.i && k != axes.j) rest -= n[k] * fixed[k];
    if (n[axes.i] == 0 && n[axes.j] == 0) {
      const bool ok = h.sense == Sense::StrictGreater ? rest < 0 : rest <= 0;
      if (!ok) offending.push_back(detail::describe(h));
      continue;
    }
    out.push_back({n[axes.i], n[axes.j], rest});
  }
  if (!offending.empty()) {
    std::string msg = "region is not representable in this slice; offending halfspaces:";
    for (const auto& s : offending) msg += " [" + s + "]";
    throw ValidationError(msg);
  }
  return out;
}

/// Sutherland-Hodgman against each constraint, starting from the bounds box.
inline std::vector<Point2> clip_polygon(std::vector<Point2> poly, std::span<const Constraint2> constraints) {
  for (const auto& c : constraints) {
    if (poly.empty()) break;
    std::vector<Point2> next;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point2& p = poly[k];
      const Point2& q = poly[(k + 1) % poly.size()];
      const Rational fp = c.eval(p);
      const Rational fq = c.eval(q);
      if (fp >= 0) next.push_back(p);
      if ((fp > 0 && fq < 0) || (fp < 0 && fq > 0)) {
        const Rational t = fp / (fp - fq);
        next.push_back({p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t});
      }
    }
    poly = std::move(next);
  }
  // Drop repeated and collinear vertices so the result is the vertex set.
  std::vector<Point2> out;
  for (const auto& p : poly)
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  bool changed = true;
  while (changed && out.size() >= 3) {
    changed = false;
    for (std::size_t k = 0; k < out.size(); ++k) {
      const Point2& a = out[(k + out.size() - 1) % out.size()];
      const Point2& b = out[k];
      const Point2& c = out[(k + 1) % out.size()];
      if ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x) == 0) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
  return out;
}

inline std::vector<Point2> box_polygon(const Bounds2& b) {
  return {{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}};
}

/// Vertices (counter-clockwise from the clipping order) of the slice clipped to the bounds.
inline std::vector<Point2> slice_vertices(const ConvexRegion& r, const SliceAxes& axes, const Vector& fixed,
                                          const Bounds2& bounds) {
  bounds.validate();
  const auto cs = slice_constraints(r, axes, fixed);
  return clip_polygon(box_polygon(bounds), cs);
}

namespace detail {

/// Endpoints of a line a*x + b*y = c inside the box, if it crosses it.
inline std::optional<std::pair<Point2, Point2>> clip_line(const Constraint2& l, const Bounds2& b) {
  const std::vector<Constraint2> both{l, {-l.a, -l.b, -l.c}};
  auto pts = clip_polygon(box_polygon(b), both);
  if (pts.empty()) return std::nullopt;
  std::sort(pts.begin(), pts.end());
  if (pts.front() == pts.back()) return std::nullopt;
  return std::pair{pts.front(), pts.back()};
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_regions(const ResultDocument& doc, const SliceAxes& axes, const Bounds2& bounds) {
  bounds.validate();
  if (doc.regions.empty()) throw ValidationError("result has no region to plot (operation '" + doc.operation + "')");
  detail::check_axes(axes, doc.anchor.size());

  constexpr int kSize = 400, kMargin = 40;
  const Rational w = bounds.xmax - bounds.xmin;
  const Rational h = bounds.ymax - bounds.ymin;
  auto px = [&](const Rational& x) { return detail::fmt(to_double(kMargin + (x - bounds.xmin) / w * kSize)); };
  auto py = [&](const Rational& y) { return detail::fmt(to_double(kMargin + (bounds.ymax - y) / h * kSize)); };

  std::ostringstream svg;
  const int total = kSize + 2 * kMargin;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total << "\" height=\"" << total
      << "\" viewBox=\"0 0 " << total << ' ' << total << "\">\n";
  svg << "<title>" << detail::xml_escape(doc.scenario + " (" + doc.operation + ")") << "</title>\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << total << "\" height=\"" << total << "\" fill=\"white\"/>\n";

  // Regions first so lines and labels stay on top.
  for (const auto& region : doc.regions) {
    const auto poly = slice_vertices(region, axes, doc.anchor, bounds);
    if (poly.size() < 3) continue;
    svg << "<polygon class=\"region\" points=\"";
    for (std::size_t k = 0; k < poly.size(); ++k) svg << (k ? " " : "") << px(poly[k].x) << ',' << py(poly[k].y);
    svg << "\" fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
  }

  // Axes through the origin when visible, otherwise along the frame.
  const Rational ax_y = (bounds.ymin <= 0 && 0 <= bounds.ymax) ? Rational(0) : bounds.ymin;
  const Rational ax_x = (bounds.xmin <= 0 && 0 <= bounds.xmax) ? Rational(0) : bounds.xmin;
  svg << "<rect class=\"frame\" x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSize << "\" height=\""
      << kSize << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
  svg << "<line class=\"axis\" x1=\"" << px(bounds.xmin) << "\" y1=\"" << py(ax_y) << "\" x2=\"" << px(bounds.xmax)
      << "\" y2=\"" << py(ax_y) << "\" stroke=\"black\"/>\n";
  svg << "<line class=\"axis\" x1=\"" << px(ax_x) << "\" y1=\"" << py(bounds.ymin) << "\" x2=\"" << px(ax_x)
      << "\" y2=\"" << py(bounds.ymax) << "\" stroke=\"black\"/>\n";
  auto label = [&](std::size_t k) {
    return k < doc.assignments.size() ? doc.assignments[k] : "x" + std::to_string(k);
  };
  svg << "<text x=\"" << kMargin + kSize << "\" y=\"" << kMargin + kSize + 28
      << "\" text-anchor=\"end\" font-size=\"14\">" << detail::xml_escape(label(axes.i)) << "</text>\n";
  svg << "<text x=\"" << kMargin - 28 << "\" y=\"" << kMargin << "\" font-size=\"14\">"
      << detail::xml_escape(label(axes.j)) << "</text>\n";

  for (const auto& l : doc.lines) {
    const Vector& n = l.plane.normal();
    if (n[axes.i] == 0 && n[axes.j] == 0) continue;
    Rational rest = l.plane.offset();
    for (std::size_t k = 0; k < n.size(); ++k)
      if (k != axes.i && k != axes.j) rest -= n[k] * doc.anchor[k];
    const auto seg = detail::clip_line({n[axes.i], n[axes.j], rest}, bounds);
    if (!seg) continue;
    const bool dashed = l.kind == "indifference";
    svg << "<line class=\"" << l.kind << "\" x1=\"" << px(seg->first.x) << "\" y1=\"" << py(seg->first.y)
        << "\" x2=\"" << px(seg->second.x) << "\" y2=\"" << py(seg->second.y) << "\" stroke=\""
        << (dashed ? "#555555" : "#d62728") << "\" stroke-width=\"1.5\"" << (dashed ? " stroke-dasharray=\"6,4\"" : "")
        << "/>\n";
  }

  const Point2 t{doc.anchor[axes.i], doc.anchor[axes.j]};
  if (bounds.xmin <= t.x && t.x <= bounds.xmax && bounds.ymin <= t.y && t.y <= bounds.ymax) {
    svg << "<circle class=\"theta\" cx=\"" << px(t.x) << "\" cy=\"" << py(t.y) << "\" r=\"3.5\" fill=\"black\"/>\n";
    svg << "<text x=\"" << px(t.x) << "\" y=\"" << py(t.y) << "\" dx=\"6\" dy=\"-6\" font-size=\"14\">"
        << (doc.mode == "reverse" ? "θ′" : "θ") << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace pverify::io
