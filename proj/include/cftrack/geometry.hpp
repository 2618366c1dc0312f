#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cftrack {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box, corner convention: (x, y) is the top-left edge,
/// w/h are extents in pixels. Real-valued; may extend outside the image.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  Point2 center() const { return {x + w / 2.0, y + h / 2.0}; }
  double area() const { return w * h; }

  static BoundingBox from_center(Point2 c, double w, double h) {
    return {c.x - w / 2.0, c.y - h / 2.0, w, h};
  }

  void validate() const {
    if (!(w > 0.0) || !(h > 0.0))
      throw std::invalid_argument("bounding box must have positive extent");
  }
};

inline BoundingBox intersect(const BoundingBox& a, const BoundingBox& b) {
  const double x0 = std::max(a.x, b.x);
  const double y0 = std::max(a.y, b.y);
  const double x1 = std::min(a.x + a.w, b.x + b.w);
  const double y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return {0, 0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

inline bool contains(const BoundingBox& b, double px, double py) {
  return px >= b.x && px < b.x + b.w && py >= b.y && py < b.y + b.h;
}

}  // namespace cftrack
