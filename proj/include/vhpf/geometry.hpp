#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "vhpf/error.hpp"

namespace vhpf {

/// Positions and velocities. Planar scenarios keep z = 0.
using Vec = Eigen::Vector3d;

inline Vec vec2(double x, double y) { return Vec(x, y, 0.0); }

/// Axis-aligned box [lo, hi]. In 2-D the z extent is ignored.
struct Box {
  Vec lo = Vec::Zero();
  Vec hi = Vec::Zero();
  bool operator==(const Box&) const = default;
};

/// Disc (2-D) or ball (3-D).
struct Sphere {
  Vec center = Vec::Zero();
  double radius = 0.0;
  bool operator==(const Sphere&) const = default;
};

using Shape = std::variant<Box, Sphere>;

/// Signed distance from p to the shape surface: negative inside.
inline double signed_distance(const Box& b, const Vec& p, int dim) {
  double outside_sq = 0.0;
  double inside = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim; ++a) {
    const double below = b.lo[a] - p[a];
    const double above = p[a] - b.hi[a];
    const double d = std::max(below, above);
    if (d > 0.0) outside_sq += d * d;
    inside = std::max(inside, d);
  }
  if (outside_sq > 0.0) return std::sqrt(outside_sq);
  return inside;
}

inline double signed_distance(const Sphere& s, const Vec& p, int dim) {
  return (p - s.center).head(dim).norm() - s.radius;
}

inline double signed_distance(const Shape& s, const Vec& p, int dim) {
  return std::visit([&](const auto& shape) { return signed_distance(shape, p, dim); }, s);
}

/// Closest point on the shape surface to p (p itself may be inside).
inline Vec closest_surface_point(const Box& b, const Vec& p, int dim) {
  Vec q = p;
  bool inside = true;
  for (int a = 0; a < dim; ++a) {
    if (p[a] < b.lo[a] || p[a] > b.hi[a]) inside = false;
    q[a] = std::clamp(p[a], b.lo[a], b.hi[a]);
  }
  if (!inside) return q;
  // Inside: push out through the nearest face.
  int best_axis = 0;
  double best = std::numeric_limits<double>::infinity();
  bool to_hi = false;
  for (int a = 0; a < dim; ++a) {
    if (p[a] - b.lo[a] < best) { best = p[a] - b.lo[a]; best_axis = a; to_hi = false; }
    if (b.hi[a] - p[a] < best) { best = b.hi[a] - p[a]; best_axis = a; to_hi = true; }
  }
  q = p;
  q[best_axis] = to_hi ? b.hi[best_axis] : b.lo[best_axis];
  return q;
}

inline Vec closest_surface_point(const Sphere& s, const Vec& p, int dim) {
  Vec d = Vec::Zero();
  d.head(dim) = (p - s.center).head(dim);
  const double n = d.norm();
  if (n == 0.0) {
    d = Vec::Zero();
    d[0] = 1.0;
    return s.center + s.radius * d;
  }
  return s.center + s.radius * d / n;
}

inline Vec closest_surface_point(const Shape& s, const Vec& p, int dim) {
  return std::visit([&](const auto& shape) { return closest_surface_point(shape, p, dim); }, s);
}

/// Whether the shape fits inside the box `bounds`.
inline bool contained_in(const Shape& s, const Box& bounds, int dim) {
  Box extent;
  if (const auto* b = std::get_if<Box>(&s)) {
    extent = *b;
  } else {
    const auto& sp = std::get<Sphere>(s);
    extent.lo = sp.center - Vec::Constant(sp.radius);
    extent.hi = sp.center + Vec::Constant(sp.radius);
  }
  for (int a = 0; a < dim; ++a) {
    if (extent.lo[a] < bounds.lo[a] || extent.hi[a] > bounds.hi[a]) return false;
  }
  return true;
}

inline bool inside_box(const Box& b, const Vec& p, int dim) {
  for (int a = 0; a < dim; ++a) {
    if (p[a] < b.lo[a] || p[a] > b.hi[a]) return false;
  }
  return true;
}

}  // namespace vhpf
