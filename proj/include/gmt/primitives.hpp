// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "gmt/geom.hpp"

namespace gmt {

// Boundary pieces a scene is made of. Each primitive knows its distance
// field, its ray intersections, and (for two-sided pieces) which side of
// itself a point lies on.

// Hyperplane {n . x = c}; sides are the two open half-spaces.
struct HalfSpace {
  Vec normal{0, 1, 0};
  double offset = 0.0;
};

// Sphere in R^3 / circle in R^2; sides are inside and outside.
struct Sphere {
  Point center{};
  double radius = 1.0;
};

enum class SideRule {
  None,      // open chain, no side labels
  EvenOdd,   // closed chain, parity winding: inside / outside
  Vertical,  // graph chain sorted by x: above / below
};

// Chain of segments, planar. Closed chains may act as Jordan curves.
struct Polyline {
  std::vector<Point> pts;
  bool closed = false;
  SideRule side_rule = SideRule::None;
};

// Both branches of |y| = scale * x^2, planar.
struct Parabola {
  double scale = 1.0;
};

// Filled axis-aligned rectangle; the whole solid belongs to the boundary set.
struct SolidBox {
  Point lo{}, hi{};
};

using Primitive = std::variant<HalfSpace, Sphere, Polyline, Parabola, SolidBox>;

// Distance from p to the primitive's point set.
double prim_distance(const Primitive& pr, Point p);

// Closest point of the primitive's set to p.
Point prim_closest(const Primitive& pr, Point p);

// -1 / +1 for two-sided primitives, 0 when the primitive defines no side.
// HalfSpace: sign(n.x - c). Sphere: -1 inside. EvenOdd: +1 inside.
// Vertical: +1 above. Parabola: +1 in {y > x^2}, -1 in {y < -x^2}, 0 between.
int prim_side(const Primitive& pr, Point p);

// Append all ray intersection parameters t in [0, tmax] for origin + t*dir
// (dir unit). eps thickens grazing contacts; collinear overlap reports the
// interval entry. Parameters may be unsorted.
void prim_hits(const Primitive& pr, Point origin, Vec dir, double tmax, double eps,
               std::vector<double>& out);

bool prim_bounded(const Primitive& pr);

// Uniform grid over the edges of a large polyline; accelerates ray walks and
// distance queries. Built once per scene, immutable afterwards.
struct EdgeGrid {
  Point lo{};
  double cell = 1.0;
  int nx = 0, ny = 0;
  std::vector<std::vector<int>> bins;  // edge indices per cell

  static EdgeGrid build(const std::vector<Point>& pts, bool closed, int target_bins);
  std::optional<double> first_hit(const std::vector<Point>& pts, bool closed, Point origin,
                                  Vec dir, double tmin, double tmax, double eps) const;
  double distance(const std::vector<Point>& pts, bool closed, Point p, Point* closest) const;
  bool empty() const { return bins.empty(); }
};

}  // namespace gmt
