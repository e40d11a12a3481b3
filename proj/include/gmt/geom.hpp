// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "gmt/vec.hpp"

namespace gmt {

// Balls are closed unless stated otherwise.
struct Ball {
  Point center{};
  double radius = 1.0;
  bool closed = true;

  bool contains(Point p, double slack = 0.0) const {
    double d = dist(p, center);
    return closed ? d <= radius + slack : d < radius - slack;
  }
};

enum class Openness { Closed, Open, HalfOpenA, HalfOpenB };

// Oriented segment from a to b; endpoint membership tracked separately
// because visibility casts use open segments.
struct Segment {
  Point a{}, b{};
  Openness openness = Openness::Closed;

  double length() const { return dist(a, b); }
  Vec direction() const { return unit(b - a); }
  Point at(double t) const { return a + t * (b - a); }  // t in [0,1]
};

// Convex hull of two balls: union over s in [0,1] of B(lerp(c), lerp(r)).
struct HullTwoBalls {
  Ball lo, hi;

  // Signed clearance: negative inside, positive outside.
  double signed_dist(Point p) const {
    Vec d = hi.center - lo.center;
    double dd = norm2(d);
    Vec w = p - lo.center;
    double dr = hi.radius - lo.radius;
    double best = std::min(dist(p, lo.center) - lo.radius, dist(p, hi.center) - hi.radius);
    if (dd > 1e-300) {
      // stationary points of |w - s d| - (r_lo + s dr) on (0,1)
      // (d.w - s|d|^2) = -dr |w - s d|  =>  quadratic in s
      double dw = dot(d, w);
      double A = dd * dd - dr * dr * dd;
      double B = -2.0 * dw * dd + 2.0 * dr * dr * dot(d, w);
      double C = dw * dw - dr * dr * norm2(w);
      if (std::fabs(A) > 1e-300) {
        double disc = B * B - 4 * A * C;
        if (disc >= 0) {
          double sq = std::sqrt(disc);
          for (double s : {(-B + sq) / (2 * A), (-B - sq) / (2 * A)}) {
            if (s > 0.0 && s < 1.0) {
              double v = norm(w - s * d) - (lo.radius + s * dr);
              best = std::min(best, v);
            }
          }
        }
      }
    }
    return best;
  }

  bool contains(Point p, double tol = 0.0) const { return signed_dist(p) <= tol; }
  bool interior_contains(Point p, double tol = 0.0) const { return signed_dist(p) < -tol; }

  // Enclosing ball, for window sizing and quick rejects.
  Ball bounding_ball() const {
    Vec d = hi.center - lo.center;
    double L = norm(d);
    double r = 0.5 * (L + lo.radius + hi.radius);
    r = std::max({r, lo.radius, hi.radius});
    Point c = L > 1e-300 ? lo.center + (0.5 * (L + hi.radius - lo.radius)) * unit(d) : lo.center;
    if (r <= lo.radius) c = lo.center;
    if (r <= hi.radius) c = hi.center;
    return {c, r, true};
  }
};

// Uniform lattice of points on the disk D = B(center, radius) within the
// hyperplane through `center` orthogonal to `axis`. Points closer than one
// cell to the rim are dropped. n is the per-axis resolution.
std::vector<Point> disk_lattice(Point center, Vec axis, double radius, int n, int ambient_dim);

}  // namespace gmt
