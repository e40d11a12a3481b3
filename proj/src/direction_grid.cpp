// SPDX-License-Identifier: Apache-2.0
#include "gmt/direction_grid.hpp"

#include <algorithm>
#include <cmath>

namespace gmt {

namespace {

// exact arclength of the cell [q0,q1] clipped to [-sin(delta), sin(delta)]
// on the unit circle: q = sin(phi) gives dphi = dq / sqrt(1-q^2)
double arc_weight_1d(double q0, double q1, double delta) {
  double lim = std::sin(delta);
  double a = std::max(q0, -lim), b = std::min(q1, lim);
  if (a >= b) return 0.0;
  return std::asin(b) - std::asin(a);
}

// spherical area of the cell clipped to the cap disc |q| <= sin(delta),
// midpoint rule on a 16x16 refinement of the cell
double area_weight_2d(double qx0, double qx1, double qy0, double qy1, double delta) {
  double lim2 = std::sin(delta) * std::sin(delta);
  double hx = (qx1 - qx0) / 16.0, hy = (qy1 - qy0) / 16.0;
  double sum = 0.0;
  for (int iy = 0; iy < 16; ++iy)
    for (int ix = 0; ix < 16; ++ix) {
      double x = qx0 + (ix + 0.5) * hx;
      double y = qy0 + (iy + 0.5) * hy;
      double r2 = x * x + y * y;
      if (r2 > lim2) continue;
      sum += hx * hy / std::sqrt(1.0 - r2);
    }
  return sum;
}

}  // namespace

DirectionGrid build_grid(Vec theta0, double delta, int n, int ambient_dim) {
  if (!(delta > 0) || delta > 0.2)
    throw InputError("build_grid: cap radius must lie in (0, 0.2]");
  if (n < 8) throw InputError("build_grid: need at least 8 nodes per axis");
  if (ambient_dim != 2 && ambient_dim != 3) throw InputError("build_grid: ambient dim 2 or 3");
  DirectionGrid g;
  g.theta0 = unit(theta0);
  g.delta = delta;
  g.d = ambient_dim - 1;
  g.n = n;
  if (g.d == 1) {
    g.b1 = Vec{-g.theta0.y, g.theta0.x, 0};  // quarter turn in the plane
    g.b2 = Vec{0, 0, 0};
  } else {
    // pick the axis least aligned with theta0 for a reproducible frame
    Vec cand[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    Vec axis = cand[0];
    double best = std::fabs(dot(g.theta0, cand[0]));
    for (int k = 1; k < 3; ++k) {
      double a = std::fabs(dot(g.theta0, cand[k]));
      if (a < best) {
        best = a;
        axis = cand[k];
      }
    }
    g.b1 = unit(cross(g.theta0, axis));
    g.b2 = cross(g.theta0, g.b1);
  }
  double w = g.cell_width();
  if (g.d == 1) {
    g.nodes.reserve(n);
    g.weights.reserve(n);
    for (int i = 0; i < n; ++i) {
      double q = g.coord(i);
      g.nodes.push_back(g.lift(q, 0));
      g.weights.push_back(arc_weight_1d(q - 0.5 * w, q + 0.5 * w, delta));
      g.stretch = std::max(g.stretch, 1.0 / std::sqrt(1.0 - q * q));
    }
  } else {
    g.nodes.reserve(size_t(n) * n);
    g.weights.reserve(size_t(n) * n);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        double qx = g.coord(ix), qy = g.coord(iy);
        g.nodes.push_back(g.lift(qx, qy));
        g.weights.push_back(
            area_weight_2d(qx - 0.5 * w, qx + 0.5 * w, qy - 0.5 * w, qy + 0.5 * w, delta));
        g.stretch = std::max(g.stretch, 1.0 / std::sqrt(1.0 - qx * qx - qy * qy));
      }
  }
  return g;
}

Json DirectionGrid::to_json() const {
  Json j;
  j["theta0"] = {theta0.x, theta0.y, theta0.z};
  j["delta"] = delta;
  j["d"] = d;
  j["n"] = n;
  j["stretch"] = stretch;
  j["total_weight"] = total_weight();
  return j;
}

}  // namespace gmt
