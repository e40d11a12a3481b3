// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gmt/common.hpp"
#include "gmt/json.hpp"
#include "gmt/vec.hpp"

#include <vector>

namespace gmt {

// Uniform chart over a spherical cap. The cap of arclength radius delta
// around theta0 is parameterized by the square [-delta, delta]^d through
// sigma(q) = q1 b1 + q2 b2 + sqrt(1 - |q|^2) theta0. Nodes are the n^d cell
// centers; a node's weight is the spherical measure of its cell clipped to
// the cap, so weights of nodes outside the cap are zero and the weights sum
// to the cap measure.
struct DirectionGrid {
  Vec theta0;
  double delta = 0.1;
  int d = 1;  // cap dimension (ambient - 1)
  int n = 64;
  Vec b1, b2;  // chart frame, orthonormal and orthogonal to theta0
  std::vector<Vec> nodes;
  std::vector<double> weights;
  double stretch = 1.0;  // max chart distortion over the node set

  int index(int ix, int iy) const { return iy * n + ix; }
  int size() const { return d == 2 ? n * n : n; }

  // chart coordinate of the node cell center along one axis
  double coord(int i) const { return -delta + (i + 0.5) * 2.0 * delta / n; }
  double cell_width() const { return 2.0 * delta / n; }

  Vec lift(double qx, double qy) const {
    double s2 = 1.0 - qx * qx - qy * qy;
    if (s2 < 0) throw InputError("direction grid: chart point outside the hemisphere");
    return qx * b1 + qy * b2 + std::sqrt(s2) * theta0;
  }

  // chart coordinates of a direction near theta0
  std::pair<double, double> project(Vec dir) const { return {dot(dir, b1), dot(dir, b2)}; }

  double total_weight() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }

  Json to_json() const;
};

// Deterministic frame and node construction. Requires 0 < delta <= 0.2 and
// n >= 8. ambient_dim is 2 or 3.
DirectionGrid build_grid(Vec theta0, double delta, int n, int ambient_dim);

}  // namespace gmt
