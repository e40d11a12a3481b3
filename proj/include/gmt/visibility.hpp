// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmt/direction_grid.hpp"
#include "gmt/geom.hpp"
#include "gmt/json.hpp"
#include "gmt/scene.hpp"

namespace gmt {

// Row-major relation between grid directions and boundary sample points,
// together with the fiber-gap value for each pair.
struct VisibilityTable {
  DirectionGrid grid;
  BoundarySample boundary;
  std::vector<uint8_t> bits;  // node-major: bits[node * boundary.size() + sample]
  std::vector<double> gaps;   // same layout; kInf when the fiber meets nothing else

  bool bit(int node, int sample) const { return bits[size_t(node) * boundary.size() + sample] != 0; }
  double gap(int node, int sample) const { return gaps[size_t(node) * boundary.size() + sample]; }

  // visible-direction weight of one sample point
  double direction_weight(int sample) const;
  // visible-sample measure of one direction
  double sample_measure(int node) const;

  Json to_json() const;
};

// Distance along the unoriented fiber line through xi in direction theta to
// the nearest other boundary point inside the window; kInf if there is none.
double fiber_gap(const Scene& sc, Vec theta, Point xi);

// bits(theta, xi) set iff the open segment from the foot of xi on the
// hyperplane through the origin normal to theta, up to xi itself, meets no
// boundary point. Gap distances double the ray-cast cost; callers that only
// consume the bits can skip them, leaving every gap infinite.
VisibilityTable visible_table(const Scene& sc, const BoundarySample& S, const DirectionGrid& grid,
                              bool with_gaps = true);

// Sub-sample of points whose visible-direction weight reaches kappa times
// the exact cap measure.
BoundarySample select_kappa_set(const VisibilityTable& table, double kappa);

// The density threshold used to select the visible set.
double kappa_value(int d, double C, double M);

// Both reorderings of the double sum over set bits; equal up to
// reassociation error.
std::pair<double, double> fubini_check(const VisibilityTable& table);

// Surjectivity verdict for the projection of the truncated boundary piece
// onto the disk D_theta, checked by fiber casting over every grid node.
struct SurjectivityReport {
  bool surjective = false;
  HullTwoBalls T{};
  BoundarySample S;
  double delta1 = 0;        // admissible cap radius bound for these balls
  double disk_radius = 0;   // radius of D
  int fibers_checked = 0;
  // first failing fiber when not surjective
  std::optional<std::pair<Vec, Point>> witness;

  Json to_json() const;
};

// Verifies that every fiber through the lattice on D_theta = B(0, r/2C) cap
// theta-perp, cast along +-theta, meets the boundary inside the truncated
// region T = hull(B(0, r/2C), B(a e_{d+1}, r/C)). The two balls must avoid
// the boundary and lie in different labeled components.
SurjectivityReport project_surjective(const Scene& sc, const Ball& B, double C, double a,
                                      const DirectionGrid& grid);

}  // namespace gmt
