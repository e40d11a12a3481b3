// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gmt/scene.hpp"

namespace gmt {

enum class Side { Interior, Exterior };

// Outcome of a hypothesis check. `constant` is the achieved constant:
// r / min witness radius for ball searches, the regularity ratio A for
// measure checks. Witness balls always avoid the boundary set entirely.
struct ConditionVerdict {
  bool holds = false;
  double constant = 0.0;
  std::vector<Ball> witnesses;
  std::vector<std::string> witness_labels;  // parallel to witnesses
  std::vector<double> witness_measures;     // regularity only
  std::vector<std::pair<Point, double>> failures;  // (center, radius) pairs

  Json to_json() const;
};

// Independent certificate that the closed ball avoids the boundary set:
// a radial chord net is cast from the center and must report no hit, in
// addition to the direct distance test. rays counts directions (2D) or
// sets the per-axis resolution of a sphere net (3D).
bool ball_avoids_boundary(const Scene& sc, const Ball& b, int rays);

// Every ball B(xi, r) centered on the boundary must contain two balls of
// radius r/C lying in different complement components. This checks one
// such ball by lattice search plus compass refinement. Witness radii may
// fall short of r/C by a relative 1e-3 before the check reports failure.
ConditionVerdict check_two_ball(const Scene& sc, Point xi, double r, double C);

// Witness ball of radius r/C inside B(xi, r), either inside the labeled
// component (Interior) or inside some other component (Exterior). Both
// kinds avoid the boundary set.
ConditionVerdict check_corkscrew(const Scene& sc, const std::string& label, Point xi, double r,
                                 double C, Side side);

// Smallest A with r^d / A <= measure(B(xi,r)) / w_d <= A r^d over all
// samples, where w_d is the unit ball volume of the boundary dimension.
ConditionVerdict estimate_regularity(const Scene& sc,
                                     const std::vector<std::pair<Point, double>>& samples);

}  // namespace gmt
