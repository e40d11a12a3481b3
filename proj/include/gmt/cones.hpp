// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <utility>

#include "gmt/json.hpp"
#include "gmt/scene.hpp"

namespace gmt {

// Truncated one-sided cone. Membership is the closed condition
//   (x - apex) . axis >= |x - apex| cos(alpha)  and  |x - apex| <= t.
struct Cone {
  Point apex{};
  Vec axis{};     // unit
  double alpha = 0;  // half-angle, radians, in (0, pi/2)
  double t = 0;      // height

  bool contains(Point p) const;
  Json to_json() const;
};

// Blocking data attached to a failed containment check: the nearest boundary
// hit, and when a component label was supplied, the largest clear ball of a
// different component found near that hit together with its exact angular
// shadow seen from the apex.
struct BlockingWitness {
  Point zeta{};
  double hit_distance = 0;
  double search_radius = 0;
  std::optional<Ball> ball;
  std::string ball_label;
  double psi = 0;  // exact shadow half-angle of ball from the apex

  Json to_json() const;
};

struct ConeCertificate {
  bool contained = false;
  int rays = 0;
  double spacing = 0;    // angular net spacing actually used
  double clearance = 0;  // min over rays of (first-hit distance, capped at 2t) - t
  std::optional<BlockingWitness> witness;

  Json to_json() const;
};

// Casts a net of rays from the cone apex (which must lie on the boundary set)
// and certifies that the cone stays inside the component named by `label`.
// An empty label certifies only that the cone avoids the boundary set.
// Angular net spacing is at most step/t.
ConeCertificate verify_cone(const Scene& sc, const std::string& label, const Cone& c,
                            double step);

// Certificates for the cones along +theta and -theta, each checked against
// the whole boundary set.
std::pair<ConeCertificate, ConeCertificate> two_sided_cone(const Scene& sc, Point xi, Vec theta,
                                                           double alpha, double t);

// Guaranteed angular radius of the shadow cast by any C-corkscrew ball found
// inside B(zeta, |zeta - xi| sin(alpha)), as seen from xi.
double blocking_angle(Point zeta, Point xi, double C, double alpha);

// Exact angular radius of a ball seen from an outside point (pi when `from`
// is inside the ball).
double shadow_angle(const Ball& b, Point from);

}  // namespace gmt
