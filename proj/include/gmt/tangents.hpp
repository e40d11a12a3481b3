// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmt/builder.hpp"
#include "gmt/cones.hpp"
#include "gmt/direction_grid.hpp"
#include "gmt/geom.hpp"
#include "gmt/json.hpp"
#include "gmt/scene.hpp"

namespace gmt {

// Hyperplane through a base point, stored by its unit normal.
struct FlatPlane {
  Point base{};
  Vec normal{0, 1, 0};

  double dist(Point p) const { return std::fabs(dot(p - base, normal)); }
  Json to_json() const;
};

// Best flat fit through xi at one scale: beta is the sup, over boundary
// samples in B(xi, r), of the distance to the plane, divided by r.
struct FlatnessResult {
  double beta = 0.0;
  FlatPlane plane;
  int samples = 0;
};

// Minimizes beta over hyperplanes through xi: principal directions of the
// local sample covariance seed the plane, then a rotation search refines it
// to 1e-4 radians. Samples are drawn at resolution r / 256. Throws when xi
// is off the boundary or the ball holds no samples.
FlatnessResult flatness(const Scene& sc, Point xi, double r);

// Normalized secant directions (zeta - xi)/|zeta - xi| toward boundary
// samples with 0 < |zeta - xi| <= radii[k], one set per radius, each
// deduplicated within the angular resolution of the sampling. radii must
// be positive and strictly decreasing.
std::vector<std::vector<Vec>> contingent_sample(const Scene& sc, Point xi,
                                                const std::vector<double>& radii);

// Node assignment of the two-sided visible directions at xi: a grid node
// theta joins the ordered label pair (i, j) when both open segments
// (xi, xi + t theta) and (xi, xi - t theta) are boundary-free and their
// midpoints classify to components i and j. Pairs appear in discovery
// order; nodes failing either cast stay unassigned.
struct TwoSidedTable {
  double t = 0.0;
  std::vector<int> pair_index;  // per node, -1 unassigned
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> pair_weight;  // cap measure per pair
  double assigned_weight = 0.0;

  Json to_json() const;
};

TwoSidedTable two_sided_directions(const Scene& sc, Point xi, const DirectionGrid& grid,
                                   double t);

// Two opposite cones about one axis, certified against the boundary set.
struct ConePair {
  Vec axis{0, 1, 0};
  double alpha = 0.0, t = 0.0;
  bool both_empty = false;
  ConeCertificate plus, minus;

  Json to_json() const;
};

enum class TangentClass { TangentCandidate, NonFlat, Undetermined };

// Per-point outcome of the detection pipeline. The flatness curve lists
// (r, beta) coarse to fine; a tangent candidate has beta at or below the
// threshold on the four finest scales with a non-increasing trend, and a
// certified empty cone pair.
struct TangentReport {
  Point xi{};
  std::vector<std::pair<double, double>> flatness_curve;
  FlatPlane plane;  // best plane at the finest tested scale
  TangentClass classified = TangentClass::Undetermined;
  std::optional<ConePair> cone_pair;

  Json to_json() const;
};

// resolution == 0 picks B.radius * 1e-3. Flatness scales are
// B_hat.radius * 2^-k for k in [scale_coarse, scale_fine]; the flag rule
// reads the four finest, so the range must hold at least four scales.
struct DetectParams {
  double C = 10.0;
  int grid_n = 256;  // direction grid resolution, power of two
  double resolution = 0.0;
  double beta_threshold = 0.05;
  int scale_coarse = 4;
  int scale_fine = 14;
  double eta = 1.0 / 16.0;  // porosity density parameter
  std::string omega_label;  // empty: deepest interior witness
};

// Detection over B: normalize into the two-ball frame, table the fiber
// gaps, pick the (t, s) lattice cell maximizing the weight of
// E = {xi : |theta_t(xi)| > s}, then run each point of E through the
// two-sided / porosity / cone / flatness stages. Everything reported is
// mapped back to the input frame.
struct DetectResult {
  BoundarySample S;        // all sampled points of B
  BoundarySample flagged;  // tangent candidates
  double fraction = 0.0;   // flagged weight / S weight
  double t = 0.0, s = 0.0;
  double E_weight = 0.0;
  std::vector<double> E_weights;  // 6 x 6 lattice, t-major
  NormalizeResult norm;
  std::vector<TangentReport> reports;  // one per point of E, sample order

  Json to_json() const;
};

DetectResult detect(const Scene& sc, const Ball& B, const DetectParams& params = {});

}  // namespace gmt
