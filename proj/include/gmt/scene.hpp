// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "gmt/json.hpp"
#include "gmt/primitives.hpp"

namespace gmt {

struct Classification {
  bool boundary = false;
  std::string label;  // empty when boundary
};

struct Hit {
  Point p{};
  double t = 0.0;  // distance along the cast from its origin
};

// Weighted point cloud approximating the d-dimensional measure of a piece of
// the boundary set. Weights are patch measures (arclength / area).
struct BoundarySample {
  std::vector<Point> pts;
  std::vector<double> w;
  double resolution = 0.0;

  double total() const;
  size_t size() const { return pts.size(); }
  BoundarySample restricted(const std::function<bool(Point)>& keep) const;

  // Indices of sample points within radius r of q. Grid-accelerated.
  std::vector<int> in_ball(Point q, double r) const;
  void build_index() const;

 private:
  mutable std::vector<std::vector<int>> bins_;
  mutable Point grid_lo_{};
  mutable double grid_cell_ = 0.0;
  mutable int grid_nx_ = 0, grid_ny_ = 0, grid_nz_ = 0;
};

// Immutable analytic description of a closed boundary set in R^2 or R^3,
// restricted to a window ball, together with labels for the connected
// components of the complement. All queries are safe to run concurrently.
struct Scene {
  int dim = 2;  // ambient dimension, 2 or 3
  Ball window{{0, 0, 0}, 2.0};
  std::vector<Primitive> prims;
  // side-code pattern -> component label, sorted by pattern
  std::vector<std::pair<std::string, std::string>> label_map;
  std::string name = "custom";
  bool clipped = false;  // some primitive continues past the window
  // Model frame: queries map world -> model through this before testing
  // primitives. Identity for catalog scenes; set by normalization.
  RigidMotion model_from_world = RigidMotion::identity();

  void finalize();  // build acceleration structures, probe labels if absent

  double eps_boundary() const { return 1e-9 * window.radius; }
  double eps_self() const { return 1e-6 * window.radius; }

  double distance(Point p) const;          // to the boundary set
  Point closest_boundary(Point p) const;   // nearest boundary point
  bool on_boundary(Point p, double eps) const { return distance(p) <= eps; }

  // Throws InputError when p is outside the window.
  Classification classify(Point p, double eps) const;
  Classification classify(Point p) const { return classify(p, eps_boundary()); }

  // Earliest boundary hit along the segment, honoring its openness.
  std::optional<Hit> first_hit(const Segment& s) const;

  // Smallest hit parameter in [tmin, tmax] along origin + t*dir, or nothing.
  std::optional<double> first_hit_from(Point origin, Vec dir, double tmin, double tmax) const;

  // Open segment (a,b) meets no boundary point.
  bool segment_clear(Point a, Point b) const;

  BoundarySample boundary_sample(double res) const;

  // boundary_sample(res) restricted to membership in near_world, emitting the
  // same points in the same order, but in time local to the ball (planar
  // scenes; dim 3 falls back to the full pass).
  BoundarySample boundary_sample(double res, const Ball& near_world) const;

  // Quadrature mass of the boundary inside b. Requires res <= b.radius / 10.
  double boundary_measure(const Ball& b, double res) const;

  std::vector<std::string> labels() const;
  std::string side_pattern(Point model_point) const;

  // Copy of this scene observed through an extra world->model motion.
  Scene transformed(const RigidMotion& extra_model_from_world) const;

  Json to_json() const;
  static Scene from_json(const Json& j);

  Ball window_world() const {
    RigidMotion inv = model_from_world.inverse();
    return {inv.apply(window.center), window.radius, true};
  }

 private:
  std::vector<std::optional<EdgeGrid>> grids_;  // parallel to prims
  double prim_set_distance(int i, Point model_p, Point* closest) const;
  double distance_model(Point model_p) const;
};

// Catalog: halfplane, disk, annulus, polygon, lipschitz_graph, parabola_cusp,
// koch_snowflake (depth), four_corner_cantor (depth). depth > 12 rejected.
Scene make_scene(const std::string& which, int depth = 0);

// Count complement components by flood fill on a grid_n^dim lattice over the
// window. Used as an independent check of the analytic label map.
int flood_fill_component_count(const Scene& sc, int grid_n);

}  // namespace gmt
