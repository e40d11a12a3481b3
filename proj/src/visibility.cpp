// SPDX-License-Identifier: Apache-2.0
#include "gmt/visibility.hpp"

#include <algorithm>
#include <cmath>

#include "gmt/conditions.hpp"

namespace gmt {

double VisibilityTable::direction_weight(int sample) const {
  double s = 0;
  for (int i = 0; i < grid.size(); ++i)
    if (bit(i, sample)) s += grid.weights[i];
  return s;
}

double VisibilityTable::sample_measure(int node) const {
  double s = 0;
  for (size_t j = 0; j < boundary.size(); ++j)
    if (bit(int(node), int(j))) s += boundary.w[j];
  return s;
}

Json VisibilityTable::to_json() const {
  Json j;
  j["grid"] = grid.to_json();
  j["samples"] = boundary.size();
  Json rows = Json::array();
  for (int i = 0; i < grid.size(); ++i) {
    std::string row(boundary.size(), '0');
    for (size_t k = 0; k < boundary.size(); ++k)
      if (bit(i, int(k))) row[k] = '1';
    rows.push_back(row);
  }
  j["bits"] = std::move(rows);
  Json g = Json::array();
  for (double v : gaps) g.push_back(std::isfinite(v) ? v : -1.0);  // -1 encodes "no gap"
  j["gaps"] = std::move(g);
  return j;
}

double fiber_gap(const Scene& sc, Vec theta, Point xi) {
  if (norm(theta) == 0.0) throw InputError("fiber_gap: zero direction");
  if (sc.distance(xi) > sc.eps_self())
    throw InputError("fiber_gap: point is not on the boundary set");
  Vec u = unit(theta);
  double reach = 4 * sc.window.radius;
  double h = kInf;
  for (Vec v : {u, u * -1.0}) {
    auto t = sc.first_hit_from(xi, v, sc.eps_self(), reach);
    if (t) h = std::min(h, *t);
  }
  return h;
}

VisibilityTable visible_table(const Scene& sc, const BoundarySample& S,
                              const DirectionGrid& grid, bool with_gaps) {
  VisibilityTable tab;
  tab.grid = grid;
  tab.boundary = S;
  size_t m = S.size();
  tab.bits.assign(size_t(grid.size()) * m, 0);
  tab.gaps.assign(size_t(grid.size()) * m, kInf);
  for (int i = 0; i < grid.size(); ++i) {
    Vec theta = grid.nodes[i];
    for (size_t j = 0; j < m; ++j) {
      Point xi = S.pts[j];
      Point foot = xi - theta * dot(xi, theta);
      if (sc.segment_clear(foot, xi)) tab.bits[size_t(i) * m + j] = 1;
      if (with_gaps) tab.gaps[size_t(i) * m + j] = fiber_gap(sc, theta, xi);
    }
  }
  return tab;
}

double kappa_value(int d, double C, double M) {
  if (d != 1 && d != 2) throw InputError("kappa_value: boundary dimension must be 1 or 2");
  if (!(C >= 1) || !(M > 0)) throw InputError("kappa_value: need C >= 1 and M > 0");
  return unit_ball_volume(d) / (std::pow(2.0, d + 1) * std::pow(C, d) * M);
}

BoundarySample select_kappa_set(const VisibilityTable& table, double kappa) {
  if (!(kappa > 0) || !(kappa <= 1)) throw InputError("select_kappa_set: kappa outside (0,1]");
  double cap = cap_measure(table.grid.d, table.grid.delta);
  BoundarySample out;
  out.resolution = table.boundary.resolution;
  for (size_t j = 0; j < table.boundary.size(); ++j) {
    if (table.direction_weight(int(j)) >= kappa * cap) {
      out.pts.push_back(table.boundary.pts[j]);
      out.w.push_back(table.boundary.w[j]);
    }
  }
  return out;
}

std::pair<double, double> fubini_check(const VisibilityTable& table) {
  double lhs = 0;
  for (int i = 0; i < table.grid.size(); ++i) lhs += table.grid.weights[i] * table.sample_measure(i);
  double rhs = 0;
  for (size_t j = 0; j < table.boundary.size(); ++j)
    rhs += table.boundary.w[j] * table.direction_weight(int(j));
  return {lhs, rhs};
}

Json SurjectivityReport::to_json() const {
  Json j{{"surjective", surjective},
         {"delta1", delta1},
         {"disk_radius", disk_radius},
         {"fibers_checked", fibers_checked},
         {"hull_lo_center", {T.lo.center.x, T.lo.center.y, T.lo.center.z}},
         {"hull_lo_radius", T.lo.radius},
         {"hull_hi_center", {T.hi.center.x, T.hi.center.y, T.hi.center.z}},
         {"hull_hi_radius", T.hi.radius},
         {"sample_size", S.size()},
         {"sample_mass", S.total()}};
  if (witness) {
    j["witness_theta"] = {witness->first.x, witness->first.y, witness->first.z};
    j["witness_point"] = {witness->second.x, witness->second.y, witness->second.z};
  }
  return j;
}

SurjectivityReport project_surjective(const Scene& sc, const Ball& B, double C, double a,
                                      const DirectionGrid& grid) {
  if (!(C >= 2)) throw InputError("project_surjective: C must be >= 2");
  double r = B.radius;
  if (!(r > 0) || !(a > 0)) throw InputError("project_surjective: need r > 0 and a > 0");
  double delta1 = r / (2 * C * a);
  if (grid.delta > delta1)
    throw InputError("project_surjective: grid cap exceeds the admissible bound");

  Point lo_c{0, 0, 0};
  Point hi_c = sc.dim == 3 ? Point{0, 0, a} : Point{0, a, 0};
  Ball lo{lo_c, r / (2 * C)};
  Ball hi{hi_c, r / C};
  if (!ball_avoids_boundary(sc, lo, 64) || !ball_avoids_boundary(sc, hi, 64))
    throw HypothesisError("project_surjective: a pilot ball touches the boundary set");
  Classification cl_lo = sc.classify(lo_c), cl_hi = sc.classify(hi_c);
  if (cl_lo.boundary || cl_hi.boundary || cl_lo.label == cl_hi.label)
    throw HypothesisError("project_surjective: pilot balls lie in the same component");

  SurjectivityReport rep;
  rep.T = HullTwoBalls{lo, hi};
  rep.delta1 = delta1;
  rep.disk_radius = r / (2 * C);
  double res = std::min(r / (8 * C), a / 16);
  rep.S = sc.boundary_sample(res).restricted(
      [&](Point p) { return rep.T.signed_dist(p) <= 0.0; });

  rep.surjective = true;
  int n_lat = sc.dim == 3 ? 8 : 64;
  double slack = 2 * sc.eps_boundary();
  for (int i = 0; i < grid.size() && rep.surjective; ++i) {
    Vec theta = grid.nodes[i];
    std::vector<Point> lat = disk_lattice({0, 0, 0}, theta, rep.disk_radius, n_lat, sc.dim);
    for (const Point& x : lat) {
      ++rep.fibers_checked;
      bool met = false;
      for (Vec v : {theta, theta * -1.0}) {
        auto t = sc.first_hit_from(x, v, 0.0, 2 * a + r);
        if (t && rep.T.signed_dist(x + v * *t) <= slack) {
          met = true;
          break;
        }
      }
      if (!met) {
        rep.surjective = false;
        rep.witness = {theta, x};
        break;
      }
    }
  }
  return rep;
}

}  // namespace gmt
