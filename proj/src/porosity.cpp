// SPDX-License-Identifier: Apache-2.0
#include "gmt/porosity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gmt {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// interiors of the dyadic interval [j,j+1]*2^-m and the grid cell
// [i,i+1]/n intersect (exact in integers)
bool axis_overlap(std::int64_t j, int m, std::int64_t i, std::int64_t n) {
  std::int64_t pm = std::int64_t(1) << m;
  return j * n < (i + 1) * pm && i * pm < (j + 1) * n;
}

struct CellMask {
  const std::vector<std::uint8_t>* cells;
  int n;
  int d;

  bool get(std::int64_t ix, std::int64_t iy) const {
    return (*cells)[(d == 2 ? size_t(iy) * n : 0) + size_t(ix)] != 0;
  }

  // does the cube interior meet any marked cell
  bool meets(const DyadicCube& q) const {
    int m = q.depth();
    std::int64_t pm = std::int64_t(1) << m;
    std::int64_t lo[2], hi[2];
    for (int ax = 0; ax < d; ++ax) {
      lo[ax] = (q.anchor[ax] * n) / pm;  // first candidate cell
      while (!axis_overlap(q.anchor[ax], m, lo[ax], n)) ++lo[ax];
      hi[ax] = ((q.anchor[ax] + 1) * n + pm - 1) / pm;
      while (hi[ax] > lo[ax] && !axis_overlap(q.anchor[ax], m, hi[ax] - 1, n)) --hi[ax];
    }
    if (d == 1) {
      for (std::int64_t i = lo[0]; i < hi[0]; ++i)
        if (get(i, 0)) return true;
      return false;
    }
    for (std::int64_t iy = lo[1]; iy < hi[1]; ++iy)
      for (std::int64_t ix = lo[0]; ix < hi[0]; ++ix)
        if (get(ix, iy)) return true;
    return false;
  }
};

void complement_rec(const CellMask& mask, const DyadicCube& q, int max_depth,
                    std::vector<DyadicCube>& out) {
  if (!mask.meets(q)) {
    out.push_back(q);
    return;
  }
  if (q.depth() >= max_depth) return;  // single cell, fully marked
  int child_level = q.level - 1;
  int kids = mask.d == 2 ? 4 : 2;
  for (int k = 0; k < kids; ++k) {
    DyadicCube c;
    c.level = child_level;
    c.anchor[0] = q.anchor[0] * 2 + (k & 1);
    c.anchor[1] = mask.d == 2 ? q.anchor[1] * 2 + (k >> 1) : 0;
    complement_rec(mask, c, max_depth, out);
  }
}

}  // namespace

bool DyadicCube::contains(const DyadicCube& other, int d) const {
  if (other.level > level) return false;
  int shift = level - other.level;
  for (int ax = 0; ax < d; ++ax)
    if ((other.anchor[ax] >> shift) != anchor[ax]) return false;
  return true;
}

bool DyadicCube::disjoint(const DyadicCube& other, int d) const {
  return !contains(other, d) && !other.contains(*this, d);
}

std::vector<DyadicCube> complement_cubes(const std::vector<std::uint8_t>& cells, int n, int d) {
  if (d != 1 && d != 2) throw InputError("complement_cubes: d must be 1 or 2");
  if (!is_pow2(n)) throw InputError("complement_cubes: grid side must be a power of two");
  size_t expect = d == 2 ? size_t(n) * n : size_t(n);
  if (cells.size() != expect) throw InputError("complement_cubes: cell mask size mismatch");
  bool any = false;
  for (auto c : cells) any |= c != 0;
  if (!any) throw InputError("complement_cubes: marked set is empty");
  int max_depth = 0;
  while ((1 << max_depth) < n) ++max_depth;
  CellMask mask{&cells, n, d};
  std::vector<DyadicCube> out;
  complement_rec(mask, DyadicCube{}, max_depth, out);
  return out;
}

PackingLedger packing_ledger(const std::vector<DyadicCube>& cubes, int d, double q0_side) {
  if (d != 1 && d != 2) throw InputError("packing_ledger: d must be 1 or 2");
  if (!(q0_side > 0)) throw InputError("packing_ledger: Q0 side must be positive");
  for (size_t i = 0; i < cubes.size(); ++i)
    for (size_t j = i + 1; j < cubes.size(); ++j)
      if (!cubes[i].disjoint(cubes[j], d))
        throw InputError("packing_ledger: cubes overlap");
  // lambda(Q) = sum over family members inside Q of (s_j / s_Q)^{d+1};
  // only ancestors of family members get nonzero values
  std::map<std::pair<int, std::array<std::int64_t, 2>>, double> acc;
  for (const DyadicCube& qj : cubes) {
    double sj = qj.side_rel();
    DyadicCube q = qj;
    while (true) {
      double ratio = sj / q.side_rel();
      acc[{q.level, q.anchor}] += std::pow(ratio, d + 1);
      if (q.level == 0) break;
      q.anchor[0] >>= 1;
      q.anchor[1] >>= 1;
      ++q.level;
    }
  }
  PackingLedger led;
  double total_rel = 0.0;
  for (const auto& [key, lam] : acc) {
    DyadicCube q;
    q.level = key.first;
    q.anchor = key.second;
    led.lambda.push_back({q, lam});
    total_rel += lam * std::pow(q.side_rel(), d);
  }
  led.total = total_rel * std::pow(q0_side, d);
  return led;
}

namespace {

// all dyadic subcubes of q at relative depth j miss no marked cell
bool no_large_gap(const CellMask& mask, const DyadicCube& q, int rel_depth_max) {
  for (int j = 1; j <= rel_depth_max; ++j) {
    std::int64_t side = std::int64_t(1) << j;
    DyadicCube sub;
    sub.level = q.level - j;
    for (std::int64_t sy = 0; sy < (mask.d == 2 ? side : 1); ++sy)
      for (std::int64_t sx = 0; sx < side; ++sx) {
        sub.anchor[0] = q.anchor[0] * side + sx;
        sub.anchor[1] = mask.d == 2 ? q.anchor[1] * side + sy : 0;
        if (!mask.meets(sub)) return false;
      }
  }
  return true;
}

}  // namespace

PorosityResult find_dense_cap(const DirectionGrid& grid, const std::vector<std::uint8_t>& A,
                              double eta, double kappa, double c) {
  if (!(eta > 0) || eta >= 1) throw InputError("find_dense_cap: eta must lie in (0,1)");
  if (!(kappa > 0) || kappa > 1) throw InputError("find_dense_cap: kappa must lie in (0,1]");
  if (!(c > 0)) throw InputError("find_dense_cap: c must be positive");
  if (A.size() != size_t(grid.size())) throw InputError("find_dense_cap: mask size mismatch");
  if (!is_pow2(grid.n)) throw InputError("find_dense_cap: grid side must be a power of two");
  int d = grid.d;
  double cap = cap_measure(d, grid.delta);
  double weight_A = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    if (A[i]) weight_A += grid.weights[i];
  if (weight_A < kappa * cap)
    throw HypothesisError("find_dense_cap: direction set below the kappa density threshold");

  PorosityResult res;
  res.eta = eta;
  res.kappa = kappa;
  res.N0 = std::pow(2.0, d + 2) / (std::pow(eta, d + 1) * c * kappa);

  // largest j with 2^-j >= eta
  int rel_max = 0;
  while (std::ldexp(1.0, -(rel_max + 1)) >= eta) ++rel_max;

  CellMask mask{&A, grid.n, d};
  int max_depth = 0;
  while ((1 << max_depth) < grid.n) ++max_depth;

  double marked_rel = 0.0;
  for (auto v : A) marked_rel += v ? 1.0 : 0.0;
  marked_rel /= double(grid.size());

  bool found = false;
  DyadicCube chosen;
  for (int m = 0; m <= max_depth && !found; ++m) {
    std::int64_t side = std::int64_t(1) << m;
    int meeting = 0;
    for (std::int64_t ay = 0; ay < (d == 2 ? side : 1); ++ay)
      for (std::int64_t ax = 0; ax < side; ++ax) {
        DyadicCube q;
        q.level = -m;
        q.anchor = {ax, ay};
        if (!mask.meets(q)) continue;
        ++meeting;
        if (!found && no_large_gap(mask, q, rel_max)) {
          chosen = q;
          found = true;
        }
      }
    res.cubes_per_level.push_back(meeting);
    res.density_floor.push_back(std::ldexp(marked_rel, m * d - 1));  // M_m
  }
  if (!found)
    throw ResolutionError("find_dense_cap: no stopping cube above the cell scale");
  res.cube = chosen;
  res.level = chosen.depth();

  // theta_A: marked node whose chart point is nearest the cube center,
  // preferring nodes inside the closed cube; index order breaks ties
  double cx = (chosen.lo(0) + chosen.hi(0)) - 1.0;  // unit -> chart/delta twice
  double cy = d == 2 ? (chosen.lo(1) + chosen.hi(1)) - 1.0 : 0.0;
  cx *= grid.delta;
  cy *= grid.delta;
  auto chart_of = [&](int i) -> std::pair<double, double> {
    if (d == 1) return {grid.coord(i), 0.0};
    return {grid.coord(i % grid.n), grid.coord(i / grid.n)};
  };
  auto inside = [&](double qx, double qy) {
    double ux = (qx / grid.delta + 1.0) / 2.0;
    double uy = (qy / grid.delta + 1.0) / 2.0;
    bool ok = ux >= chosen.lo(0) && ux <= chosen.hi(0);
    if (d == 2) ok = ok && uy >= chosen.lo(1) && uy <= chosen.hi(1);
    return ok;
  };
  int best_i = -1;
  double best_d2 = 0.0;
  bool best_inside = false;
  for (int i = 0; i < grid.size(); ++i) {
    if (!A[i]) continue;
    auto [qx, qy] = chart_of(i);
    bool in = inside(qx, qy);
    double d2 = (qx - cx) * (qx - cx) + (qy - cy) * (qy - cy);
    bool better = best_i < 0 || (in && !best_inside) || (in == best_inside && d2 < best_d2);
    if (better) {
      best_i = i;
      best_d2 = d2;
      best_inside = in;
    }
  }
  res.theta_A = grid.nodes[best_i];

  // largest cap ball around theta_A inside the lifted cube
  auto lift_unit = [&](double ux, double uy) {
    return grid.lift((2 * ux - 1) * grid.delta, d == 2 ? (2 * uy - 1) * grid.delta : 0.0);
  };
  double r = std::numeric_limits<double>::infinity();
  if (d == 1) {
    r = std::min(arc_dist(res.theta_A, lift_unit(chosen.lo(0), 0)),
                 arc_dist(res.theta_A, lift_unit(chosen.hi(0), 0)));
  } else {
    const int kSamples = 257;
    for (int edge = 0; edge < 4; ++edge) {
      for (int s = 0; s < kSamples; ++s) {
        double t = double(s) / (kSamples - 1);
        double ux, uy;
        switch (edge) {
          case 0: ux = chosen.lo(0) + t * chosen.side_rel(); uy = chosen.lo(1); break;
          case 1: ux = chosen.lo(0) + t * chosen.side_rel(); uy = chosen.hi(1); break;
          case 2: ux = chosen.lo(0); uy = chosen.lo(1) + t * chosen.side_rel(); break;
          default: ux = chosen.hi(0); uy = chosen.lo(1) + t * chosen.side_rel(); break;
        }
        r = std::min(r, arc_dist(res.theta_A, lift_unit(ux, uy)));
      }
    }
    r *= 1.0 - 1e-9;  // sampled boundary minimum could sit a hair high
  }
  double side_model = 2.0 * grid.delta * chosen.side_rel();
  r = std::min(r, std::min(side_model, grid.delta) * (1.0 - 1e-12));
  res.r_A = r;
  res.c0 = r / grid.delta;

  if (grid.cell_width() > eta * r / 4.0)
    throw ResolutionError("find_dense_cap: grid too coarse to certify the stopping ball");

  // certificate over grid nodes in the cap ball: worst arc gap from a node
  // to the marked set; marked nodes have gap exactly zero and the chart
  // never shrinks lattice distance, so the nearest marked node is found by
  // an index neighbor lookup (d == 1) or an expanding ring scan (d == 2)
  std::vector<int> marked;
  for (int i = 0; i < grid.size(); ++i)
    if (A[i]) marked.push_back(i);
  double w = grid.cell_width();
  double worst = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    if (A[i]) continue;
    if (arc_dist(grid.nodes[i], res.theta_A) > r) continue;
    double g = std::numeric_limits<double>::infinity();
    if (d == 1) {
      auto it = std::lower_bound(marked.begin(), marked.end(), i);
      if (it != marked.end()) g = std::min(g, arc_dist(grid.nodes[i], grid.nodes[*it]));
      if (it != marked.begin()) g = std::min(g, arc_dist(grid.nodes[i], grid.nodes[*(it - 1)]));
    } else {
      int ix = i % grid.n, iy = i / grid.n;
      int r_max = std::max(std::max(ix, grid.n - 1 - ix), std::max(iy, grid.n - 1 - iy));
      for (int R = 1; R <= r_max; ++R) {
        // ring R candidates are at least R cells away in the chart
        if (double(R) * w * (1.0 - 1e-9) >= g) break;
        auto visit = [&](int cx, int cy) {
          if (cx < 0 || cy < 0 || cx >= grid.n || cy >= grid.n) return;
          int k = grid.index(cx, cy);
          if (A[k]) g = std::min(g, arc_dist(grid.nodes[i], grid.nodes[k]));
        };
        for (int s = -R; s <= R; ++s) {
          visit(ix + s, iy - R);
          visit(ix + s, iy + R);
          if (s > -R && s < R) {
            visit(ix - R, iy + s);
            visit(ix + R, iy + s);
          }
        }
      }
    }
    worst = std::max(worst, g);
  }
  res.max_gap = worst;
  double sd = std::sqrt(double(d));
  res.cert_bound = 2.0 * (2.0 * sd * eta * side_model + sd * grid.cell_width());
  res.c2_emp = worst / (eta * r);

  res.ledger = packing_ledger(complement_cubes(A, grid.n, d), d, 2.0 * grid.delta);
  return res;
}

Json PorosityResult::to_json() const {
  Json j;
  j["theta_A"] = {theta_A.x, theta_A.y, theta_A.z};
  j["r_A"] = r_A;
  j["cube"] = {{"level", cube.level}, {"anchor", {cube.anchor[0], cube.anchor[1]}}};
  j["level"] = level;
  j["eta"] = eta;
  j["kappa"] = kappa;
  j["c0"] = c0;
  j["N0"] = N0;
  j["max_gap"] = max_gap;
  j["cert_bound"] = cert_bound;
  j["c2_emp"] = c2_emp;
  j["cubes_per_level"] = cubes_per_level;
  j["density_floor"] = density_floor;
  Json led = Json::array();
  for (const auto& [q, lam] : ledger.lambda)
    led.push_back({{"level", q.level}, {"anchor", {q.anchor[0], q.anchor[1]}}, {"lambda", lam}});
  j["ledger"] = led;
  j["ledger_total"] = ledger.total;
  return j;
}

}  // namespace gmt
