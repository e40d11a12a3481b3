// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gmt/direction_grid.hpp"

#include <array>
#include <cstdint>

namespace gmt {

// Dyadic subcube of the chart square Q0. level is 0 for Q0 itself and
// decreases by one per subdivision, so the relative side is 2^level and
// anchors run in [0, 2^-level) per axis. Any two dyadic cubes are nested
// or have disjoint interiors.
struct DyadicCube {
  int level = 0;  // <= 0
  std::array<std::int64_t, 2> anchor{0, 0};

  double side_rel() const { return std::ldexp(1.0, level); }
  int depth() const { return -level; }
  // closed bounds in unit coordinates of Q0
  double lo(int axis) const { return double(anchor[axis]) * side_rel(); }
  double hi(int axis) const { return double(anchor[axis] + 1) * side_rel(); }

  bool contains(const DyadicCube& other, int d) const;
  bool disjoint(const DyadicCube& other, int d) const;
};

// Carleson packing values lambda(Q) for the ancestors of a disjoint dyadic
// family, and the total sum lambda(Q)|Q|. Entries not listed are zero.
struct PackingLedger {
  std::vector<std::pair<DyadicCube, double>> lambda;
  double total = 0.0;  // in model units, |Q0| = q0_side^d
};

struct PorosityResult {
  Vec theta_A;
  double r_A = 0.0;
  DyadicCube cube;       // the stopping cube
  int level = 0;         // stopping depth (levels below Q0)
  double eta = 0.0, kappa = 0.0;
  double c0 = 0.0;       // achieved r_A / delta
  double N0 = 0.0;       // a-priori stopping bound
  PackingLedger ledger;  // complement-cube packing certificate
  double max_gap = 0.0;     // worst arc distance to A over the certified cap
  double cert_bound = 0.0;  // guaranteed bound on max_gap
  double c2_emp = 0.0;      // max_gap / (eta * r_A)
  std::vector<int> cubes_per_level;  // cubes meeting the projected set, per depth
  std::vector<double> density_floor;  // the M_n lower bounds, per depth

  Json to_json() const;
};

// Maximal dyadic cubes of Q0 whose interiors miss the marked cells. cells
// is a row-major n^d bitmask (x fastest); n must be a power of two so the
// family is finite and exact. Throws when every cell is clear or all set
// behavior: all cells set yields an empty family.
std::vector<DyadicCube> complement_cubes(const std::vector<std::uint8_t>& cells, int n, int d);

// lambda(Q) for every ancestor of the given pairwise disjoint cubes plus
// the packed total, which never exceeds 2 |Q0|. q0_side scales unit
// coordinates to model units.
PackingLedger packing_ledger(const std::vector<DyadicCube>& cubes, int d, double q0_side);

// Dyadic stopping-time search for a direction theta_A in A and a radius
// r_A so that every grid direction within r_A of theta_A lies within
// cert_bound of A (measured by arclength, with c2_emp = max_gap/(eta r_A)
// reported). A is a bitmask over grid nodes.
PorosityResult find_dense_cap(const DirectionGrid& grid, const std::vector<std::uint8_t>& A,
                              double eta, double kappa, double c = 0.5);

}  // namespace gmt
