// SPDX-License-Identifier: Apache-2.0
#include "gmt/geom.hpp"

#include "gmt/common.hpp"

namespace gmt {

std::vector<Point> disk_lattice(Point center, Vec axis, double radius, int n, int ambient_dim) {
  if (n < 1) throw InputError("disk_lattice: n must be >= 1");
  if (!(radius > 0)) throw InputError("disk_lattice: radius must be positive");
  std::vector<Point> out;
  double cell = 2.0 * radius / n;
  double keep = radius - cell;
  if (ambient_dim == 2) {
    // the "disk" is a segment of length 2*radius orthogonal to axis
    Vec u = unit(Vec{-axis.y, axis.x, 0});
    for (int i = 0; i < n; ++i) {
      double s = -radius + (i + 0.5) * cell;
      if (std::fabs(s) <= keep) out.push_back(center + s * u);
    }
    return out;
  }
  Vec b1 = any_perp(unit(axis));
  Vec b2 = unit(cross(unit(axis), b1));
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      double sx = -radius + (ix + 0.5) * cell;
      double sy = -radius + (iy + 0.5) * cell;
      if (std::hypot(sx, sy) <= keep) out.push_back(center + sx * b1 + sy * b2);
    }
  return out;
}

}  // namespace gmt
