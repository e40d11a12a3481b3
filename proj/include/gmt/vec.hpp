// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>

#include "gmt/common.hpp"

namespace gmt {

// Point / direction in R^2 or R^3. Planar data keeps z == 0, so one set of
// arithmetic serves both ambient dimensions.
struct Vec {
  double x = 0.0, y = 0.0, z = 0.0;
};

using Point = Vec;

inline Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec operator-(Vec a) { return {-a.x, -a.y, -a.z}; }
inline Vec operator*(double s, Vec a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec operator*(Vec a, double s) { return s * a; }
inline Vec operator/(Vec a, double s) { return {a.x / s, a.y / s, a.z / s}; }

inline bool operator==(Vec a, Vec b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(Vec a, Vec b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec cross(Vec a, Vec b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(Vec a) { return dot(a, a); }
inline double norm(Vec a) { return std::sqrt(norm2(a)); }
inline double dist(Vec a, Vec b) { return norm(a - b); }

inline bool is_finite(Vec a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Unit vector; rejects near-zero input instead of returning garbage.
inline Vec unit(Vec a) {
  double n = norm(a);
  if (!(n > 1e-300) || !std::isfinite(n)) throw InputError("unit: zero or non-finite vector");
  return a / n;
}

inline bool is_unit(Vec a, double tol = 1e-12) { return std::fabs(norm(a) - 1.0) <= tol; }

// Arclength metric on the unit sphere (also valid for unit vectors in R^2).
inline double arc_dist(Vec u, Vec v) { return std::atan2(norm(cross(u, v)), dot(u, v)); }

// Some unit vector orthogonal to u, chosen deterministically.
inline Vec any_perp(Vec u) {
  Vec c = std::fabs(u.x) <= std::fabs(u.y) && std::fabs(u.x) <= std::fabs(u.z)
              ? Vec{1, 0, 0}
              : (std::fabs(u.y) <= std::fabs(u.z) ? Vec{0, 1, 0} : Vec{0, 0, 1});
  return unit(cross(u, c));
}

// Proper rigid motion p -> M p + t. Matrix is row-major 3x3.
struct RigidMotion {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec t{};

  static RigidMotion identity() { return {}; }

  Point apply(Point p) const {
    Vec r{m[0] * p.x + m[1] * p.y + m[2] * p.z, m[3] * p.x + m[4] * p.y + m[5] * p.z,
          m[6] * p.x + m[7] * p.y + m[8] * p.z};
    return r + t;
  }

  // Rotation part only; for directions and normals.
  Vec apply_dir(Vec v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  RigidMotion inverse() const {
    RigidMotion r;
    // transpose of an orthogonal matrix
    r.m = {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
    r.t = -r.apply_dir(t);
    return r;
  }

  // this after other: apply(other.apply(p)).
  RigidMotion compose(const RigidMotion& o) const {
    RigidMotion r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += m[3 * i + k] * o.m[3 * k + j];
        r.m[3 * i + j] = s;
      }
    r.t = apply(o.t);
    return r;
  }
};

// Rotation carrying unit vector `from` to unit vector `to` (Rodrigues).
inline RigidMotion rotation_taking(Vec from, Vec to) {
  Vec a = unit(from), b = unit(to);
  Vec ax = cross(a, b);
  double s = norm(ax), c = dot(a, b);
  RigidMotion r;
  if (s < 1e-14) {
    if (c > 0) return r;  // already aligned
    // 180 degree turn about any axis orthogonal to a
    Vec p = any_perp(a);
    r.m = {2 * p.x * p.x - 1, 2 * p.x * p.y, 2 * p.x * p.z,
           2 * p.y * p.x, 2 * p.y * p.y - 1, 2 * p.y * p.z,
           2 * p.z * p.x, 2 * p.z * p.y, 2 * p.z * p.z - 1};
    return r;
  }
  Vec k = ax / s;
  double kx = k.x, ky = k.y, kz = k.z;
  std::array<double, 9> K = {0, -kz, ky, kz, 0, -kx, -ky, kx, 0};
  // R = I + sin K + (1-cos) K^2
  std::array<double, 9> K2{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0;
      for (int l = 0; l < 3; ++l) v += K[3 * i + l] * K[3 * l + j];
      K2[3 * i + j] = v;
    }
  for (int i = 0; i < 9; ++i) r.m[i] = (i % 4 == 0 ? 1.0 : 0.0) + s * K[i] + (1 - c) * K2[i];
  return r;
}

inline RigidMotion translation(Vec t) {
  RigidMotion r;
  r.t = t;
  return r;
}

}  // namespace gmt
