// SPDX-License-Identifier: Apache-2.0
#include "gmt/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmt {

namespace {


double cross2(Vec a, Vec b) { return a.x * b.y - a.y * b.x; }

double clamp01(double v) { return v < 0 ? 0 : (v > 1 ? 1 : v); }

double point_seg_dist(Point p, Point a, Point b, Point* closest) {
  Vec ab = b - a;
  double len2 = norm2(ab);
  double s = len2 > 1e-300 ? clamp01(dot(p - a, ab) / len2) : 0.0;
  Point c = a + s * ab;
  if (closest) *closest = c;
  return dist(p, c);
}

// Closest approach between ray piece [o + tmin*u, o + tmax*u] and segment
// [p, q]. Returns (t, distance).
std::pair<double, double> ray_seg_closest(Point o, Vec u, double tmin, double tmax, Point p,
                                          Point q) {
  Vec d2 = q - p;
  Vec r = o - p;
  double a = 1.0;  // u unit
  double e = norm2(d2);
  double f = dot(d2, r);
  double c = dot(u, r);
  double b = dot(u, d2);
  double denom = a * e - b * b;
  double t, s;
  if (denom > 1e-300) {
    t = (b * f - c * e) / denom;
  } else {
    t = tmin;  // parallel
  }
  t = std::min(std::max(t, tmin), tmax);
  s = e > 1e-300 ? clamp01((b * t + f) / e) : 0.0;
  // re-clamp t against the clamped s
  t = std::min(std::max(s * b - c, tmin), tmax);
  s = e > 1e-300 ? clamp01((b * t + f) / e) : 0.0;
  double dd = dist(o + t * u, p + s * d2);
  return {t, dd};
}

// Exact ray/segment intersection; overlap of collinear pieces reports entry.
void edge_hits(Point o, Vec u, double tmax, double eps, Point p, Point q,
               std::vector<double>& out) {
  Vec d2 = q - p;
  double den = cross2(u, d2);
  double seg_len = norm(d2);
  if (std::fabs(den) > 1e-14 * std::max(1.0, seg_len)) {
    double t = cross2(p - o, d2) / den;
    double s = cross2(p - o, u) / den;
    double slack = seg_len > 1e-300 ? eps / seg_len : 0.0;
    if (t >= -eps && t <= tmax + eps && s >= -slack && s <= 1.0 + slack) {
      out.push_back(std::min(std::max(t, 0.0), tmax));
    }
    return;
  }
  // parallel: record interval entry when the lines nearly coincide
  double line_gap = seg_len > 1e-300 ? std::fabs(cross2(p - o, u)) : dist(p, o);
  if (line_gap <= eps) {
    double t0 = dot(p - o, u);
    double t1 = dot(q - o, u);
    if (t0 > t1) std::swap(t0, t1);
    if (t1 < 0 || t0 > tmax) return;
    out.push_back(std::min(std::max(t0, 0.0), tmax));
  }
}

// Real roots of x^3 + P x + Q = 0, Newton-polished.
int cubic_roots(double P, double Q, double roots[3]) {
  int n = 0;
  double disc = Q * Q / 4.0 + P * P * P / 27.0;
  if (disc >= 0) {
    double sq = std::sqrt(disc);
    double u = std::cbrt(-Q / 2.0 + sq);
    double v = std::cbrt(-Q / 2.0 - sq);
    roots[n++] = u + v;
  } else {
    double m = 2.0 * std::sqrt(-P / 3.0);
    double arg = 3.0 * Q / (P * m);
    arg = std::min(1.0, std::max(-1.0, arg));
    double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots[n++] = m * std::cos(theta - 2.0 * kPi * k / 3.0);
  }
  for (int i = 0; i < n; ++i) {
    for (int it = 0; it < 2; ++it) {
      double x = roots[i];
      double fx = x * x * x + P * x + Q;
      double dfx = 3 * x * x + P;
      if (std::fabs(dfx) > 1e-300) roots[i] = x - fx / dfx;
    }
  }
  return n;
}

// Distance from p to the branch {y = s x^2}; fills the minimizing point.
double parabola_branch_dist(double s, Point p, Point* closest) {
  // d/dx [ (x-px)^2 + (s x^2 - py)^2 ] = 0
  // => 2 s^2 x^3 + (1 - 2 s py) x - px = 0
  double A = 2.0 * s * s;
  double P = (1.0 - 2.0 * s * p.y) / A;
  double Q = -p.x / A;
  double roots[3];
  int n = cubic_roots(P, Q, roots);
  double best = kInf;
  Point bp{};
  for (int i = 0; i < n; ++i) {
    double x = roots[i];
    Point c{x, s * x * x, 0};
    double d = dist(p, c);
    if (d < best) {
      best = d;
      bp = c;
    }
  }
  if (closest) *closest = bp;
  return best;
}

struct BoxInterval {
  double t0, t1;
  bool hit;
};

BoxInterval box_interval(const SolidBox& bx, Point o, Vec u, double tmax) {
  double t0 = 0.0, t1 = tmax;
  const double olo[3] = {bx.lo.x, bx.lo.y, bx.lo.z};
  const double ohi[3] = {bx.hi.x, bx.hi.y, bx.hi.z};
  const double oo[3] = {o.x, o.y, o.z};
  const double uu[3] = {u.x, u.y, u.z};
  for (int k = 0; k < 2; ++k) {  // planar boxes: x and y slabs
    if (std::fabs(uu[k]) < 1e-300) {
      if (oo[k] < olo[k] || oo[k] > ohi[k]) return {0, 0, false};
      continue;
    }
    double a = (olo[k] - oo[k]) / uu[k];
    double b = (ohi[k] - oo[k]) / uu[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return {0, 0, false};
  }
  return {t0, t1, true};
}

}  // namespace

double prim_distance(const Primitive& pr, Point p) {
  return dist(p, prim_closest(pr, p));
}

Point prim_closest(const Primitive& pr, Point p) {
  if (auto* h = std::get_if<HalfSpace>(&pr)) {
    return p - (dot(h->normal, p) - h->offset) * h->normal;
  }
  if (auto* s = std::get_if<Sphere>(&pr)) {
    Vec r = p - s->center;
    double n = norm(r);
    if (n < 1e-300) return s->center + Vec{s->radius, 0, 0};
    return s->center + (s->radius / n) * r;
  }
  if (auto* pl = std::get_if<Polyline>(&pr)) {
    double best = kInf;
    Point bp = pl->pts.empty() ? p : pl->pts[0];
    size_t m = pl->pts.size();
    size_t edges = pl->closed ? m : (m ? m - 1 : 0);
    for (size_t i = 0; i < edges; ++i) {
      Point c;
      double d = point_seg_dist(p, pl->pts[i], pl->pts[(i + 1) % m], &c);
      if (d < best) {
        best = d;
        bp = c;
      }
    }
    return bp;
  }
  if (auto* pa = std::get_if<Parabola>(&pr)) {
    Point cu, cl;
    double du = parabola_branch_dist(pa->scale, p, &cu);
    Point pm{p.x, -p.y, 0};
    double dl = parabola_branch_dist(pa->scale, pm, &cl);
    if (du <= dl) return cu;
    return {cl.x, -cl.y, 0};
  }
  const SolidBox& bx = std::get<SolidBox>(pr);
  Point c{std::min(std::max(p.x, bx.lo.x), bx.hi.x), std::min(std::max(p.y, bx.lo.y), bx.hi.y),
          std::min(std::max(p.z, bx.lo.z), bx.hi.z)};
  return c;  // p itself when inside: the solid is part of the set
}

int prim_side(const Primitive& pr, Point p) {
  if (auto* h = std::get_if<HalfSpace>(&pr)) {
    return dot(h->normal, p) - h->offset >= 0 ? +1 : -1;
  }
  if (auto* s = std::get_if<Sphere>(&pr)) {
    return dist(p, s->center) < s->radius ? -1 : +1;
  }
  if (auto* pl = std::get_if<Polyline>(&pr)) {
    if (pl->side_rule == SideRule::None) return 0;
    if (pl->side_rule == SideRule::Vertical) {
      const auto& v = pl->pts;
      if (v.size() < 2) return 0;
      if (p.x <= v.front().x) return p.y >= v.front().y ? +1 : -1;
      if (p.x >= v.back().x) return p.y >= v.back().y ? +1 : -1;
      size_t lo = 0, hi = v.size() - 1;
      while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        (v[mid].x <= p.x ? lo : hi) = mid;
      }
      double fx = v[lo].y;
      double dx = v[hi].x - v[lo].x;
      if (dx > 1e-300) fx += (p.x - v[lo].x) * (v[hi].y - v[lo].y) / dx;
      return p.y >= fx ? +1 : -1;
    }
    // EvenOdd parity
    bool inside = false;
    size_t m = pl->pts.size();
    for (size_t i = 0, j = m - 1; i < m; j = i++) {
      const Point& pi = pl->pts[i];
      const Point& pj = pl->pts[j];
      if ((pi.y > p.y) != (pj.y > p.y)) {
        double xint = pi.x + (p.y - pi.y) * (pj.x - pi.x) / (pj.y - pi.y);
        if (p.x < xint) inside = !inside;
      }
    }
    return inside ? +1 : -1;
  }
  if (auto* pa = std::get_if<Parabola>(&pr)) {
    double q = pa->scale * p.x * p.x;
    if (p.y > q) return +1;
    if (p.y < -q) return -1;
    return 0;
  }
  const SolidBox& bx = std::get<SolidBox>(pr);
  bool in = p.x >= bx.lo.x && p.x <= bx.hi.x && p.y >= bx.lo.y && p.y <= bx.hi.y;
  return in ? 0 : -1;  // the filled box is part of the boundary set
}

namespace {

void prim_hits_impl(const Primitive& pr, Point origin, Vec dir, double tmax, double eps,
                    std::vector<double>& out) {
  if (auto* h = std::get_if<HalfSpace>(&pr)) {
    double den = dot(h->normal, dir);
    double g0 = dot(h->normal, origin) - h->offset;
    if (std::fabs(den) < 1e-14) {
      if (std::fabs(g0) <= eps) out.push_back(0.0);  // running inside the plane
      return;
    }
    double t = -g0 / den;
    if (t >= -eps && t <= tmax + eps) out.push_back(std::min(std::max(t, 0.0), tmax));
    return;
  }
  if (auto* s = std::get_if<Sphere>(&pr)) {
    Vec ao = origin - s->center;
    double b = dot(ao, dir);
    double c = norm2(ao) - s->radius * s->radius;
    double disc = b * b - c;
    if (disc < 0) {
      // near-tangent: closest approach of the line within the thickening band
      double t = -b;
      if (t >= 0 && t <= tmax) {
        double dline = norm(ao + t * dir);
        if (std::fabs(dline - s->radius) <= eps) out.push_back(t);
      }
      return;
    }
    double sq = std::sqrt(disc);
    for (double t : {-b - sq, -b + sq}) {
      if (t >= -eps && t <= tmax + eps) out.push_back(std::min(std::max(t, 0.0), tmax));
    }
    return;
  }
  if (auto* pl = std::get_if<Polyline>(&pr)) {
    size_t m = pl->pts.size();
    size_t edges = pl->closed ? m : (m ? m - 1 : 0);
    for (size_t i = 0; i < edges; ++i) {
      size_t before = out.size();
      edge_hits(origin, dir, tmax, eps, pl->pts[i], pl->pts[(i + 1) % m], out);
      if (out.size() == before) {
        auto [t, d] = ray_seg_closest(origin, dir, 0.0, tmax, pl->pts[i], pl->pts[(i + 1) % m]);
        if (d <= eps) out.push_back(t);
      }
    }
    return;
  }
  if (auto* pa = std::get_if<Parabola>(&pr)) {
    for (int branch = 0; branch < 2; ++branch) {
      double sgn = branch == 0 ? 1.0 : -1.0;
      // s*(ox + t ux)^2 = sgn*(oy + t uy)
      double s = pa->scale;
      double A = s * dir.x * dir.x;
      double B = 2 * s * origin.x * dir.x - sgn * dir.y;
      double C = s * origin.x * origin.x - sgn * origin.y;
      if (std::fabs(A) < 1e-16) {
        if (std::fabs(B) > 1e-300) {
          double t = -C / B;
          if (t >= -eps && t <= tmax + eps) out.push_back(std::min(std::max(t, 0.0), tmax));
        }
        continue;
      }
      double disc = B * B - 4 * A * C;
      if (disc < 0) continue;
      double sq = std::sqrt(disc);
      for (double t : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)}) {
        if (t >= -eps && t <= tmax + eps) out.push_back(std::min(std::max(t, 0.0), tmax));
      }
    }
    return;
  }
  const SolidBox& bx = std::get<SolidBox>(pr);
  auto iv = box_interval(bx, origin, dir, tmax);
  if (iv.hit && iv.t0 <= tmax) out.push_back(iv.t0);
}

}  // namespace

void prim_hits(const Primitive& pr, Point origin, Vec dir, double tmax, double eps,
               std::vector<double>& out) {
  size_t start = out.size();
  prim_hits_impl(pr, origin, dir, tmax, eps, out);
  std::sort(out.begin() + ptrdiff_t(start), out.end());
  // merge coincident parameters (vertex double counts)
  auto last = std::unique(out.begin() + ptrdiff_t(start), out.end(), [](double a, double b) {
    return std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a));
  });
  out.erase(last, out.end());
}

bool prim_bounded(const Primitive& pr) {
  return !std::holds_alternative<HalfSpace>(pr) && !std::holds_alternative<Parabola>(pr);
}

EdgeGrid EdgeGrid::build(const std::vector<Point>& pts, bool closed, int target_bins) {
  EdgeGrid g;
  if (pts.size() < 2) return g;
  Point lo = pts[0], hi = pts[0];
  for (const Point& p : pts) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  double w = std::max(hi.x - lo.x, 1e-12), h = std::max(hi.y - lo.y, 1e-12);
  double area = w * h;
  double cell = std::sqrt(area / std::max(target_bins, 16));
  g.nx = std::max(1, std::min(4096, int(std::ceil(w / cell))));
  g.ny = std::max(1, std::min(4096, int(std::ceil(h / cell))));
  g.cell = std::max(w / g.nx, h / g.ny);
  g.nx = int(std::ceil(w / g.cell)) + 1;
  g.ny = int(std::ceil(h / g.cell)) + 1;
  g.lo = lo;
  g.bins.assign(size_t(g.nx) * g.ny, {});
  size_t m = pts.size();
  size_t edges = closed ? m : m - 1;
  for (size_t i = 0; i < edges; ++i) {
    Point a = pts[i], b = pts[(i + 1) % m];
    int x0 = int((std::min(a.x, b.x) - lo.x) / g.cell);
    int x1 = int((std::max(a.x, b.x) - lo.x) / g.cell);
    int y0 = int((std::min(a.y, b.y) - lo.y) / g.cell);
    int y1 = int((std::max(a.y, b.y) - lo.y) / g.cell);
    x0 = std::max(0, std::min(x0, g.nx - 1));
    x1 = std::max(0, std::min(x1, g.nx - 1));
    y0 = std::max(0, std::min(y0, g.ny - 1));
    y1 = std::max(0, std::min(y1, g.ny - 1));
    for (int yy = y0; yy <= y1; ++yy)
      for (int xx = x0; xx <= x1; ++xx) g.bins[size_t(yy) * g.nx + xx].push_back(int(i));
  }
  return g;
}

std::optional<double> EdgeGrid::first_hit(const std::vector<Point>& pts, bool closed,
                                          Point origin, Vec dir, double tmin, double tmax,
                                          double eps) const {
  if (bins.empty()) return std::nullopt;
  size_t m = pts.size();
  auto test_edge = [&](int i, double& best) {
    Point a = pts[i], b = pts[(i + 1) % m];
    std::vector<double> ts;
    edge_hits(origin, dir, tmax, eps, a, b, ts);
    if (ts.empty()) {
      auto [t, d] = ray_seg_closest(origin, dir, tmin, tmax, a, b);
      if (d <= eps) ts.push_back(t);
    }
    for (double t : ts)
      if (t >= tmin && t < best) best = t;
  };
  // clip the ray to the grid box
  double bx0 = lo.x, by0 = lo.y;
  double bx1 = lo.x + nx * cell, by1 = lo.y + ny * cell;
  double t0 = tmin, t1 = tmax;
  for (int k = 0; k < 2; ++k) {
    double o = k == 0 ? origin.x : origin.y;
    double u = k == 0 ? dir.x : dir.y;
    double blo = k == 0 ? bx0 : by0;
    double bhi = k == 0 ? bx1 : by1;
    if (std::fabs(u) < 1e-300) {
      if (o < blo || o > bhi) return std::nullopt;
      continue;
    }
    double a = (blo - o) / u, b2 = (bhi - o) / u;
    if (a > b2) std::swap(a, b2);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b2);
    if (t0 > t1) return std::nullopt;
  }
  double best = kInf;
  // DDA cell walk
  Point p0 = origin + t0 * dir;
  int cx = std::max(0, std::min(nx - 1, int((p0.x - lo.x) / cell)));
  int cy = std::max(0, std::min(ny - 1, int((p0.y - lo.y) / cell)));
  int sx = dir.x > 0 ? 1 : -1, sy = dir.y > 0 ? 1 : -1;
  double tdx = std::fabs(dir.x) > 1e-300 ? cell / std::fabs(dir.x) : kInf;
  double tdy = std::fabs(dir.y) > 1e-300 ? cell / std::fabs(dir.y) : kInf;
  double nextx =
      std::fabs(dir.x) > 1e-300
          ? t0 + ((dir.x > 0 ? (lo.x + (cx + 1) * cell - p0.x) : (p0.x - (lo.x + cx * cell))) /
                  std::fabs(dir.x))
          : kInf;
  double nexty =
      std::fabs(dir.y) > 1e-300
          ? t0 + ((dir.y > 0 ? (lo.y + (cy + 1) * cell - p0.y) : (p0.y - (lo.y + cy * cell))) /
                  std::fabs(dir.y))
          : kInf;
  double tcur = t0;
  while (tcur <= t1 + 1e-300) {
    for (int ei : bins[size_t(cy) * nx + cx]) test_edge(ei, best);
    double texit = std::min(nextx, nexty);
    if (best <= texit + eps) break;  // nothing ahead can beat a hit behind the exit
    if (texit > t1) break;
    if (nextx <= nexty) {
      cx += sx;
      nextx += tdx;
    } else {
      cy += sy;
      nexty += tdy;
    }
    if (cx < 0 || cy < 0 || cx >= nx || cy >= ny) break;
    tcur = texit;
  }
  if (best <= tmax) return best;
  return std::nullopt;
}

double EdgeGrid::distance(const std::vector<Point>& pts, bool closed, Point p,
                          Point* closest) const {
  size_t m = pts.size();
  size_t edges = closed ? m : m - 1;
  if (bins.empty()) {
    double best = kInf;
    for (size_t i = 0; i < edges; ++i) {
      Point c;
      double d = point_seg_dist(p, pts[i], pts[(i + 1) % m], &c);
      if (d < best) {
        best = d;
        if (closest) *closest = c;
      }
    }
    return best;
  }
  int cx = std::max(0, std::min(nx - 1, int((p.x - lo.x) / cell)));
  int cy = std::max(0, std::min(ny - 1, int((p.y - lo.y) / cell)));
  double best = kInf;
  int maxk = std::max(nx, ny);
  for (int k = 0; k <= maxk; ++k) {
    // ring of Chebyshev radius k around (cx, cy)
    for (int yy = cy - k; yy <= cy + k; ++yy) {
      if (yy < 0 || yy >= ny) continue;
      for (int xx = cx - k; xx <= cx + k; ++xx) {
        if (xx < 0 || xx >= nx) continue;
        if (std::max(std::abs(xx - cx), std::abs(yy - cy)) != k) continue;
        for (int ei : bins[size_t(yy) * nx + xx]) {
          Point c;
          double d = point_seg_dist(p, pts[ei], pts[(ei + 1) % m], &c);
          if (d < best) {
            best = d;
            if (closest) *closest = c;
          }
        }
      }
    }
    // everything outside the explored square is at least this far away
    double guard = k * cell - std::fabs(p.x - (lo.x + (cx + 0.5) * cell)) -
                   std::fabs(p.y - (lo.y + (cy + 0.5) * cell)) - 2 * cell;
    if (best < guard) break;
  }
  return best;
}

}  // namespace gmt
