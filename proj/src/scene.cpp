// SPDX-License-Identifier: Apache-2.0
#include "gmt/scene.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace gmt {

namespace {


// Primitives with > this many edges get a grid index.
constexpr size_t kIndexThreshold = 256;

char side_char(int s) { return s > 0 ? '+' : (s < 0 ? '-' : '0'); }

}  // namespace

double BoundarySample::total() const {
  double s = 0;
  for (double v : w) s += v;
  return s;
}

BoundarySample BoundarySample::restricted(const std::function<bool(Point)>& keep) const {
  BoundarySample out;
  out.resolution = resolution;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (keep(pts[i])) {
      out.pts.push_back(pts[i]);
      out.w.push_back(w[i]);
    }
  }
  return out;
}

void BoundarySample::build_index() const {
  if (!bins_.empty() || pts.empty()) return;
  Point lo = pts[0], hi = pts[0];
  for (const Point& p : pts) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  double span = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z, 1e-9});
  grid_cell_ = std::max(span / 192.0, resolution > 0 ? 2.0 * resolution : span / 192.0);
  grid_lo_ = lo;
  grid_nx_ = int((hi.x - lo.x) / grid_cell_) + 2;
  grid_ny_ = int((hi.y - lo.y) / grid_cell_) + 2;
  grid_nz_ = int((hi.z - lo.z) / grid_cell_) + 2;
  bins_.assign(size_t(grid_nx_) * grid_ny_ * grid_nz_, {});
  for (size_t i = 0; i < pts.size(); ++i) {
    int cx = int((pts[i].x - lo.x) / grid_cell_);
    int cy = int((pts[i].y - lo.y) / grid_cell_);
    int cz = int((pts[i].z - lo.z) / grid_cell_);
    bins_[(size_t(cz) * grid_ny_ + cy) * grid_nx_ + cx].push_back(int(i));
  }
}

std::vector<int> BoundarySample::in_ball(Point q, double r) const {
  std::vector<int> out;
  if (pts.empty()) return out;
  build_index();
  int x0 = std::max(0, int((q.x - r - grid_lo_.x) / grid_cell_));
  int x1 = std::min(grid_nx_ - 1, int((q.x + r - grid_lo_.x) / grid_cell_));
  int y0 = std::max(0, int((q.y - r - grid_lo_.y) / grid_cell_));
  int y1 = std::min(grid_ny_ - 1, int((q.y + r - grid_lo_.y) / grid_cell_));
  int z0 = std::max(0, int((q.z - r - grid_lo_.z) / grid_cell_));
  int z1 = std::min(grid_nz_ - 1, int((q.z + r - grid_lo_.z) / grid_cell_));
  if (x1 < x0 || y1 < y0 || z1 < z0) return out;
  double r2 = r * r;
  for (int zz = z0; zz <= z1; ++zz)
    for (int yy = y0; yy <= y1; ++yy)
      for (int xx = x0; xx <= x1; ++xx)
        for (int i : bins_[(size_t(zz) * grid_ny_ + yy) * grid_nx_ + xx])
          if (norm2(pts[i] - q) <= r2) out.push_back(i);
  std::sort(out.begin(), out.end());
  return out;
}

void Scene::finalize() {
  if (dim != 2 && dim != 3) throw InputError("scene: dimension must be 2 or 3");
  if (!(window.radius > 0)) throw InputError("scene: window radius must be positive");
  for (auto& pr : prims) {
    if (auto* h = std::get_if<HalfSpace>(&pr)) {
      double n = norm(h->normal);
      if (!(n > 1e-300)) throw InputError("scene: halfspace with zero normal");
      h->normal = h->normal / n;
      h->offset /= n;
    }
    if (auto* s = std::get_if<Sphere>(&pr)) {
      if (!(s->radius > 0)) throw InputError("scene: sphere with nonpositive radius");
    }
  }
  grids_.assign(prims.size(), std::nullopt);
  clipped = false;
  for (size_t i = 0; i < prims.size(); ++i) {
    if (!prim_bounded(prims[i])) clipped = true;
    if (auto* pl = std::get_if<Polyline>(&prims[i])) {
      for (const Point& p : pl->pts)
        if (!window.contains(p, window.radius * 1e-9)) clipped = true;
      if (pl->pts.size() > kIndexThreshold)
        grids_[i] = EdgeGrid::build(pl->pts, pl->closed, int(pl->pts.size()) * 2);
    }
  }
  if (label_map.empty()) {
    // probe the window for realizable side patterns
    std::set<std::string> pats;
    int n = dim == 2 ? 96 : 24;
    double R = window.radius;
    for (int iz = 0; iz < (dim == 3 ? n : 1); ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
          Point p = window.center + Vec{(2.0 * (ix + 0.5) / n - 1.0) * R,
                                        (2.0 * (iy + 0.5) / n - 1.0) * R,
                                        dim == 3 ? (2.0 * (iz + 0.5) / n - 1.0) * R : 0.0};
          if (!window.contains(p)) continue;
          if (distance_model(p) <= 4 * eps_boundary()) continue;
          pats.insert(side_pattern(p));
        }
    int k = 0;
    for (const auto& s : pats) label_map.emplace_back(s, "c" + std::to_string(k++));
  }
  std::sort(label_map.begin(), label_map.end());
}

double Scene::prim_set_distance(int i, Point model_p, Point* closest) const {
  const Primitive& pr = prims[i];
  if (grids_[i]) {
    const auto* pl = std::get_if<Polyline>(&pr);
    return grids_[i]->distance(pl->pts, pl->closed, model_p, closest);
  }
  Point c = prim_closest(pr, model_p);
  if (closest) *closest = c;
  return dist(model_p, c);
}

double Scene::distance_model(Point pm) const {
  double best = kInf;
  for (size_t i = 0; i < prims.size(); ++i)
    best = std::min(best, prim_set_distance(int(i), pm, nullptr));
  return best;
}

double Scene::distance(Point p) const { return distance_model(model_from_world.apply(p)); }

Point Scene::closest_boundary(Point p) const {
  Point pm = model_from_world.apply(p);
  double best = kInf;
  Point bc = pm;
  for (size_t i = 0; i < prims.size(); ++i) {
    Point c;
    double d = prim_set_distance(int(i), pm, &c);
    if (d < best) {
      best = d;
      bc = c;
    }
  }
  return model_from_world.inverse().apply(bc);
}

std::string Scene::side_pattern(Point pm) const {
  std::string s;
  s.reserve(prims.size());
  for (const auto& pr : prims) s.push_back(side_char(prim_side(pr, pm)));
  return s;
}

Classification Scene::classify(Point p, double eps) const {
  Point pm = model_from_world.apply(p);
  if (!window.contains(pm, window.radius * 1e-12))
    throw InputError("classify: point outside the scene window");
  if (distance_model(pm) <= eps) return {true, ""};
  std::string pat = side_pattern(pm);
  auto it = std::lower_bound(label_map.begin(), label_map.end(), pat,
                             [](const auto& a, const std::string& b) { return a.first < b; });
  if (it != label_map.end() && it->first == pat) return {false, it->second};
  return {false, "region:" + pat};
}

std::optional<double> Scene::first_hit_from(Point origin, Vec dir, double tmin,
                                            double tmax) const {
  Point om = model_from_world.apply(origin);
  Vec dm = model_from_world.apply_dir(dir);
  double eps = eps_boundary();
  double best = kInf;
  std::vector<double> buf;
  for (size_t i = 0; i < prims.size(); ++i) {
    if (grids_[i]) {
      const auto* pl = std::get_if<Polyline>(&prims[i]);
      auto t = grids_[i]->first_hit(pl->pts, pl->closed, om, dm, tmin, std::min(tmax, best), eps);
      if (t && *t < best) best = *t;
      continue;
    }
    buf.clear();
    prim_hits(prims[i], om, dm, tmax, eps, buf);
    for (double t : buf) {
      if (t < tmin || t >= best) continue;
      if (!window.contains(om + t * dm, window.radius * 1e-9)) continue;
      best = t;
    }
  }
  if (best <= tmax) return best;
  return std::nullopt;
}

std::optional<Hit> Scene::first_hit(const Segment& s) const {
  double len = s.length();
  if (!(len > 0)) throw InputError("first_hit: degenerate segment");
  Vec u = (s.b - s.a) / len;
  double shrink = eps_self();
  double tmin = 0.0, tmax = len;
  if (s.openness == Openness::Open || s.openness == Openness::HalfOpenA) tmin = shrink;
  if (s.openness == Openness::Open || s.openness == Openness::HalfOpenB) tmax = len - shrink;
  if (tmin >= tmax) return std::nullopt;
  auto t = first_hit_from(s.a, u, tmin, tmax);
  if (!t) return std::nullopt;
  return Hit{s.a + *t * u, *t};
}

bool Scene::segment_clear(Point a, Point b) const {
  double len = dist(a, b);
  double shrink = eps_self();
  if (len <= 2 * shrink) return true;  // empty open core
  Vec u = (b - a) / len;
  return !first_hit_from(a, u, shrink, len - shrink).has_value();
}

std::vector<std::string> Scene::labels() const {
  std::vector<std::string> out;
  out.reserve(label_map.size());
  for (const auto& kv : label_map) out.push_back(kv.second);
  return out;
}

namespace {

// ceil(span / res) with a hard cap; keeps the int cast below from overflowing.
int lattice_count(double span, double res, int floor_n) {
  double nd = std::ceil(span / res);
  if (nd > 1e9) throw ResolutionError("boundary_sample: lattice would exceed 1e9 points");
  return std::max(floor_n, int(nd));
}

void sample_halfspace(const HalfSpace& h, const Ball& win, int dim, double res,
                      BoundarySample& out) {
  double g = dot(h.normal, win.center) - h.offset;
  if (std::fabs(g) >= win.radius) return;
  Point foot = win.center - g * h.normal;
  double half = std::sqrt(win.radius * win.radius - g * g);
  if (dim == 2) {
    Vec tang = unit(Vec{-h.normal.y, h.normal.x, 0});
    int n = lattice_count(2 * half, res, 1);
    double step = 2 * half / n;
    for (int i = 0; i < n; ++i) {
      out.pts.push_back(foot + (-half + (i + 0.5) * step) * tang);
      out.w.push_back(step);
    }
    return;
  }
  // plane section of the window is a disk of radius `half`
  Vec b1 = any_perp(h.normal);
  Vec b2 = unit(cross(h.normal, b1));
  int n = lattice_count(2 * half, res, 2);
  double step = 2 * half / n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      double u = -half + (ix + 0.5) * step;
      double v = -half + (iy + 0.5) * step;
      double rr = std::hypot(u, v);
      if (rr <= half - step) {
        out.pts.push_back(foot + u * b1 + v * b2);
        out.w.push_back(step * step);
      } else if (rr <= half + step) {
        // rim cell: fractional weight by subsampling
        int in = 0;
        for (int sy = 0; sy < 4; ++sy)
          for (int sx = 0; sx < 4; ++sx) {
            double uu = u + (-0.5 + (sx + 0.5) / 4.0) * step;
            double vv = v + (-0.5 + (sy + 0.5) / 4.0) * step;
            if (std::hypot(uu, vv) <= half) ++in;
          }
        if (in > 0) {
          out.pts.push_back(foot + u * b1 + v * b2);
          out.w.push_back(step * step * in / 16.0);
        }
      }
    }
}

void sample_sphere(const Sphere& s, const Ball& win, int dim, double res, BoundarySample& out) {
  if (dim == 2) {
    int n = lattice_count(2 * kPi * s.radius, res, 8);
    double dphi = 2 * kPi / n;
    for (int i = 0; i < n; ++i) {
      double phi = (i + 0.5) * dphi;
      Point p = s.center + Vec{s.radius * std::cos(phi), s.radius * std::sin(phi), 0};
      if (win.contains(p)) {
        out.pts.push_back(p);
        out.w.push_back(s.radius * dphi);
      }
    }
    return;
  }
  int nb = lattice_count(kPi * s.radius, res, 4);
  for (int ib = 0; ib < nb; ++ib) {
    double ph0 = kPi * ib / nb, ph1 = kPi * (ib + 1) / nb;
    double phm = 0.5 * (ph0 + ph1);
    double band_area = 2 * kPi * s.radius * s.radius * (std::cos(ph0) - std::cos(ph1));
    int nr = lattice_count(2 * kPi * s.radius * std::sin(phm), res, 4);
    for (int ir = 0; ir < nr; ++ir) {
      double az = 2 * kPi * (ir + 0.5) / nr;
      Point p = s.center + s.radius * Vec{std::sin(phm) * std::cos(az),
                                          std::sin(phm) * std::sin(az), std::cos(phm)};
      if (win.contains(p)) {
        out.pts.push_back(p);
        out.w.push_back(band_area / nr);
      }
    }
  }
}

void sample_polyline(const Polyline& pl, const Ball& win, double res, BoundarySample& out) {
  size_t m = pl.pts.size();
  size_t edges = pl.closed ? m : (m ? m - 1 : 0);
  for (size_t i = 0; i < edges; ++i) {
    Point a = pl.pts[i], b = pl.pts[(i + 1) % m];
    double len = dist(a, b);
    if (!(len > 0)) continue;
    int n = lattice_count(len, res, 1);
    double step = len / n;
    Vec u = (b - a) / len;
    for (int k = 0; k < n; ++k) {
      Point p = a + (k + 0.5) * step * u;
      if (win.contains(p)) {
        out.pts.push_back(p);
        out.w.push_back(step);
      }
    }
  }
}

void sample_parabola(const Parabola& pa, const Ball& win, double res, BoundarySample& out) {
  double xmax = win.radius + std::fabs(win.center.x);
  int n = lattice_count(2 * xmax, 0.5 * res, 2);
  double dx = 2 * xmax / n;
  for (int branch = 0; branch < 2; ++branch) {
    double sgn = branch == 0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) {
      double x = -xmax + (i + 0.5) * dx;
      Point p{x, sgn * pa.scale * x * x, 0};
      if (!win.contains(p)) continue;
      double arc = std::sqrt(1.0 + 4.0 * pa.scale * pa.scale * x * x) * dx;
      out.pts.push_back(p);
      out.w.push_back(arc);
    }
  }
}

void sample_box(const SolidBox& bx, const Ball& win, double res, BoundarySample& out) {
  Point c00 = bx.lo, c11 = bx.hi;
  Point c10{bx.hi.x, bx.lo.y, 0}, c01{bx.lo.x, bx.hi.y, 0};
  Polyline rect{{c00, c10, c11, c01}, true, SideRule::None};
  sample_polyline(rect, win, res, out);
}

// Clipped variants below rebuild the exact lattices above and enumerate only
// indices whose point can land inside the query ball; every emitted point is
// still re-tested against the ball afterwards, so a clip only has to be a
// superset. Emission order matches the full samplers.

// Inclusive index range hitting origin + (i + 0.5) * step inside [s0, s1],
// padded by one step each side. Empty when lo > hi.
struct IndexRange {
  long lo = 0, hi = -1;
};

IndexRange lattice_range(double s0, double s1, double origin, double step, long n) {
  IndexRange r;
  if (!(step > 0) || n <= 0 || !(s1 >= s0)) return r;
  double a = std::floor((s0 - origin) / step - 0.5) - 1.0;
  double b = std::ceil((s1 - origin) / step - 0.5) + 1.0;
  a = std::max(a, 0.0);
  b = std::min(b, double(n - 1));
  if (a > b) return r;
  r.lo = long(a);
  r.hi = long(b);
  return r;
}

void local_halfspace(const HalfSpace& h, const Ball& win, double res, const Ball& nb,
                     BoundarySample& out) {
  double g = dot(h.normal, win.center) - h.offset;
  if (std::fabs(g) >= win.radius) return;
  Point foot = win.center - g * h.normal;
  double half = std::sqrt(win.radius * win.radius - g * g);
  Vec tang = unit(Vec{-h.normal.y, h.normal.x, 0});
  int n = lattice_count(2 * half, res, 1);
  double step = 2 * half / n;
  double s = dot(nb.center - foot, tang);
  IndexRange rg = lattice_range(s - nb.radius, s + nb.radius, -half, step, n);
  for (long i = rg.lo; i <= rg.hi; ++i) {
    out.pts.push_back(foot + (-half + (i + 0.5) * step) * tang);
    out.w.push_back(step);
  }
}

void local_sphere(const Sphere& s, const Ball& win, double res, const Ball& nb,
                  BoundarySample& out) {
  int n = lattice_count(2 * kPi * s.radius, res, 8);
  double dphi = 2 * kPi / n;
  Vec d = nb.center - s.center;
  double rho = norm(d);
  double t;  // cos of the angular reach of the ball around its azimuth
  if (rho > 0)
    t = (s.radius * s.radius + rho * rho - nb.radius * nb.radius) / (2 * s.radius * rho);
  else
    t = s.radius <= nb.radius ? -2.0 : 2.0;
  if (t > 1.0) return;
  std::vector<int> idx;
  if (t <= -1.0) {
    idx.resize(size_t(n));
    for (int i = 0; i < n; ++i) idx[size_t(i)] = i;
  } else {
    double az0 = std::atan2(d.y, d.x);
    double dmax = std::acos(t);
    long j0 = long(std::floor((az0 - dmax) / dphi - 0.5)) - 1;
    long j1 = long(std::ceil((az0 + dmax) / dphi - 0.5)) + 1;
    if (j1 - j0 + 1 >= n) {
      idx.resize(size_t(n));
      for (int i = 0; i < n; ++i) idx[size_t(i)] = i;
    } else {
      for (long j = j0; j <= j1; ++j) idx.push_back(int(((j % n) + n) % n));
      std::sort(idx.begin(), idx.end());
      idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    }
  }
  for (int i : idx) {
    double phi = (i + 0.5) * dphi;
    Point p = s.center + Vec{s.radius * std::cos(phi), s.radius * std::sin(phi), 0};
    if (win.contains(p)) {
      out.pts.push_back(p);
      out.w.push_back(s.radius * dphi);
    }
  }
}

void local_polyline(const Polyline& pl, const Ball& win, double res, const Ball& nb,
                    const EdgeGrid* grid, BoundarySample& out) {
  size_t m = pl.pts.size();
  size_t edges = pl.closed ? m : (m ? m - 1 : 0);
  std::vector<int> cand;
  if (grid && !grid->empty()) {
    auto cx = [&](double x, int pad) {
      double c = std::floor((x - grid->lo.x) / grid->cell) + pad;
      return int(std::max(0.0, std::min(double(grid->nx - 1), c)));
    };
    auto cy = [&](double y, int pad) {
      double c = std::floor((y - grid->lo.y) / grid->cell) + pad;
      return int(std::max(0.0, std::min(double(grid->ny - 1), c)));
    };
    int x0 = cx(nb.center.x - nb.radius, -1), x1 = cx(nb.center.x + nb.radius, 1);
    int y0 = cy(nb.center.y - nb.radius, -1), y1 = cy(nb.center.y + nb.radius, 1);
    for (int yy = y0; yy <= y1; ++yy)
      for (int xx = x0; xx <= x1; ++xx) {
        const auto& bin = grid->bins[size_t(yy) * grid->nx + xx];
        cand.insert(cand.end(), bin.begin(), bin.end());
      }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  } else {
    cand.resize(edges);
    for (size_t i = 0; i < edges; ++i) cand[i] = int(i);
  }
  for (int ei : cand) {
    Point a = pl.pts[size_t(ei)], b = pl.pts[(size_t(ei) + 1) % m];
    double len = dist(a, b);
    if (!(len > 0)) continue;
    int n = lattice_count(len, res, 1);
    double step = len / n;
    Vec u = (b - a) / len;
    double s = dot(nb.center - a, u);
    IndexRange rg = lattice_range(s - nb.radius, s + nb.radius, 0.0, step, n);
    for (long k = rg.lo; k <= rg.hi; ++k) {
      Point p = a + (k + 0.5) * step * u;
      if (win.contains(p)) {
        out.pts.push_back(p);
        out.w.push_back(step);
      }
    }
  }
}

void local_parabola(const Parabola& pa, const Ball& win, double res, const Ball& nb,
                    BoundarySample& out) {
  double xmax = win.radius + std::fabs(win.center.x);
  int n = lattice_count(2 * xmax, 0.5 * res, 2);
  double dx = 2 * xmax / n;
  IndexRange rg = lattice_range(nb.center.x - nb.radius, nb.center.x + nb.radius, -xmax, dx, n);
  for (int branch = 0; branch < 2; ++branch) {
    double sgn = branch == 0 ? 1.0 : -1.0;
    for (long i = rg.lo; i <= rg.hi; ++i) {
      double x = -xmax + (i + 0.5) * dx;
      Point p{x, sgn * pa.scale * x * x, 0};
      if (!win.contains(p)) continue;
      double arc = std::sqrt(1.0 + 4.0 * pa.scale * pa.scale * x * x) * dx;
      out.pts.push_back(p);
      out.w.push_back(arc);
    }
  }
}

void local_box(const SolidBox& bx, const Ball& win, double res, const Ball& nb,
               BoundarySample& out) {
  Point c00 = bx.lo, c11 = bx.hi;
  Point c10{bx.hi.x, bx.lo.y, 0}, c01{bx.lo.x, bx.hi.y, 0};
  Polyline rect{{c00, c10, c11, c01}, true, SideRule::None};
  local_polyline(rect, win, res, nb, nullptr, out);
}

}  // namespace

BoundarySample Scene::boundary_sample(double res) const {
  if (!(res > 0)) throw InputError("boundary_sample: resolution must be positive");
  if (res > window.radius) throw ResolutionError("boundary_sample: resolution exceeds window");
  BoundarySample out;
  out.resolution = res;
  for (const auto& pr : prims) {
    if (auto* h = std::get_if<HalfSpace>(&pr)) sample_halfspace(*h, window, dim, res, out);
    else if (auto* s = std::get_if<Sphere>(&pr)) sample_sphere(*s, window, dim, res, out);
    else if (auto* pl = std::get_if<Polyline>(&pr)) sample_polyline(*pl, window, res, out);
    else if (auto* pa = std::get_if<Parabola>(&pr)) sample_parabola(*pa, window, res, out);
    else sample_box(std::get<SolidBox>(pr), window, res, out);
  }
  RigidMotion inv = model_from_world.inverse();
  for (Point& p : out.pts) p = inv.apply(p);
  return out;
}

BoundarySample Scene::boundary_sample(double res, const Ball& near_world) const {
  if (!(res > 0)) throw InputError("boundary_sample: resolution must be positive");
  if (res > window.radius) throw ResolutionError("boundary_sample: resolution exceeds window");
  if (!(near_world.radius > 0)) throw InputError("boundary_sample: ball radius must be positive");
  if (dim == 3)
    return boundary_sample(res).restricted(
        [&](Point p) { return near_world.contains(p); });
  // candidate clip in the model frame, padded past rigid-motion roundoff
  Ball nb{model_from_world.apply(near_world.center),
          near_world.radius + 1e-9 * window.radius, true};
  BoundarySample out;
  out.resolution = res;
  for (size_t i = 0; i < prims.size(); ++i) {
    const auto& pr = prims[i];
    if (auto* h = std::get_if<HalfSpace>(&pr)) local_halfspace(*h, window, res, nb, out);
    else if (auto* s = std::get_if<Sphere>(&pr)) local_sphere(*s, window, res, nb, out);
    else if (auto* pl = std::get_if<Polyline>(&pr))
      local_polyline(*pl, window, res, nb, grids_[i] ? &*grids_[i] : nullptr, out);
    else if (auto* pa = std::get_if<Parabola>(&pr)) local_parabola(*pa, window, res, nb, out);
    else local_box(std::get<SolidBox>(pr), window, res, nb, out);
  }
  RigidMotion inv = model_from_world.inverse();
  BoundarySample kept;
  kept.resolution = res;
  for (size_t k = 0; k < out.pts.size(); ++k) {
    Point p = inv.apply(out.pts[k]);
    if (near_world.contains(p)) {
      kept.pts.push_back(p);
      kept.w.push_back(out.w[k]);
    }
  }
  return kept;
}

double Scene::boundary_measure(const Ball& b, double res) const {
  if (!(res > 0)) throw InputError("boundary_measure: resolution must be positive");
  if (res > b.radius / 10.0)
    throw ResolutionError("boundary_measure: resolution must be <= radius/10");
  BoundarySample s = boundary_sample(res);
  double total = 0;
  for (size_t i = 0; i < s.pts.size(); ++i)
    if (b.contains(s.pts[i])) total += s.w[i];
  return total;
}

Scene Scene::transformed(const RigidMotion& extra_model_from_world) const {
  Scene out = *this;
  out.model_from_world = model_from_world.compose(extra_model_from_world);
  return out;
}

// ---------------------------------------------------------------- catalog

namespace {

Polyline koch_polygon(int depth) {
  // counterclockwise triangle; bumps grow outward (to the right of travel)
  double R = 0.9;
  std::vector<Point> pts;
  for (int k = 0; k < 3; ++k) {
    double ang = kPi / 2 + 2 * kPi * k / 3;
    pts.push_back({R * std::cos(ang), R * std::sin(ang), 0});
  }
  for (int it = 0; it < depth; ++it) {
    std::vector<Point> next;
    next.reserve(pts.size() * 4);
    size_t m = pts.size();
    for (size_t i = 0; i < m; ++i) {
      Point a = pts[i], b = pts[(i + 1) % m];
      Vec v = (b - a) / 3.0;
      Point p1 = a + v;
      Point p3 = a + 2.0 * v;
      // rotate v by -60 degrees: outward for a CCW polygon
      double c = 0.5, s = -std::sqrt(3.0) / 2.0;
      Vec w{c * v.x - s * v.y, s * v.x + c * v.y, 0};
      Point p2 = p1 + w;
      next.push_back(a);
      next.push_back(p1);
      next.push_back(p2);
      next.push_back(p3);
    }
    pts = std::move(next);
  }
  return {std::move(pts), true, SideRule::EvenOdd};
}

std::vector<SolidBox> cantor_boxes(int depth) {
  std::vector<SolidBox> cur{{{-0.5, -0.5, 0}, {0.5, 0.5, 0}}};
  for (int it = 0; it < depth; ++it) {
    std::vector<SolidBox> next;
    next.reserve(cur.size() * 4);
    for (const auto& b : cur) {
      double side = (b.hi.x - b.lo.x) / 4.0;
      next.push_back({b.lo, b.lo + Vec{side, side, 0}});
      next.push_back({{b.hi.x - side, b.lo.y, 0}, {b.hi.x, b.lo.y + side, 0}});
      next.push_back({{b.lo.x, b.hi.y - side, 0}, {b.lo.x + side, b.hi.y, 0}});
      next.push_back({{b.hi.x - side, b.hi.y - side, 0}, b.hi});
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

Scene make_scene(const std::string& which, int depth) {
  if (depth < 0) throw InputError("make_scene: negative depth");
  if (depth > 12) throw InputError("make_scene: depth > 12 rejected");
  Scene sc;
  sc.dim = 2;
  sc.window = {{0, 0, 0}, 2.0};
  sc.name = which;
  if (which == "halfplane") {
    sc.prims.push_back(HalfSpace{{0, 1, 0}, 0.0});
    sc.label_map = {{"+", "upper"}, {"-", "lower"}};
  } else if (which == "disk") {
    sc.prims.push_back(Sphere{{0, 0, 0}, 1.0});
    sc.label_map = {{"+", "outside"}, {"-", "inside"}};
  } else if (which == "annulus") {
    sc.prims.push_back(Sphere{{0, 0, 0}, 0.6});
    sc.prims.push_back(Sphere{{0, 0, 0}, 1.0});
    sc.label_map = {{"++", "outside"}, {"+-", "ring"}, {"--", "core"}};
  } else if (which == "polygon") {
    Polyline square{{{-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0.5, 0.5, 0}, {-0.5, 0.5, 0}},
                    true,
                    SideRule::EvenOdd};
    sc.prims.push_back(std::move(square));
    sc.label_map = {{"+", "inside"}, {"-", "outside"}};
  } else if (which == "lipschitz_graph") {
    // fixed 0.6-Lipschitz profile sampled on a uniform grid
    Polyline chain;
    chain.side_rule = SideRule::Vertical;
    int n = 2048;
    double x0 = -2.2, x1 = 2.2;
    for (int i = 0; i <= n; ++i) {
      double x = x0 + (x1 - x0) * i / n;
      chain.pts.push_back({x, 0.3 * std::sin(2.0 * x), 0});
    }
    sc.prims.push_back(std::move(chain));
    sc.label_map = {{"+", "above"}, {"-", "below"}};
  } else if (which == "parabola_cusp") {
    sc.prims.push_back(Parabola{1.0});
    sc.label_map = {{"+", "top"}, {"-", "bottom"}, {"0", "cusp"}};
  } else if (which == "koch_snowflake") {
    sc.prims.push_back(koch_polygon(depth));
    sc.label_map = {{"+", "inside"}, {"-", "outside"}};
  } else if (which == "four_corner_cantor") {
    auto boxes = cantor_boxes(depth);
    std::string pat(boxes.size(), '-');
    for (auto& b : boxes) sc.prims.push_back(b);
    sc.label_map = {{pat, "outside"}};
  } else {
    throw InputError("make_scene: unknown scene '" + which + "'");
  }
  sc.finalize();
  return sc;
}

int flood_fill_component_count(const Scene& sc, int grid_n) {
  if (grid_n < 4) throw InputError("flood_fill_component_count: grid too small");
  if (sc.dim != 2) throw InputError("flood_fill_component_count: planar scenes only");
  Ball win = sc.window_world();
  double R = win.radius;
  double cell = 2 * R / grid_n;
  std::vector<int8_t> open(size_t(grid_n) * grid_n, 0);
  auto at = [&](int ix, int iy) -> int8_t& { return open[size_t(iy) * grid_n + ix]; };
  for (int iy = 0; iy < grid_n; ++iy)
    for (int ix = 0; ix < grid_n; ++ix) {
      Point p = win.center + Vec{-R + (ix + 0.5) * cell, -R + (iy + 0.5) * cell, 0};
      if (!win.contains(p, -cell)) continue;  // stay clear of the window rim
      // the bump keeps a boundary that splits two rows exactly from leaking
      if (sc.distance(p) <= 0.5 * cell * (1.0 + 1e-6)) continue;
      at(ix, iy) = 1;
    }
  int count = 0;
  std::deque<std::pair<int, int>> queue;
  for (int iy = 0; iy < grid_n; ++iy)
    for (int ix = 0; ix < grid_n; ++ix) {
      if (at(ix, iy) != 1) continue;
      ++count;
      at(ix, iy) = 2;
      queue.push_back({ix, iy});
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        const int dxs[4] = {1, -1, 0, 0};
        const int dys[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int nx = cx + dxs[k], ny = cy + dys[k];
          if (nx < 0 || ny < 0 || nx >= grid_n || ny >= grid_n) continue;
          if (at(nx, ny) != 1) continue;
          at(nx, ny) = 2;
          queue.push_back({nx, ny});
        }
      }
    }
  return count;
}

// ---------------------------------------------------------------- JSON

namespace {

Json vec_json(Vec v, int dim) {
  Json a = Json::array();
  a.push_back(v.x);
  a.push_back(v.y);
  if (dim == 3) a.push_back(v.z);
  return a;
}

Vec vec_from(const Json& a) {
  if (!a.is_array() || a.size() < 2 || a.size() > 3) throw InputError("scene json: bad vector");
  Vec v{a[0].get<double>(), a[1].get<double>(), 0};
  if (a.size() == 3) v.z = a[2].get<double>();
  if (!is_finite(v)) throw InputError("scene json: non-finite vector");
  return v;
}

std::string side_rule_name(SideRule r) {
  switch (r) {
    case SideRule::None: return "none";
    case SideRule::EvenOdd: return "even_odd";
    default: return "vertical";
  }
}

SideRule side_rule_from(const std::string& s) {
  if (s == "none") return SideRule::None;
  if (s == "even_odd") return SideRule::EvenOdd;
  if (s == "vertical") return SideRule::Vertical;
  throw InputError("scene json: unknown side rule '" + s + "'");
}

}  // namespace

Json Scene::to_json() const {
  Json j;
  j["dimension"] = dim;
  j["window"] = {{"center", vec_json(window.center, dim)}, {"radius", window.radius}};
  j["name"] = name;
  j["clipped"] = clipped;
  Json labels = Json::array();
  for (const auto& kv : label_map)
    labels.push_back({{"pattern", kv.first}, {"label", kv.second}});
  j["labels"] = labels;
  Json parr = Json::array();
  for (const auto& pr : prims) {
    Json pj;
    if (auto* h = std::get_if<HalfSpace>(&pr)) {
      pj["kind"] = "halfspace";
      pj["normal"] = vec_json(h->normal, dim);
      pj["offset"] = h->offset;
    } else if (auto* s = std::get_if<Sphere>(&pr)) {
      pj["kind"] = "sphere";
      pj["center"] = vec_json(s->center, dim);
      pj["radius"] = s->radius;
    } else if (auto* pl = std::get_if<Polyline>(&pr)) {
      pj["kind"] = "polyline";
      pj["closed"] = pl->closed;
      pj["side_rule"] = side_rule_name(pl->side_rule);
      Json pts = Json::array();
      for (const Point& p : pl->pts) pts.push_back(vec_json(p, dim));
      pj["points"] = pts;
    } else if (auto* pa = std::get_if<Parabola>(&pr)) {
      pj["kind"] = "parabola";
      pj["scale"] = pa->scale;
    } else {
      const SolidBox& bx = std::get<SolidBox>(pr);
      pj["kind"] = "solid_box";
      pj["lo"] = vec_json(bx.lo, dim);
      pj["hi"] = vec_json(bx.hi, dim);
    }
    parr.push_back(pj);
  }
  j["primitives"] = parr;
  bool ident = model_from_world.m == RigidMotion::identity().m &&
               norm(model_from_world.t) == 0.0;
  if (!ident) {
    Json f;
    f["matrix"] = model_from_world.m;
    f["translation"] = vec_json(model_from_world.t, 3);
    j["frame"] = f;
  }
  return j;
}

Scene Scene::from_json(const Json& j) {
  Scene sc;
  if (!j.contains("dimension") || !j.contains("window") || !j.contains("primitives"))
    throw InputError("scene json: missing dimension, window, or primitives");
  sc.dim = j["dimension"].get<int>();
  sc.window.center = vec_from(j["window"]["center"]);
  sc.window.radius = j["window"]["radius"].get<double>();
  sc.name = j.value("name", std::string("custom"));
  if (j.contains("labels")) {
    for (const auto& e : j["labels"])
      sc.label_map.emplace_back(e["pattern"].get<std::string>(), e["label"].get<std::string>());
  }
  for (const auto& pj : j["primitives"]) {
    std::string kind = pj.at("kind").get<std::string>();
    if (kind == "halfspace") {
      sc.prims.push_back(HalfSpace{vec_from(pj.at("normal")), pj.at("offset").get<double>()});
    } else if (kind == "sphere") {
      sc.prims.push_back(Sphere{vec_from(pj.at("center")), pj.at("radius").get<double>()});
    } else if (kind == "polyline") {
      Polyline pl;
      pl.closed = pj.value("closed", false);
      pl.side_rule = side_rule_from(pj.value("side_rule", std::string("none")));
      for (const auto& e : pj.at("points")) pl.pts.push_back(vec_from(e));
      if (pl.pts.size() < 2) throw InputError("scene json: polyline needs >= 2 points");
      sc.prims.push_back(std::move(pl));
    } else if (kind == "parabola") {
      sc.prims.push_back(Parabola{pj.value("scale", 1.0)});
    } else if (kind == "solid_box") {
      sc.prims.push_back(SolidBox{vec_from(pj.at("lo")), vec_from(pj.at("hi"))});
    } else {
      throw InputError("scene json: unknown primitive kind '" + kind + "'");
    }
  }
  if (j.contains("frame")) {
    const auto& f = j["frame"];
    auto marr = f.at("matrix");
    for (int i = 0; i < 9; ++i) sc.model_from_world.m[i] = marr.at(i).get<double>();
    sc.model_from_world.t = vec_from(f.at("translation"));
  }
  sc.finalize();
  return sc;
}

}  // namespace gmt
