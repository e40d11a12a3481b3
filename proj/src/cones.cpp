// SPDX-License-Identifier: Apache-2.0
#include "gmt/cones.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gmt/conditions.hpp"

namespace gmt {

bool Cone::contains(Point p) const {
  Vec w = p - apex;
  double len = norm(w);
  if (len > t) return false;
  return dot(w, axis) >= len * std::cos(alpha);
}

Json Cone::to_json() const {
  return Json{{"apex", {apex.x, apex.y, apex.z}},
              {"axis", {axis.x, axis.y, axis.z}},
              {"alpha", alpha},
              {"t", t}};
}

Json BlockingWitness::to_json() const {
  Json j{{"zeta", {zeta.x, zeta.y, zeta.z}},
         {"hit_distance", hit_distance},
         {"search_radius", search_radius}};
  if (ball) {
    j["ball_center"] = {ball->center.x, ball->center.y, ball->center.z};
    j["ball_radius"] = ball->radius;
    j["ball_label"] = ball_label;
    j["psi"] = psi;
  }
  return j;
}

Json ConeCertificate::to_json() const {
  Json j{{"contained", contained},
         {"rays", rays},
         {"spacing", spacing},
         {"clearance", clearance}};
  if (witness) j["witness"] = witness->to_json();
  return j;
}

double blocking_angle(Point zeta, Point xi, double C, double alpha) {
  if (norm(zeta - xi) == 0.0) throw InputError("blocking_angle: zeta coincides with the apex");
  if (C < 1 || alpha <= 0) throw InputError("blocking_angle: need C >= 1 and alpha > 0");
  return alpha / (4.0 * C);
}

double shadow_angle(const Ball& b, Point from) {
  double d = norm(b.center - from);
  if (d <= b.radius) return kPi;
  return std::asin(b.radius / d);
}

namespace {

std::vector<Vec> cap_ray_net(const Scene& sc, Vec axis, double alpha, double spacing, int K) {
  std::vector<Vec> dirs;
  if (sc.dim == 2) {
    Vec b1 = any_perp(axis);
    dirs.reserve(2 * K + 1);
    for (int j = -K; j <= K; ++j) {
      double phi = j * alpha / K;
      dirs.push_back(axis * std::cos(phi) + b1 * std::sin(phi));
    }
  } else {
    Vec b1 = any_perp(axis);
    Vec b2 = cross(axis, b1);
    dirs.push_back(axis);
    for (int k = 1; k <= K; ++k) {
      double psi = k * alpha / K;
      int m = std::max(8, int(std::ceil(2 * kPi * std::sin(psi) / spacing)));
      for (int i = 0; i < m; ++i) {
        double phi = 2 * kPi * i / m;
        dirs.push_back(axis * std::cos(psi) +
                       (b1 * std::cos(phi) + b2 * std::sin(phi)) * std::sin(psi));
      }
    }
  }
  return dirs;
}

// largest ball of a component other than `label` inside B(center, R),
// found by lattice seeding plus compass refinement
std::optional<std::pair<Ball, std::string>> blocking_ball(const Scene& sc,
                                                          const std::string& label, Point center,
                                                          double R) {
  auto clear_radius = [&](Point x) {
    return std::min(sc.distance(x), R - norm(x - center));
  };
  auto usable = [&](Point x) {
    if (!sc.window.contains(x, -sc.eps_boundary())) return false;
    Classification cl = sc.classify(x);
    return !cl.boundary && cl.label != label;
  };
  Point best{};
  double best_f = 0;
  int n = 17;
  int nz = sc.dim == 3 ? n : 1;
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        Point x{center.x - R + 2 * R * ix / (n - 1), center.y - R + 2 * R * iy / (n - 1),
                sc.dim == 3 ? center.z - R + 2 * R * iz / (n - 1) : center.z};
        double f = clear_radius(x);
        if (f <= 0 || !usable(x)) continue;
        if (f > best_f) { best_f = f; best = x; }
      }
  if (best_f <= 0) return std::nullopt;
  double step = R / 8;
  int guard = 0;
  while (step > 1e-7 * R && ++guard < 20000) {
    bool moved = false;
    const Vec dirs2[4] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
    const Vec dirs3[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    int nd = sc.dim == 3 ? 6 : 4;
    const Vec* dirs = sc.dim == 3 ? dirs3 : dirs2;
    for (int k = 0; k < nd; ++k) {
      Point cand = best + dirs[k] * step;
      double f = clear_radius(cand);
      if (f > best_f && usable(cand)) {
        best_f = f;
        best = cand;
        moved = true;
      }
    }
    if (!moved) step /= 2;
  }
  // shave past the scene's boundary thickening so the chord net can certify
  double shave = std::max(best_f * 1e-9, 3 * sc.eps_boundary());
  if (best_f <= 2 * shave) return std::nullopt;
  Ball b{best, best_f - shave};
  if (!ball_avoids_boundary(sc, b, 64)) return std::nullopt;
  return std::make_pair(b, sc.classify(best).label);
}

}  // namespace

ConeCertificate verify_cone(const Scene& sc, const std::string& label, const Cone& c,
                            double step) {
  if (!(c.alpha > 0) || !(c.alpha < kPi / 2)) throw InputError("verify_cone: alpha outside (0, pi/2)");
  if (!(c.t > 0) || !std::isfinite(c.t)) throw InputError("verify_cone: height must be positive");
  if (!(step > 0)) throw InputError("verify_cone: step must be positive");
  if (norm(c.axis) == 0.0) throw InputError("verify_cone: zero axis");
  if (sc.distance(c.apex) > sc.eps_self())
    throw InputError("verify_cone: apex is not on the boundary set");
  Vec axis = unit(c.axis);

  double want = step / c.t;  // required angular spacing
  int K = int(std::ceil(c.alpha / want));
  if (K < 2) throw ResolutionError("verify_cone: ray net too coarse for this half-angle");
  double spacing = c.alpha / K;
  std::vector<Vec> dirs = cap_ray_net(sc, axis, c.alpha, spacing, K);

  ConeCertificate cert;
  cert.rays = int(dirs.size());
  cert.spacing = spacing;
  double cast_len = 2 * c.t;
  double min_hit = cast_len;
  double nearest = cast_len;
  Vec nearest_dir{};
  bool label_ok = true;
  Point bad_endpoint{};
  for (const Vec& v : dirs) {
    auto h = sc.first_hit_from(c.apex, v, sc.eps_self(), cast_len);
    double hd = h ? *h : cast_len;
    min_hit = std::min(min_hit, hd);
    if (hd <= c.t && hd < nearest) {
      nearest = hd;
      nearest_dir = v;
    }
    if (!h || hd > c.t) {
      Point p = c.apex + v * c.t;
      if (!sc.window.contains(p, -sc.eps_boundary()))
        throw InputError("verify_cone: cone leaves the scene window");
      if (!label.empty()) {
        Classification cl = sc.classify(p);
        if (cl.boundary) {
          if (c.t < nearest) { nearest = c.t; nearest_dir = v; }
        } else if (cl.label != label && label_ok) {
          label_ok = false;
          bad_endpoint = p;
        }
      }
    }
  }
  cert.clearance = min_hit - c.t;

  if (nearest <= c.t) {
    cert.contained = false;
    BlockingWitness w;
    w.zeta = c.apex + nearest_dir * nearest;
    w.hit_distance = nearest;
    w.search_radius = nearest * std::sin(c.alpha);
    if (!label.empty() && w.search_radius > 0) {
      if (auto bb = blocking_ball(sc, label, w.zeta, w.search_radius)) {
        w.ball = bb->first;
        w.ball_label = bb->second;
        w.psi = shadow_angle(bb->first, c.apex);
      }
    }
    cert.witness = w;
    return cert;
  }
  if (!label_ok) {
    cert.contained = false;
    BlockingWitness w;
    w.zeta = sc.closest_boundary(bad_endpoint);
    w.hit_distance = norm(w.zeta - c.apex);
    cert.witness = w;
    return cert;
  }
  cert.contained = true;
  return cert;
}

std::pair<ConeCertificate, ConeCertificate> two_sided_cone(const Scene& sc, Point xi, Vec theta,
                                                           double alpha, double t) {
  if (norm(theta) == 0.0) throw InputError("two_sided_cone: zero axis");
  Vec u = unit(theta);
  double step = alpha * t / 64;
  Cone up{xi, u, alpha, t};
  Cone down{xi, u * -1.0, alpha, t};
  return {verify_cone(sc, "", up, step), verify_cone(sc, "", down, step)};
}

}  // namespace gmt
