// SPDX-License-Identifier: Apache-2.0
#include "gmt/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gmt {

namespace {

constexpr double kRelaxTwoBall = 1e-3;  // witness radius stall tolerance

struct Candidate {
  Point x;
  double f = -1.0;  // inscribed radius within B(xi, r) avoiding the boundary
};

// Largest radius of a ball centered at x that stays inside B(xi, r) and
// avoids the boundary set.
double inscribed(const Scene& sc, Point xi, double r, Point x) {
  return std::min(sc.distance(x), r - dist(x, xi));
}

std::string label_at(const Scene& sc, Point x) {
  Classification c = sc.classify(x);
  return c.boundary ? std::string() : c.label;
}

// Compass ascent of the inscribed radius, constrained to one component.
Candidate refine(const Scene& sc, Point xi, double r, Candidate start,
                 const std::string& label, int dim) {
  Candidate best = start;
  double step = r / 8.0;
  int guard = 0;
  const Vec dirs3[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  int ndirs = dim == 3 ? 6 : 4;
  while (step > r * 1e-7 && ++guard < 20000) {
    bool improved = false;
    for (int k = 0; k < ndirs; ++k) {
      Point y = best.x + step * dirs3[k];
      if (dist(y, xi) >= r) continue;
      if (!sc.window_world().contains(y)) continue;
      double fy = inscribed(sc, xi, r, y);
      if (fy > best.f && label_at(sc, y) == label) {
        best = {y, fy};
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

double scene_diameter(const Scene& sc) {
  if (sc.clipped) return 2.0 * sc.window.radius;
  BoundarySample bs = sc.boundary_sample(sc.window.radius / 32.0);
  if (bs.pts.empty()) return 2.0 * sc.window.radius;
  Point lo = bs.pts[0], hi = bs.pts[0];
  for (const Point& p : bs.pts) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  return dist(lo, hi);
}

void require_on_boundary(const Scene& sc, Point xi, double r, const char* op) {
  if (sc.distance(xi) > sc.eps_self())
    throw InputError(std::string(op) + ": center point is not on the boundary set");
  if (!(r > 0)) throw InputError(std::string(op) + ": radius must be positive");
  if (r >= scene_diameter(sc))
    throw InputError(std::string(op) + ": radius must be below the boundary diameter");
}

// Best refined candidate per component label found inside B(xi, r).
std::map<std::string, Candidate> component_maxima(const Scene& sc, Point xi, double r,
                                                  double C) {
  double spacing = r / (4.0 * C);
  int n = std::max(4, int(std::ceil(2.0 * r / spacing)));
  n = std::min(n, 160);  // lattice cap; refinement recovers fine structure
  std::map<std::string, std::vector<Candidate>> tops;
  Ball win = sc.window_world();
  for (int iz = 0; iz < (sc.dim == 3 ? n : 1); ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        Point x = xi + Vec{-r + (ix + 0.5) * 2 * r / n, -r + (iy + 0.5) * 2 * r / n,
                           sc.dim == 3 ? -r + (iz + 0.5) * 2 * r / n : 0.0};
        if (dist(x, xi) >= r) continue;
        if (!win.contains(x)) continue;
        double f = inscribed(sc, xi, r, x);
        if (f <= 0) continue;
        std::string lab = label_at(sc, x);
        if (lab.empty()) continue;
        auto& v = tops[lab];
        if (v.size() < 4) {
          v.push_back({x, f});
        } else {
          auto mi = std::min_element(v.begin(), v.end(), [](const Candidate& a,
                                                            const Candidate& b) {
            return a.f < b.f;
          });
          if (f > mi->f) *mi = {x, f};
        }
      }
  std::map<std::string, Candidate> out;
  for (auto& [lab, starts] : tops) {
    Candidate best;
    for (const Candidate& s : starts) {
      Candidate ref = refine(sc, xi, r, s, lab, sc.dim);
      if (ref.f > best.f) best = ref;
    }
    out[lab] = best;
  }
  return out;
}

}  // namespace

bool ball_avoids_boundary(const Scene& sc, const Ball& b, int rays) {
  if (rays < 4) throw InputError("ball_avoids_boundary: need at least 4 rays");
  if (!(sc.distance(b.center) > b.radius)) return false;
  double reach = b.radius * (1.0 - 1e-9);
  if (sc.dim == 2) {
    for (int i = 0; i < rays; ++i) {
      double a = 2 * kPi * i / rays;
      if (sc.first_hit_from(b.center, {std::cos(a), std::sin(a), 0}, 0.0, reach)) return false;
    }
    return true;
  }
  for (int iu = 0; iu < rays; ++iu)
    for (int iv = 0; iv < 2 * rays; ++iv) {
      double ph = kPi * (iu + 0.5) / rays;
      double az = 2 * kPi * iv / (2 * rays);
      Vec d{std::sin(ph) * std::cos(az), std::sin(ph) * std::sin(az), std::cos(ph)};
      if (sc.first_hit_from(b.center, d, 0.0, reach)) return false;
    }
  return true;
}

ConditionVerdict check_two_ball(const Scene& sc, Point xi, double r, double C) {
  if (!(C >= 2.0)) throw InputError("check_two_ball: C must be >= 2");
  require_on_boundary(sc, xi, r, "check_two_ball");
  double target = r / C;
  auto maxima = component_maxima(sc, xi, r, C);
  std::vector<std::pair<std::string, Candidate>> good;
  for (auto& [lab, cand] : maxima)
    if (cand.f >= target * (1.0 - kRelaxTwoBall)) good.push_back({lab, cand});
  std::sort(good.begin(), good.end(),
            [](const auto& a, const auto& b) { return a.second.f > b.second.f; });
  ConditionVerdict v;
  if (good.size() >= 2) {
    v.holds = true;
    double worst = target;
    for (int k = 0; k < 2; ++k) {
      // shrink past the boundary thickening so a binding witness cannot touch the set
      double shave = std::max(good[k].second.f * 1e-9, 3 * sc.eps_boundary());
      double rad = std::min(good[k].second.f - shave, target);
      if (!(rad > 0)) {
        v.holds = false;
        break;
      }
      Ball w{good[k].second.x, rad, true};
      if (!ball_avoids_boundary(sc, {w.center, rad * (1.0 - 1e-9), true}, 64)) {
        v.holds = false;
        break;
      }
      worst = std::min(worst, good[k].second.f);
      v.witnesses.push_back(w);
      v.witness_labels.push_back(good[k].first);
    }
    v.constant = r / worst;
  }
  if (!v.holds) {
    v.witnesses.clear();
    v.witness_labels.clear();
    v.failures.push_back({xi, r});
    double best = 0;
    for (auto& [lab, cand] : maxima) best = std::max(best, cand.f);
    v.constant = best > 0 ? r / best : 0.0;
  }
  return v;
}

ConditionVerdict check_corkscrew(const Scene& sc, const std::string& label, Point xi, double r,
                                 double C, Side side) {
  if (!(C >= 2.0)) throw InputError("check_corkscrew: C must be >= 2");
  auto labs = sc.labels();
  if (std::find(labs.begin(), labs.end(), label) == labs.end())
    throw InputError("check_corkscrew: unknown component label '" + label + "'");
  require_on_boundary(sc, xi, r, "check_corkscrew");
  double target = r / C;
  auto maxima = component_maxima(sc, xi, r, C);
  Candidate best;
  std::string best_lab;
  for (auto& [lab, cand] : maxima) {
    bool wanted = side == Side::Interior ? lab == label : lab != label;
    if (wanted && cand.f > best.f) {
      best = cand;
      best_lab = lab;
    }
  }
  ConditionVerdict v;
  if (best.f >= target * (1.0 - kRelaxTwoBall)) {
    double shave = std::max(best.f * 1e-9, 3 * sc.eps_boundary());
    double rad = std::min(best.f - shave, target);
    if (rad > 0 && ball_avoids_boundary(sc, {best.x, rad * (1.0 - 1e-9), true}, 64)) {
      v.holds = true;
      v.constant = r / best.f;
      v.witnesses.push_back({best.x, rad, true});
      v.witness_labels.push_back(best_lab);
      return v;
    }
  }
  v.failures.push_back({xi, r});
  v.constant = best.f > 0 ? r / best.f : 0.0;
  return v;
}

ConditionVerdict estimate_regularity(const Scene& sc,
                                     const std::vector<std::pair<Point, double>>& samples) {
  if (samples.empty()) throw InputError("estimate_regularity: no samples");
  int d = sc.dim - 1;
  double wd = unit_ball_volume(d);
  ConditionVerdict v;
  v.holds = true;
  v.constant = 1.0;
  for (const auto& [xi, r] : samples) {
    require_on_boundary(sc, xi, r, "estimate_regularity");
    double mu = sc.boundary_measure({xi, r, true}, r / 64.0);
    v.witnesses.push_back({xi, r, true});
    v.witness_measures.push_back(mu);
    if (!(mu > 0)) {
      v.holds = false;
      v.failures.push_back({xi, r});
      v.constant = std::numeric_limits<double>::infinity();
      continue;
    }
    double ideal = wd * std::pow(r, d);
    v.constant = std::max({v.constant, mu / ideal, ideal / mu});
  }
  return v;
}

Json ConditionVerdict::to_json() const {
  Json j;
  j["holds"] = holds;
  j["constant"] = constant;
  Json ws = Json::array();
  for (size_t i = 0; i < witnesses.size(); ++i) {
    Json w;
    w["center"] = {witnesses[i].center.x, witnesses[i].center.y, witnesses[i].center.z};
    w["radius"] = witnesses[i].radius;
    if (i < witness_labels.size()) w["label"] = witness_labels[i];
    if (i < witness_measures.size()) w["measure"] = witness_measures[i];
    ws.push_back(w);
  }
  j["witnesses"] = ws;
  Json fs = Json::array();
  for (const auto& [p, r] : failures)
    fs.push_back({{"center", {p.x, p.y, p.z}}, {"radius", r}});
  j["failures"] = fs;
  return j;
}

}  // namespace gmt
