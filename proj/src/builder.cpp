// SPDX-License-Identifier: Apache-2.0
#include "gmt/builder.hpp"

#include <algorithm>
#include <cmath>

namespace gmt {

namespace {

bool close_rel(double x, double y, double tol) {
  return std::fabs(x - y) <= tol * std::max({1.0, std::fabs(x), std::fabs(y)});
}

Vec up_axis(int ambient_dim) { return ambient_dim == 2 ? Vec{0, 1, 0} : Vec{0, 0, 1}; }

Json vec_json(Vec v) { return Json::array({v.x, v.y, v.z}); }

Json ball_json(const Ball& b) {
  Json j;
  j["center"] = vec_json(b.center);
  j["radius"] = b.radius;
  return j;
}

Json motion_json(const RigidMotion& mo) {
  Json j;
  j["m"] = mo.m;
  j["t"] = vec_json(mo.t);
  return j;
}

ConditionVerdict map_verdict(const ConditionVerdict& v, const RigidMotion& fwd) {
  ConditionVerdict out = v;
  for (Ball& b : out.witnesses) b.center = fwd.apply(b.center);
  for (auto& f : out.failures) f.first = fwd.apply(f.first);
  return out;
}

}  // namespace

// ------------------------------------------------------------------ ledger

void ConstantLedger::validate() const {
  if (d != 1 && d != 2) throw InputError("ledger: boundary dimension must be 1 or 2");
  if (!(r > 0) || !(C >= 2) || !(M > 0)) throw InputError("ledger: need r > 0, C >= 2, M > 0");
  if (!(rho > 0 && rho <= 1)) throw InputError("ledger: rho outside (0, 1]");
  if (!(upsilon > 0 && upsilon < 0.25)) throw InputError("ledger: upsilon outside (0, 1/4)");
  if (!(eta > 0 && 4 * C * eta < upsilon)) throw InputError("ledger: need 0 < 4 C eta < upsilon");
  if (!(delta > 0 && delta <= 0.2)) throw InputError("ledger: delta outside (0, 0.2]");
  if (!(c0 > 0 && c0 <= 1)) throw InputError("ledger: c0 outside (0, 1]");
  if (!close_rel(kappa, kappa_value(d, C, M), 1e-12)) throw InputError("ledger: kappa decoupled");
  if (!close_rel(t, r / (2 * C), 1e-12)) throw InputError("ledger: t decoupled from r / (2C)");
  if (!close_rel(tau, t / 4 * std::sin(alpha()), 1e-12))
    throw InputError("ledger: tau decoupled from (t/4) sin(alpha)");
  if (!close_rel(L, 1.0 / std::cos(alpha()), 1e-12))
    throw InputError("ledger: L decoupled from sec(alpha)");
  if (a != 0) {
    double lo = (1 + rho) * r / C, hi = 2 * r * (1 - 1 / C);
    if (!(a >= lo * (1 - 1e-9) && a <= hi * (1 + 1e-9)))
      throw InputError("ledger: witness separation outside its admissible range");
    if (!(delta <= r / (2 * C * a) * (1 + 1e-12)))
      throw InputError("ledger: delta exceeds r / (2 C a)");
  }
}

Json ConstantLedger::to_json() const {
  Json j;
  j["d"] = d;
  j["r"] = r;
  j["C"] = C;
  j["M"] = M;
  j["rho"] = rho;
  j["delta"] = delta;
  j["eta"] = eta;
  j["upsilon"] = upsilon;
  j["kappa"] = kappa;
  j["c0"] = c0;
  j["alpha"] = alpha();
  j["t"] = t;
  j["tau"] = tau;
  j["L"] = L;
  if (a != 0) j["a"] = a;
  if (n1 > 0) {
    j["n1"] = n1;
    j["n2"] = n2;
  }
  return j;
}

ConstantLedger couple_constants(int d, double r, double C, double M, double rho, double upsilon,
                                double delta, double c0, double eta) {
  ConstantLedger led;
  led.d = d;
  led.r = r;
  led.C = C;
  led.M = M;
  led.rho = rho;
  led.upsilon = upsilon;
  led.delta = delta;
  led.c0 = c0;
  led.eta = eta > 0 ? eta : upsilon / (8 * C);
  led.kappa = kappa_value(d, C, M);
  led.t = r / (2 * C);
  led.tau = led.t / 4 * std::sin(led.alpha());
  led.L = 1.0 / std::cos(led.alpha());
  led.validate();
  return led;
}

// --------------------------------------------------------------- normalize

Json NormalizeResult::to_json() const {
  Json j;
  j["omega"] = omega_label;
  j["a"] = a;
  j["rho"] = rho;
  j["B_hat"] = ball_json(B_hat);
  j["interior_ball"] = ball_json(interior_ball);
  j["exterior_ball"] = ball_json(exterior_ball);
  j["to_world"] = motion_json(to_world);
  j["interior"] = interior_verdict.to_json();
  j["exterior"] = exterior_verdict.to_json();
  return j;
}

NormalizeResult normalize(const Scene& sc, const Ball& B, double C,
                          const std::string& omega_label) {
  if (!(B.radius > 0)) throw InputError("normalize: ball radius not positive");
  if (!(C >= 2)) throw InputError("normalize: constant below 2");
  double r = B.radius;

  std::vector<std::string> labels = sc.labels();
  std::sort(labels.begin(), labels.end());
  std::string omega = omega_label;
  ConditionVerdict in1;
  if (omega.empty()) {
    double best_f = -1.0;
    for (const std::string& lab : labels) {
      ConditionVerdict v = check_corkscrew(sc, lab, B.center, r, C, Side::Interior);
      double f = v.constant > 0 ? r / v.constant : 0.0;
      if (f > best_f + 1e-4 * r) {
        best_f = f;
        omega = lab;
        in1 = v;
      }
    }
    if (!(best_f > 0)) throw HypothesisError("normalize: no component admits an interior ball");
  } else {
    if (!std::binary_search(labels.begin(), labels.end(), omega))
      throw InputError("normalize: unknown component label " + omega);
    in1 = check_corkscrew(sc, omega, B.center, r, C, Side::Interior);
  }

  double rho = 1.0;
  ConditionVerdict in = in1;
  if (!(in1.holds && in1.constant <= C * (1 + 1e-12))) {
    if (!(in1.constant > 0))
      throw HypothesisError("normalize: component " + omega + " admits no interior ball");
    // retry at the achieved constant and record the reduced fraction
    double C2 = in1.constant * (1 + 1e-6);
    ConditionVerdict in2 = check_corkscrew(sc, omega, B.center, r, C2, Side::Interior);
    if (!in2.holds || !(in2.constant > 0) || in2.witnesses.empty())
      throw HypothesisError("normalize: interior retry at the achieved constant failed");
    rho = C / in2.constant;
    if (rho >= 1 - 1e-6) rho = 1.0;
    if (!(rho > 0 && rho <= 1))
      throw HypothesisError("normalize: interior constant regressed on retry");
    in = in2;
  }
  if (in.witnesses.empty()) throw HypothesisError("normalize: interior witness missing");

  ConditionVerdict ext = check_corkscrew(sc, omega, B.center, r, C, Side::Exterior);
  if (!ext.holds || ext.witnesses.empty())
    throw HypothesisError("normalize: no exterior ball of radius r / C inside B");
  if (!(ext.witnesses[0].radius >= r / C * (1 - 1e-9)))
    throw HypothesisError("normalize: exterior ball falls short of radius r / C");

  Point c_int = in.witnesses[0].center;
  Point c_ext = ext.witnesses[0].center;
  double a = dist(c_ext, c_int);
  double lo = (1 + rho) * r / C, hi = 2 * r * (1 - 1 / C);
  if (!(a >= lo * (1 - 1e-9) && a <= hi * (1 + 1e-9)))
    throw HypothesisError("normalize: witness separation outside its admissible range");

  // independent clearance recheck of both witnesses
  if (!ball_avoids_boundary(sc, Ball{c_int, in.witnesses[0].radius * (1 - 1e-9)}, 64))
    throw HypothesisError("normalize: interior witness grazes the boundary");
  if (!ball_avoids_boundary(sc, Ball{c_ext, ext.witnesses[0].radius * (1 - 1e-9)}, 64))
    throw HypothesisError("normalize: exterior witness grazes the boundary");

  Vec e = up_axis(sc.dim);
  RigidMotion R = rotation_taking(unit(c_ext - c_int), e);
  RigidMotion to_world;
  to_world.m = R.inverse().m;
  to_world.t = c_int;
  RigidMotion fwd = to_world.inverse();

  NormalizeResult out;
  out.scene = sc.transformed(to_world);
  out.omega_label = omega;
  out.a = a;
  out.rho = rho;
  out.to_world = to_world;
  out.B_hat = Ball{fwd.apply(B.center), B.radius};
  out.interior_ball = Ball{{0, 0, 0}, in.witnesses[0].radius};
  out.exterior_ball = Ball{Point{} + a * e, ext.witnesses[0].radius};
  out.interior_verdict = map_verdict(in, fwd);
  out.exterior_verdict = map_verdict(ext, fwd);
  return out;
}

// -------------------------------------------------------------------- nets

std::vector<Vec> sphere_net(Vec theta0, double cap_radius, double sep, int d) {
  if (!(cap_radius > 0) || !(sep > 0))
    throw InputError("sphere_net: need a positive cap radius and separation");
  if (!(cap_radius <= kPi / 2)) throw InputError("sphere_net: cap radius above pi / 2");
  if (d != 1 && d != 2) throw InputError("sphere_net: cap dimension must be 1 or 2");
  theta0 = unit(theta0);
  std::vector<Vec> out;
  if (d == 1) {
    if (std::fabs(theta0.z) > 1e-12) throw InputError("sphere_net: planar cap needs a planar axis");
    Vec b1{-theta0.y, theta0.x, 0};
    double step = sep / 256;
    long K = long(std::floor(cap_radius / step));
    std::vector<double> phis;
    phis.push_back(0.0);
    for (long k = 1; k <= K; ++k) {
      phis.push_back(-double(k) * step);
      phis.push_back(double(k) * step);
    }
    if (double(K) * step < cap_radius) {
      phis.push_back(-cap_radius);
      phis.push_back(cap_radius);
    }
    double acc = sep * (1 - 1.0 / 256);
    std::vector<double> kept;
    for (double phi : phis) {
      bool ok = true;
      for (double q : kept)
        if (std::fabs(phi - q) <= acc) {
          ok = false;
          break;
        }
      if (ok) kept.push_back(phi);
    }
    for (double phi : kept) out.push_back(std::cos(phi) * theta0 + std::sin(phi) * b1);
  } else {
    // exp-chart square lattice; points just past the rim are pulled back
    // radially so the rim itself stays covered
    double h = sep / 64;
    double lim = cap_radius + h * std::sqrt(2.0);
    long K = long(std::floor(lim / h)) + 1;
    struct Cand {
      double q1, q2, n2;
    };
    std::vector<Cand> cands;
    for (long i = -K; i <= K; ++i)
      for (long j = -K; j <= K; ++j) {
        double q1 = double(i) * h, q2 = double(j) * h;
        double n = std::hypot(q1, q2);
        if (n <= cap_radius) {
          cands.push_back({q1, q2, n * n});
        } else if (n <= lim) {
          double s = cap_radius / n;
          cands.push_back({q1 * s, q2 * s, cap_radius * cap_radius});
        }
      }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
      if (x.n2 != y.n2) return x.n2 < y.n2;
      if (x.q2 != y.q2) return x.q2 < y.q2;
      return x.q1 < y.q1;
    });
    Vec b1 = any_perp(theta0), b2 = unit(cross(theta0, b1));
    double acc = sep * (15.0 / 16);
    for (const Cand& c : cands) {
      double n = std::sqrt(c.n2);
      Vec dir = theta0;
      if (n > 0) dir = std::cos(n) * theta0 + (std::sin(n) / n) * (c.q1 * b1 + c.q2 * b2);
      bool ok = true;
      for (const Vec& v : out)
        if (arc_dist(v, dir) < acc) {
          ok = false;
          break;
        }
      if (ok) out.push_back(dir);
    }
  }
  return out;
}

std::vector<int> boundary_net(const std::vector<Point>& pts, double tau) {
  if (pts.empty()) throw InputError("boundary_net: empty point set");
  if (!(tau > 0)) throw InputError("boundary_net: separation not positive");
  std::vector<int> kept;
  double acc = tau * (1 - 1e-12);
  for (size_t k = 0; k < pts.size(); ++k) {
    bool ok = true;
    for (int i : kept)
      if (dist(pts[k], pts[size_t(i)]) < acc) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(int(k));
  }
  return kept;
}

// --------------------------------------------------------------- partition

Json PartitionResult::to_json() const {
  Json j;
  j["i_star"] = i_star;
  j["j_star"] = j_star;
  j["cells"] = cell_weight.size();
  j["total_weight"] = total_weight;
  j["best_weight"] = best_weight;
  j["cluster_size"] = E_ij.size();
  j["cluster_weight"] = E_ij.total();
  return j;
}

PartitionResult partition(const BoundarySample& E, const std::vector<Vec>& dirs,
                          const std::vector<Vec>& xs, const std::vector<Point>& ys) {
  if (E.size() == 0) throw InputError("partition: empty sample");
  if (dirs.size() != E.size()) throw InputError("partition: one direction per sample point");
  if (E.w.size() != E.pts.size()) throw InputError("partition: weights missing");
  if (xs.empty() || ys.empty()) throw InputError("partition: empty nets");
  int n1 = int(xs.size()), n2 = int(ys.size());

  PartitionResult out;
  out.dir_index.resize(E.size());
  out.net_index.resize(E.size());
  out.cell_weight.assign(size_t(n1) * size_t(n2), 0.0);
  for (size_t k = 0; k < E.size(); ++k) {
    int bi = 0;
    double bd = arc_dist(dirs[k], xs[0]);
    for (int i = 1; i < n1; ++i) {
      double cur = arc_dist(dirs[k], xs[size_t(i)]);
      if (cur < bd) {
        bd = cur;
        bi = i;
      }
    }
    int bj = 0;
    double bp = dist(E.pts[k], ys[0]);
    for (int j = 1; j < n2; ++j) {
      double cur = dist(E.pts[k], ys[size_t(j)]);
      if (cur < bp) {
        bp = cur;
        bj = j;
      }
    }
    out.dir_index[k] = bi;
    out.net_index[k] = bj;
    out.cell_weight[size_t(bi) * size_t(n2) + size_t(bj)] += E.w[k];
    out.total_weight += E.w[k];
  }
  size_t best =
      size_t(std::max_element(out.cell_weight.begin(), out.cell_weight.end()) -
             out.cell_weight.begin());
  out.i_star = int(best) / n2;
  out.j_star = int(best) % n2;
  out.best_weight = out.cell_weight[best];
  out.E_ij.resolution = E.resolution;
  for (size_t k = 0; k < E.size(); ++k)
    if (out.dir_index[k] == out.i_star && out.net_index[k] == out.j_star) {
      out.E_ij.pts.push_back(E.pts[k]);
      out.E_ij.w.push_back(E.w[k]);
      out.thetas_ij.push_back(dirs[k]);
    }
  return out;
}

// ------------------------------------------------------------------- cones

double cone_distance(const Cone& c, Point p) {
  Vec v = p - c.apex;
  double b = dot(v, c.axis);
  double q = norm(v - b * c.axis);
  double r2 = std::sqrt(b * b + q * q);
  double ang = std::atan2(q, b);
  if (ang <= c.alpha) return r2 <= c.t ? 0.0 : r2 - c.t;
  double ca = std::cos(c.alpha), sa = std::sin(c.alpha);
  double s = b * ca + q * sa;  // arclength along the nearest generator
  if (s <= 0) return r2;
  if (s >= c.t) return std::hypot(b - c.t * ca, q - c.t * sa);
  return -b * sa + q * ca;
}

// ------------------------------------------------------------ cone domains

bool LipschitzDomainSpec::in_cones(Point p) const {
  for (const Cone& c : cones)
    if (c.contains(p)) return true;
  return false;
}

bool LipschitzDomainSpec::contains(Point p) const {
  return in_cones(p) && hull.signed_dist(p) < 0;
}

Json LipschitzDomainSpec::to_json() const {
  Json j;
  j["i"] = i;
  j["j"] = j;
  j["x_i"] = vec_json(x_i);
  j["y_j"] = vec_json(y_j);
  j["L"] = L;
  j["alpha"] = alpha;
  j["height"] = height;
  j["B_j"] = ball_json(B_j);
  j["B_j_prime"] = ball_json(B_j_prime);
  j["psi_scale"] = psi_scale;
  j["apexes"] = E_ij.size();
  Json cs = Json::array();
  for (const Cone& c : cones) cs.push_back(c.to_json());
  j["cones"] = cs;
  Json certs = Json::array();
  for (const ConeCertificate& c : certificates) certs.push_back(c.to_json());
  j["certificates"] = certs;
  return j;
}

LipschitzDomainSpec build_domain(const Scene& sc, const std::string& omega_label,
                                 const Ball& B_hat, const BoundarySample& E_ij, Vec x_i,
                                 Point y_j, const ConstantLedger& led, double ray_step) {
  led.validate();
  if (E_ij.size() == 0) throw InputError("build_domain: empty apex cluster");
  if (!(ray_step > 0)) throw InputError("build_domain: ray step not positive");
  x_i = unit(x_i);
  double t = led.t, tau = led.tau, al = led.alpha();
  for (const Point& xi : E_ij.pts)
    if (dist(xi, y_j) > tau * (1 + 1e-9))
      throw InputError("build_domain: apex cluster wider than tau");
  if (!(tau <= t / 4 * std::sin(al) * (1 + 1e-12)) || !(t / 4 + tau <= t / 2))
    throw InputError("build_domain: tau incompatible with the cone profile");

  LipschitzDomainSpec spec;
  spec.x_i = x_i;
  spec.y_j = y_j;
  spec.L = led.L;
  spec.alpha = al;
  spec.height = t / 2;
  spec.B_j = Ball{y_j, tau};
  spec.B_j_prime = Ball{y_j + (t / 4) * x_i, tau};
  spec.hull = HullTwoBalls{spec.B_j, spec.B_j_prime};
  spec.E_ij = E_ij;
  spec.psi_scale = led.rho * led.r;
  for (const Point& xi : E_ij.pts) spec.cones.push_back(Cone{xi, x_i, al, t / 2});

  // the translated ball center lies in every member cone, so cone convexity
  // makes the union star-shaped about it
  Point z0 = spec.B_j_prime.center;
  for (const Cone& c : spec.cones)
    if (cone_distance(c, z0) > 1e-9 * t)
      throw HypothesisError("build_domain: star center escapes a member cone");

  for (const Cone& c : spec.cones) {
    ConeCertificate cert = verify_cone(sc, omega_label, c, ray_step);
    if (!cert.contained)
      throw HypothesisError("build_domain: a cone leaves the component " + omega_label);
    spec.certificates.push_back(cert);
  }

  double bound = (1 + 1 / (4 * led.C)) * B_hat.radius * (1 + 1e-12);
  double reach = 0;
  for (const Point& xi : E_ij.pts) reach = std::max(reach, dist(xi, B_hat.center) + t / 2);
  Point hb_c = 0.5 * (spec.B_j.center + spec.B_j_prime.center);
  double hb_r = 0.5 * dist(spec.B_j.center, spec.B_j_prime.center) + tau;
  reach = std::max(reach, dist(hb_c, B_hat.center) + hb_r);
  if (reach > bound) throw HypothesisError("build_domain: region exceeds its ball bound");

  // interior sweep along the capsule: member points classify to the component
  Ball ww = sc.window_world();
  Vec pl1 = sc.dim == 2 ? Vec{-x_i.y, x_i.x, 0} : any_perp(x_i);
  Vec pl2 = sc.dim == 2 ? Vec{0, 0, 0} : unit(cross(x_i, pl1));
  int ns = 24, nu = 8;
  for (int is = 0; is < ns; ++is) {
    double s = (is + 0.5) / ns;
    Point base = spec.B_j.center + s * (spec.B_j_prime.center - spec.B_j.center);
    for (int iu = -nu; iu <= nu; ++iu)
      for (int iv = -nu; iv <= (sc.dim == 3 ? nu : 0); ++iv) {
        Point p = base + (tau * iu / (nu + 0.5)) * pl1 + (tau * iv / (nu + 0.5)) * pl2;
        if (!spec.contains(p) || !ww.contains(p)) continue;
        Classification cl = sc.classify(p);
        if (cl.boundary) continue;
        if (cl.label != omega_label)
          throw HypothesisError("build_domain: region leaks into component " + cl.label);
      }
  }

  // apexes sit on the region's graph boundary
  for (const Point& xi : E_ij.pts)
    if (spec.contains(xi - ray_step * x_i))
      throw HypothesisError("build_domain: an apex fails the boundary proxy");
  return spec;
}

// ----------------------------------------------------------------- overlap

Json OverlapResult::to_json() const {
  Json j;
  j["measure"] = measure;
  j["psi_emp"] = psi_emp;
  j["epsilon"] = epsilon;
  j["resolution"] = resolution;
  j["points"] = points;
  return j;
}

OverlapResult overlap(const Scene& sc, const LipschitzDomainSpec& spec, double resolution) {
  if (!(resolution > 0)) throw InputError("overlap: resolution not positive");
  if (spec.cones.empty() || !(spec.psi_scale > 0)) throw InputError("overlap: incomplete spec");
  double eps = spec.B_j.radius / 4;

  OverlapResult out;
  out.epsilon = eps;
  out.resolution = resolution;

  // sample only a window shrunk to the domain neighborhood
  Point hb_c = 0.5 * (spec.B_j.center + spec.B_j_prime.center);
  double hb_r = 0.5 * dist(spec.B_j.center, spec.B_j_prime.center) +
                std::max(spec.B_j.radius, spec.B_j_prime.radius);
  double pad = std::max(4 * eps, 32 * resolution);
  Point hb_model = sc.model_from_world.apply(hb_c);
  double slack = sc.window.radius - dist(hb_model, sc.window.center);
  if (slack < hb_r + eps) throw InputError("overlap: domain too close to the window edge");
  Scene sub = sc;
  sub.window = Ball{hb_model, std::min(hb_r + pad, slack)};
  sub.finalize();

  BoundarySample bs = sub.boundary_sample(resolution);
  for (size_t k = 0; k < bs.size(); ++k) {
    double cd = kInf;
    for (const Cone& c : spec.cones) cd = std::min(cd, cone_distance(c, bs.pts[k]));
    double score = std::max(cd, spec.hull.signed_dist(bs.pts[k]));
    if (score <= eps) {
      out.measure += bs.w[k];
      out.points += 1;
    }
  }
  double denom = spec.psi_scale;
  if (sc.dim == 3) denom *= spec.psi_scale;
  out.psi_emp = out.measure / denom;
  return out;
}

// ------------------------------------------------------------ rho reduction

Json RhoReduction::to_json() const {
  Json j;
  j["xi_prime"] = vec_json(xi_prime);
  j["B_prime"] = ball_json(B_prime);
  j["rho"] = rho;
  j["ratio"] = ratio;
  return j;
}

RhoReduction rho_reduce(const Scene& sc, const Ball& B, double rho, double C) {
  if (!(C >= 2)) throw InputError("rho_reduce: constant below 2");
  if (!(rho > 0 && rho < 1)) throw InputError("rho_reduce: rho outside (0, 1)");
  double want = rho * B.radius / C;
  double depth = sc.distance({0, 0, 0});
  if (!close_rel(depth, want, 1e-4))
    throw InputError("rho_reduce: origin depth does not match rho r / C");

  RhoReduction out;
  out.rho = rho;
  out.xi_prime = sc.closest_boundary({0, 0, 0});
  out.B_prime = Ball{out.xi_prime, 2 * rho * B.radius};
  out.ratio = out.B_prime.radius / want;
  if (dist(out.xi_prime, B.center) + out.B_prime.radius > 3 * B.radius * (1 + 1e-9))
    throw HypothesisError("rho_reduce: shrunk ball escapes 3B");
  if (dist(out.xi_prime, {0, 0, 0}) + want > out.B_prime.radius * (1 + 1e-12))
    throw HypothesisError("rho_reduce: interior ball escapes the shrunk ball");
  return out;
}

// ---------------------------------------------------------------- pipeline

Json PropositionReport::to_json() const {
  Json j;
  j["scene"] = scene_name;
  j["ledger"] = ledger.to_json();
  j["B_input"] = ball_json(B_input);
  j["M_measured"] = M_measured;
  j["rho_input"] = rho_input;
  j["rho_reduced"] = rho_reduced;
  if (reduction) j["reduction"] = reduction->to_json();
  j["normalization"] = norm.to_json();
  j["world_from_core"] = motion_json(world_from_core);
  j["surjectivity"] = surjectivity.to_json();
  j["S_weight"] = S_weight;
  j["E_kappa_weight"] = E_kappa_weight;
  j["D_half"] = D_half;
  j["r_A_min"] = r_A_min;
  j["r_A_max"] = r_A_max;
  j["resolution_rounds"] = resolution_rounds;
  j["partition"] = part.to_json();
  j["domain"] = domain.to_json();
  j["overlap_base"] = overlap_base.to_json();
  j["overlap_fine"] = overlap_fine.to_json();
  j["psi_stability"] = psi_stability;
  j["domain_bound"] = ball_json(domain_bound);
  j["margin_4B"] = margin_4B;
  return j;
}

PropositionReport run_proposition(const Scene& sc, const Ball& B, double C,
                                  const PropositionParams& params) {
  if (!(C >= 2)) throw InputError("run_proposition: constant below 2");
  if (!(params.upsilon > 0 && params.upsilon < 0.25))
    throw InputError("run_proposition: upsilon outside (0, 1/4)");
  int d = sc.dim - 1;
  double r = B.radius;

  PropositionReport rep;
  rep.scene_name = sc.name;
  rep.B_input = B;

  rep.M_measured = sc.boundary_measure(B, r / 512) / (d == 1 ? r : r * r);
  double M_use = rep.M_measured;
  if (params.M > 0) {
    if (rep.M_measured > params.M * (1 + 1e-9))
      throw HypothesisError("run_proposition: measured regularity exceeds the supplied bound");
    M_use = params.M;
  }

  NormalizeResult n1 = normalize(sc, B, C, params.omega_label);
  rep.rho_input = n1.rho;
  double r_eff = r, C_eff = C;
  if (n1.rho < 1.0) {
    RhoReduction red = rho_reduce(n1.scene, n1.B_hat, n1.rho, C);
    NormalizeResult n2 = normalize(n1.scene, red.B_prime, 2 * C, n1.omega_label);
    if (n2.rho < 1.0)
      throw HypothesisError("run_proposition: reduction failed to restore the full corkscrew");
    rep.rho_reduced = true;
    rep.reduction = red;
    rep.world_from_core = n1.to_world.compose(n2.to_world);
    r_eff = red.B_prime.radius;
    C_eff = 2 * C;
    rep.norm = std::move(n2);
  } else {
    rep.world_from_core = n1.to_world;
    rep.norm = std::move(n1);
  }

  const Scene& core = rep.norm.scene;
  const std::string& omega = rep.norm.omega_label;
  const Ball& Bh = rep.norm.B_hat;
  double a = rep.norm.a;

  double delta = 0.9 * std::min(0.2, r_eff / (2 * C_eff * a));
  int gn = params.grid_n > 0 ? params.grid_n : (d == 1 ? 4096 : 32);
  DirectionGrid grid = build_grid(up_axis(core.dim), delta, gn, core.dim);

  rep.surjectivity = project_surjective(core, Bh, C_eff, a, grid);
  if (!rep.surjectivity.surjective)
    throw HypothesisError("run_proposition: a fiber misses the boundary inside T");
  HullTwoBalls T = rep.surjectivity.T;

  double kappa = kappa_value(d, C_eff, M_use);
  double eta = params.upsilon / (8 * C_eff);
  double t = r_eff / (2 * C_eff);
  double cap = cap_measure(grid.d, grid.delta);

  // refine the boundary sample until it resolves the apex cluster scale tau,
  // overshooting a little so one round usually settles it
  double res = r_eff / 256;
  double c0 = 0, tau = 0;
  BoundarySample E;
  std::vector<Vec> dirs;
  int rounds = 0;
  for (;;) {
    ++rounds;
    if (rounds > 4)
      throw ResolutionError("run_proposition: sampling failed to reach tau / 2 in four rounds");
    BoundarySample full = core.boundary_sample(res);
    BoundarySample S = full.restricted([&](Point p) { return T.signed_dist(p) <= 0.0; });
    if (S.size() == 0) throw HypothesisError("run_proposition: no boundary sample inside T");
    VisibilityTable table = visible_table(core, S, grid, false);
    std::vector<int> eidx;
    for (size_t k = 0; k < S.size(); ++k)
      if (table.direction_weight(int(k)) >= kappa * cap) eidx.push_back(int(k));
    if (eidx.empty())
      throw HypothesisError("run_proposition: the kappa-dense visible set is empty");

    E = BoundarySample{};
    E.resolution = S.resolution;
    dirs.clear();
    c0 = 1.0;
    rep.r_A_min = kInf;
    rep.r_A_max = 0;
    std::vector<std::uint8_t> A(size_t(grid.size()));
    for (int k : eidx) {
      for (int node = 0; node < grid.size(); ++node) A[size_t(node)] = table.bit(node, k) ? 1 : 0;
      PorosityResult pr = find_dense_cap(grid, A, eta, kappa);
      c0 = std::min(c0, pr.c0);
      rep.r_A_min = std::min(rep.r_A_min, pr.r_A);
      rep.r_A_max = std::max(rep.r_A_max, pr.r_A);
      E.pts.push_back(S.pts[size_t(k)]);
      E.w.push_back(S.w[size_t(k)]);
      dirs.push_back(-1.0 * pr.theta_A);
    }
    rep.S_weight = S.total();
    rep.E_kappa_weight = E.total();
    tau = t / 4 * std::sin(0.5 * params.upsilon * c0 * delta);
    if (res <= tau / 2 * (1 + 1e-12)) break;
    res = 0.45 * tau;
  }
  rep.resolution_rounds = rounds;

  rep.D_half = unit_ball_volume(d) * (d == 1 ? t : t * t) / 2;
  if (!(rep.E_kappa_weight >= rep.D_half))
    throw HypothesisError("run_proposition: visible set mass falls below half the disk");

  ConstantLedger led =
      couple_constants(d, r_eff, C_eff, M_use, 1.0, params.upsilon, delta, c0, eta);
  led.a = a;
  double cap_x = d == 1 ? std::asin(std::min(1.0, delta))
                        : std::asin(std::min(1.0, delta * std::sqrt(2.0)));
  std::vector<Vec> xs = sphere_net(-1.0 * up_axis(core.dim), cap_x, led.alpha(), d);
  std::vector<int> yk = boundary_net(E.pts, led.tau);
  std::vector<Point> ys;
  for (int k : yk) ys.push_back(E.pts[size_t(k)]);
  led.n1 = int(xs.size());
  led.n2 = int(ys.size());
  led.validate();
  rep.ledger = led;

  rep.part = partition(E, dirs, xs, ys);
  rep.domain = build_domain(core, omega, Bh, rep.part.E_ij, xs[size_t(rep.part.i_star)],
                            ys[size_t(rep.part.j_star)], led, led.t * params.step_scale);
  rep.domain.i = rep.part.i_star;
  rep.domain.j = rep.part.j_star;

  double res_base = rep.domain.B_j.radius / 4 * params.overlap_scale;
  rep.overlap_base = overlap(core, rep.domain, res_base);
  rep.overlap_fine = overlap(core, rep.domain, res_base / 2);
  if (!(rep.overlap_base.psi_emp > 0) || !(rep.overlap_fine.psi_emp > 0))
    throw HypothesisError("run_proposition: empty boundary overlap");
  rep.psi_stability =
      std::fabs(rep.overlap_fine.psi_emp - rep.overlap_base.psi_emp) / rep.overlap_base.psi_emp;

  rep.domain_bound = Ball{Bh.center, (1 + 1 / (4 * C_eff)) * Bh.radius};
  Point c_world = rep.world_from_core.apply(rep.domain_bound.center);
  rep.margin_4B = 4 * r - (dist(c_world, B.center) + rep.domain_bound.radius);
  if (!(rep.margin_4B > 0))
    throw HypothesisError("run_proposition: subdomain bound escapes 4B");
  return rep;
}

}  // namespace gmt
