// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gmt/common.hpp"
#include "gmt/geom.hpp"
#include "gmt/primitives.hpp"

using namespace gmt;

TEST_CASE("vector algebra basics") {
  Vec a{1, 2, 3}, b{-2, 0.5, 4};
  CHECK(dot(a, b) == doctest::Approx(11.0));
  Vec c = cross(a, b);
  CHECK(dot(c, a) == doctest::Approx(0.0));
  CHECK(dot(c, b) == doctest::Approx(0.0));
  CHECK(norm(unit(a)) == doctest::Approx(1.0));
  CHECK(arc_dist({1, 0, 0}, {0, 1, 0}) == doctest::Approx(kPi / 2));
  CHECK(arc_dist({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(kPi));
  CHECK(dot(any_perp(a), a) == doctest::Approx(0.0));
}

TEST_CASE("rotation_taking maps from to to and preserves lengths") {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  for (int k = 0; k < 50; ++k) {
    Vec u = unit({g(rng), g(rng), g(rng)});
    Vec v = unit({g(rng), g(rng), g(rng)});
    RigidMotion r = rotation_taking(u, v);
    CHECK(dist(r.apply_dir(u), v) < 1e-12);
    Vec w{g(rng), g(rng), g(rng)};
    CHECK(norm(r.apply_dir(w)) == doctest::Approx(norm(w)));
    RigidMotion back = r.inverse().compose(r);
    CHECK(dist(back.apply(w), w) < 1e-12);
  }
  // antipodal case
  RigidMotion flip = rotation_taking({0, 0, 1}, {0, 0, -1});
  CHECK(dist(flip.apply_dir({0, 0, 1}), {0, 0, -1}) < 1e-12);
}

TEST_CASE("unit ball volumes and cap measures") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
  CHECK(cap_measure(1, 0.3) == doctest::Approx(0.6));
  CHECK(cap_measure(2, 0.3) == doctest::Approx(2 * kPi * (1 - std::cos(0.3))));
}

static double hull_dist_brute(const HullTwoBalls& h, Point p) {
  double best = 1e300;
  int n = 40000;
  for (int i = 0; i <= n; ++i) {
    double s = double(i) / n;
    Point c = h.lo.center + s * (h.hi.center - h.lo.center);
    double r = h.lo.radius + s * (h.hi.radius - h.lo.radius);
    best = std::min(best, dist(p, c) - r);
  }
  return best;
}

TEST_CASE("two-ball hull signed distance matches dense sweep") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  std::uniform_real_distribution<double> ur(0.05, 1.0);
  for (int k = 0; k < 60; ++k) {
    HullTwoBalls h{{{u(rng), u(rng), 0}, ur(rng), true}, {{u(rng), u(rng), 0}, ur(rng), true}};
    for (int j = 0; j < 20; ++j) {
      Point p{u(rng), u(rng), 0};
      double got = h.signed_dist(p);
      double want = hull_dist_brute(h, p);
      CHECK(got == doctest::Approx(want).epsilon(1e-6));
    }
  }
  // degenerate: concentric balls reduce to the larger ball
  HullTwoBalls same{{{0, 0, 0}, 0.2, true}, {{0, 0, 0}, 0.7, true}};
  CHECK(same.signed_dist({1, 0, 0}) == doctest::Approx(0.3));
  CHECK(same.contains({0.69, 0, 0}));
  CHECK(!same.contains({0.71, 0, 0}));
}

TEST_CASE("hull bounding ball encloses both balls") {
  HullTwoBalls h{{{0, 0, 0}, 0.3, true}, {{2, 0, 0}, 0.5, true}};
  Ball b = h.bounding_ball();
  CHECK(b.radius == doctest::Approx(0.5 * (2 + 0.3 + 0.5)));
  CHECK(dist(b.center, {0, 0, 0}) + 0.3 <= b.radius + 1e-12);
  CHECK(dist(b.center, {2, 0, 0}) + 0.5 <= b.radius + 1e-12);
}

TEST_CASE("disk lattice stays on the disk with rim margin") {
  auto pts2 = disk_lattice({1, 1, 0}, {0, 1, 0}, 0.5, 16, 2);
  CHECK(pts2.size() == 14);  // two rim cells dropped
  for (Point p : pts2) {
    CHECK(p.y == doctest::Approx(1.0));
    CHECK(std::fabs(p.x - 1.0) <= 0.5 - 0.5 / 8 + 1e-12);
  }
  auto pts3 = disk_lattice({0, 0, 1}, {0, 0, 1}, 1.0, 16, 3);
  CHECK(pts3.size() > 100);
  for (Point p : pts3) {
    CHECK(p.z == doctest::Approx(1.0));
    CHECK(std::hypot(p.x, p.y) <= 1.0 - 2.0 / 16 + 1e-12);
  }
}

TEST_CASE("primitive distances match sampled oracles") {
  Primitive plane = HalfSpace{{0, 1, 0}, 0.25};
  CHECK(prim_distance(plane, {3, 1.25, 0}) == doctest::Approx(1.0));
  Primitive circ = Sphere{{1, 0, 0}, 2.0};
  CHECK(prim_distance(circ, {1, 0.5, 0}) == doctest::Approx(1.5));
  CHECK(prim_distance(circ, {4, 0, 0}) == doctest::Approx(1.0));
  Primitive box = SolidBox{{-1, -1, 0}, {1, 1, 0}};
  CHECK(prim_distance(box, {0, 0, 0}) == doctest::Approx(0.0));  // solid: inside is the set
  CHECK(prim_distance(box, {2, 0, 0}) == doctest::Approx(1.0));
  CHECK(prim_distance(box, {2, 2, 0}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("parabola distance agrees with dense arc sampling") {
  Parabola pa{1.0};
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 200; ++k) {
    Point p{u(rng), u(rng), 0};
    double got = prim_distance(Primitive{pa}, p);
    double want = 1e300;
    int n = 200000;
    for (int i = 0; i <= n; ++i) {
      double x = -3.0 + 6.0 * i / n;
      double y = x * x;
      want = std::min(want, std::hypot(p.x - x, p.y - y));
      want = std::min(want, std::hypot(p.x - x, p.y + y));
    }
    CHECK(got == doctest::Approx(want).epsilon(1e-5));
  }
}

TEST_CASE("side codes: halfspace, sphere, polygon parity, vertical, parabola, box") {
  Primitive plane = HalfSpace{{0, 1, 0}, 0.0};
  CHECK(prim_side(plane, {0, 1, 0}) == 1);
  CHECK(prim_side(plane, {0, -1, 0}) == -1);
  Primitive circ = Sphere{{0, 0, 0}, 1.0};
  CHECK(prim_side(circ, {0.5, 0, 0}) == -1);
  CHECK(prim_side(circ, {2, 0, 0}) == 1);
  Polyline square{{{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}}, true, SideRule::EvenOdd};
  CHECK(prim_side(Primitive{square}, {0, 0, 0}) == 1);
  CHECK(prim_side(Primitive{square}, {3, 0, 0}) == -1);
  Polyline chain{{{-2, 0, 0}, {0, 0.5, 0}, {2, -0.5, 0}}, false, SideRule::Vertical};
  CHECK(prim_side(Primitive{chain}, {0, 2, 0}) == 1);
  CHECK(prim_side(Primitive{chain}, {0, 0, 0}) == -1);
  Primitive pa = Parabola{1.0};
  CHECK(prim_side(pa, {0, 2, 0}) == 1);
  CHECK(prim_side(pa, {0, -2, 0}) == -1);
  CHECK(prim_side(pa, {2, 0, 0}) == 0);  // between the branches
  Primitive box = SolidBox{{-1, -1, 0}, {1, 1, 0}};
  CHECK(prim_side(box, {2, 2, 0}) == -1);
  CHECK(prim_side(box, {0, 0, 0}) == 0);  // solid box is all boundary set
}

TEST_CASE("ray hits: analytic cases") {
  std::vector<double> ts;
  Primitive circ = Sphere{{0, 0, 0}, 1.0};
  prim_hits(circ, {-2, 0, 0}, {1, 0, 0}, 10, 1e-9, ts);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0] == doctest::Approx(1.0));
  CHECK(ts[1] == doctest::Approx(3.0));

  ts.clear();
  Primitive plane = HalfSpace{{0, 1, 0}, 1.0};
  prim_hits(plane, {0, 0, 0}, {0, 1, 0}, 10, 1e-9, ts);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0] == doctest::Approx(1.0));

  ts.clear();
  Polyline square{{{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}}, true, SideRule::EvenOdd};
  prim_hits(Primitive{square}, {-3, 0, 0}, {1, 0, 0}, 10, 1e-9, ts);
  REQUIRE(ts.size() >= 2);
  CHECK(ts.front() == doctest::Approx(2.0));
  CHECK(ts.back() == doctest::Approx(4.0));

  ts.clear();
  Primitive pa = Parabola{1.0};
  prim_hits(pa, {0.5, 2, 0}, {0, -1, 0}, 10, 1e-9, ts);
  // vertical line x=0.5 crosses y=x^2 at y=0.25 and y=-0.25
  REQUIRE(ts.size() == 2);
  CHECK(ts[0] == doctest::Approx(1.75));
  CHECK(ts[1] == doctest::Approx(2.25));

  ts.clear();
  Primitive box = SolidBox{{-1, -1, 0}, {1, 1, 0}};
  prim_hits(box, {-3, 0.2, 0}, {1, 0, 0}, 10, 1e-9, ts);
  REQUIRE(ts.size() >= 1);
  CHECK(ts.front() == doctest::Approx(2.0));
}

TEST_CASE("ray hit soundness: every reported hit lies near the set") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<Primitive> prims;
  prims.push_back(Sphere{{0.3, -0.2, 0}, 0.8});
  prims.push_back(HalfSpace{{0.6, 0.8, 0}, 0.1});
  prims.push_back(Parabola{0.7});
  prims.push_back(SolidBox{{-0.5, -0.9, 0}, {0.4, 0.1, 0}});
  Polyline zig{{{-1.5, -1, 0}, {-0.5, 1, 0}, {0.5, -1, 0}, {1.5, 1, 0}}, false, SideRule::None};
  prims.push_back(zig);
  for (const auto& pr : prims) {
    for (int k = 0; k < 300; ++k) {
      Point o{u(rng), u(rng), 0};
      double ang = u(rng) * kPi;
      Vec d{std::cos(ang), std::sin(ang), 0};
      std::vector<double> ts;
      prim_hits(pr, o, d, 4.0, 1e-9, ts);
      for (double t : ts) {
        CHECK(t >= 0);
        CHECK(t <= 4.0 + 1e-9);
        CHECK(prim_distance(pr, o + t * d) <= 1e-6);
      }
    }
  }
}

TEST_CASE("ray hit completeness against marching oracle on a circle") {
  Primitive circ = Sphere{{0, 0, 0}, 1.0};
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 400; ++k) {
    Point o{u(rng), u(rng), 0};
    if (std::fabs(std::hypot(o.x, o.y) - 1.0) < 1e-3) continue;
    double ang = u(rng) * kPi;
    Vec d{std::cos(ang), std::sin(ang), 0};
    std::vector<double> ts;
    prim_hits(circ, o, d, 4.0, 1e-9, ts);
    // oracle: quadratic roots
    double b = dot(o - Point{0, 0, 0}, d);
    double c = norm2(o - Point{0, 0, 0}) - 1.0;
    double disc = b * b - c;
    std::vector<double> want;
    if (disc > 1e-12) {
      for (double t : {-b - std::sqrt(disc), -b + std::sqrt(disc)})
        if (t >= 0 && t <= 4.0) want.push_back(t);
    }
    REQUIRE(ts.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) CHECK(ts[i] == doctest::Approx(want[i]));
  }
}

TEST_CASE("edge grid agrees with direct polyline queries") {
  // dense closed polygon approximating a flower curve
  std::vector<Point> pts;
  int m = 3000;
  for (int i = 0; i < m; ++i) {
    double th = 2 * kPi * i / m;
    double r = 1.0 + 0.3 * std::sin(7 * th);
    pts.push_back({r * std::cos(th), r * std::sin(th), 0});
  }
  EdgeGrid grid = EdgeGrid::build(pts, true, int(pts.size()) * 2);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.6, 1.6);
  Polyline pl{pts, true, SideRule::EvenOdd};
  for (int k = 0; k < 500; ++k) {
    Point p{u(rng), u(rng), 0};
    Point cg, cd;
    double dg = grid.distance(pts, true, p, &cg);
    double dd = dist(p, prim_closest(Primitive{pl}, p));
    CHECK(dg == doctest::Approx(dd).epsilon(1e-10));
    double ang = u(rng) * kPi;
    Vec d{std::cos(ang), std::sin(ang), 0};
    auto tg = grid.first_hit(pts, true, p, d, 0.0, 3.0, 1e-9);
    std::vector<double> ts;
    prim_hits(Primitive{pl}, p, d, 3.0, 1e-9, ts);
    if (tg) {
      REQUIRE(!ts.empty());
      CHECK(*tg == doctest::Approx(ts.front()).epsilon(1e-9));
    } else {
      CHECK(ts.empty());
    }
    (void)cd;
  }
}

TEST_CASE("segment openness bookkeeping") {
  Segment s{{0, 0, 0}, {2, 0, 0}, Openness::Open};
  CHECK(s.length() == doctest::Approx(2.0));
  CHECK(dist(s.at(0.5), {1, 0, 0}) < 1e-15);
  CHECK(dist(s.direction(), {1, 0, 0}) < 1e-15);
}
