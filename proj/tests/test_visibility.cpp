// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gmt/visibility.hpp"

using namespace gmt;

namespace {

Scene slab_scene(double height) {
  Scene sc;
  sc.dim = 2;
  sc.window = Ball{{0, 0, 0}, 2.0};
  sc.name = "slab";
  sc.prims.push_back(HalfSpace{{0, 1, 0}, height});
  sc.finalize();
  return sc;
}

Polyline square_loop(double half) {
  Polyline pl;
  pl.pts = {{-half, -half, 0}, {half, -half, 0}, {half, half, 0}, {-half, half, 0}};
  pl.closed = true;
  pl.side_rule = SideRule::EvenOdd;
  return pl;
}

double seg_point_dist(Point a, Point b, Point c) {
  Vec ab = b - a;
  double len2 = norm2(ab);
  double s = len2 > 0 ? std::clamp(dot(c - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(c - (a + ab * s));
}

}  // namespace

TEST_CASE("fiber gaps on lines and circles") {
  Scene one_line = make_scene("halfplane");
  CHECK(fiber_gap(one_line, {0, 1, 0}, {0, 0, 0}) == kInf);

  Scene two_lines;
  two_lines.dim = 2;
  two_lines.window = Ball{{0, 0, 0}, 2.0};
  two_lines.prims.push_back(HalfSpace{{0, 1, 0}, 0.0});
  two_lines.prims.push_back(HalfSpace{{0, 1, 0}, 1.0});
  two_lines.finalize();
  CHECK(fiber_gap(two_lines, {0, 1, 0}, {0, 0, 0}) == doctest::Approx(1.0));
  CHECK(fiber_gap(two_lines, {0, -1, 0}, {0, 0, 0}) == doctest::Approx(1.0));

  Scene disk = make_scene("disk");
  CHECK(fiber_gap(disk, {1, 0, 0}, {1, 0, 0}) == doctest::Approx(2.0));
  CHECK(fiber_gap(disk, {0, 1, 0}, {1, 0, 0}) == kInf);  // tangent fiber

  CHECK_THROWS_AS(fiber_gap(disk, {1, 0, 0}, {0.5, 0, 0}), InputError);
  CHECK_THROWS_AS(fiber_gap(disk, {0, 0, 0}, {1, 0, 0}), InputError);
}

TEST_CASE("fiber gap is symmetric in the direction") {
  Scene koch = make_scene("koch_snowflake", 3);
  BoundarySample S = koch.boundary_sample(0.05);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0, 2 * kPi);
  std::uniform_int_distribution<size_t> pick(0, S.size() - 1);
  for (int rep = 0; rep < 50; ++rep) {
    Point xi = S.pts[pick(rng)];
    double ang = u(rng);
    Vec th{std::cos(ang), std::sin(ang), 0};
    CHECK(fiber_gap(koch, th, xi) == fiber_gap(koch, th * -1.0, xi));
  }
}

TEST_CASE("slab boundary is fully visible from the axis plane") {
  Scene sc = slab_scene(0.3);
  BoundarySample S;
  S.resolution = 0.4;
  for (int k = -2; k <= 2; ++k) {
    S.pts.push_back({0.4 * k, 0.3, 0});
    S.w.push_back(0.4);
  }
  DirectionGrid grid = build_grid({0, 1, 0}, 0.1, 16, 2);
  VisibilityTable tab = visible_table(sc, S, grid);
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < int(S.size()); ++j) {
      CHECK(tab.bit(i, j));
      CHECK(tab.gap(i, j) == kInf);
    }
  BoundarySample kept = select_kappa_set(tab, 0.5);
  CHECK(kept.size() == S.size());
  auto [lhs, rhs] = fubini_check(tab);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(lhs == doctest::Approx(grid.total_weight() * S.total()).epsilon(1e-12));

  Json j = tab.to_json();
  CHECK(j["gaps"][0] == -1.0);  // infinite gaps are encoded as -1
  CHECK(j["bits"].size() == size_t(grid.size()));
}

TEST_CASE("a nested square blocks every foot segment") {
  Scene sc;
  sc.dim = 2;
  sc.window = Ball{{0, 0, 0}, 2.0};
  sc.prims.push_back(square_loop(0.8));
  sc.prims.push_back(square_loop(0.2));
  sc.finalize();

  BoundarySample S;
  S.resolution = 0.05;
  for (double x : {-0.05, 0.0, 0.05}) {
    S.pts.push_back({x, 0.8, 0});
    S.w.push_back(0.05);
  }
  DirectionGrid grid = build_grid({0, 1, 0}, 0.05, 8, 2);
  VisibilityTable tab = visible_table(sc, S, grid);
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < int(S.size()); ++j) CHECK_FALSE(tab.bit(i, j));
  CHECK(select_kappa_set(tab, 0.25).size() == 0);
  // nearest other crossing along a near-vertical fiber is the inner square top
  CHECK(tab.gap(grid.n / 2, 1) == doctest::Approx(0.6).epsilon(0.01));
}

TEST_CASE("a small ball casts the analytic shadow") {
  Scene sc;
  sc.dim = 2;
  sc.window = Ball{{0, 0, 0}, 2.0};
  sc.prims.push_back(HalfSpace{{0, 1, 0}, 0.6});
  sc.prims.push_back(Sphere{{0.03, 0.3, 0}, 0.025});
  sc.finalize();

  BoundarySample S;
  S.resolution = 0.1;
  S.pts.push_back({0, 0.6, 0});
  S.w.push_back(1.0);
  DirectionGrid grid = build_grid({0, 1, 0}, 0.1, 16, 2);
  VisibilityTable tab = visible_table(sc, S, grid);

  Point xi = S.pts[0];
  Point ball_c{0.03, 0.3, 0};
  int blocked = 0;
  for (int i = 0; i < grid.size(); ++i) {
    Vec th = grid.nodes[i];
    Point foot = xi - th * dot(xi, th);
    double d = seg_point_dist(foot, xi, ball_c);
    REQUIRE(std::abs(d - 0.025) > 1e-5);  // no marginal node in this layout
    CHECK(tab.bit(i, 0) == (d > 0.025));
    if (d <= 0.025) ++blocked;
  }
  CHECK(blocked >= 2);
  CHECK(blocked <= grid.size() - 2);
}

TEST_CASE("kappa threshold formula") {
  CHECK(kappa_value(1, 2.0, 4.0) == doctest::Approx(1.0 / 16.0));
  CHECK(kappa_value(2, 3.0, 5.0) == doctest::Approx(kPi / 360.0));
  CHECK_THROWS_AS(kappa_value(3, 2.0, 4.0), InputError);
  CHECK_THROWS_AS(kappa_value(1, 0.5, 4.0), InputError);
  CHECK_THROWS_AS(kappa_value(1, 2.0, 0.0), InputError);
}

TEST_CASE("fubini double counting is exact") {
  VisibilityTable t3;
  t3.grid.d = 1;
  t3.grid.n = 3;
  t3.grid.nodes = {{0, 1, 0}, {0, 1, 0}, {0, 1, 0}};
  t3.grid.weights = {1, 1, 1};
  t3.boundary.pts = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  t3.boundary.w = {1, 1, 1};
  t3.bits = {1, 0, 0, 1, 1, 0, 0, 0, 1};
  t3.gaps.assign(9, kInf);
  auto [l3, r3] = fubini_check(t3);
  CHECK(l3 == 4.0);
  CHECK(r3 == 4.0);

  std::mt19937 rng(401);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    VisibilityTable t;
    t.grid = build_grid({0, -1, 0}, 0.1, 64, 2);
    size_t m = 128;
    t.boundary.pts.assign(m, {0, 0, 0});
    t.boundary.w.resize(m);
    for (auto& w : t.boundary.w) w = u(rng);
    t.bits.resize(64 * m);
    for (auto& b : t.bits) b = rng() & 1;
    t.gaps.assign(64 * m, kInf);
    auto [lhs, rhs] = fubini_check(t);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }

  VisibilityTable empty;
  empty.grid = build_grid({0, -1, 0}, 0.1, 8, 2);
  auto [le, re] = fubini_check(empty);
  CHECK(le == 0.0);
  CHECK(re == 0.0);
}

TEST_CASE("slab projection is surjective and survives a small rotation") {
  Scene sc = slab_scene(0.3);
  DirectionGrid grid = build_grid({0, 1, 0}, 0.05, 16, 2);
  SurjectivityReport rep = project_surjective(sc, Ball{{0, 0, 0}, 1.0}, 4.0, 0.6, grid);
  CHECK(rep.surjective);
  CHECK_FALSE(rep.witness.has_value());
  CHECK(rep.delta1 == doctest::Approx(1.0 / 4.8));
  CHECK(rep.disk_radius == doctest::Approx(0.125));
  CHECK(rep.T.lo.radius == doctest::Approx(0.125));
  CHECK(rep.T.hi.radius == doctest::Approx(0.25));
  CHECK(rep.fibers_checked >= 16 * 56);
  REQUIRE(rep.S.size() > 0);
  for (const Point& p : rep.S.pts) {
    CHECK(rep.T.signed_dist(p) <= 0.0);
    CHECK(p.y == doctest::Approx(0.3).epsilon(1e-9));
  }

  Vec turned{std::cos(0.03), std::sin(0.03), 0};
  Scene rot = sc.transformed(rotation_taking({1, 0, 0}, turned));
  SurjectivityReport rep2 = project_surjective(rot, Ball{{0, 0, 0}, 1.0}, 4.0, 0.6, grid);
  CHECK(rep2.surjective);
}

TEST_CASE("projection hypothesis failures raise errors") {
  Scene slab = slab_scene(0.3);
  DirectionGrid wide = build_grid({0, 1, 0}, 0.15, 16, 2);
  // delta1 = 1/(2*4*1.2) ~ 0.104 < 0.15
  CHECK_THROWS_AS(project_surjective(slab, Ball{{0, 0, 0}, 1.0}, 4.0, 1.2, wide), InputError);

  DirectionGrid grid = build_grid({0, 1, 0}, 0.05, 16, 2);
  Scene disk = make_scene("disk");  // both pilot balls inside the same component
  CHECK_THROWS_AS(project_surjective(disk, Ball{{0, 0, 0}, 1.0}, 4.0, 0.6, grid),
                  HypothesisError);
  // upper pilot ball would overlap the boundary line
  CHECK_THROWS_AS(project_surjective(slab, Ball{{0, 0, 0}, 1.0}, 4.0, 0.5, grid),
                  HypothesisError);
}

TEST_CASE("a hole wider than the disk defeats surjectivity with a witness") {
  Scene sc;
  sc.dim = 2;
  sc.window = Ball{{0, 0, 0}, 2.0};
  Polyline left, right;
  left.pts = {{-1.9, 0.3, 0}, {-0.14, 0.3, 0}};
  left.side_rule = SideRule::Vertical;
  right.pts = {{0.14, 0.3, 0}, {1.9, 0.3, 0}};
  right.side_rule = SideRule::Vertical;
  sc.prims.push_back(left);
  sc.prims.push_back(right);
  sc.finalize();
  REQUIRE(sc.classify({0, 0, 0}).label != sc.classify({0, 0.6, 0}).label);

  DirectionGrid grid = build_grid({0, 1, 0}, 0.05, 16, 2);
  SurjectivityReport rep = project_surjective(sc, Ball{{0, 0, 0}, 1.0}, 4.0, 0.6, grid);
  CHECK_FALSE(rep.surjective);
  REQUIRE(rep.witness.has_value());
  auto [theta, x] = *rep.witness;
  CHECK(std::abs(x.x) < 0.13);
  // the witness fiber genuinely meets no boundary point inside the hull
  for (Vec v : {theta, theta * -1.0}) {
    auto t = sc.first_hit_from(x, v, 0.0, 3.0);
    if (t) CHECK(rep.T.signed_dist(x + v * *t) > 0);
  }
}
