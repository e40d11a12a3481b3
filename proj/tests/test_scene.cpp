// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gmt/common.hpp"
#include "gmt/scene.hpp"

using namespace gmt;

TEST_CASE("catalog labels at known points") {
  Scene hp = make_scene("halfplane");
  CHECK(hp.classify({0, 1, 0}).label == "upper");
  CHECK(hp.classify({0, -1, 0}).label == "lower");
  CHECK(hp.classify({0.5, 0, 0}).boundary);

  Scene dk = make_scene("disk");
  CHECK(dk.classify({0, 0, 0}).label == "inside");
  CHECK(dk.classify({1.5, 0, 0}).label == "outside");
  CHECK(dk.classify({std::cos(1.0), std::sin(1.0), 0}).boundary);

  Scene an = make_scene("annulus");
  CHECK(an.classify({0, 0, 0}).label == "core");
  CHECK(an.classify({0.8, 0, 0}).label == "ring");
  CHECK(an.classify({1.5, 0, 0}).label == "outside");

  Scene pg = make_scene("polygon");
  CHECK(pg.classify({0, 0, 0}).label == "inside");
  CHECK(pg.classify({1, 1, 0}).label == "outside");
  CHECK(pg.classify({0.5, 0.2, 0}).boundary);

  Scene lg = make_scene("lipschitz_graph");
  CHECK(lg.classify({0, 1, 0}).label == "above");
  CHECK(lg.classify({0, -1, 0}).label == "below");

  Scene pc = make_scene("parabola_cusp");
  CHECK(pc.classify({0, 1, 0}).label == "top");
  CHECK(pc.classify({0, -1, 0}).label == "bottom");
  CHECK(pc.classify({1.5, 0, 0}).label == "cusp");
  CHECK(pc.classify({0, 0, 0}).boundary);

  Scene ks = make_scene("koch_snowflake", 3);
  CHECK(ks.classify({0, 0, 0}).label == "inside");
  CHECK(ks.classify({1.8, 0, 0}).label == "outside");

  Scene cc = make_scene("four_corner_cantor", 2);
  CHECK(cc.classify({0, 0, 0}).label == "outside");
  CHECK(cc.classify({-0.49, -0.49, 0}).boundary);  // inside a corner box
}

TEST_CASE("catalog input validation") {
  CHECK_THROWS_AS(make_scene("nope"), InputError);
  CHECK_THROWS_AS(make_scene("koch_snowflake", 13), InputError);
  CHECK_THROWS_AS(make_scene("koch_snowflake", -1), InputError);
  Scene dk = make_scene("disk");
  CHECK_THROWS_AS(dk.classify({5, 0, 0}), InputError);
}

TEST_CASE("epsilon conventions scale with the window") {
  Scene dk = make_scene("disk");
  CHECK(dk.eps_boundary() == doctest::Approx(2e-9));
  CHECK(dk.eps_self() == doctest::Approx(2e-6));
}

TEST_CASE("flood fill component counts match label counts") {
  CHECK(flood_fill_component_count(make_scene("halfplane"), 200) == 2);
  CHECK(flood_fill_component_count(make_scene("disk"), 200) == 2);
  CHECK(flood_fill_component_count(make_scene("annulus"), 200) == 3);
  CHECK(flood_fill_component_count(make_scene("polygon"), 200) == 2);
  CHECK(flood_fill_component_count(make_scene("lipschitz_graph"), 200) == 2);
  CHECK(flood_fill_component_count(make_scene("koch_snowflake", 2), 400) == 2);
  CHECK(flood_fill_component_count(make_scene("four_corner_cantor", 3), 600) == 1);
}

TEST_CASE("boundary sample masses: exact perimeters") {
  double res = 0.01;
  CHECK(make_scene("disk").boundary_sample(res).total() ==
        doctest::Approx(2 * kPi).epsilon(1e-3));
  CHECK(make_scene("annulus").boundary_sample(res).total() ==
        doctest::Approx(2 * kPi * 1.6).epsilon(1e-3));
  CHECK(make_scene("polygon").boundary_sample(res).total() == doctest::Approx(4.0));
  // halfplane: window chord of radius 2
  CHECK(make_scene("halfplane").boundary_sample(res).total() == doctest::Approx(4.0));
  // solid boxes keep total edge length 4 at every depth
  for (int d : {0, 1, 2, 3})
    CHECK(make_scene("four_corner_cantor", d).boundary_sample(res).total() ==
          doctest::Approx(4.0));
  // snowflake perimeter grows by 4/3 per generation
  double side = 0.9 * std::sqrt(3.0);
  for (int d : {0, 1, 2, 4})
    CHECK(make_scene("koch_snowflake", d).boundary_sample(res).total() ==
          doctest::Approx(3 * side * std::pow(4.0 / 3.0, d)));
}

TEST_CASE("boundary measure inside a ball") {
  Scene dk = make_scene("disk");
  CHECK(dk.boundary_measure({{0, 0, 0}, 0.5, true}, 0.04) == doctest::Approx(0.0));
  double want = 4 * std::asin(0.15);
  CHECK(dk.boundary_measure({{1, 0, 0}, 0.3, true}, 0.02) ==
        doctest::Approx(want).epsilon(0.02));
  CHECK_THROWS_AS(dk.boundary_measure({{1, 0, 0}, 0.3, true}, 0.2), ResolutionError);
}

TEST_CASE("boundary sample ball index matches brute force") {
  Scene ks = make_scene("koch_snowflake", 4);
  BoundarySample bs = ks.boundary_sample(0.01);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int k = 0; k < 30; ++k) {
    Point q{u(rng), u(rng), 0};
    double r = 0.05 + 0.2 * std::fabs(u(rng));
    auto idx = bs.in_ball(q, r);
    std::vector<int> want;
    for (size_t i = 0; i < bs.size(); ++i)
      if (dist(bs.pts[i], q) <= r) want.push_back(int(i));
    CHECK(idx == want);
  }
}

TEST_CASE("restricted sample keeps matching weights") {
  Scene dk = make_scene("disk");
  BoundarySample bs = dk.boundary_sample(0.01);
  BoundarySample right = bs.restricted([](Point p) { return p.x > 0; });
  CHECK(right.total() == doctest::Approx(kPi).epsilon(1e-2));
  CHECK(right.size() < bs.size());
}

TEST_CASE("first hit honors openness") {
  Scene dk = make_scene("disk");
  auto hit = dk.first_hit({{-1.5, 0, 0}, {1.5, 0, 0}, Openness::Closed});
  REQUIRE(hit.has_value());
  CHECK(hit->t == doctest::Approx(0.5));
  CHECK(dist(hit->p, {-1, 0, 0}) < 1e-9);
  // open cast from a boundary point inward sees no second crossing
  CHECK(dk.segment_clear({1, 0, 0}, {0.1, 0, 0}));
  CHECK(!dk.segment_clear({1.5, 0, 0}, {-1.5, 0, 0}));
  // degenerate open core counts as clear
  CHECK(dk.segment_clear({0.5, 0, 0}, {0.5, 0, 0}));
  auto none = dk.first_hit({{0, 0, 0}, {0.5, 0, 0}, Openness::Closed});
  CHECK(!none.has_value());
}

TEST_CASE("first_hit_from matches analytic circle crossing") {
  Scene dk = make_scene("disk");
  auto t = dk.first_hit_from({0, 0, 0}, {1, 0, 0}, 0.0, 1.9);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(1.0));
  auto miss = dk.first_hit_from({0, 0, 0}, {1, 0, 0}, 0.0, 0.9);
  CHECK(!miss.has_value());
}

TEST_CASE("scene json round trip is byte stable") {
  for (const char* name : {"halfplane", "disk", "annulus", "polygon", "parabola_cusp"}) {
    Scene sc = make_scene(name);
    Json j1 = sc.to_json();
    Scene back = Scene::from_json(j1);
    CHECK(back.to_json().dump() == j1.dump());
  }
  Scene ks = make_scene("koch_snowflake", 3);
  CHECK(Scene::from_json(ks.to_json()).to_json().dump() == ks.to_json().dump());
  Scene cc = make_scene("four_corner_cantor", 3);
  CHECK(Scene::from_json(cc.to_json()).to_json().dump() == cc.to_json().dump());
}

TEST_CASE("json validation") {
  CHECK_THROWS_AS(Scene::from_json(Json::object()), InputError);
  Json j = make_scene("disk").to_json();
  j["primitives"][0]["kind"] = "mystery";
  CHECK_THROWS_AS(Scene::from_json(j), InputError);
}

TEST_CASE("missing labels are probed from side patterns") {
  Json j;
  j["dimension"] = 2;
  j["window"] = {{"center", {0.0, 0.0}}, {"radius", 1.0}};
  j["primitives"] = Json::array({{{"kind", "halfspace"}, {"normal", {0.0, 1.0}}, {"offset", 0.0}}});
  Scene sc = Scene::from_json(j);
  CHECK(sc.labels().size() == 2);
  CHECK(!sc.classify({0, 0.5, 0}).label.empty());
  CHECK(sc.classify({0, 0.5, 0}).label != sc.classify({0, -0.5, 0}).label);
}

TEST_CASE("rigid transform reinterprets world queries") {
  Scene hp = make_scene("halfplane");
  RigidMotion extra = rotation_taking({1, 0, 0}, {0, 1, 0});
  Scene rot = hp.transformed(extra);
  // world +x axis now maps to the model upper side
  CHECK(rot.classify({1, 0, 0}).label == "upper");
  CHECK(rot.classify({-1, 0, 0}).label == "lower");
  CHECK(rot.classify({0, 1, 0}).boundary);
  CHECK(rot.distance({1, 0, 0}) == doctest::Approx(1.0));
  Point cb = rot.closest_boundary({1, 0.3, 0});
  CHECK(std::fabs(dot(cb, Vec{1, 0, 0})) < 1e-9);  // world boundary is the y axis
}

TEST_CASE("clipped flag marks unbounded or escaping primitives") {
  CHECK(make_scene("halfplane").clipped);
  CHECK(make_scene("parabola_cusp").clipped);
  CHECK(!make_scene("disk").clipped);
  CHECK(!make_scene("polygon").clipped);
  CHECK(make_scene("lipschitz_graph").clipped);  // chain runs past the window
}

TEST_CASE("distance and classification agree near the koch curve") {
  Scene ks = make_scene("koch_snowflake", 5);
  BoundarySample bs = ks.boundary_sample(0.02);
  std::mt19937 rng(17);
  std::uniform_int_distribution<size_t> pick(0, bs.size() - 1);
  for (int k = 0; k < 200; ++k) {
    Point p = bs.pts[pick(rng)];
    CHECK(ks.distance(p) <= 0.011);  // sample sits mid-edge
    CHECK(ks.classify(p).boundary);
  }
}
