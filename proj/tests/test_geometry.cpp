#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "exactmppi/bench.hpp"
#include "exactmppi/geometry.hpp"
#include "exactmppi/rng.hpp"
#include "exactmppi/scenario_io.hpp"

using namespace exactmppi;

namespace {

FootprintSpec fixture(const std::string& name) {
  return load_footprint(std::string(FIXTURES_DIR) + "/footprints/" + name + ".json");
}

FootprintSpec unit_square() {
  FootprintSpec spec;
  spec.name = "unit_square";
  spec.shape = PolygonFootprint::make({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  return spec;
}

// L-shape used by the sd_polygon/point_in_polygon examples.
PolygonFootprint example_l_shape() {
  return PolygonFootprint::make({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
}

Point2 random_point(std::uint64_t seed, std::uint64_t i, double half_side) {
  return {uniform_range(seed, i, 11, -half_side, half_side),
          uniform_range(seed, i, 13, -half_side, half_side)};
}

const std::vector<std::string> kGallery = {"t_shape", "f_shape",  "l_shape", "star",
                                           "arrow",   "diamond", "trapezoid"};

}  // namespace

TEST_CASE("sd_box spec examples") {
  CHECK(sd_box({0, 0}, {0, 0}, {1, 2}) == doctest::Approx(-1.0));
  CHECK(sd_box({3, 0}, {0, 0}, {1, 2}) == doctest::Approx(2.0));
  CHECK(sd_box({4, 6}, {0, 0}, {1, 2}) == doctest::Approx(5.0));
}

TEST_CASE("sd_rect_cover on the T cover") {
  auto cover = RectangleCover::make({{{0.0, 0.8}, {1.0, 0.2}}, {{0.0, 0.0}, {0.2, 0.6}}});
  CHECK(sd_rect_cover({0, 2.0}, cover) == doctest::Approx(1.0));

  // Brute-force oracle: min over explicit per-box values.
  double via_boxes = std::min(sd_box({0, 0.8}, {0.0, 0.8}, {1.0, 0.2}),
                              sd_box({0, 0.8}, {0.0, 0.0}, {0.2, 0.6}));
  CHECK(via_boxes == doctest::Approx(-0.2));
  CHECK(sd_rect_cover({0, 0.8}, cover) == doctest::Approx(via_boxes));
}

TEST_CASE("single-rectangle cover reduces to sd_box") {
  auto cover = RectangleCover::make({{{0.3, -0.2}, {0.7, 1.1}}});
  for (int i = 0; i < 100; ++i) {
    Point2 p = random_point(42, static_cast<std::uint64_t>(i), 4.0);
    CHECK(sd_rect_cover(p, cover) == doctest::Approx(sd_box(p, {0.3, -0.2}, {0.7, 1.1})));
  }
}

TEST_CASE("rectangle cover construction rejects bad input") {
  CHECK_THROWS_AS(RectangleCover::make({}), std::invalid_argument);
  CHECK_THROWS_AS(RectangleCover::make({{{0, 0}, {0.0, 1.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(RectangleCover::make({{{0, 0}, {1.0, -0.5}}}), std::invalid_argument);
}

TEST_CASE("point_segment_distance spec examples") {
  CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({3, 0}, {-1, 0}, {1, 0}) == doctest::Approx(2.0));
  CHECK(point_segment_distance({2, 2}, {0, 0}, {1, 0}) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("point_in_polygon spec examples") {
  auto square = unit_square();
  CHECK(point_in_polygon({0.5, 0.5}, square.polygon()));
  CHECK_FALSE(point_in_polygon({2.0, 0.5}, square.polygon()));

  auto l = example_l_shape();
  CHECK_FALSE(point_in_polygon({1.5, 1.5}, l));  // concave notch
  // Cross-check with the winding-number oracle.
  CHECK(std::abs(winding_number({1.5, 1.5}, l)) < 0.5);
  CHECK(std::abs(winding_number({0.5, 0.5}, l)) > 0.5);
}

TEST_CASE("sd_polygon spec examples") {
  auto square = unit_square();
  CHECK(sd_polygon({0.5, 0.5}, square.polygon()) == doctest::Approx(-0.5));
  CHECK(sd_polygon({2.0, 0.5}, square.polygon()) == doctest::Approx(1.0));

  auto l = example_l_shape();
  double d = sd_polygon({1.5, 1.5}, l);
  CHECK(d == doctest::Approx(0.5));
  // Dense boundary-sampling oracle agrees.
  CHECK(oracle_sd_polygon({1.5, 1.5}, l, 4000) == doctest::Approx(d).epsilon(1e-3));
}

TEST_CASE("polygon construction enforces invariants") {
  CHECK_THROWS_AS(PolygonFootprint::make({{0, 0}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(PolygonFootprint::make({{0, 0}, {1, 0}, {1, 0}, {0, 1}}),
                  std::invalid_argument);
  // Bowtie self-intersection.
  CHECK_THROWS_AS(PolygonFootprint::make({{0, 0}, {1, 1}, {1, 0}, {0, 1}}),
                  std::invalid_argument);
  // Clockwise input is auto-reversed to CCW.
  auto poly = PolygonFootprint::make({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(signed_area2(poly.vertices()) > 0.0);
}

TEST_CASE("transform_to_body spec examples") {
  auto set = ObstacleSet::padded(std::vector<Point2>{{2, 0}}, 4);

  auto same = transform_to_body(set, {0, 0, 0});
  CHECK(same.points[0].x == doctest::Approx(2.0));
  CHECK(same.points[0].y == doctest::Approx(0.0));

  auto shifted = transform_to_body(set, {1, 0, 0});
  CHECK(shifted.points[0].x == doctest::Approx(1.0));
  CHECK(shifted.points[0].y == doctest::Approx(0.0));

  auto rotated = transform_to_body(ObstacleSet::padded(std::vector<Point2>{{0, 1}}, 2),
                                   {0, 0, std::numbers::pi / 2});
  CHECK(rotated.points[0].x == doctest::Approx(1.0));
  CHECK(rotated.points[0].y == doctest::Approx(0.0).epsilon(1e-12));

  // Padded entries stay at the sentinel with mask false.
  CHECK(shifted.mask[1] == 0);
  CHECK(shifted.points[1].x == doctest::Approx(kPaddedCoordinate));
}

TEST_CASE("min_signed_distance spec examples") {
  auto square = unit_square();
  auto set = ObstacleSet::padded(std::vector<Point2>{{2, 0}, {0, 3}}, 8);
  CHECK(min_signed_distance(square, set) == doctest::Approx(1.0));

  auto set2 = ObstacleSet::padded(std::vector<Point2>{{0.5, 0.5}, {5, 5}}, 8);
  CHECK(min_signed_distance(square, set2) == doctest::Approx(-0.5));

  CHECK(min_signed_distance(square, ObstacleSet::all_masked(16)) ==
        doctest::Approx(kEmptyMaskDistance));
}

TEST_CASE("min_signed_distance is monotone under mask growth") {
  auto footprint = fixture("t_shape");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point2> pts;
    double prev = kEmptyMaskDistance;
    for (int i = 0; i < 12; ++i) {
      pts.push_back(random_point(900 + trial, static_cast<std::uint64_t>(i), 5.0));
      double d = min_signed_distance(footprint, ObstacleSet::padded(pts, 16));
      CHECK(d <= prev + 1e-12);
      prev = d;
    }
  }
}

TEST_CASE("directional_width spec examples") {
  auto square = unit_square();
  CHECK(directional_width(square, {0, 1}) == doctest::Approx(1.0));
  double inv = 1.0 / std::sqrt(2.0);
  CHECK(directional_width(square, {inv, inv}) == doctest::Approx(std::sqrt(2.0)));

  FootprintSpec l;
  l.name = "example_l";
  l.shape = example_l_shape();
  CHECK(directional_width(l, {1, 0}) == doctest::Approx(2.0));

  CHECK_THROWS_AS(directional_width(square, {1, 1}), std::invalid_argument);
}

TEST_CASE("width is invariant under convex hull") {
  for (const auto& name : kGallery) {
    auto spec = fixture(name);
    auto hull = convex_hull_footprint(spec);
    for (int k = 0; k < 16; ++k) {
      double ang = 2.0 * std::numbers::pi * k / 16;
      Point2 n{std::cos(ang), std::sin(ang)};
      CHECK(directional_width(spec, n) == doctest::Approx(directional_width(hull, n))
                                              .epsilon(1e-12));
    }
  }
}

TEST_CASE("convex hull drops interior and collinear points") {
  auto hull = convex_hull({{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {1, 0}});
  CHECK(hull.size() == 4);
  CHECK(signed_area2(hull) == doctest::Approx(8.0));
}

TEST_CASE("sdf_grid delegates to sd_polygon per cell") {
  auto square = unit_square();
  auto grid = sdf_grid(square, {{-1, -1}, {2, 2}}, 1.5);
  REQUIRE(grid.nx == 2);
  REQUIRE(grid.ny == 2);
  for (std::size_t iy = 0; iy < 2; ++iy)
    for (std::size_t ix = 0; ix < 2; ++ix)
      CHECK(grid.values[iy * 2 + ix] ==
            doctest::Approx(sd_polygon(grid.cell_center(ix, iy), square.polygon())));

  auto single = sdf_grid(square, {{0.4, 0.4}, {0.6, 0.6}}, 0.5);
  CHECK(single.nx == 1);
  CHECK(single.ny == 1);
  CHECK(single.values[0] == doctest::Approx(sd_polygon({0.65, 0.65}, square.polygon())));
}

TEST_CASE("sdf_grid zero level set matches containment") {
  auto t = fixture("t_shape");
  auto grid = sdf_grid(t, {{-1.6003, -1.2001}, {1.6003, 1.6001}}, 0.032);
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      double v = grid.values[iy * grid.nx + ix];
      if (std::abs(v) < 1e-9) continue;
      CHECK((v < 0.0) == point_in_polygon(grid.cell_center(ix, iy), t.polygon()));
    }
  }
}

TEST_CASE("sdf_grid rejects bad input") {
  auto square = unit_square();
  CHECK_THROWS_AS(sdf_grid(square, {{0, 0}, {1, 1}}, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(sdf_grid(square, {{1, 1}, {0, 0}}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(sdf_grid(square, {{0, 0}, {100, 100}}, 0.001, 1000), std::invalid_argument);
}

TEST_CASE("polygon exactness versus independent oracle on the gallery") {
  const int kPoints = 1500;
  const int kSamples = 1200;
  for (const auto& name : kGallery) {
    auto spec = fixture(name);
    const auto& poly = spec.polygon();
    double max_edge = 0.0;
    const auto& verts = poly.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i)
      max_edge = std::max(max_edge, norm(verts[(i + 1) % verts.size()] - verts[i]));
    double tol = 1e-6 + max_edge / (2.0 * (kSamples - 1));

    for (int i = 0; i < kPoints; ++i) {
      Point2 p = random_point(777, static_cast<std::uint64_t>(i), 4.0);
      double d = sd_polygon(p, poly);
      double oracle = oracle_sd_polygon(p, poly, kSamples);
      CHECK(std::abs(std::abs(d) - std::abs(oracle)) <= tol);
      if (std::abs(d) > 1e-6) {
        bool winding_inside = std::abs(winding_number(p, poly)) > 0.5;
        CHECK((d < 0.0) == winding_inside);
      }
    }
  }
}

TEST_CASE("rect cover and polygon agree for rectilinear footprints") {
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"l_shape", "l_shape_rect"}, {"t_shape", "t_shape_rect"}, {"f_shape", "f_shape_rect"}};
  for (const auto& [poly_name, rect_name] : pairs) {
    auto poly = fixture(poly_name);
    auto rect = fixture(rect_name);
    for (int i = 0; i < 10000; ++i) {
      Point2 p = random_point(1234, static_cast<std::uint64_t>(i), 3.0);
      double dp = signed_distance(p, poly);
      double dr = signed_distance(p, rect);
      if (dr > 0.0) CHECK(std::abs(dp - dr) <= 1e-9);
      if (std::abs(dp) > 1e-9 && std::abs(dr) > 1e-9) CHECK((dp < 0.0) == (dr < 0.0));
    }
  }
}

TEST_CASE("signed distance is rigid-motion invariant") {
  auto spec = fixture("arrow");
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t k = static_cast<std::uint64_t>(i);
    Point2 o = random_point(50, k, 5.0);
    Pose2 pose{uniform_range(51, k, 1, -3, 3), uniform_range(51, k, 2, -3, 3),
               uniform_range(51, k, 3, -6, 6)};
    Pose2 g{uniform_range(52, k, 1, -3, 3), uniform_range(52, k, 2, -3, 3),
            uniform_range(52, k, 3, -6, 6)};

    auto body = transform_to_body(ObstacleSet::padded(std::vector<Point2>{o}, 1), pose);
    double d1 = min_signed_distance(spec, body);

    double cg = std::cos(g.theta), sg = std::sin(g.theta);
    Point2 go{g.x + cg * o.x - sg * o.y, g.y + sg * o.x + cg * o.y};
    Pose2 gpose{g.x + cg * pose.x - sg * pose.y, g.y + sg * pose.x + cg * pose.y,
                pose.theta + g.theta};
    auto gbody = transform_to_body(ObstacleSet::padded(std::vector<Point2>{go}, 1), gpose);
    double d2 = min_signed_distance(spec, gbody);

    CHECK(d1 == doctest::Approx(d2).epsilon(1e-9));
  }
}

TEST_CASE("sd_polygon is 1-Lipschitz") {
  auto spec = fixture("star");
  for (int i = 0; i < 10000; ++i) {
    std::uint64_t k = static_cast<std::uint64_t>(i);
    Point2 p = random_point(60, k, 3.0);
    Point2 q = random_point(61, k, 3.0);
    double dp = sd_polygon(p, spec.polygon());
    double dq = sd_polygon(q, spec.polygon());
    CHECK(std::abs(dp - dq) <= norm(p - q) + 1e-12);
  }
}

TEST_CASE("batch_signed_distance matches scalar evaluation and threads") {
  auto spec = fixture("f_shape");
  auto prepared = prepare(spec);
  std::vector<Point2> queries;
  for (int i = 0; i < 5000; ++i)
    queries.push_back(random_point(70, static_cast<std::uint64_t>(i), 6.0));
  std::vector<double> serial(queries.size()), parallel(queries.size());
  batch_signed_distance(queries, prepared, serial, 1);
  batch_signed_distance(queries, prepared, parallel, 4);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    CHECK(serial[i] == parallel[i]);
    CHECK(serial[i] == doctest::Approx(sd_polygon(queries[i], spec.polygon())).epsilon(1e-12));
  }
}

TEST_CASE("prepared rect cover matches sd_rect_cover") {
  auto spec = fixture("l_shape_rect");
  auto prepared = prepare(spec);
  for (int i = 0; i < 2000; ++i) {
    Point2 p = random_point(80, static_cast<std::uint64_t>(i), 4.0);
    CHECK(prepared.sd(p) == doctest::Approx(sd_rect_cover(p, spec.cover())).epsilon(1e-12));
  }
}
