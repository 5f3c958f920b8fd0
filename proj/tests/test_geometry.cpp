#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "inav/geometry.hpp"

using namespace inav;

namespace {

Polygon make_square(Point2 center, double side, PolyClass cls = PolyClass::Background) {
  double h = side / 2;
  return Polygon({{center.x - h, center.y - h},
                  {center.x + h, center.y - h},
                  {center.x + h, center.y + h},
                  {center.x - h, center.y + h}},
                 cls);
}

// star-shaped random polygon: always simple
Polygon random_polygon(std::mt19937& rng, int n, double rmin = 0.5, double rmax = 3.0) {
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  std::uniform_real_distribution<double> rad(rmin, rmax);
  std::vector<double> angles(n);
  for (auto& a : angles) a = ang(rng);
  std::sort(angles.begin(), angles.end());
  std::vector<Point2> vs;
  for (double a : angles) {
    double r = rad(rng);
    vs.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return Polygon(std::move(vs));
}

// independent oracle: dense sampling of the open segment against polygon interiors
bool visible_oracle(const Point2& a, const Point2& b, const std::vector<Polygon>& polys) {
  const int N = 2000;
  for (int i = 1; i < N; ++i) {
    Point2 p = a + (b - a) * (static_cast<double>(i) / N);
    for (const auto& poly : polys) {
      if (poly.distance_to_boundary(p) > 1e-4 && poly.contains(p)) return false;
    }
  }
  return true;
}

// brute force width: min over hull edges of max vertex distance to the edge line
double width_oracle(const Polygon& p) {
  Polygon hull = convex_hull(p.vertices);
  const auto& h = hull.vertices;
  size_t m = h.size();
  double best = 1e300;
  for (size_t i = 0; i < m; ++i) {
    Point2 a = h[i], b = h[(i + 1) % m];
    Vec2 ab = b - a;
    double len = ab.norm();
    double maxd = 0;
    for (const auto& v : h) maxd = std::max(maxd, std::abs(ab.cross(v - a)) / len);
    best = std::min(best, maxd);
  }
  return best;
}

Polygon giftwrap_hull(const std::vector<Point2>& pts) {
  size_t start = 0;
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i].x < pts[start].x || (pts[i].x == pts[start].x && pts[i].y < pts[start].y))
      start = i;
  std::vector<Point2> hull;
  size_t cur = start;
  do {
    hull.push_back(pts[cur]);
    size_t next = (cur + 1) % pts.size();
    for (size_t i = 0; i < pts.size(); ++i) {
      double o = orient(pts[cur], pts[next], pts[i]);
      if (o < 0 || (o == 0 && (pts[i] - pts[cur]).norm() > (pts[next] - pts[cur]).norm()))
        next = i;
    }
    cur = next;
  } while (cur != start && hull.size() <= pts.size());
  Polygon out;
  out.vertices = hull;
  out.ensure_ccw();
  return out;
}

}  // namespace

TEST_CASE("segment_visible basics") {
  CHECK(segment_visible({0, 0}, {1, 0}, std::vector<Polygon>{}));
  Polygon sq = make_square({1, 0}, 1.0);
  CHECK_FALSE(segment_visible({0, 0}, {2, 0}, std::vector<Polygon>{sq}));
  CHECK(segment_visible({0, 0}, {0, 2}, std::vector<Polygon>{sq}));
  CHECK(visible_oracle({0, 0}, {0, 2}, {sq}));
  // degenerate a==b
  CHECK(segment_visible({1, 1}, {1, 1}, std::vector<Polygon>{sq}));
  // grazing a corner is visible
  CHECK(segment_visible({0.5, -1}, {0.5, 1}, std::vector<Polygon>{sq}));
  // along an edge is visible
  CHECK(segment_visible({0.5, -0.5}, {1.5, -0.5}, std::vector<Polygon>{sq}));
  // endpoint on boundary, crossing interior
  CHECK_FALSE(segment_visible({1, 0}, {3, 0}, std::vector<Polygon>{sq}));
}

TEST_CASE("segment_visible matches sampling oracle on random scenes") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-5, 5);
  for (int it = 0; it < 300; ++it) {
    std::vector<Polygon> polys;
    for (int k = 0; k < 3; ++k) {
      Polygon p = random_polygon(rng, 6, 0.3, 1.2);
      Point2 c{coord(rng), coord(rng)};
      for (auto& v : p.vertices) v += c;
      polys.push_back(p);
    }
    Point2 a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)};
    bool got = segment_visible(a, b, polys);
    bool want = visible_oracle(a, b, polys);
    if (got != want) {
      // tolerate disagreement only when the segment grazes within the global epsilon band
      bool near = false;
      for (const auto& poly : polys)
        for (int i = 0; i <= 100; ++i) {
          Point2 p = a + (b - a) * (i / 100.0);
          if (poly.distance_to_boundary(p) < 2e-4) near = true;
        }
      CHECK(near);
    }
    // symmetry
    CHECK(segment_visible(a, b, polys) == segment_visible(b, a, polys));
  }
}

TEST_CASE("EdgeIndex agrees with segment_visible") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> coord(-8, 8);
  std::vector<Polygon> polys;
  for (int k = 0; k < 8; ++k) {
    Polygon p = random_polygon(rng, 7, 0.3, 1.5);
    Point2 c{coord(rng), coord(rng)};
    for (auto& v : p.vertices) v += c;
    polys.push_back(p);
  }
  EdgeIndex idx(polys);
  for (int it = 0; it < 500; ++it) {
    Point2 a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)};
    CHECK(idx.visible(a, b) == segment_visible(a, b, polys));
  }
}

TEST_CASE("polygon_width analytic cases") {
  CHECK(polygon_width(make_square({0, 0}, 1.0)) == doctest::Approx(1.0));
  double s = 2.0;
  Polygon tri({{0, 0}, {s, 0}, {s / 2, s * std::sqrt(3.0) / 2}});
  CHECK(polygon_width(tri) == doctest::Approx(std::sqrt(3.0)));
  // degenerate collinear polygon
  Polygon line({{0, 0}, {1, 0}, {2, 0}});
  CHECK(polygon_width(line) == 0.0);
}

TEST_CASE("polygon_width matches brute-force oracle") {
  std::mt19937 rng(11);
  for (int it = 0; it < 300; ++it) {
    Polygon p = random_polygon(rng, 10);
    double w = polygon_width(p);
    double w0 = width_oracle(p);
    CHECK(std::abs(w - w0) <= 1e-9 * std::max(1.0, w0));
    // width is hull-invariant
    CHECK(polygon_width(convex_hull(p.vertices)) == doctest::Approx(w).epsilon(1e-12));
    // scale invariance
    Polygon ps = p;
    for (auto& v : ps.vertices) v = v * 3.7;
    CHECK(std::abs(polygon_width(ps) - 3.7 * w) <= 1e-9 * std::max(1.0, 3.7 * w));
  }
}

TEST_CASE("convex_hull basics and oracle") {
  Polygon h = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  CHECK(h.vertices.size() == 4);
  CHECK(h.signed_area() == doctest::Approx(1.0));
  CHECK_THROWS_AS(convex_hull({{0, 0}, {1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(convex_hull({{0, 0}, {1, 1}, {2, 2}, {3, 3}}), std::invalid_argument);

  // circle points all retained
  std::vector<Point2> circle;
  for (int i = 0; i < 12; ++i)
    circle.push_back({std::cos(i * M_PI / 6), std::sin(i * M_PI / 6)});
  CHECK(convex_hull(circle).vertices.size() == 12);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-10, 10);
  std::vector<Point2> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back({coord(rng), coord(rng)});
  Polygon a = convex_hull(pts);
  Polygon b = giftwrap_hull(pts);
  CHECK(a.vertices.size() == b.vertices.size());
  CHECK(a.area() == doctest::Approx(b.area()).epsilon(1e-12));
}

TEST_CASE("inflate") {
  Polygon sq = make_square({0.5, 0.5}, 1.0);
  SUBCASE("r=0 identity") {
    Polygon out = inflate(sq, 0.0);
    REQUIRE(out.vertices.size() == sq.vertices.size());
    for (size_t i = 0; i < out.vertices.size(); ++i)
      CHECK((out.vertices[i] - sq.vertices[i]).norm() == 0.0);
  }
  SUBCASE("negative r rejected") { CHECK_THROWS_AS(inflate(sq, -0.1), std::invalid_argument); }
  SUBCASE("Minkowski area, r=0.5") {
    Polygon out = inflate(sq, 0.5);
    double expect = 1.0 + 4 * 0.5 + M_PI * 0.25;
    CHECK(out.area() == doctest::Approx(expect).epsilon(0.02));
  }
  SUBCASE("vertex clearance, triangle r=0.15") {
    Polygon tri({{0, 0}, {2, 0}, {0.7, 1.4}});
    Polygon out = inflate(tri, 0.15);
    for (const auto& v : tri.vertices)
      CHECK(out.distance_to_boundary(v) >= 0.15 - 0.021);
  }
  SUBCASE("monotonicity by point sampling") {
    std::mt19937 rng(5);
    Polygon p = random_polygon(rng, 8);
    Polygon a = inflate(p, 0.2);
    Polygon b = inflate(p, 0.6);
    std::uniform_real_distribution<double> coord(-4, 4);
    for (int i = 0; i < 500; ++i) {
      Point2 q{coord(rng), coord(rng)};
      if (a.contains(q)) CHECK(b.contains(q));
    }
  }
}

TEST_CASE("polygon_intersection") {
  Polygon a = make_square({0.5, 0.5}, 1.0);
  SUBCASE("disjoint") {
    Polygon b = make_square({5, 5}, 1.0);
    CHECK(polygon_intersection(a, b).empty());
  }
  SUBCASE("identical") {
    auto out = polygon_intersection(a, a);
    REQUIRE(out.size() == 1);
    CHECK(out[0].area() == doctest::Approx(1.0));
  }
  SUBCASE("0.5 overlap, raster area oracle") {
    Polygon b = make_square({1.0, 0.5}, 1.0);
    auto out = polygon_intersection(a, b);
    REQUIRE(out.size() == 1);
    CHECK(out[0].area() == doctest::Approx(0.5).epsilon(1e-9));
    // raster oracle at 0.01 m
    int count = 0;
    for (double x = 0.005; x < 2; x += 0.01)
      for (double y = 0.005; y < 1; y += 0.01)
        if (a.contains({x, y}) && b.contains({x, y})) ++count;
    CHECK(out[0].area() == doctest::Approx(count * 1e-4).epsilon(0.02));
  }
  SUBCASE("commutes") {
    std::mt19937 rng(9);
    for (int it = 0; it < 100; ++it) {
      Polygon p = random_polygon(rng, 7);
      Polygon q = random_polygon(rng, 7);
      for (auto& v : q.vertices) v += Point2{0.8, 0.3};
      double area_pq = 0, area_qp = 0;
      for (const auto& r : polygon_intersection(p, q)) area_pq += r.area();
      for (const auto& r : polygon_intersection(q, p)) area_qp += r.area();
      CHECK(std::abs(area_pq - area_qp) <= 1e-9 * std::max(1.0, area_pq));
    }
  }
}

TEST_CASE("rigid motion helpers") {
  Pose2 p = unicycle_step({0, 0, 0}, 1.0, 0.0, 2.0);
  CHECK(p.x == doctest::Approx(2.0));
  CHECK(p.y == doctest::Approx(0.0));
  p = unicycle_step({0, 0, 0}, 0.0, M_PI / 2, 1.0);
  CHECK(p.psi == doctest::Approx(M_PI / 2));
  p = unicycle_step({0, 0, 0}, 1.0, 1.0, M_PI);
  CHECK(p.x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(p.y == doctest::Approx(2.0));
  CHECK(std::abs(normalize_angle(p.psi - M_PI)) < 1e-9);

  // pushing straight advances the object along the heading
  Pose2 obj{1, 0, 0};
  Pose2 moved = advance_push_pose(obj, {0, 0}, {1, 0}, 0.5, 0.0, 1.0);
  CHECK(moved.x == doctest::Approx(1.5));
  // rotation about the instantaneous center keeps the contact sticking
  Pose2 r1 = advance_push_pose(obj, {0, 0}, {1, 0}, 1.0, 1.0, 0.1);
  Pose2 r2 = advance_push_pose(obj, {0, 0}, {1, 0}, 1.0, 1.0, 0.05);
  // the robot center rides the same rotation about the instantaneous center (0,1)
  Point2 cor{0, 1};
  Point2 rc2 = cor + (Point2{0, 0} - cor).rotated(0.05);
  Pose2 r2b = advance_push_pose(r2, rc2, Vec2{1, 0}.rotated(0.05), 1.0, 1.0, 0.05);
  CHECK(r1.x == doctest::Approx(r2b.x).epsilon(1e-9));
  CHECK(r1.y == doctest::Approx(r2b.y).epsilon(1e-9));
}

TEST_CASE("pose and angle normalization") {
  CHECK(normalize_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
  Pose2 p(0, 0, 5 * M_PI / 2);
  CHECK(p.psi == doctest::Approx(M_PI / 2));
}
