#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "inav/extraction.hpp"

using namespace inav;

namespace {

ScanFrame frame_at(Point2 robot, std::vector<ScanPoint> pts) {
  ScanFrame f;
  f.origin = {robot.x, robot.y, 0};
  f.points = std::move(pts);
  return f;
}

LocalGrid empty_grid(Point2 center = {0, 0}, const ExtractionConfig& cfg = {}) {
  return rasterize_and_inflate(frame_at(center, {}), cfg);
}

double hausdorff(const Polygon& a, const Polygon& b) {
  auto one_sided = [](const Polygon& p, const Polygon& q) {
    double worst = 0;
    size_t n = p.vertices.size();
    for (size_t i = 0; i < n; ++i) {
      for (int k = 0; k < 20; ++k) {
        Point2 s = p.vertices[i] + (p.vertices[(i + 1) % n] - p.vertices[i]) * (k / 20.0);
        worst = std::max(worst, q.distance_to_boundary(s));
      }
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

Polygon square(Point2 lo, double side) {
  return Polygon({{lo.x, lo.y}, {lo.x + side, lo.y}, {lo.x + side, lo.y + side}, {lo.x, lo.y + side}});
}

}  // namespace

TEST_CASE("rasterize_and_inflate") {
  SUBCASE("single point dilates to a disk of >= 5 cells") {
    ScanFrame f = frame_at({0, 0}, {{{1, 0}, PolyClass::Background, -1}});
    LocalGrid g = rasterize_and_inflate(f);
    CHECK(g.bg.nx == 400);
    CHECK(g.bg.ny == 400);
    int count = 0;
    for (auto v : g.bg.v)
      if (v) ++count;
    CHECK(count >= 5);
    // and no movable cells
    for (auto v : g.mov.v) CHECK(v == 0);
  }
  SUBCASE("collinear wall points give one dilated band") {
    std::vector<ScanPoint> pts;
    for (double x = 0; x <= 2; x += 0.05) pts.push_back({{x, 1}, PolyClass::Background, -1});
    LocalGrid g = rasterize_and_inflate(frame_at({0, 0}, pts));
    // band is 3 cells tall (1 + dilation radius each side)
    std::set<int> rows;
    for (int y = 0; y < g.bg.ny; ++y)
      for (int x = 0; x < g.bg.nx; ++x)
        if (g.bg.at(x, y)) rows.insert(y);
    CHECK(rows.size() == 3);
  }
  SUBCASE("movable cells carry the object id") {
    ScanFrame f = frame_at({0, 0}, {{{2, 0}, PolyClass::Movable, 9}});
    LocalGrid g = rasterize_and_inflate(f);
    Cell c = g.mov.world_to_cell({2, 0});
    CHECK(g.movable_id(c.x, c.y) == 9);
  }
}

TEST_CASE("extract_contours") {
  ExtractionConfig cfg;
  SUBCASE("filled 3x3 square -> 4-vertex polygon close to truth") {
    LocalGrid g = empty_grid();
    Polygon truth = square({0, 0}, 3.0);
    rasterize_polygon(g.bg, truth, 1);
    PolygonSetLocal polys = extract_contours(g, cfg);
    REQUIRE(polys.background.size() == 1);
    CHECK(polys.background[0].vertices.size() == 4);
    CHECK(hausdorff(polys.background[0], truth) <= 0.225);
    CHECK(polys.background[0].signed_area() > 0);  // CCW
  }
  SUBCASE("L-shaped blob -> about 6 vertices") {
    LocalGrid g = empty_grid();
    Polygon ell({{0, 0}, {3, 0}, {3, 1.5}, {1.5, 1.5}, {1.5, 3}, {0, 3}});
    rasterize_polygon(g.bg, ell, 1);
    PolygonSetLocal polys = extract_contours(g, cfg);
    REQUIRE(polys.background.size() == 1);
    size_t nv = polys.background[0].vertices.size();
    CHECK(nv >= 5);
    CHECK(nv <= 7);
    // oracle: unsimplified contour stays within the simplification tolerance
    CHECK(hausdorff(polys.background[0], ell) <= 0.225 + 0.15);
  }
  SUBCASE("two disjoint blobs -> two polygons") {
    LocalGrid g = empty_grid();
    rasterize_polygon(g.bg, square({0, 0}, 2.0), 1);
    rasterize_polygon(g.bg, square({5, 5}, 2.0), 1);
    PolygonSetLocal polys = extract_contours(g, cfg);
    CHECK(polys.background.size() == 2);
  }
  SUBCASE("movable polygons keep identity and stay disjoint") {
    LocalGrid g = empty_grid();
    rasterize_polygon(g.mov, square({0, 0}, 1.0), 3 + 1);
    rasterize_polygon(g.mov, square({1.5, 0}, 1.0), 8 + 1);
    PolygonSetLocal polys = extract_contours(g, cfg);
    REQUIRE(polys.movable.size() == 2);
    std::set<int> ids{polys.movable[0].id, polys.movable[1].id};
    CHECK(ids == std::set<int>{3, 8});
    CHECK_FALSE(polygons_overlap(polys.movable[0], polys.movable[1]));
  }
  SUBCASE("tiny blobs dropped as noise") {
    LocalGrid g = empty_grid();
    Cell c = g.bg.world_to_cell({1, 1});
    g.bg.at(c.x, c.y) = 1;
    PolygonSetLocal polys = extract_contours(g, cfg);
    CHECK(polys.background.empty());
  }
}

TEST_CASE("conservativeness: occupied cell centers near their class polygon") {
  LocalGrid g = empty_grid();
  Polygon blob({{0, 0}, {4, 0}, {4, 2}, {2.3, 2}, {2.3, 4}, {0, 4}});
  rasterize_polygon(g.bg, blob, 1);
  PolygonSetLocal polys = extract_contours(g);
  REQUIRE(polys.background.size() == 1);
  const Polygon& out = polys.background[0];
  for (int y = 0; y < g.bg.ny; ++y)
    for (int x = 0; x < g.bg.nx; ++x) {
      if (!g.bg.at(x, y)) continue;
      Point2 p = g.bg.cell_center({x, y});
      bool ok = out.contains(p) || out.distance_to_boundary(p) <= 0.225 + 1e-9;
      CHECK(ok);
    }
}

TEST_CASE("idempotence under re-rasterization") {
  LocalGrid g = empty_grid();
  Polygon blob({{0, 0}, {4, 0}, {4, 2}, {2.3, 2}, {2.3, 4}, {0, 4}});
  rasterize_polygon(g.bg, blob, 1);
  PolygonSetLocal first = extract_contours(g);
  REQUIRE(first.background.size() == 1);

  LocalGrid g2 = empty_grid();
  rasterize_polygon(g2.bg, first.background[0], 1);
  PolygonSetLocal second = extract_contours(g2);
  REQUIRE(second.background.size() == 1);
  CHECK(hausdorff(first.background[0], second.background[0]) <= 0.15 + 1e-9);
}

TEST_CASE("scan-driven extraction end to end") {
  // box between robot and wall: movable polygon extracted with the right id
  std::vector<ScanPoint> pts;
  for (double y = -0.5; y <= 0.5; y += 0.03) pts.push_back({{2, y}, PolyClass::Movable, 4});
  for (double y = -3; y <= 3; y += 0.03) pts.push_back({{5, y}, PolyClass::Background, -1});
  LocalGrid g = rasterize_and_inflate(frame_at({0, 0}, pts));
  PolygonSetLocal polys = extract_contours(g);
  REQUIRE(polys.movable.size() == 1);
  CHECK(polys.movable[0].id == 4);
  REQUIRE(polys.background.size() == 1);
}

TEST_CASE("debug dump is deterministic") {
  LocalGrid g = empty_grid();
  rasterize_polygon(g.bg, square({0, 0}, 2.0), 1);
  PolygonSetLocal polys = extract_contours(g);
  CHECK(dump_debug(g, polys) == dump_debug(g, polys));
  CHECK(dump_debug(g, polys).find("poly_bg") != std::string::npos);
}
