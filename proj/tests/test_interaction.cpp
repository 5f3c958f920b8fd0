#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "inav/interaction.hpp"
#include "inav/world.hpp"

using namespace inav;

namespace {

Polygon box(Point2 lo, Point2 hi, PolyClass cls = PolyClass::Background, int id = -1) {
  return Polygon({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}}, cls, id);
}

PolygonSetLocal make_polys(std::vector<Polygon> bg, std::vector<Polygon> mov = {}) {
  PolygonSetLocal polys;
  polys.background = std::move(bg);
  polys.movable = std::move(mov);
  return polys;
}

// open-ended corridor blocked by an oversized box; push-through exits right
struct Corridor {
  PolygonSetLocal polys;
  Polygon object;
  Point2 start{-1.5, 0}, goal{3.5, 0};
};

Corridor corridor_instance() {
  Corridor c;
  c.object = box({-0.5, -1.2}, {0.5, 1.2}, PolyClass::Movable, 5);
  c.polys = make_polys({box({-6, 1}, {1.5, 2}, PolyClass::Background, 0),
                        box({-6, -2}, {1.5, -1}, PolyClass::Background, 1)},
                       {c.object});
  return c;
}

int find_contact(const PushSearchContext& ctx, int edge, double t) {
  for (size_t i = 0; i < ctx.contacts().size(); ++i)
    if (ctx.contacts()[i].edge == edge && std::abs(ctx.contacts()[i].t - t) < 1e-9)
      return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("stable_cone") {
  Polygon sq = box({0, 0}, {1, 1});
  SUBCASE("edge midpoint: straight push stable, cone symmetric") {
    StableCone c = stable_cone(sq, {0, 0.5}, 0.5);
    REQUIRE(c.valid);
    CHECK(c.kappa_min < 0);
    CHECK(c.kappa_max > 0);
    CHECK(std::abs(c.kappa_min + c.kappa_max) <= 0.11);  // one scan step of slack
  }
  SUBCASE("more surface friction never shrinks the cone") {
    StableCone lo = stable_cone(sq, {0, 0.5}, 0.3);
    StableCone hi = stable_cone(sq, {0, 0.5}, 0.8);
    REQUIRE(lo.valid);
    REQUIRE(hi.valid);
    CHECK(hi.kappa_min <= lo.kappa_min + 1e-9);
    CHECK(hi.kappa_max >= lo.kappa_max - 1e-9);
  }
  SUBCASE("wider line contact never shrinks the cone") {
    StableCone narrow = stable_cone(sq, {0, 0.5}, 0.4, 0.2);
    StableCone wide = stable_cone(sq, {0, 0.5}, 0.4, 0.5);
    REQUIRE(narrow.valid);
    REQUIRE(wide.valid);
    CHECK(wide.kappa_min <= narrow.kappa_min + 1e-9);
    CHECK(wide.kappa_max >= narrow.kappa_max - 1e-9);
  }
  SUBCASE("contact near a corner with small friction is more restricted") {
    StableCone mid = stable_cone(sq, {0, 0.5}, 0.15);
    StableCone corner = stable_cone(sq, {0, 0.12}, 0.15);
    REQUIRE(mid.valid);
    if (corner.valid) {
      double mid_span = mid.kappa_max - mid.kappa_min;
      double corner_span = corner.kappa_max - corner.kappa_min;
      CHECK(corner_span <= mid_span + 1e-9);
      // asymmetric support: the cone is no longer centered
      CHECK(std::abs(corner.kappa_min + corner.kappa_max) > 0.04);
    }
  }
  SUBCASE("errors") {
    Polygon tiny = box({0, 0}, {0.1, 0.1});
    CHECK_THROWS_AS(stable_cone(tiny, {0, 0.5}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(stable_cone(sq, {0, 0.5}, 0.0), std::invalid_argument);
  }
}

TEST_CASE("heuristic_polygons") {
  SUBCASE("clear of walls: h = 0") {
    auto [regions, h] = heuristic_polygons(box({0, 0}, {1, 1}), {box({3, 0}, {4, 1})});
    CHECK(regions.empty());
    CHECK(h == 0.0);
  }
  SUBCASE("single 0.4 x 1.0 overlap strip: h = 0.4 * u_x") {
    Polygon obj = box({0, 0}, {1, 1});
    std::vector<Polygon> bg{box({0.6, 0}, {3, 1})};
    auto [regions, h] = heuristic_polygons(obj, bg);
    REQUIRE(regions.size() == 1);
    CHECK(h == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(heuristic_polygons(obj, bg, 2.0).second == doctest::Approx(0.8).epsilon(1e-6));
  }
  SUBCASE("two overlaps on the same side: width of the vertex-union hull") {
    Polygon obj = box({0, 0}, {1, 1});
    std::vector<Polygon> bg{box({-0.5, -1}, {0.4, 0.3}), box({0.6, -1}, {1.5, 0.5})};
    auto [regions, h] = heuristic_polygons(obj, bg);
    REQUIRE(regions.size() == 2);
    // hull spans [0,1] x [0,0.5]
    CHECK(h == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(h <= 0.3 + 0.5);
  }
}

TEST_CASE("expand_state") {
  SUBCASE("free space, centered contact: 7 push successors plus switches") {
    Polygon obj = box({0, 0}, {1, 1}, PolyClass::Movable, 1);
    PushSearchContext ctx(obj, make_polys({}, {obj}), {}, {-2, 0.5}, {3, 0.5});
    CHECK(ctx.contacts().size() == 12);  // midpoint + quarters on each edge
    int c = find_contact(ctx, 0, 0.5);
    REQUIRE(c >= 0);
    auto succ = ctx.expand({c, {}});
    int pushes = 0, switches = 0;
    for (const auto& s : succ) {
      if (s.action.type == PushAction::Type::Push) {
        ++pushes;
        CHECK(s.cost == doctest::Approx(0.3));
      } else {
        ++switches;
        CHECK(s.cost > 0);
      }
    }
    CHECK(pushes == 7);
    // only the centered contacts support a stable straight push; the
    // off-center ones cannot balance the support-friction torque
    CHECK(switches == 3);
    int quarter = find_contact(ctx, 0, 0.25);
    REQUIRE(quarter >= 0);
    CHECK_FALSE(ctx.cone(quarter).valid);
  }
  SUBCASE("switch to the opposite edge costs at least the half perimeter") {
    Polygon obj = box({0, 0}, {1, 1}, PolyClass::Movable, 1);
    PushSearchContext ctx(obj, make_polys({}, {obj}), {}, {-2, 0.5}, {3, 0.5});
    int from = find_contact(ctx, 0, 0.5), to = find_contact(ctx, 2, 0.5);
    REQUIRE(from >= 0);
    REQUIRE(to >= 0);
    std::vector<Point2> path;
    double cost = ctx.switch_cost({}, from, to, &path);
    CHECK(cost >= 2.0);
    CHECK(path.size() >= 3);
  }
  SUBCASE("object flush against a wall: forward pushes pruned") {
    Polygon obj = box({0, 0}, {1, 1}, PolyClass::Movable, 1);
    InteractionConfig cfg;
    cfg.allowed_penetration = 0.0;
    PushSearchContext ctx(obj, make_polys({box({1.001, -1}, {3, 2})}, {obj}), {}, {-2, 0.5},
                          {0.5, 3}, cfg);
    int c = find_contact(ctx, 3, 0.5);  // left edge, pushing +x into the wall
    REQUIRE(c >= 0);
    for (const auto& s : ctx.expand({c, {}}))
      CHECK(s.action.type == PushAction::Type::Switch);
  }
}

TEST_CASE("search_primitive") {
  SUBCASE("corridor push-through") {
    Corridor c = corridor_instance();
    SearchResult res = search_primitive(c.start, c.goal, c.object, c.polys, {});
    REQUIRE(res.success);
    CHECK_FALSE(res.primitive.empty());
    double h0 = heuristic_polygons(c.object, c.polys.background).second;
    CHECK(h0 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.primitive.cost >= h0);
    CHECK(res.primitive.cost >= 2.0);   // must leave the corridor
    CHECK(res.primitive.cost <= 6.0);
    CHECK(res.primitive.result_pose.x > 1.5);
    // costs add up
    double sum = 0;
    for (const auto& a : res.primitive.actions) sum += a.cost;
    CHECK(sum == doctest::Approx(res.primitive.cost));
  }
  SUBCASE("already clear: empty primitive, J = 0") {
    Polygon obj = box({0, 0}, {1, 1}, PolyClass::Movable, 5);
    PolygonSetLocal polys = make_polys({box({4, -1}, {5, 2})}, {obj});
    SearchResult res = search_primitive({-1, 0.5}, {2.5, 0.5}, obj, polys, {});
    REQUIRE(res.success);
    CHECK(res.primitive.empty());
    CHECK(res.primitive.cost == 0.0);
  }
  SUBCASE("sealed corridor: search fails") {
    Polygon obj = box({-1.2, -1.2}, {1.2, 1.2}, PolyClass::Movable, 5);
    PolygonSetLocal polys = make_polys({box({-3, 1}, {3, 2}, PolyClass::Background, 0),
                                        box({-3, -2}, {3, -1}, PolyClass::Background, 1),
                                        box({-4, -2}, {-3, 2}, PolyClass::Background, 2),
                                        box({3, -2}, {4, 2}, PolyClass::Background, 3)},
                                       {obj});
    SearchResult res = search_primitive({-2, 0}, {2, 0}, obj, polys, {});
    CHECK_FALSE(res.success);
    CHECK((res.failure == "exhausted" || res.failure == "budget"));
  }
  SUBCASE("no feasible contact reported") {
    // thin sliver sandwiched between walls: the short ends cannot take a line
    // contact and the robot cannot fit at the long edges
    Polygon obj = box({-3, -0.05}, {3, 0.05}, PolyClass::Movable, 5);
    PolygonSetLocal polys = make_polys({box({-3, 0.06}, {3, 4}, PolyClass::Background, 0),
                                        box({-3, -4}, {3, -0.06}, PolyClass::Background, 1)},
                                       {obj});
    SearchResult res = search_primitive({-4, 0}, {4, 0}, obj, polys, {});
    CHECK_FALSE(res.success);
    CHECK(res.failure == "no contact");
  }
  SUBCASE("debug trace records expansions deterministically") {
    Corridor c = corridor_instance();
    InteractionConfig cfg;
    cfg.record_trace = true;
    SearchResult a = search_primitive(c.start, c.goal, c.object, c.polys, {}, cfg);
    SearchResult b = search_primitive(c.start, c.goal, c.object, c.polys, {}, cfg);
    CHECK(a.trace == b.trace);
    CHECK(a.trace.find("pop c=") != std::string::npos);
  }
}

TEST_CASE("gamma") {
  Corridor c = corridor_instance();
  SUBCASE("not pushable fails immediately, no edge") {
    Affordance aff;
    aff.pushable = false;
    DVGraph g;
    GammaResult r = gamma(c.start, c.goal, c.object, c.polys, aff, {}, &g, 0, 1);
    CHECK_FALSE(r.success);
    CHECK(r.failure == "not pushable");
    CHECK(g.interaction_edges.empty());
  }
  SUBCASE("doubling u_x exactly doubles J on a switch-free instance") {
    Affordance base;
    GammaResult r1 = gamma(c.start, c.goal, c.object, c.polys, base);
    REQUIRE(r1.success);
    for (const auto& a : r1.primitive.actions) REQUIRE(a.type == PushAction::Type::Push);
    Affordance doubled = base;
    doubled.effort = 2.0;
    GammaResult r2 = gamma(c.start, c.goal, c.object, c.polys, doubled);
    REQUIRE(r2.success);
    CHECK(r2.J == 2.0 * r1.J);
  }
  SUBCASE("installs the directed interaction edge") {
    DVGraph g;
    DVVertex wp;
    wp.kind = VertexKind::TopoWaypoint;
    wp.object_id = 5;
    wp.position = c.start;
    int a = g.add_vertex(wp);
    wp.position = c.goal;
    int b = g.add_vertex(wp);
    GammaResult r = gamma(c.start, c.goal, c.object, c.polys, {}, {}, &g, a, b);
    REQUIRE(r.success);
    REQUIRE(g.interaction_edges.size() == 1);
    CHECK(g.interaction_edges[0].from == a);
    CHECK(g.interaction_edges[0].to == b);
    CHECK(g.interaction_edges[0].cost == r.J);
    CHECK(g.affordances.count(5) == 1);
  }
}

TEST_CASE("planned primitives replay in the simulator") {
  // ground-truth corridor; planning sees the true object and inflated walls
  Polygon wall_top = box({-5, 1.05}, {1.5, 2.05}, PolyClass::Background, 0);
  Polygon wall_bot = box({-5, -2.05}, {1.5, -1.05}, PolyClass::Background, 1);
  Polygon obj = box({-0.5, -1}, {0.5, 1}, PolyClass::Movable, 5);

  PolygonSetLocal planning;
  planning.background = {inflate(wall_top, 0.15), inflate(wall_bot, 0.15)};
  planning.movable = {obj};
  InteractionConfig cfg;
  cfg.allowed_penetration = 0.15;

  SearchResult res = search_primitive({-1.5, 0}, {3.5, 0}, obj, planning, {}, cfg);
  REQUIRE(res.success);
  REQUIRE_FALSE(res.primitive.empty());

  Scenario sc;
  sc.name = "replay";
  sc.bounds_min = {-10, -10};
  sc.bounds_max = {10, 10};
  sc.background = {wall_top, wall_bot};
  MovableObjectTruth truth;
  truth.id = 5;
  truth.shape = obj;
  truth.pose = {};
  truth.mass = 1.0;
  truth.ground_friction = 0.3;
  truth.surface_friction = 0.5;
  sc.movables.push_back(truth);
  sc.robot.pose = {-4, 0, 0};
  World world(sc);

  for (const auto& a : res.primitive.actions) {
    if (a.type != PushAction::Type::Push) continue;
    Pose2 cur = world.movable(5).pose;
    Point2 contact = cur.transform(a.contact.point_on(obj));
    auto out = world.step_push(5, contact, a.v, a.omega, a.duration);
    CHECK(out.moved);
  }
  Pose2 got = world.movable(5).pose;
  Pose2 want = res.primitive.result_pose;
  CHECK((got.position() - want.position()).norm() <= 0.05);
  CHECK(std::abs(normalize_angle(got.psi - want.psi)) <= 5.0 * M_PI / 180.0);
}

TEST_CASE("admissibility over randomized corridor instances") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> depth(0.1, 0.35), bw(0.35, 0.9), gap(1.8, 2.6);
  int solved = 0;
  for (int trial = 0; trial < 25; ++trial) {
    double half_gap = 0.5 * gap(rng);
    double d_top = depth(rng), d_bot = depth(rng), w = bw(rng);
    Polygon obj = box({-w, -half_gap - d_bot}, {w, half_gap + d_top}, PolyClass::Movable, 5);
    PolygonSetLocal polys =
        make_polys({box({-6, half_gap}, {1.6, half_gap + 1}, PolyClass::Background, 0),
                    box({-6, -half_gap - 1}, {1.6, -half_gap}, PolyClass::Background, 1)},
                   {obj});
    SearchResult res = search_primitive({-2.5, 0}, {4, 0}, obj, polys, {});
    if (!res.success) continue;
    ++solved;
    double h0 = heuristic_polygons(obj, polys.background).second;
    CHECK(res.primitive.cost >= h0 - 1e-9);
  }
  CHECK(solved >= 15);
}
