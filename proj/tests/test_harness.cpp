#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <json.hpp>

#include "inav/global_planner.hpp"
#include "inav/harness.hpp"
#include "inav/system.hpp"

using namespace inav;

namespace {

Polygon box(Point2 lo, Point2 hi, PolyClass cls = PolyClass::Background, int id = -1) {
  return Polygon({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}}, cls, id);
}

// 20x20 m walled box with nothing inside and one diagonal task
Scenario open_scenario() {
  Scenario s;
  s.name = "open";
  s.bounds_min = {-10, -10};
  s.bounds_max = {10, 10};
  double t = 0.5;
  s.background.push_back(box({-10, -10}, {10, -10 + t}));
  s.background.push_back(box({-10, 10 - t}, {10, 10}));
  s.background.push_back(box({-10, -10 + t}, {-10 + t, 10 - t}));
  s.background.push_back(box({10 - t, -10 + t}, {10, 10 - t}));
  for (size_t i = 0; i < s.background.size(); ++i) {
    s.background[i].id = static_cast<int>(i);
    s.background[i].ensure_ccw();
  }
  s.tasks.push_back({{-7, -7}, {7, 7}});
  s.robot.pose = {-7, -7, 0};
  s.validate();
  return s;
}

double min_clearance(const Scenario& s, const Point2& p) {
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Polygon& poly) {
    if (poly.contains(p)) best = 0.0;
    best = std::min(best, poly.distance_to_boundary(p));
  };
  for (const auto& poly : s.background) consider(poly);
  for (const auto& m : s.movables) consider(m.world_polygon());
  return best;
}

double class_separation(ScenarioClass c) {
  switch (c) {
    case ScenarioClass::Room:
    case ScenarioClass::RoomWithObjects: return 16.0;
    case ScenarioClass::Office: return 80.0;
    case ScenarioClass::Tunnel: return 100.0;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("class and planner names round-trip") {
  for (auto c : {ScenarioClass::Room, ScenarioClass::RoomWithObjects, ScenarioClass::Office,
                 ScenarioClass::Tunnel})
    CHECK(scenario_class_from_name(scenario_class_name(c)) == c);
  for (auto k : {PlannerKind::Ours, PlannerKind::GridAstar, PlannerKind::FarLike})
    CHECK(planner_from_name(planner_name(k)) == k);
  CHECK_THROWS(scenario_class_from_name("bogus"));
  CHECK_THROWS(planner_from_name("bogus"));
}

TEST_CASE("generation is deterministic per (class, seed)") {
  for (auto c : {ScenarioClass::Room, ScenarioClass::RoomWithObjects, ScenarioClass::Office,
                 ScenarioClass::Tunnel}) {
    Scenario a = generate_scenario(c, 7);
    Scenario b = generate_scenario(c, 7);
    CHECK(a.serialize() == b.serialize());
    Scenario d = generate_scenario(c, 8);
    CHECK(a.serialize() != d.serialize());
    CHECK(Scenario::parse(a.serialize()).serialize() == a.serialize());
  }
}

TEST_CASE("generated room matches the checked-in golden file") {
  Scenario s = generate_scenario(ScenarioClass::Room, 1);
  std::ifstream in(std::string(TEST_DATA_DIR) + "/room_seed1.scn");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(s.serialize() == ss.str());
}

TEST_CASE("tasks are in free space with class separation") {
  struct CS { ScenarioClass c; uint64_t seed; };
  for (auto [c, seed] : {CS{ScenarioClass::Room, 1}, CS{ScenarioClass::Room, 2},
                         CS{ScenarioClass::RoomWithObjects, 1}, CS{ScenarioClass::RoomWithObjects, 3},
                         CS{ScenarioClass::Office, 1}, CS{ScenarioClass::Tunnel, 1}}) {
    Scenario s = generate_scenario(c, seed);
    CHECK(!s.tasks.empty());
    for (const auto& t : s.tasks) {
      CHECK((t.start - t.goal).norm() >= class_separation(c));
      CHECK(min_clearance(s, t.start) > s.robot.radius);
      CHECK(min_clearance(s, t.goal) > s.robot.radius);
    }
  }
}

TEST_CASE("room-with-objects tasks require moving an object") {
  for (uint64_t seed : {1, 2, 5}) {
    Scenario s = generate_scenario(ScenarioClass::RoomWithObjects, seed);
    CHECK(s.movables.size() >= 3);
    CHECK(s.movables.size() <= 6);
    // with every movable frozen in place the inflated grid must not connect
    // start to goal, while the push-aware oracle (movables excluded) does
    LocalGrid g = rasterize_scenario(s, 0.15, s.robot.radius);
    IntGrid occ(g.bg.origin, g.bg.res, g.bg.nx, g.bg.ny, 0);
    for (size_t i = 0; i < occ.v.size(); ++i)
      occ.v[i] = (g.bg.v[i] != 0 || g.mov.v[i] != 0) ? 1 : 0;
    for (const auto& t : s.tasks) {
      auto frozen = grid_astar(occ, [](int32_t v) { return v != 0; },
                               occ.world_to_cell(t.start), occ.world_to_cell(t.goal));
      CHECK(!frozen.has_value());
      CHECK(shortest_length_oracle(s, t.start, t.goal).has_value());
    }
  }
}

TEST_CASE("oracle length tracks the euclidean distance in open space") {
  Scenario s = open_scenario();
  const Task& t = s.tasks[0];
  double euclid = (t.start - t.goal).norm();
  auto l = shortest_length_oracle(s, t.start, t.goal);
  REQUIRE(l.has_value());
  // 8-connected paths overshoot a straight line by at most sec(pi/8) ~ 1.0824;
  // endpoints snap to cell centers, undershooting by up to res*sqrt(2) each
  CHECK(*l >= euclid - 2 * 0.15 * std::sqrt(2.0));
  CHECK(*l <= euclid * 1.0824 + 2 * 0.15);
}

TEST_CASE("spl per-task contribution") {
  CHECK(spl_term(true, 10.0, 10.0) == doctest::Approx(1.0));
  CHECK(spl_term(true, 10.0, 20.0) == doctest::Approx(0.5));
  CHECK(spl_term(false, 10.0, 10.0) == 0.0);
  // achieved below the oracle (discretization slack) clamps at 1
  CHECK(spl_term(true, 10.0, 9.5) == doctest::Approx(1.0));
  CHECK(spl_term(true, 0.0, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("all planners are near-optimal in an empty room") {
  Scenario s = open_scenario();
  BenchmarkOptions opt;
  opt.run.max_ticks = 1500;
  for (auto k : {PlannerKind::Ours, PlannerKind::FarLike, PlannerKind::GridAstar}) {
    Metrics m = run_benchmark(s, k, opt);
    REQUIRE(m.per_task.size() == 1);
    CHECK(m.per_task[0].success);
    CHECK(m.spl() > 0.85);
    CHECK(!m.table().empty());
    auto j = nlohmann::json::parse(m.to_json());
    CHECK(j.at("planner").get<std::string>() == planner_name(k));
    CHECK(j.at("tasks").size() == 1);
    CHECK(j.at("spl").get<double>() == doctest::Approx(m.spl()));
  }
}

TEST_CASE("tunnel map graph is dense and routable") {
  Scenario s = generate_scenario(ScenarioClass::Tunnel, 1);
  PolygonSetLocal polys;
  DVGraph g = full_map_graph(s, {}, 40.0, &polys);
  CHECK(g.vertices.size() >= 1200);
  CHECK(g.vis_edges.size() >= g.vertices.size());
  EdgeIndex index(polys.all());
  GlobalPath p = plan(g, s.tasks[0].start, s.tasks[0].goal, index);
  CHECK(p.found);
  CHECK(p.cost >= (s.tasks[0].start - s.tasks[0].goal).norm() - 1e-9);
}

TEST_CASE("svg rendering is deterministic and reflects the trace") {
  Scenario s = open_scenario();
  World world(s);
  RunConfig rc;
  rc.max_ticks = 1500;
  RunResult r = run_mission(world, s.tasks[0], rc);
  REQUIRE(r.success);
  REQUIRE(!r.trajectory.empty());
  CHECK((r.trajectory.back() - s.tasks[0].goal).norm() <=
        rc.executor.goal_tolerance + 0.1);

  std::string svg = render_svg(s, &r, nullptr, &s.tasks[0]);
  CHECK(svg == render_svg(s, &r, nullptr, &s.tasks[0]));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);

  RunResult empty;
  std::string bare = render_svg(s, &empty);
  CHECK(bare.find("<polygon") != std::string::npos);
  CHECK(bare.find("<polyline") == std::string::npos);
}
