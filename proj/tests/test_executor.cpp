#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "inav/system.hpp"

using namespace inav;

namespace {

Polygon box(Point2 lo, Point2 hi, PolyClass cls = PolyClass::Background, int id = -1) {
  return Polygon({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}}, cls, id);
}

// 20 x 20 room enclosed by 0.5 m walls
Scenario room() {
  Scenario s;
  s.name = "room";
  s.bounds_min = {-10, -10};
  s.bounds_max = {10, 10};
  s.background.push_back(box({-10, -10}, {10, -9.5}));
  s.background.push_back(box({-10, 9.5}, {10, 10}));
  s.background.push_back(box({-10, -10}, {-9.5, 10}));
  s.background.push_back(box({9.5, -10}, {10, 10}));
  return s;
}

// horizontal wall band y in [0,1] with a doorway gap x in [-1.5, 1.5]
void add_doorway(Scenario& s) {
  s.background.push_back(box({-10, 0}, {-1.5, 1}));
  s.background.push_back(box({1.5, 0}, {10, 1}));
}

MovableObjectTruth doorway_box(double mass) {
  MovableObjectTruth m;
  m.id = 3;
  m.shape = box({-1.25, -0.45}, {1.25, 0.45}, PolyClass::Movable, 3);
  m.pose = {0, 0.5, 0};
  m.mass = mass;
  return m;
}

int count_saturated_pushes(const std::string& trace, double max_force) {
  std::istringstream is(trace);
  std::string line;
  int n = 0;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    // tick,time,x,y,psi,mode,object,v,omega,force,path_cost,event
    std::istringstream ls(line);
    std::string f;
    for (int i = 0; i < 10 && std::getline(ls, f, ','); ++i) {
    }
    if (!f.empty() && std::stod(f) >= max_force - 0.01) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("pure pursuit drives at the target and yields to obstacles") {
  ExecutorParams p;
  Pose2 robot{0, 0, 0};

  SUBCASE("clear path ahead") {
    Command c = collision_free_local(robot, {5, 0}, {}, p);
    CHECK(c.kind == Command::Kind::Drive);
    CHECK(c.v > 0.5);
    CHECK(c.omega == doctest::Approx(0.0));
  }
  SUBCASE("target behind: rotate in place first") {
    Command c = collision_free_local(robot, {-5, 0.1}, {}, p);
    CHECK(c.v == 0.0);
    CHECK(std::abs(c.omega) == doctest::Approx(p.max_yaw_rate));
  }
  SUBCASE("lateral target curves toward it") {
    Command c = collision_free_local(robot, {3, 3}, {}, p);
    CHECK(c.v > 0.0);
    CHECK(c.omega > 0.1);
  }
  SUBCASE("wall ahead caps the speed to stop short of it") {
    std::vector<Polygon> obs{box({0.3, -1}, {1, 1})};
    Command c = collision_free_local(robot, {5, 0}, obs, p);
    CHECK(c.v > 0.0);
    CHECK(c.v < 0.55);  // stop clearance short of the wall at 0.3 m
    Command free_c = collision_free_local(robot, {5, 0}, {}, p);
    CHECK(c.v < free_c.v);
  }
}

TEST_CASE("repeated max-effort pushes without motion mark the object unpushable") {
  DVGraph g;
  InteractionEdge e;
  e.from = 10;
  e.to = 11;
  e.object_id = 7;
  e.cost = 2.0;
  g.interaction_edges.push_back(e);
  std::swap(e.from, e.to);
  g.interaction_edges.push_back(e);

  Executor ex({0, 0});
  ForceReading f;
  f.in_contact = true;
  f.magnitude = 50.0;

  CHECK_FALSE(ex.update_affordance(7, f, false, g));
  CHECK_FALSE(ex.update_affordance(7, f, false, g));
  SUBCASE("motion in between resets the stall counter") {
    ForceReading soft = f;
    soft.magnitude = 3.0;
    CHECK_FALSE(ex.update_affordance(7, soft, true, g));
    CHECK_FALSE(ex.update_affordance(7, f, false, g));
    CHECK_FALSE(ex.update_affordance(7, f, false, g));
    CHECK(g.affordances.at(7).pushable);
    CHECK(g.interaction_edges.size() == 2);
  }
  SUBCASE("third consecutive stall tick removes the edges") {
    CHECK(ex.update_affordance(7, f, false, g));
    CHECK_FALSE(g.affordances.at(7).pushable);
    CHECK(g.interaction_edges.empty());
  }
}

TEST_CASE("free straight run completes without any interaction") {
  Scenario s = room();
  World world(s);
  RunConfig cfg;
  RunResult r = run_mission(world, {{-6, -6}, {6, 6}}, cfg);
  REQUIRE(r.success);
  double straight = std::hypot(12, 12);
  CHECK(r.distance <= 1.25 * straight);
  CHECK(r.trace_csv.find("Push") == std::string::npos);
  CHECK(r.trace_csv.find("Approach") == std::string::npos);
}

TEST_CASE("a box blocking the only doorway is pushed out of the way") {
  Scenario s = room();
  add_doorway(s);
  s.movables.push_back(doorway_box(1.0));
  World world(s);
  RunConfig cfg;
  cfg.max_ticks = 3000;
  RunResult r = run_mission(world, {{0, -5}, {0, 5}}, cfg);
  REQUIRE(r.success);
  CHECK(r.trace_csv.find("Push") != std::string::npos);
  // the box actually moved
  Pose2 p = world.movable(3).pose;
  CHECK((p.position() - Point2{0, 0.5}).norm() > 0.5);
  // and the robot went through the doorway, not around
  for (const auto& pt : r.trajectory) CHECK(std::abs(pt.x) < 9.0);
}

TEST_CASE("an immovable box is detected within three pushes and detoured") {
  Scenario s = room();
  add_doorway(s);
  // second doorway far to the right
  auto& right = s.background.back();
  right = box({1.5, 0}, {6.5, 1});
  s.background.push_back(box({8.5, 0}, {10, 1}));
  s.movables.push_back(doorway_box(100.0));  // resistance ~294 N > 50 N limit
  World world(s);
  RunConfig cfg;
  cfg.max_ticks = 3000;
  RunResult r = run_mission(world, {{0, -5}, {0, 5}}, cfg);
  REQUIRE(r.success);

  // the box never moved
  CHECK((world.movable(3).pose.position() - Point2{0, 0.5}).norm() < 1e-9);
  // at most three saturated push ticks before giving up
  int saturated = count_saturated_pushes(r.trace_csv, world.robot().max_push_force);
  CHECK(saturated >= 1);
  CHECK(saturated <= 3);
  // affordance and edges reflect the discovery in the serialized graph
  DVGraph g = DVGraph::parse(r.graph_text);
  REQUIRE(g.affordances.count(3));
  CHECK_FALSE(g.affordances.at(3).pushable);
  for (const auto& e : g.interaction_edges) CHECK(e.object_id != 3);
  // the detour went through the right doorway
  bool through_right = false;
  for (const auto& pt : r.trajectory)
    if (pt.x > 6.5 && pt.y > 0 && pt.y < 1) through_right = true;
  CHECK(through_right);
}
