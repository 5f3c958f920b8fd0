#pragma once
// Push-manipulation primitive types shared by the DV-graph and the
// interaction planner.

#include <vector>

#include "inav/geometry.hpp"

namespace inav {

// Contact on an object polygon edge; the push normal is the edge's inward
// normal at planning time (object frame = planning-time world polygon).
struct ContactPoint {
  int edge = 0;
  double t = 0.5;  // parameter in [0,1] along the edge

  Point2 point_on(const Polygon& poly) const {
    const Point2& a = poly.vertices[edge];
    const Point2& b = poly.vertices[(edge + 1) % poly.vertices.size()];
    return a + (b - a) * t;
  }
  Vec2 normal_on(const Polygon& poly) const {
    const Point2& a = poly.vertices[edge];
    const Point2& b = poly.vertices[(edge + 1) % poly.vertices.size()];
    return (b - a).normalized().perp();  // CCW ring: interior on the left
  }
};

struct PushAction {
  enum class Type { Push, Switch };
  Type type = Type::Push;
  ContactPoint contact;              // push contact, or switch target contact
  double v = 0.0;                    // m/s (Push)
  double omega = 0.0;                // rad/s (Push)
  double duration = 0.0;             // s (Push)
  double cost = 0.0;                 // meters-equivalent step cost
  std::vector<Point2> switch_path;   // robot detour (Switch), planning-time frame
};

// Kinodynamically feasible push sequence moving one object. Object poses are
// relative SE(2) transforms: the planning-time polygon is the body frame and
// the start pose is identity.
struct PushPrimitive {
  int object_id = -1;
  Polygon object_polygon;  // planning-time world-frame shape
  std::vector<PushAction> actions;
  Pose2 result_pose;       // relative to the planning-time placement
  double cost = 0.0;       // J, meters-equivalent

  bool empty() const { return actions.empty(); }
};

// Estimated interaction physics of one object, updated from force feedback.
struct Affordance {
  int object_id = -1;
  bool pushable = true;
  double surface_friction = 0.5;      // robot-object k
  double effort = 1.0;                // u_x, per-meter effort multiplier
  double estimated_resistance = 0.0;  // N, 0 = not yet measured
};

}  // namespace inav
