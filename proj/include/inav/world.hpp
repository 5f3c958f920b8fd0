#pragma once
// Deterministic 2D ground-truth simulator: static walls, movable rigid objects,
// a differential-drive robot, a class-labeled raycast range sensor, quasi-static
// push physics and a 1-D force sensor.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "inav/geometry.hpp"

namespace inav {

constexpr double kGravity = 9.81;

struct SensorConfig {
  double angular_res_deg = 0.25;
  double max_range = 15.0;
  double noise_sigma = 0.0;  // Gaussian range noise [m]
};

struct MovableObjectTruth {
  int id = -1;
  Polygon shape;  // body frame, class Movable
  Pose2 pose;
  double mass = 1.0;                // kg
  double ground_friction = 0.3;     // object-ground
  double surface_friction = 0.5;    // robot-object

  Polygon world_polygon() const {
    Polygon p = shape.transformed(pose);
    p.cls = PolyClass::Movable;
    p.id = id;
    return p;
  }
};

struct RobotTruth {
  Pose2 pose;
  double radius = 0.15;
  double max_push_force = 50.0;  // N
  double max_speed = 1.0;        // m/s
  double max_yaw_rate = 1.5;     // rad/s
};

struct ScanPoint {
  Point2 p;
  PolyClass cls = PolyClass::Background;
  int object_id = -1;  // valid for Movable hits
};

struct ScanFrame {
  double timestamp = 0.0;
  Pose2 origin;  // robot pose at scan time
  std::vector<ScanPoint> points;
};

struct ForceReading {
  double timestamp = 0.0;
  double magnitude = 0.0;  // N, along the push normal
  bool in_contact = false;
};

struct Task {
  Point2 start;
  Point2 goal;
};

struct Scenario {
  std::string name;
  Point2 bounds_min, bounds_max;
  std::vector<Polygon> background;
  std::vector<MovableObjectTruth> movables;
  RobotTruth robot;
  std::vector<Task> tasks;
  uint64_t seed = 0;

  std::string serialize() const;
  static Scenario parse(const std::string& text);
  void save(const std::string& path) const;
  static Scenario load(const std::string& path);
  void validate() const;  // throws std::invalid_argument on violated invariants
};

class World {
 public:
  explicit World(Scenario scenario);

  double time() const { return time_; }
  const Scenario& scenario() const { return scenario_; }
  const RobotTruth& robot() const { return robot_; }
  void set_robot_pose(const Pose2& p) { robot_.pose = p; }
  const std::vector<MovableObjectTruth>& movables() const { return movables_; }
  const std::vector<Polygon>& background() const { return scenario_.background; }
  const MovableObjectTruth& movable(int id) const;

  ScanFrame scan(const Pose2& robot_pose, const SensorConfig& cfg = {});
  ScanFrame scan() { return scan(robot_.pose); }

  struct PushResult {
    Pose2 new_pose;
    ForceReading force;
    bool moved = false;
  };
  // Quasi-static stable push: object advances with the commanded twist about the
  // instantaneous rotation center, halting at background/object contact.
  // contact must lie on the object boundary (within kEps).
  PushResult step_push(int object_id, const Point2& contact, double v, double omega, double dt);

  // Exact-arc unicycle integration; motion stops at the first collision.
  Pose2 step_drive(double v, double omega, double dt);

  // Nearest point on the object's boundary, for snapping estimated contacts.
  Point2 closest_boundary_point(int object_id, const Point2& p) const;

  bool robot_collides(const Point2& center) const;
  bool point_in_free_space(const Point2& p) const;

 private:
  Scenario scenario_;
  RobotTruth robot_;
  std::vector<MovableObjectTruth> movables_;
  double time_ = 0.0;
  std::mt19937_64 rng_;

  bool object_collides(int object_id, const Pose2& pose) const;
};

}  // namespace inav
