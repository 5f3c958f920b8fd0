#pragma once
// Runtime loop: follow the global path with a pure-pursuit local planner,
// re-estimate manipulation cost near topological waypoints, execute push
// primitives, adapt affordances from force feedback and replan on deviation.

#include <limits>
#include <optional>

#include "inav/dvgraph.hpp"
#include "inav/extraction.hpp"
#include "inav/global_planner.hpp"
#include "inav/interaction.hpp"
#include "inav/world.hpp"

namespace inav {

enum class ExecMode : uint8_t { Drive, Approach, Push, Replan, Done, Failed };

const char* exec_mode_name(ExecMode m);

struct ExecutorParams {
  double approach_radius = 1.5;   // m, switch to interaction handling
  double tau_thres = 0.5;         // meters-equivalent cost deviation
  int max_stalled_ticks = 3;      // max-effort pushes without motion
  int max_replans_per_waypoint = 3;
  int max_plan_failures = 100;  // consecutive ticks without any route before giving up
  double goal_tolerance = 0.3;    // m
  double clearance = 0.1;         // m, local planner stop margin
  double waypoint_tolerance = 0.35;
  double nominal_force = 2.943;   // N, resistance assumed by the default affordance
  double max_push_force = 50.0;   // N, actuator limit (stall detection)
  double max_speed = 1.0;
  double max_yaw_rate = 1.5;
  InteractionConfig interaction;
};

struct Command {
  enum class Kind : uint8_t { Stop, Drive, Push };
  Kind kind = Kind::Stop;
  double v = 0.0, omega = 0.0;
  int object_id = -1;
  Point2 contact;  // estimated world contact point (Push)
};

// Pure pursuit toward a target: arc command respecting limits, speed reduced
// to stop `clearance` short of the first obstacle ahead.
Command collision_free_local(const Pose2& robot, const Point2& target,
                             const std::vector<Polygon>& obstacles, const ExecutorParams& p);

class Executor {
 public:
  struct View {
    Pose2 robot;
    ForceReading force;
    bool object_moved = false;  // outcome of the previous Push command
    const PolygonSetLocal* polys = nullptr;
    const EdgeIndex* obstacles = nullptr;
    const IntGrid* occupancy = nullptr;  // raw observed map, may be null
  };

  Executor(Point2 goal, ExecutorParams params = {});

  Command tick(const View& view, DVGraph& graph, double dt);

  // External nudge (e.g. a progress watchdog): drop the current plan.
  void request_replan() {
    if (mode_ != ExecMode::Done && mode_ != ExecMode::Failed) {
      mode_ = ExecMode::Replan;
      path_ = {};
    }
  }

  ExecMode mode() const { return mode_; }
  const GlobalPath& path() const { return path_; }
  int replan_count() const { return replans_total_; }
  int active_object() const { return active_object_; }
  double path_cost() const { return path_.found ? path_.cost : -1.0; }

  // Force-feedback adaptation. Returns true when the change demands a replan
  // (object unpushable or cost deviation beyond tau_thres).
  bool update_affordance(int object_id, const ForceReading& force, bool moved, DVGraph& graph);

 private:
  Command tick_impl(const View& view, DVGraph& graph, double dt);
  bool target_visible(const View& view, const Point2& tgt) const;
  bool replan(const View& view, DVGraph& graph);
  void fail_waypoint(DVGraph& graph);
  Command run_push(const View& view, DVGraph& graph, double dt);
  Point2 current_target() const { return path_.positions[target_idx_]; }
  double remaining_push_length() const;

  Point2 goal_;
  ExecutorParams p_;
  ExecMode mode_ = ExecMode::Replan;
  GlobalPath path_;
  size_t target_idx_ = 0;
  int replans_total_ = 0;
  int replans_this_wp_ = 0;
  int current_wp_vertex_ = std::numeric_limits<int>::min();
  int plan_failures_ = 0;
  Point2 last_pos_;
  double last_cmd_v_ = 0.0;
  int blocked_ticks_ = 0;
  int reverse_ticks_ = 0;

  // active interaction
  int active_object_ = -1;
  PushPrimitive primitive_;
  std::vector<Pose2> pose_before_action_;
  size_t action_idx_ = 0;
  size_t switch_idx_ = 0;
  double push_elapsed_ = 0.0;
  int stalled_ticks_ = 0;
  double planned_J_ = 0.0;
};

}  // namespace inav
