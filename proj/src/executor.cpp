#include "inav/executor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace inav {

const char* exec_mode_name(ExecMode m) {
  switch (m) {
    case ExecMode::Drive: return "Drive";
    case ExecMode::Approach: return "Approach";
    case ExecMode::Push: return "Push";
    case ExecMode::Replan: return "Replan";
    case ExecMode::Done: return "Done";
    case ExecMode::Failed: return "Failed";
  }
  return "?";
}

Command collision_free_local(const Pose2& robot, const Point2& target,
                             const std::vector<Polygon>& obstacles, const ExecutorParams& p) {
  Command cmd;
  cmd.kind = Command::Kind::Drive;
  Vec2 to = target - robot.position();
  double d = to.norm();
  if (d < 1e-9) return cmd;
  double bearing = normalize_angle(std::atan2(to.y, to.x) - robot.psi);
  cmd.omega = std::clamp(2.0 * bearing, -p.max_yaw_rate, p.max_yaw_rate);
  if (std::abs(bearing) > M_PI / 2) return cmd;  // rotate in place first

  double v = std::min(p.max_speed, d) * std::max(0.2, std::cos(bearing));
  // slow down to stop `clearance` short of the first obstacle straight ahead;
  // inflated polygons already containing the robot cannot pin it in place
  std::vector<bool> skip(obstacles.size(), false);
  for (size_t i = 0; i < obstacles.size(); ++i)
    skip[i] = obstacles[i].contains(robot.position());
  Vec2 h = robot.heading();
  double lookahead = std::min(1.0, d);
  double free_dist = lookahead;
  for (double s = 0.05; s <= lookahead + 1e-9; s += 0.05) {
    Point2 q = robot.position() + h * s;
    bool blocked = false;
    for (size_t i = 0; i < obstacles.size(); ++i)
      if (!skip[i] && obstacles[i].contains_strict(q)) {
        blocked = true;
        break;
      }
    if (blocked) {
      free_dist = s;
      break;
    }
  }
  cmd.v = std::clamp(v, 0.0, std::max(0.0, (free_dist - p.clearance) / 0.5));
  return cmd;
}

Executor::Executor(Point2 goal, ExecutorParams params) : goal_(goal), p_(params) {}

double Executor::remaining_push_length() const {
  double len = 0.0;
  for (size_t i = action_idx_; i < primitive_.actions.size(); ++i) {
    const PushAction& a = primitive_.actions[i];
    if (a.type != PushAction::Type::Push) continue;
    double dur = a.duration;
    if (i == action_idx_) dur = std::max(0.0, dur - push_elapsed_);
    len += a.v * dur;
  }
  return len;
}

bool Executor::update_affordance(int object_id, const ForceReading& force, bool moved,
                                 DVGraph& graph) {
  if (!force.in_contact) return false;
  Affordance& aff = graph.affordances[object_id];
  if (aff.object_id < 0) aff.object_id = object_id;

  bool saturated = force.magnitude >= p_.max_push_force - 1e-6;
  if (saturated && !moved) {
    if (++stalled_ticks_ >= p_.max_stalled_ticks) {
      aff.pushable = false;
      aff.estimated_resistance = force.magnitude;
      graph.remove_interaction_edges(object_id);
      return true;
    }
    return false;
  }
  stalled_ticks_ = 0;

  aff.estimated_resistance = force.magnitude;
  double u_x = std::max(force.magnitude / p_.nominal_force, 1e-3);
  double planned_rem = 0.0;
  for (size_t i = action_idx_; i < primitive_.actions.size(); ++i) {
    const PushAction& a = primitive_.actions[i];
    if (a.type != PushAction::Type::Push) continue;
    double frac = i == action_idx_ && a.duration > 0
                      ? std::max(0.0, a.duration - push_elapsed_) / a.duration
                      : 1.0;
    planned_rem += a.cost * frac;
  }
  double estimated = remaining_push_length() * u_x;
  if (std::abs(estimated - planned_rem) <= p_.tau_thres) return false;

  // measured effort disagrees with the plan: rescale every edge of the object
  double factor = u_x / std::max(aff.effort, 1e-9);
  for (auto& e : graph.interaction_edges)
    if (e.object_id == object_id) e.cost *= factor;
  aff.effort = u_x;
  return true;
}

bool Executor::replan(const View& view, DVGraph& graph) {
  ++replans_total_;
  active_object_ = -1;
  primitive_ = {};
  action_idx_ = switch_idx_ = 0;
  push_elapsed_ = 0.0;
  path_ = plan(graph, view.robot.position(), goal_, *view.obstacles);
  target_idx_ = 1;
  if (!path_.found) {
    // the map may still be missing the enabling interaction edge; retry a
    // bounded number of ticks before declaring the goal unreachable
    mode_ = ++plan_failures_ >= p_.max_plan_failures ? ExecMode::Failed : ExecMode::Replan;
    return false;
  }
  plan_failures_ = 0;
  mode_ = ExecMode::Drive;
  return true;
}

void Executor::fail_waypoint(DVGraph& graph) {
  if (target_idx_ >= path_.vertex_ids.size() - 1) return;
  int from = path_.vertex_ids[target_idx_];
  int to = path_.vertex_ids[target_idx_ + 1];
  auto& edges = graph.interaction_edges;
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [&](const InteractionEdge& e) { return e.from == from && e.to == to; }),
              edges.end());
}

Command Executor::run_push(const View& view, DVGraph& graph, double dt) {
  if (update_affordance(active_object_, view.force, view.object_moved, graph)) {
    replan(view, graph);
    return {};
  }
  if (action_idx_ >= primitive_.actions.size()) {
    // primitive complete; route onward from the new state of the world
    replan(view, graph);
    return {};
  }
  const PushAction& a = primitive_.actions[action_idx_];
  const Pose2& base = pose_before_action_[action_idx_];

  if (a.type == PushAction::Type::Switch) {
    if (switch_idx_ >= a.switch_path.size()) {
      ++action_idx_;
      switch_idx_ = 0;
      return run_push(view, graph, dt);
    }
    Point2 tgt = a.switch_path[switch_idx_];
    if ((tgt - view.robot.position()).norm() < 0.1) {
      ++switch_idx_;
      return run_push(view, graph, dt);
    }
    return collision_free_local(view.robot, tgt, view.polys->all(), p_);
  }

  Point2 cp0 = base.transform(a.contact.point_on(primitive_.object_polygon));
  Vec2 n0 = a.contact.normal_on(primitive_.object_polygon).rotated(base.psi);
  Point2 rc0 = cp0 - n0 * p_.interaction.robot_radius;
  if (push_elapsed_ == 0.0 && !view.force.in_contact &&
      (rc0 - view.robot.position()).norm() > 0.25) {
    // not yet at the contact: drive there, ignoring the object we are about to touch
    std::vector<Polygon> obs = view.polys->background;
    for (const auto& m : view.polys->movable)
      if (m.id != active_object_) obs.push_back(m);
    return collision_free_local(view.robot, rc0, obs, p_);
  }

  Command cmd;
  cmd.kind = Command::Kind::Push;
  cmd.v = a.v;
  cmd.omega = a.omega;
  cmd.object_id = active_object_;
  Pose2 cur = advance_push_pose(base, rc0, n0, a.v, a.omega, push_elapsed_);
  cmd.contact = cur.transform(a.contact.point_on(primitive_.object_polygon));
  push_elapsed_ += dt;
  if (push_elapsed_ >= a.duration - 1e-9) {
    ++action_idx_;
    push_elapsed_ = 0.0;
  }
  return cmd;
}

Command Executor::tick(const View& view, DVGraph& graph, double dt) {
  // wedged against an obstacle: back out, then replan
  if (last_cmd_v_ > 0.05 && (view.robot.position() - last_pos_).norm() < 0.005)
    ++blocked_ticks_;
  else
    blocked_ticks_ = 0;
  last_pos_ = view.robot.position();
  last_cmd_v_ = 0.0;
  if (blocked_ticks_ > 15) {
    blocked_ticks_ = 0;
    reverse_ticks_ = 8;
    request_replan();
  }
  if (reverse_ticks_ > 0 && mode_ != ExecMode::Done && mode_ != ExecMode::Failed) {
    --reverse_ticks_;
    Command back;
    back.kind = Command::Kind::Drive;
    back.v = -0.3;
    return back;
  }
  Command cmd = tick_impl(view, graph, dt);
  if (cmd.kind == Command::Kind::Drive) last_cmd_v_ = cmd.v;
  return cmd;
}

Command Executor::tick_impl(const View& view, DVGraph& graph, double dt) {
  if (mode_ == ExecMode::Done || mode_ == ExecMode::Failed) return {};
  if ((view.robot.position() - goal_).norm() < p_.goal_tolerance) {
    mode_ = ExecMode::Done;
    return {};
  }
  if (mode_ == ExecMode::Replan || !path_.found) {
    if (!replan(view, graph)) return {};
  }
  if (mode_ == ExecMode::Push) return run_push(view, graph, dt);

  // Drive: advance past reached waypoints whose outgoing segment is free travel
  while (target_idx_ + 1 < path_.positions.size() &&
         (path_.positions[target_idx_] - view.robot.position()).norm() < p_.waypoint_tolerance &&
         path_.segment_kinds[target_idx_] == SegmentKind::Visibility)
    ++target_idx_;

  bool interaction_ahead = target_idx_ + 1 < path_.positions.size() &&
                           path_.segment_kinds[target_idx_] == SegmentKind::Interaction;
  if (interaction_ahead &&
      (path_.positions[target_idx_] - view.robot.position()).norm() < p_.approach_radius) {
    mode_ = ExecMode::Approach;
    int obj_id = path_.segment_objects[target_idx_];
    const Polygon* obj = nullptr;
    for (const auto& m : view.polys->movable)
      if (m.id == obj_id) obj = &m;
    if (!obj) {
      replan(view, graph);
      return {};
    }
    if (path_.vertex_ids[target_idx_] != current_wp_vertex_) {
      current_wp_vertex_ = path_.vertex_ids[target_idx_];
      replans_this_wp_ = 0;
    }

    Affordance aff;
    auto it = graph.affordances.find(obj_id);
    if (it != graph.affordances.end()) aff = it->second;
    aff.object_id = obj_id;
    if (!aff.pushable) {
      graph.remove_interaction_edges(obj_id);
      replan(view, graph);
      return {};
    }
    GammaResult g = gamma(path_.positions[target_idx_], path_.positions[target_idx_ + 1], *obj,
                          *view.polys, aff, p_.interaction, nullptr, -1, -1, view.occupancy);
    if (!g.success) {
      fail_waypoint(graph);
      replan(view, graph);
      return {};
    }
    graph.affordances[obj_id] = g.affordance;

    if (g.primitive.empty()) {
      // claims to be connected already; trust it only when the exit waypoint
      // is actually reachable by line of sight
      if (view.obstacles->visible(view.robot.position(), path_.positions[target_idx_ + 1])) {
        ++target_idx_;
        mode_ = ExecMode::Drive;
      } else {
        // the claim rests on unobserved or impassably thin space; fall back to
        // the primitive stored on the edge and let force feedback arbitrate
        const PushPrimitive* stored = nullptr;
        for (const auto& e : graph.interaction_edges)
          if (e.from == path_.vertex_ids[target_idx_] &&
              e.to == path_.vertex_ids[target_idx_ + 1] && !e.primitive.empty())
            stored = &e.primitive;
        if (stored) {
          g.primitive = *stored;
          g.J = stored->cost;
        } else if ((path_.positions[target_idx_] - view.robot.position()).norm() >
                   p_.waypoint_tolerance) {
          mode_ = ExecMode::Drive;
          return collision_free_local(view.robot, path_.positions[target_idx_],
                                      view.obstacles->polygons(), p_);
        } else {
          if (++replans_this_wp_ > p_.max_replans_per_waypoint) fail_waypoint(graph);
          replan(view, graph);
          return {};
        }
      }
    }
    if (!g.primitive.empty()) {
      double j_old = g.J;
      for (const auto& e : graph.interaction_edges)
        if (e.from == path_.vertex_ids[target_idx_] && e.to == path_.vertex_ids[target_idx_ + 1])
          j_old = e.cost;
      if (std::abs(g.J - j_old) > p_.tau_thres) {
        // fresh estimate disagrees with the graph: rewrite the edge and replan
        if (++replans_this_wp_ > p_.max_replans_per_waypoint) {
          fail_waypoint(graph);
        } else {
          InteractionEdge e;
          e.from = path_.vertex_ids[target_idx_];
          e.to = path_.vertex_ids[target_idx_ + 1];
          e.object_id = obj_id;
          e.cost = g.J;
          e.primitive = g.primitive;
          graph.set_interaction_edge(e);
        }
        replan(view, graph);
        return {};
      }
      mode_ = ExecMode::Push;
      active_object_ = obj_id;
      primitive_ = g.primitive;
      planned_J_ = g.J;
      action_idx_ = switch_idx_ = 0;
      push_elapsed_ = 0.0;
      stalled_ticks_ = 0;
      pose_before_action_.assign(1, Pose2{});
      for (const auto& act : primitive_.actions) {
        Pose2 cur = pose_before_action_.back();
        if (act.type == PushAction::Type::Push) {
          Point2 cp = cur.transform(act.contact.point_on(primitive_.object_polygon));
          Vec2 n = act.contact.normal_on(primitive_.object_polygon).rotated(cur.psi);
          cur = advance_push_pose(cur, cp - n * p_.interaction.robot_radius, n, act.v, act.omega,
                                  act.duration);
        }
        pose_before_action_.push_back(cur);
      }
      return run_push(view, graph, dt);
    }
  }

  mode_ = ExecMode::Drive;
  Point2 tgt = current_target();
  if (!target_visible(view, tgt)) {
    replan(view, graph);
    if (mode_ != ExecMode::Drive) return {};
    tgt = current_target();
  }
  return collision_free_local(view.robot, tgt, view.obstacles->polygons(), p_);
}

bool Executor::target_visible(const View& view, const Point2& tgt) const {
  if (view.obstacles->visible(view.robot.position(), tgt)) return true;
  // match the planner: a polygon containing the robot does not block its exit
  bool contained = false;
  for (const auto& poly : view.obstacles->polygons())
    if (poly.contains(view.robot.position())) {
      contained = true;
      break;
    }
  if (!contained) return false;
  for (const auto& poly : view.obstacles->polygons()) {
    if (poly.contains(view.robot.position())) continue;
    if (!segment_visible(view.robot.position(), tgt, poly)) return false;
  }
  return true;
}

}  // namespace inav
