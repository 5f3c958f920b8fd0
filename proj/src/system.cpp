#include "inav/system.hpp"

#include <algorithm>
#include <sstream>

#include "inav/global_planner.hpp"

namespace inav {

NavigationSystem::NavigationSystem(Point2 bounds_min, Point2 bounds_max, SystemConfig cfg)
    : cfg_(cfg) {
  double res = cfg_.extraction.resolution;
  double margin = 2.0 * res;
  Point2 origin{bounds_min.x - margin, bounds_min.y - margin};
  int nx = static_cast<int>(std::ceil((bounds_max.x - bounds_min.x + 2 * margin) / res));
  int ny = static_cast<int>(std::ceil((bounds_max.y - bounds_min.y + 2 * margin) / res));
  occ_ = IntGrid(origin, res, nx, ny, 0);
}

void NavigationSystem::observe(const ScanFrame& scan) {
  Point2 o = scan.origin.position();
  double res = occ_.res;
  auto put = [&](const Point2& p, int32_t val) {
    Cell c = occ_.world_to_cell(p);
    if (!occ_.in(c.x, c.y)) return;
    if (occ_.at(c.x, c.y) != val) {
      occ_.at(c.x, c.y) = val;
      dirty_ = true;
    }
  };
  for (const auto& pt : scan.points) {
    Vec2 d = pt.p - o;
    double len = d.norm();
    if (len < 1e-9) continue;
    Vec2 u = d / len;
    for (double s = 0.0; s < len - 0.75 * res; s += 0.5 * res) put(o + u * s, 1);
    put(pt.p, pt.cls == PolyClass::Background ? 2 : 3 + pt.object_id);
  }
}

void NavigationSystem::extract_global() {
  if (!dirty_) return;
  grid_.bg = IntGrid(occ_.origin, occ_.res, occ_.nx, occ_.ny, 0);
  grid_.mov = IntGrid(occ_.origin, occ_.res, occ_.nx, occ_.ny, 0);
  grid_.center = {occ_.origin.x + 0.5 * occ_.nx * occ_.res, occ_.origin.y + 0.5 * occ_.ny * occ_.res};
  std::set<int32_t> mov_values;
  for (int y = 0; y < occ_.ny; ++y)
    for (int x = 0; x < occ_.nx; ++x) {
      int32_t v = occ_.at(x, y);
      if (v == 2) grid_.bg.at(x, y) = 1;
      if (v >= 3) {
        grid_.mov.at(x, y) = v - 2;  // object id + 1
        mov_values.insert(v - 2);
      }
    }
  int r_cells = static_cast<int>(std::ceil(cfg_.extraction.robot_radius / occ_.res));
  dilate_value(grid_.bg, 1, r_cells);
  for (int32_t mv : mov_values) dilate_value(grid_.mov, mv, r_cells);
  polys_ = extract_contours(grid_, cfg_.extraction);
  index_ = EdgeIndex(polys_.all());
  // new observations invalidate cached push-planning outcomes; failed or
  // removed edges get another chance once the map changes
  gamma_done_.clear();
  dirty_ = false;
}

void NavigationSystem::update_graph(const ScanFrame& scan) {
  extract_global();

  LocalGrid lg = rasterize_and_inflate(scan, cfg_.extraction);
  PolygonSetLocal lp = extract_contours(lg, cfg_.extraction);
  DVGraph local = build_local_graph(lp);
  std::vector<Polygon> lall = lp.all();
  for (const auto& m : lp.movable) {
    ConnectivityResult cr = connectivity_analysis(lp, m.id, lg, cfg_.waypoint_offset);
    if (cr.n_components < 2) continue;
    std::vector<int> wids;
    for (const auto& w : cr.waypoints) {
      DVVertex v;
      v.position = w.position;
      v.kind = VertexKind::TopoWaypoint;
      v.object_id = m.id;
      v.component = w.component;
      wids.push_back(local.add_vertex(v));
    }
    for (int wid : wids) {
      Point2 wp = local.vertex(wid).position;
      for (const auto& [id, v] : local.vertices)
        if (id != wid && segment_visible(wp, v.position, lall)) local.add_vis_edge(wid, id);
    }
  }

  MergeParams mp = cfg_.merge;
  mp.robot_pose = scan.origin;
  mp.sensor_range = cfg_.sensor.max_range;
  merge_local_into_global(graph_, local, mp, polys_.all());

  // push planning for waypoint pairs that bridge different components
  int budget = cfg_.max_gamma_per_cycle;
  for (const auto& obj : polys_.movable) {
    Affordance aff;
    aff.object_id = obj.id;
    auto ita = graph_.affordances.find(obj.id);
    if (ita != graph_.affordances.end()) aff = ita->second;
    if (!aff.pushable) continue;

    std::vector<int> wps;
    for (const auto& [id, v] : graph_.vertices)
      if (v.kind == VertexKind::TopoWaypoint && v.object_id == obj.id) wps.push_back(id);
    Point2 c = obj.centroid();
    int64_t cx = llround(c.x / 0.05), cy = llround(c.y / 0.05);
    for (int a : wps)
      for (int b : wps) {
        if (a == b || graph_.vertex(a).component == graph_.vertex(b).component) continue;
        auto key = std::make_tuple(obj.id, a, b, cx, cy);
        if (gamma_done_.count(key)) continue;
        bool have_edge = false;
        for (const auto& e : graph_.interaction_edges)
          if (e.from == a && e.to == b) have_edge = true;
        if (have_edge) continue;
        if (budget <= 0) return;
        --budget;
        gamma(graph_.vertex(a).position, graph_.vertex(b).position, obj, polys_, aff,
              cfg_.interaction, &graph_, a, b, &occ_);
        gamma_done_.insert(key);
      }
  }
}

RunResult run_mission(World& world, const Task& task, const RunConfig& cfg) {
  RunResult out;
  const Scenario& sc = world.scenario();
  NavigationSystem nav(sc.bounds_min, sc.bounds_max, cfg.system);

  Vec2 to_goal = task.goal - task.start;
  world.set_robot_pose({task.start.x, task.start.y, std::atan2(to_goal.y, to_goal.x)});

  ExecutorParams ep = cfg.executor;
  ep.max_speed = world.robot().max_speed;
  ep.max_yaw_rate = world.robot().max_yaw_rate;
  ep.max_push_force = world.robot().max_push_force;
  ep.interaction = cfg.system.interaction;
  Executor exec(task.goal, ep);

  std::ostringstream trace;
  if (cfg.record_trace)
    trace << "tick,time,x,y,psi,mode,object,v,omega,force,path_cost,event\n";

  ForceReading force;
  bool moved = false;
  Point2 stuck_anchor = task.start;
  int stuck_ticks = 0;
  ExecMode prev_mode = ExecMode::Replan;
  int prev_replans = 0;

  for (int tick = 0; tick < cfg.max_ticks; ++tick) {
    ScanFrame scan = world.scan(world.robot().pose, cfg.system.sensor);
    nav.observe(scan);
    if (tick % cfg.graph_update_period == 0) nav.update_graph(scan);

    Executor::View view;
    view.robot = world.robot().pose;
    view.force = force;
    view.object_moved = moved;
    view.polys = &nav.polygons();
    view.obstacles = &nav.obstacles();
    view.occupancy = &nav.occupancy();

    Command cmd = exec.tick(view, nav.graph(), cfg.tick_dt);

    Point2 before = world.robot().pose.position();
    force = {};
    moved = false;
    if (cmd.kind == Command::Kind::Drive) {
      world.step_drive(cmd.v, cmd.omega, cfg.tick_dt);
    } else if (cmd.kind == Command::Kind::Push) {
      Point2 contact = world.closest_boundary_point(cmd.object_id, cmd.contact);
      Pose2 prev_obj = world.movable(cmd.object_id).pose;
      auto res = world.step_push(cmd.object_id, contact, cmd.v, cmd.omega, cfg.tick_dt);
      force = res.force;
      moved = res.moved;
      (void)prev_obj;
    }
    Point2 after = world.robot().pose.position();
    out.distance += (after - before).norm();
    out.trajectory.push_back(after);

    if (cfg.record_trace) {
      std::string event;
      if (exec.mode() != prev_mode) event = exec_mode_name(exec.mode());
      if (exec.replan_count() != prev_replans)
        event += event.empty() ? "replan" : "+replan";
      char row[256];
      snprintf(row, sizeof(row), "%d,%.1f,%.4f,%.4f,%.4f,%s,%d,%.3f,%.3f,%.3f,%.4f,%s\n", tick,
               world.time(), after.x, after.y, world.robot().pose.psi,
               exec_mode_name(exec.mode()), cmd.object_id, cmd.v, cmd.omega, force.magnitude,
               exec.path_cost(), event.c_str());
      trace << row;
    }
    prev_mode = exec.mode();
    prev_replans = exec.replan_count();

    // watchdog: force a replan when the robot makes no progress
    if ((after - stuck_anchor).norm() > 0.05) {
      stuck_anchor = after;
      stuck_ticks = 0;
    } else if (++stuck_ticks >= 60) {
      exec.request_replan();
      stuck_ticks = 0;
    }

    out.ticks = tick + 1;
    if (exec.mode() == ExecMode::Done || exec.mode() == ExecMode::Failed) break;
  }

  out.final_mode = exec.mode();
  out.success = exec.mode() == ExecMode::Done;
  out.sim_time = world.time();
  out.replans = exec.replan_count();
  if (cfg.record_trace) out.trace_csv = trace.str();
  out.graph_text = nav.graph().serialize();
  return out;
}

}  // namespace inav
