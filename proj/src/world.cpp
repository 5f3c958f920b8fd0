#include "inav/world.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace inav {

using nlohmann::json;

// --- scenario serialization -------------------------------------------------

static json poly_to_json(const Polygon& p) {
  json verts = json::array();
  for (const auto& v : p.vertices) verts.push_back({v.x, v.y});
  return verts;
}

static std::vector<Point2> poly_from_json(const json& j) {
  std::vector<Point2> out;
  for (const auto& v : j) out.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  return out;
}

std::string Scenario::serialize() const {
  json j;
  j["version"] = 1;
  j["name"] = name;
  j["seed"] = seed;
  j["bounds"] = {bounds_min.x, bounds_min.y, bounds_max.x, bounds_max.y};
  j["robot"] = {{"pose", {robot.pose.x, robot.pose.y, robot.pose.psi}},
                {"radius", robot.radius},
                {"max_push_force", robot.max_push_force},
                {"max_speed", robot.max_speed},
                {"max_yaw_rate", robot.max_yaw_rate}};
  j["background"] = json::array();
  for (const auto& p : background) j["background"].push_back(poly_to_json(p));
  j["movables"] = json::array();
  for (const auto& m : movables)
    j["movables"].push_back({{"id", m.id},
                             {"shape", poly_to_json(m.shape)},
                             {"pose", {m.pose.x, m.pose.y, m.pose.psi}},
                             {"mass", m.mass},
                             {"ground_friction", m.ground_friction},
                             {"surface_friction", m.surface_friction}});
  j["tasks"] = json::array();
  for (const auto& t : tasks)
    j["tasks"].push_back({{"start", {t.start.x, t.start.y}}, {"goal", {t.goal.x, t.goal.y}}});
  return j.dump(2) + "\n";
}

Scenario Scenario::parse(const std::string& text) {
  json j = json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::invalid_argument("scenario: unsupported version");
  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.seed = j.at("seed").get<uint64_t>();
  const auto& b = j.at("bounds");
  s.bounds_min = {b.at(0).get<double>(), b.at(1).get<double>()};
  s.bounds_max = {b.at(2).get<double>(), b.at(3).get<double>()};
  const auto& r = j.at("robot");
  s.robot.pose = {r.at("pose").at(0).get<double>(), r.at("pose").at(1).get<double>(),
                  r.at("pose").at(2).get<double>()};
  s.robot.radius = r.at("radius").get<double>();
  s.robot.max_push_force = r.at("max_push_force").get<double>();
  s.robot.max_speed = r.at("max_speed").get<double>();
  s.robot.max_yaw_rate = r.at("max_yaw_rate").get<double>();
  int next_bg_id = 0;
  for (const auto& pj : j.at("background")) {
    Polygon p(poly_from_json(pj), PolyClass::Background, next_bg_id++);
    p.ensure_ccw();
    s.background.push_back(std::move(p));
  }
  for (const auto& mj : j.at("movables")) {
    MovableObjectTruth m;
    m.id = mj.at("id").get<int>();
    m.shape = Polygon(poly_from_json(mj.at("shape")), PolyClass::Movable, m.id);
    m.shape.ensure_ccw();
    m.pose = {mj.at("pose").at(0).get<double>(), mj.at("pose").at(1).get<double>(),
              mj.at("pose").at(2).get<double>()};
    m.mass = mj.at("mass").get<double>();
    m.ground_friction = mj.at("ground_friction").get<double>();
    m.surface_friction = mj.at("surface_friction").get<double>();
    s.movables.push_back(std::move(m));
  }
  for (const auto& tj : j.at("tasks")) {
    Task t;
    t.start = {tj.at("start").at(0).get<double>(), tj.at("start").at(1).get<double>()};
    t.goal = {tj.at("goal").at(0).get<double>(), tj.at("goal").at(1).get<double>()};
    s.tasks.push_back(t);
  }
  s.validate();
  return s;
}

void Scenario::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << serialize();
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void Scenario::validate() const {
  if (robot.radius <= 0 || robot.max_push_force <= 0 || robot.max_speed <= 0 ||
      robot.max_yaw_rate <= 0)
    throw std::invalid_argument("scenario: robot limits must be positive");
  for (const auto& p : background)
    if (p.vertices.size() < 3) throw std::invalid_argument("scenario: degenerate polygon");
  for (const auto& m : movables) {
    if (m.shape.vertices.size() < 3) throw std::invalid_argument("scenario: degenerate shape");
    if (m.mass <= 0) throw std::invalid_argument("scenario: mass must be positive");
    if (m.ground_friction <= 0 || m.ground_friction > 5 || m.surface_friction <= 0 ||
        m.surface_friction > 5)
      throw std::invalid_argument("scenario: friction coefficient out of (0, 5]");
  }
}

// --- world ------------------------------------------------------------------

World::World(Scenario scenario)
    : scenario_(std::move(scenario)),
      robot_(scenario_.robot),
      movables_(scenario_.movables),
      rng_(scenario_.seed) {}

const MovableObjectTruth& World::movable(int id) const {
  for (const auto& m : movables_)
    if (m.id == id) return m;
  throw std::invalid_argument("world: unknown object id " + std::to_string(id));
}

ScanFrame World::scan(const Pose2& robot_pose, const SensorConfig& cfg) {
  ScanFrame frame;
  frame.timestamp = time_;
  frame.origin = robot_pose;

  std::vector<Polygon> movable_polys;
  movable_polys.reserve(movables_.size());
  for (const auto& m : movables_) movable_polys.push_back(m.world_polygon());

  std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
  int n_rays = static_cast<int>(std::round(360.0 / cfg.angular_res_deg));
  Point2 o = robot_pose.position();
  for (int i = 0; i < n_rays; ++i) {
    double a = robot_pose.psi + i * (2.0 * M_PI / n_rays);
    Vec2 dir{std::cos(a), std::sin(a)};
    double best = cfg.max_range;
    PolyClass cls = PolyClass::Background;
    int id = -1;
    for (const auto& p : scenario_.background) {
      auto t = ray_polygon_hit(o, dir, p);
      if (t && *t < best) {
        best = *t;
        cls = PolyClass::Background;
        id = p.id;
      }
    }
    for (const auto& p : movable_polys) {
      auto t = ray_polygon_hit(o, dir, p);
      if (t && *t < best) {
        best = *t;
        cls = PolyClass::Movable;
        id = p.id;
      }
    }
    if (best >= cfg.max_range) continue;
    double range = best;
    if (cfg.noise_sigma > 0) range = std::max(0.0, range + noise(rng_));
    frame.points.push_back({o + dir * range, cls, id});
  }
  return frame;
}

bool World::object_collides(int object_id, const Pose2& pose) const {
  const MovableObjectTruth& obj = movable(object_id);
  Polygon moved = obj.shape.transformed(pose);
  for (const auto& bg : scenario_.background)
    if (polygons_overlap(moved, bg)) return true;
  for (const auto& m : movables_) {
    if (m.id == object_id) continue;
    if (polygons_overlap(moved, m.world_polygon())) return true;
  }
  return false;
}

Point2 World::closest_boundary_point(int object_id, const Point2& p) const {
  const Polygon poly = movable(object_id).world_polygon();
  double best = std::numeric_limits<double>::infinity();
  Point2 best_pt = p;
  size_t n = poly.vertices.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = poly.vertices[i];
    const Point2& b = poly.vertices[(i + 1) % n];
    Vec2 ab = b - a;
    double t = std::clamp((p - a).dot(ab) / std::max(ab.norm2(), 1e-24), 0.0, 1.0);
    Point2 q = a + ab * t;
    double d = (p - q).norm();
    if (d < best) {
      best = d;
      best_pt = q;
    }
  }
  return best_pt;
}

World::PushResult World::step_push(int object_id, const Point2& contact, double v, double omega,
                                   double dt) {
  MovableObjectTruth* obj = nullptr;
  for (auto& m : movables_)
    if (m.id == object_id) obj = &m;
  if (!obj) throw std::invalid_argument("step_push: unknown object");

  Polygon wp = obj->world_polygon();
  if (wp.distance_to_boundary(contact) > 1e-4)
    throw std::invalid_argument("step_push: contact point not on object boundary");

  // push normal: inward normal of the contacted edge (CCW ring, interior on the left)
  size_t n = wp.vertices.size();
  size_t best_edge = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    double d = dist_point_segment(contact, wp.vertices[i], wp.vertices[(i + 1) % n]);
    if (d < best_d) {
      best_d = d;
      best_edge = i;
    }
  }
  Vec2 edge = (wp.vertices[(best_edge + 1) % n] - wp.vertices[best_edge]).normalized();
  Vec2 normal = edge.perp();
  Point2 robot_center = contact - normal * robot_.radius;

  PushResult result;
  result.force.timestamp = time_ + dt;
  result.force.in_contact = true;
  double resist = obj->ground_friction * obj->mass * kGravity;

  if (resist > robot_.max_push_force) {
    result.new_pose = obj->pose;
    result.moved = false;
    result.force.magnitude = robot_.max_push_force;
    time_ += dt;
    return result;
  }
  result.force.magnitude = resist;

  if (dt <= 0.0) {
    result.new_pose = obj->pose;
    result.moved = true;
    time_ += dt;
    return result;
  }

  auto advance = [&](double t) {
    return advance_push_pose(obj->pose, robot_center, normal, v, omega, t);
  };

  double t_free = dt;
  if (object_collides(object_id, advance(dt))) {
    // binary-search time of impact to 1e-3 s
    double lo = 0.0, hi = dt;
    while (hi - lo > 1e-3) {
      double mid = 0.5 * (lo + hi);
      if (object_collides(object_id, advance(mid)))
        hi = mid;
      else
        lo = mid;
    }
    t_free = lo;
  }

  result.new_pose = advance(t_free);
  result.moved = t_free > 0.0 || dt == 0.0;
  obj->pose = result.new_pose;

  // the robot sticks to the contact; keep its pose consistent
  if (t_free > 0.0) {
    Pose2 rp{robot_center.x, robot_center.y, std::atan2(normal.y, normal.x)};
    Pose2 rp2 = advance_push_pose(rp, robot_center, normal, v, omega, t_free);
    robot_.pose = rp2;
  }
  time_ += dt;
  return result;
}

bool World::robot_collides(const Point2& center) const {
  for (const auto& p : scenario_.background) {
    if (p.contains(center) || p.distance_to_boundary(center) < robot_.radius) return true;
  }
  for (const auto& m : movables_) {
    Polygon p = m.world_polygon();
    if (p.contains(center) || p.distance_to_boundary(center) < robot_.radius) return true;
  }
  return false;
}

bool World::point_in_free_space(const Point2& p) const {
  if (p.x < scenario_.bounds_min.x || p.x > scenario_.bounds_max.x ||
      p.y < scenario_.bounds_min.y || p.y > scenario_.bounds_max.y)
    return false;
  for (const auto& poly : scenario_.background)
    if (poly.contains(p)) return false;
  for (const auto& m : movables_)
    if (m.world_polygon().contains(p)) return false;
  return true;
}

Pose2 World::step_drive(double v, double omega, double dt) {
  if (std::abs(v) > robot_.max_speed + 1e-9 || std::abs(omega) > robot_.max_yaw_rate + 1e-9)
    throw std::invalid_argument("step_drive: command exceeds limits");

  // sample the arc, stop at the first colliding sample (refined by bisection)
  int steps = std::max(2, static_cast<int>(std::ceil(std::abs(v) * dt / 0.02)));
  double t_ok = 0.0;
  for (int i = 1; i <= steps; ++i) {
    double t = dt * i / steps;
    Pose2 p = unicycle_step(robot_.pose, v, omega, t);
    if (robot_collides(p.position())) {
      double lo = t_ok, hi = t;
      while (hi - lo > 1e-4) {
        double mid = 0.5 * (lo + hi);
        if (robot_collides(unicycle_step(robot_.pose, v, omega, mid).position()))
          hi = mid;
        else
          lo = mid;
      }
      t_ok = lo;
      break;
    }
    t_ok = t;
  }
  robot_.pose = unicycle_step(robot_.pose, v, omega, t_ok);
  time_ += dt;
  return robot_.pose;
}

}  // namespace inav
