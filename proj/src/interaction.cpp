#include "inav/interaction.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <queue>
#include <set>
#include <sstream>

namespace inav {

namespace {

struct Wrench {
  double fx = 0, fy = 0, tau = 0;
};

double wrench_norm(const Wrench& w) { return std::sqrt(w.fx * w.fx + w.fy * w.fy + w.tau * w.tau); }

// Is w a nonnegative combination of the generators? Caratheodory: check all
// subsets of size <= 3.
bool in_conic_hull(const std::vector<Wrench>& gen, const Wrench& w) {
  double tol = 1e-7 * (wrench_norm(w) + 1.0);
  size_t n = gen.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      for (size_t k = j + 1; k < n; ++k) {
        const Wrench &a = gen[i], &b = gen[j], &c = gen[k];
        double det = a.fx * (b.fy * c.tau - b.tau * c.fy) - b.fx * (a.fy * c.tau - a.tau * c.fy) +
                     c.fx * (a.fy * b.tau - a.tau * b.fy);
        if (std::abs(det) < 1e-12) continue;
        double la = (w.fx * (b.fy * c.tau - b.tau * c.fy) - b.fx * (w.fy * c.tau - w.tau * c.fy) +
                     c.fx * (w.fy * b.tau - w.tau * b.fy)) /
                    det;
        double lb = (a.fx * (w.fy * c.tau - w.tau * c.fy) - w.fx * (a.fy * c.tau - a.tau * c.fy) +
                     c.fx * (a.fy * w.tau - a.tau * w.fy)) /
                    det;
        double lc = (a.fx * (b.fy * w.tau - b.tau * w.fy) - b.fx * (a.fy * w.tau - a.tau * w.fy) +
                     w.fx * (a.fy * b.tau - a.tau * b.fy)) /
                    det;
        if (la >= -tol && lb >= -tol && lc >= -tol) return true;
      }
  // degenerate cases: pairs via least squares on the plane they span
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const Wrench &a = gen[i], &b = gen[j];
      double aa = a.fx * a.fx + a.fy * a.fy + a.tau * a.tau;
      double bb = b.fx * b.fx + b.fy * b.fy + b.tau * b.tau;
      double ab = a.fx * b.fx + a.fy * b.fy + a.tau * b.tau;
      double aw = a.fx * w.fx + a.fy * w.fy + a.tau * w.tau;
      double bw = b.fx * w.fx + b.fy * w.fy + b.tau * w.tau;
      double det = aa * bb - ab * ab;
      if (std::abs(det) < 1e-12) continue;
      double la = (aw * bb - bw * ab) / det;
      double lb = (bw * aa - aw * ab) / det;
      if (la < -tol || lb < -tol) continue;
      Wrench r{w.fx - la * a.fx - lb * b.fx, w.fy - la * a.fy - lb * b.fy,
               w.tau - la * a.tau - lb * b.tau};
      if (wrench_norm(r) < tol) return true;
    }
  return false;
}

// Uniform area samples of a polygon interior.
std::vector<Point2> area_samples(const Polygon& poly) {
  double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
  for (const auto& v : poly.vertices) {
    minx = std::min(minx, v.x);
    maxx = std::max(maxx, v.x);
    miny = std::min(miny, v.y);
    maxy = std::max(maxy, v.y);
  }
  std::vector<Point2> out;
  for (int grid = 20; grid <= 80 && out.size() < 16; grid *= 2) {
    out.clear();
    double sx = (maxx - minx) / grid, sy = (maxy - miny) / grid;
    for (int iy = 0; iy < grid; ++iy)
      for (int ix = 0; ix < grid; ++ix) {
        Point2 p{minx + (ix + 0.5) * sx, miny + (iy + 0.5) * sy};
        if (poly.contains(p)) out.push_back(p);
      }
  }
  if (out.empty()) out = poly.vertices;
  return out;
}

void bbox_of(const Polygon& p, Point2& lo, Point2& hi) {
  lo = {1e300, 1e300};
  hi = {-1e300, -1e300};
  for (const auto& v : p.vertices) {
    lo.x = std::min(lo.x, v.x);
    lo.y = std::min(lo.y, v.y);
    hi.x = std::max(hi.x, v.x);
    hi.y = std::max(hi.y, v.y);
  }
}

bool bbox_overlap(const Point2& lo1, const Point2& hi1, const Point2& lo2, const Point2& hi2) {
  return lo1.x <= hi2.x && lo2.x <= hi1.x && lo1.y <= hi2.y && lo2.y <= hi1.y;
}

// Deepest overlap of the object with any obstacle, measured as the width of
// the overlap region.
double overlap_width(const Polygon& obj, const std::vector<Polygon>& obstacles) {
  Point2 lo, hi, olo, ohi;
  bbox_of(obj, lo, hi);
  double worst = 0;
  for (const auto& obs : obstacles) {
    bbox_of(obs, olo, ohi);
    if (!bbox_overlap(lo, hi, olo, ohi)) continue;
    for (const auto& piece : polygon_intersection(obj, obs))
      worst = std::max(worst, polygon_width(piece));
  }
  return worst;
}

}  // namespace

StableCone stable_cone(const Polygon& object, const ContactPoint& contact, double k,
                       double contact_width, double robot_radius) {
  size_t n = object.vertices.size();
  const Point2& a = object.vertices[contact.edge];
  const Point2& b = object.vertices[(contact.edge + 1) % n];
  double edge_len = (b - a).norm();
  if (edge_len < contact_width)
    throw std::invalid_argument("stable_cone: contact edge shorter than the contact width");
  if (k <= 0) throw std::invalid_argument("stable_cone: friction coefficient must be positive");

  Point2 cp = contact.point_on(object);
  Vec2 tdir = (b - a).normalized();
  Vec2 n_in = contact.normal_on(object);  // inward push direction
  double half_w = 0.5 * contact_width;
  // keep the contact line on the edge
  double s = (cp - a).dot(tdir);
  s = std::clamp(s, half_w, edge_len - half_w);
  cp = a + tdir * s;
  Point2 q1 = cp - tdir * half_w;
  Point2 q2 = cp + tdir * half_w;

  double alpha = std::atan(k);
  std::vector<Wrench> gen;
  for (const Point2& q : {q1, q2})
    for (double sign : {+1.0, -1.0}) {
      Vec2 f = n_in.rotated(sign * alpha);
      gen.push_back({f.x, f.y, (q - cp).cross(f)});
    }

  std::vector<Point2> samples = area_samples(object);
  Point2 rc = cp - n_in * robot_radius;

  auto stable_at = [&](double kappa) {
    Wrench w;
    if (std::abs(kappa) < 1e-9) {
      for (const auto& p : samples) {
        w.fx += n_in.x;
        w.fy += n_in.y;
        w.tau += (p - cp).cross(n_in);
      }
    } else {
      Point2 c = rc + n_in.perp() * (1.0 / kappa);
      double sgn = kappa > 0 ? 1.0 : -1.0;
      for (const auto& p : samples) {
        Vec2 u = (p - c).perp().normalized() * sgn;
        w.fx += u.x;
        w.fy += u.y;
        w.tau += (p - cp).cross(u);
      }
    }
    double nn = samples.size();
    w.fx /= nn;
    w.fy /= nn;
    w.tau /= nn;
    return in_conic_hull(gen, w);
  };

  StableCone cone;
  cone.edge = contact.edge;
  if (!stable_at(0.0)) return cone;
  cone.valid = true;
  const double kmax_scan = 3.0, dk = 0.05;
  double hi2 = 0;
  while (hi2 + dk <= kmax_scan + 1e-9 && stable_at(hi2 + dk)) hi2 += dk;
  double lo2 = 0;
  while (lo2 - dk >= -kmax_scan - 1e-9 && stable_at(lo2 - dk)) lo2 -= dk;
  cone.kappa_min = lo2;
  cone.kappa_max = hi2;
  return cone;
}

std::pair<std::vector<Polygon>, double> heuristic_polygons(const Polygon& object_at_pose,
                                                           const std::vector<Polygon>& background,
                                                           double u_x) {
  std::vector<Polygon> regions;
  Point2 lo, hi, olo, ohi;
  bbox_of(object_at_pose, lo, hi);
  for (const auto& bg : background) {
    bbox_of(bg, olo, ohi);
    if (!bbox_overlap(lo, hi, olo, ohi)) continue;
    for (auto& piece : polygon_intersection(object_at_pose, bg)) regions.push_back(std::move(piece));
  }
  if (regions.empty()) return {regions, 0.0};
  double h;
  if (regions.size() == 1) {
    h = polygon_width(regions[0]);
  } else {
    std::vector<Point2> pts;
    for (const auto& r : regions)
      pts.insert(pts.end(), r.vertices.begin(), r.vertices.end());
    try {
      h = polygon_width(convex_hull(std::move(pts)));
    } catch (const std::invalid_argument&) {
      h = 0.0;  // degenerate union, nothing to claim
    }
  }
  return {regions, h * u_x};
}

// --- PushSearchContext ------------------------------------------------------

PushSearchContext::PushSearchContext(const Polygon& object, const PolygonSetLocal& polys,
                                     const Affordance& aff, const Point2& start_wp,
                                     const Point2& goal_wp, const InteractionConfig& cfg,
                                     const IntGrid* known)
    : cfg_(cfg), object_(object), aff_(aff), start_wp_(start_wp), goal_wp_(goal_wp),
      known_(known) {
  for (const auto& p : polys.background) obstacles_.push_back(p);
  for (const auto& p : polys.movable)
    if (p.id != object.id) obstacles_.push_back(p);

  size_t n = object_.vertices.size();
  for (size_t e = 0; e < n; ++e) {
    double len = (object_.vertices[(e + 1) % n] - object_.vertices[e]).norm();
    if (len < cfg_.robot_contact_width) continue;
    std::vector<double> ts{0.5};
    if (len >= 2.0 * cfg_.robot_contact_width) {
      ts.push_back(0.25);
      ts.push_back(0.75);
    }
    for (double t : ts) {
      ContactPoint c{static_cast<int>(e), t};
      contacts_.push_back(c);
      cones_.push_back(stable_cone(object_, c, aff_.surface_friction, cfg_.robot_contact_width,
                                   cfg_.robot_radius));
    }
  }

  allowed_pen_ = std::max(cfg_.allowed_penetration, overlap_width(object_, obstacles_) + 0.02);
  object_inflated_ = inflate(object_, cfg_.robot_radius * 0.999);

  Point2 lo, hi;
  bbox_of(object_, lo, hi);
  lo.x = std::min({lo.x, start_wp.x, goal_wp.x}) - cfg_.goal_region_margin;
  lo.y = std::min({lo.y, start_wp.y, goal_wp.y}) - cfg_.goal_region_margin;
  hi.x = std::max({hi.x, start_wp.x, goal_wp.x}) + cfg_.goal_region_margin;
  hi.y = std::max({hi.y, start_wp.y, goal_wp.y}) + cfg_.goal_region_margin;
  int nx = static_cast<int>(std::ceil((hi.x - lo.x) / cfg_.goal_grid_res));
  int ny = static_cast<int>(std::ceil((hi.y - lo.y) / cfg_.goal_grid_res));
  goal_base_ = IntGrid(lo, cfg_.goal_grid_res, nx, ny, 0);
  for (const auto& obs : obstacles_) rasterize_polygon(goal_base_, obs, 1);
}

Point2 PushSearchContext::robot_center(int contact, const Pose2& pose) const {
  const ContactPoint& c = contacts_[contact];
  Point2 cp = pose.transform(c.point_on(object_));
  Vec2 n_in = c.normal_on(object_).rotated(pose.psi);
  return cp - n_in * cfg_.robot_radius;
}

bool PushSearchContext::contact_feasible(int contact, const Pose2& pose) const {
  Point2 rc = robot_center(contact, pose);
  Polygon obj = object_at(pose);
  if (obj.contains_strict(rc)) return false;
  for (const auto& obs : obstacles_) {
    if (obs.contains(rc)) return false;
    if (cfg_.robot_clearance > 0 && obs.distance_to_boundary(rc) < cfg_.robot_clearance - kEps)
      return false;
  }
  return true;
}

bool PushSearchContext::pose_feasible(const Pose2& pose) const {
  return overlap_width(object_at(pose), obstacles_) <= allowed_pen_ + 1e-9;
}

std::tuple<int64_t, int64_t, int64_t> PushSearchContext::pose_bin(const Pose2& pose) const {
  return {static_cast<int64_t>(std::llround(pose.x / cfg_.pose_bin_xy)),
          static_cast<int64_t>(std::llround(pose.y / cfg_.pose_bin_xy)),
          static_cast<int64_t>(std::llround(pose.psi / cfg_.pose_bin_theta))};
}

double PushSearchContext::heuristic(const Pose2& pose) {
  auto key = pose_bin(pose);
  auto it = heur_cache_.find(key);
  if (it != heur_cache_.end()) return it->second;
  double h = heuristic_polygons(object_at(pose), obstacles_, aff_.effort).second;
  heur_cache_[key] = h;
  return h;
}

bool PushSearchContext::reachable_from_start(const Point2& p) {
  if (!start_reach_ready_) {
    start_reach_ = goal_base_;
    rasterize_polygon(start_reach_, object_at({}), 1);
    Cell s = start_reach_.world_to_cell(start_wp_);
    if (start_reach_.in(s.x, s.y) && start_reach_.at(s.x, s.y) == 0) {
      std::vector<Cell> stack{s};
      start_reach_.at(s.x, s.y) = 2;
      const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
      while (!stack.empty()) {
        Cell c = stack.back();
        stack.pop_back();
        for (int k = 0; k < 4; ++k) {
          int nx = c.x + dx4[k], ny = c.y + dy4[k];
          if (start_reach_.in(nx, ny) && start_reach_.at(nx, ny) == 0) {
            start_reach_.at(nx, ny) = 2;
            stack.push_back({nx, ny});
          }
        }
      }
    }
    start_reach_ready_ = true;
  }
  Cell c = start_reach_.world_to_cell(p);
  // the stance sits one robot radius off the object boundary, which can land
  // inside a rasterized boundary cell; accept a reached 8-neighborhood
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      if (start_reach_.in(c.x + dx, c.y + dy) && start_reach_.at(c.x + dx, c.y + dy) == 2)
        return true;
  return false;
}

bool PushSearchContext::goal_connected(const Pose2& pose, bool require_known) {
  auto key = pose_bin(pose);
  if (!require_known) {
    auto it = goal_cache_.find(key);
    if (it != goal_cache_.end()) return it->second;
  }

  IntGrid g = goal_base_;
  rasterize_polygon(g, object_at(pose), 1);
  if (require_known && known_) {
    // a cell counts as traversable only when observed free and clear of any
    // observed hit by the robot radius; extracted polygons lose up to a
    // simplification tolerance at corners, raw hits do not
    int rk = static_cast<int>(std::ceil(cfg_.robot_radius / known_->res));
    for (int y = 0; y < g.ny; ++y)
      for (int x = 0; x < g.nx; ++x) {
        if (g.at(x, y) != 0) continue;
        Cell kc = known_->world_to_cell(g.cell_center({x, y}));
        if (!known_->in(kc.x, kc.y) || known_->at(kc.x, kc.y) != 1) {
          g.at(x, y) = 1;
          continue;
        }
        for (int dy = -rk; dy <= rk && g.at(x, y) == 0; ++dy)
          for (int dx = -rk; dx <= rk; ++dx)
            if (known_->in(kc.x + dx, kc.y + dy) && known_->at(kc.x + dx, kc.y + dy) >= 2) {
              g.at(x, y) = 1;
              break;
            }
      }
  }
  Cell s = g.world_to_cell(start_wp_), t = g.world_to_cell(goal_wp_);
  bool ok = false;
  if (g.in(s.x, s.y) && g.in(t.x, t.y) && g.at(s.x, s.y) == 0 && g.at(t.x, t.y) == 0) {
    std::vector<Cell> stack{s};
    g.at(s.x, s.y) = 2;
    const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
    while (!stack.empty() && !ok) {
      Cell c = stack.back();
      stack.pop_back();
      if (c == t) ok = true;
      for (int k = 0; k < 4; ++k) {
        int nx = c.x + dx4[k], ny = c.y + dy4[k];
        if (g.in(nx, ny) && g.at(nx, ny) == 0) {
          g.at(nx, ny) = 2;
          stack.push_back({nx, ny});
        }
      }
    }
  }
  if (!require_known) goal_cache_[key] = ok;
  return ok;
}

double PushSearchContext::switch_cost(const Pose2& pose, int from_contact, int to_contact,
                                      std::vector<Point2>* path) {
  int ci = from_contact, cj = to_contact;
  if (!path && ci > cj) std::swap(ci, cj);  // detours are symmetric
  auto bin = pose_bin(pose);
  auto key = std::make_tuple(std::get<0>(bin), std::get<1>(bin), std::get<2>(bin), ci, cj);
  auto it = switch_cache_.find(key);
  if (it != switch_cache_.end() && !path) return it->second;

  Polygon blocker = object_inflated_.transformed(pose);
  std::vector<Polygon> obs = obstacles_;
  obs.push_back(blocker);

  std::vector<Point2> nodes{robot_center(from_contact, pose), robot_center(to_contact, pose)};
  for (const auto& v : blocker.vertices) nodes.push_back(v);
  size_t n = nodes.size();
  std::vector<std::vector<std::pair<size_t, double>>> adj(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (segment_visible(nodes[i], nodes[j], obs)) {
        double d = (nodes[i] - nodes[j]).norm();
        adj[i].push_back({j, d});
        adj[j].push_back({i, d});
      }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<int> parent(n, -1);
  using QE = std::pair<double, size_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;
  dist[0] = 0;
  open.push({0, 0});
  while (!open.empty()) {
    auto [d, i] = open.top();
    open.pop();
    if (d > dist[i] + 1e-12) continue;
    if (i == 1) break;
    for (auto [j, w] : adj[i])
      if (d + w < dist[j] - 1e-12) {
        dist[j] = d + w;
        parent[j] = static_cast<int>(i);
        open.push({dist[j], j});
      }
  }
  if (path && dist[1] < kInf) {
    path->clear();
    for (int i = 1; i >= 0; i = parent[i]) {
      path->push_back(nodes[i]);
      if (i == 0) break;
    }
    std::reverse(path->begin(), path->end());
  }
  switch_cache_[key] = dist[1];
  return dist[1];
}

std::vector<PushSearchContext::Successor> PushSearchContext::expand(const HybridState& s) {
  std::vector<Successor> out;
  const StableCone& cone = cones_[s.contact];
  if (cone.valid) {
    const ContactPoint& c = contacts_[s.contact];
    Point2 cp = s.pose.transform(c.point_on(object_));
    Vec2 n_in = c.normal_on(object_).rotated(s.pose.psi);
    Point2 rc = cp - n_in * cfg_.robot_radius;
    double v = cfg_.push_speed;
    double dt = cfg_.arc_length / v;

    std::vector<double> kappas;
    int m = cfg_.curvature_samples;
    if (cone.kappa_max - cone.kappa_min < 1e-9) {
      kappas.push_back(0.0);
    } else {
      for (int i = 0; i < m; ++i)
        kappas.push_back(cone.kappa_min + (cone.kappa_max - cone.kappa_min) * i / (m - 1));
      // make sure the straight push is among the samples
      double* nearest = &kappas[0];
      for (auto& k : kappas)
        if (std::abs(k) < std::abs(*nearest)) nearest = &k;
      *nearest = 0.0;
    }
    for (double kappa : kappas) {
      double omega = kappa * v;
      Pose2 mid = advance_push_pose(s.pose, rc, n_in, v, omega, 0.5 * dt);
      Pose2 next = advance_push_pose(s.pose, rc, n_in, v, omega, dt);
      if (!pose_feasible(mid) || !pose_feasible(next)) continue;
      if (!contact_feasible(s.contact, next)) continue;
      Successor succ;
      succ.state = {s.contact, next};
      succ.cost = cfg_.arc_length * aff_.effort;
      succ.action.type = PushAction::Type::Push;
      succ.action.contact = c;
      succ.action.v = v;
      succ.action.omega = omega;
      succ.action.duration = dt;
      succ.action.cost = succ.cost;
      out.push_back(std::move(succ));
    }
  }
  for (int j = 0; j < static_cast<int>(contacts_.size()); ++j) {
    if (j == s.contact || !cones_[j].valid) continue;
    if (!contact_feasible(j, s.pose)) continue;
    std::vector<Point2> path;
    double cost = switch_cost(s.pose, s.contact, j, &path);
    if (!std::isfinite(cost)) continue;
    Successor succ;
    succ.state = {j, s.pose};
    succ.cost = cost;
    succ.action.type = PushAction::Type::Switch;
    succ.action.contact = contacts_[j];
    succ.action.cost = cost;
    succ.action.switch_path = std::move(path);
    out.push_back(std::move(succ));
  }
  return out;
}

// --- hybrid A* --------------------------------------------------------------

SearchResult search_primitive(const Point2& start_wp, const Point2& goal_wp, const Polygon& object,
                              const PolygonSetLocal& polys, const Affordance& aff,
                              const InteractionConfig& cfg, const IntGrid* known) {
  SearchResult res;
  if (!aff.pushable) {
    res.failure = "not pushable";
    return res;
  }
  PushSearchContext ctx(object, polys, aff, start_wp, goal_wp, cfg, known);
  res.primitive.object_id = object.id;
  res.primitive.object_polygon = object;

  std::ostringstream trace;
  if (ctx.goal_connected({}, known != nullptr)) {
    res.success = true;  // nothing blocks: empty primitive, J = 0
    return res;
  }

  struct Node {
    HybridState s;
    double g = 0;
    int parent = -1;
    PushAction act;
  };
  std::vector<Node> nodes;
  using QE = std::tuple<double, double, size_t>;  // (f, g, node index)
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;
  std::set<std::tuple<int64_t, int64_t, int64_t, int>> closed;

  for (int i = 0; i < static_cast<int>(ctx.contacts().size()); ++i) {
    if (!ctx.cone(i).valid || !ctx.contact_feasible(i, {})) continue;
    if (!ctx.reachable_from_start(ctx.robot_center(i, {}))) continue;
    nodes.push_back({{i, {}}, 0.0, -1, {}});
    open.push({ctx.heuristic({}), 0.0, nodes.size() - 1});
  }
  if (nodes.empty()) {
    res.failure = "no contact";
    return res;
  }

  int goal_node = -1;
  while (!open.empty()) {
    auto [f, g, idx] = open.top();
    open.pop();
    const HybridState cur = nodes[idx].s;
    const double gcur = nodes[idx].g;
    auto bin = ctx.pose_bin(cur.pose);
    auto key = std::make_tuple(std::get<0>(bin), std::get<1>(bin), std::get<2>(bin), cur.contact);
    if (closed.count(key)) continue;
    closed.insert(key);
    if (++res.nodes_expanded > cfg.node_budget) {
      res.failure = "budget";
      res.trace = trace.str();
      return res;
    }
    if (cfg.record_trace) {
      char line[160];
      std::snprintf(line, sizeof(line), "pop c=%d x=%.3f y=%.3f psi=%.3f g=%.3f f=%.3f\n",
                    cur.contact, cur.pose.x, cur.pose.y, cur.pose.psi, g, f);
      trace << line;
    }
    // the optimistic goal test ignores unobserved space, so at the initial
    // pose it can succeed through a gap the strict entry check rejected (an
    // observation shadow behind the object). The pre-search check owns the
    // "already connected" verdict; a searched plan must move something.
    if (nodes[idx].parent >= 0 && ctx.goal_connected(cur.pose)) {
      goal_node = static_cast<int>(idx);
      break;
    }
    for (auto& succ : ctx.expand(cur)) {
      auto sbin = ctx.pose_bin(succ.state.pose);
      auto skey = std::make_tuple(std::get<0>(sbin), std::get<1>(sbin), std::get<2>(sbin),
                                  succ.state.contact);
      if (closed.count(skey)) continue;
      double sg = gcur + succ.cost;
      nodes.push_back({succ.state, sg, static_cast<int>(idx), std::move(succ.action)});
      open.push({sg + ctx.heuristic(succ.state.pose), sg, nodes.size() - 1});
    }
  }
  res.trace = trace.str();
  if (goal_node < 0) {
    res.failure = "exhausted";
    return res;
  }

  std::vector<PushAction> actions;
  for (int i = goal_node; nodes[i].parent >= 0; i = nodes[i].parent) actions.push_back(nodes[i].act);
  std::reverse(actions.begin(), actions.end());
  res.success = true;
  res.primitive.actions = std::move(actions);
  res.primitive.result_pose = nodes[goal_node].s.pose;
  res.primitive.cost = nodes[goal_node].g;
  return res;
}

GammaResult gamma(const Point2& from, const Point2& to, const Polygon& object,
                  const PolygonSetLocal& polys, const Affordance& aff,
                  const InteractionConfig& cfg, DVGraph* install_in, int from_id, int to_id,
                  const IntGrid* known) {
  GammaResult r;
  r.affordance = aff;
  if (!aff.pushable) {
    r.failure = "not pushable";
    return r;
  }
  SearchResult s = search_primitive(from, to, object, polys, aff, cfg, known);
  r.nodes_expanded = s.nodes_expanded;
  if (!s.success && s.failure == "budget") {
    InteractionConfig fine = cfg;  // variable resolution retry
    fine.arc_length = 0.5 * cfg.arc_length;
    s = search_primitive(from, to, object, polys, aff, fine, known);
    r.nodes_expanded += s.nodes_expanded;
  }
  if (!s.success) {
    r.failure = s.failure;
    return r;
  }
  r.success = true;
  r.J = s.primitive.cost;
  r.primitive = s.primitive;
  if (install_in && from_id >= 0 && to_id >= 0 && !r.primitive.empty()) {
    InteractionEdge e;
    e.from = from_id;
    e.to = to_id;
    e.object_id = object.id;
    e.cost = r.J;
    e.primitive = r.primitive;
    install_in->set_interaction_edge(std::move(e));
    install_in->affordances[object.id] = r.affordance;
  }
  return r;
}

}  // namespace inav
