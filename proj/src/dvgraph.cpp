#include "inav/dvgraph.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace inav {

int DVGraph::add_vertex(DVVertex v) {
  if (v.id < 0) v.id = next_id;
  next_id = std::max(next_id, v.id + 1);
  vertices[v.id] = v;
  return v.id;
}

void DVGraph::remove_vertex(int id) {
  vertices.erase(id);
  vis_edges.erase(std::remove_if(vis_edges.begin(), vis_edges.end(),
                                 [id](const VisibilityEdge& e) { return e.a == id || e.b == id; }),
                  vis_edges.end());
  interaction_edges.erase(
      std::remove_if(interaction_edges.begin(), interaction_edges.end(),
                     [id](const InteractionEdge& e) { return e.from == id || e.to == id; }),
      interaction_edges.end());
}

bool DVGraph::has_vis_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (const auto& e : vis_edges)
    if (e.a == a && e.b == b) return true;
  return false;
}

void DVGraph::add_vis_edge(int a, int b) {
  if (a == b) return;
  if (a > b) std::swap(a, b);
  if (has_vis_edge(a, b)) return;
  double len = (vertices.at(a).position - vertices.at(b).position).norm();
  vis_edges.push_back({a, b, len});
}

void DVGraph::set_interaction_edge(InteractionEdge e) {
  for (auto& existing : interaction_edges)
    if (existing.from == e.from && existing.to == e.to) {
      existing = std::move(e);
      return;
    }
  interaction_edges.push_back(std::move(e));
}

void DVGraph::remove_interaction_edges(int object_id) {
  interaction_edges.erase(
      std::remove_if(interaction_edges.begin(), interaction_edges.end(),
                     [object_id](const InteractionEdge& e) { return e.object_id == object_id; }),
      interaction_edges.end());
}

std::map<int, std::vector<std::pair<int, double>>> DVGraph::visibility_adjacency() const {
  std::map<int, std::vector<std::pair<int, double>>> adj;
  for (const auto& [id, v] : vertices) adj[id];
  for (const auto& e : vis_edges) {
    adj[e.a].push_back({e.b, e.length});
    adj[e.b].push_back({e.a, e.length});
  }
  return adj;
}

// --- serialization ----------------------------------------------------------

static std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

static void write_polygon(std::ostringstream& os, const Polygon& p) {
  os << static_cast<int>(p.cls) << " " << p.id << " " << p.vertices.size();
  for (const auto& v : p.vertices) os << " " << fmt(v.x) << " " << fmt(v.y);
}

static Polygon read_polygon(std::istringstream& is) {
  int cls, id;
  size_t n;
  is >> cls >> id >> n;
  std::vector<Point2> verts(n);
  for (auto& v : verts) is >> v.x >> v.y;
  return Polygon(std::move(verts), static_cast<PolyClass>(cls), id);
}

std::string DVGraph::serialize() const {
  std::ostringstream os;
  os << "DVGRAPH v1\n";
  os << "frame " << frame << "\n";
  os << "next_id " << next_id << "\n";
  for (const auto& [id, v] : vertices)
    os << "vertex " << id << " " << static_cast<int>(v.kind) << " " << fmt(v.position.x) << " "
       << fmt(v.position.y) << " " << v.source_polygon << " " << v.object_id << " " << v.component
       << " " << v.unobserved_count << "\n";
  for (const auto& e : vis_edges)
    os << "vedge " << e.a << " " << e.b << " " << fmt(e.length) << "\n";
  for (const auto& e : interaction_edges) {
    os << "iedge " << e.from << " " << e.to << " " << e.object_id << " " << fmt(e.cost) << "\n";
    const PushPrimitive& pr = e.primitive;
    os << "prim " << pr.object_id << " " << fmt(pr.cost) << " " << fmt(pr.result_pose.x) << " "
       << fmt(pr.result_pose.y) << " " << fmt(pr.result_pose.psi) << " ";
    write_polygon(os, pr.object_polygon);
    os << " " << pr.actions.size() << "\n";
    for (const auto& a : pr.actions) {
      os << "action " << (a.type == PushAction::Type::Push ? 0 : 1) << " " << a.contact.edge << " "
         << fmt(a.contact.t) << " " << fmt(a.v) << " " << fmt(a.omega) << " " << fmt(a.duration)
         << " " << fmt(a.cost) << " " << a.switch_path.size();
      for (const auto& p : a.switch_path) os << " " << fmt(p.x) << " " << fmt(p.y);
      os << "\n";
    }
  }
  for (const auto& [id, a] : affordances)
    os << "affordance " << id << " " << (a.pushable ? 1 : 0) << " " << fmt(a.surface_friction)
       << " " << fmt(a.effort) << " " << fmt(a.estimated_resistance) << "\n";
  os << "end\n";
  return os.str();
}

DVGraph DVGraph::parse(const std::string& text) {
  std::istringstream in(text);
  std::string header, version;
  in >> header >> version;
  if (header != "DVGRAPH" || version != "v1")
    throw std::invalid_argument("DVGraph::parse: unsupported format");
  DVGraph g;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream is(line);
    std::string tag;
    is >> tag;
    if (tag.empty()) continue;
    if (tag == "end") break;
    if (tag == "frame") {
      is >> g.frame;
    } else if (tag == "next_id") {
      is >> g.next_id;
    } else if (tag == "vertex") {
      DVVertex v;
      int kind;
      is >> v.id >> kind >> v.position.x >> v.position.y >> v.source_polygon >> v.object_id >>
          v.component >> v.unobserved_count;
      v.kind = static_cast<VertexKind>(kind);
      g.vertices[v.id] = v;
    } else if (tag == "vedge") {
      VisibilityEdge e;
      is >> e.a >> e.b >> e.length;
      g.vis_edges.push_back(e);
    } else if (tag == "iedge") {
      InteractionEdge e;
      is >> e.from >> e.to >> e.object_id >> e.cost;
      g.interaction_edges.push_back(std::move(e));
    } else if (tag == "prim") {
      if (g.interaction_edges.empty())
        throw std::invalid_argument("DVGraph::parse: primitive without edge");
      PushPrimitive& pr = g.interaction_edges.back().primitive;
      size_t n_actions;
      is >> pr.object_id >> pr.cost >> pr.result_pose.x >> pr.result_pose.y >> pr.result_pose.psi;
      pr.object_polygon = read_polygon(is);
      is >> n_actions;
      pr.actions.reserve(n_actions);
    } else if (tag == "action") {
      PushAction a;
      int type;
      size_t n;
      is >> type >> a.contact.edge >> a.contact.t >> a.v >> a.omega >> a.duration >> a.cost >> n;
      a.type = type == 0 ? PushAction::Type::Push : PushAction::Type::Switch;
      a.switch_path.resize(n);
      for (auto& p : a.switch_path) is >> p.x >> p.y;
      g.interaction_edges.back().primitive.actions.push_back(std::move(a));
    } else if (tag == "affordance") {
      Affordance a;
      int id, pushable;
      is >> id >> pushable >> a.surface_friction >> a.effort >> a.estimated_resistance;
      a.object_id = id;
      a.pushable = pushable != 0;
      g.affordances[id] = a;
    } else {
      throw std::invalid_argument("DVGraph::parse: unknown tag " + tag);
    }
  }
  return g;
}

// --- construction -----------------------------------------------------------

DVGraph build_local_graph(const PolygonSetLocal& polys) {
  DVGraph g;
  std::vector<Polygon> all = polys.all();
  std::vector<int> ids;
  for (const auto& poly : all)
    for (const auto& p : poly.vertices) {
      DVVertex v;
      v.position = p;
      v.kind = VertexKind::PolygonVertex;
      v.source_polygon = poly.id;
      if (poly.cls == PolyClass::Movable) v.object_id = poly.id;
      ids.push_back(g.add_vertex(v));
    }
  for (size_t i = 0; i < ids.size(); ++i)
    for (size_t j = i + 1; j < ids.size(); ++j) {
      const Point2& a = g.vertices.at(ids[i]).position;
      const Point2& b = g.vertices.at(ids[j]).position;
      if ((a - b).norm() < kEps) continue;
      if (segment_visible(a, b, all)) g.add_vis_edge(ids[i], ids[j]);
    }
  return g;
}

// --- connectivity analysis --------------------------------------------------

namespace {

// All forward hit distances of a ray against a polygon boundary.
std::vector<double> ray_hits(const Point2& origin, const Vec2& dir, const Polygon& poly) {
  std::vector<double> out;
  size_t n = poly.vertices.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& a = poly.vertices[i];
    const Point2& b = poly.vertices[(i + 1) % n];
    Vec2 e = b - a;
    double denom = dir.cross(e);
    if (std::abs(denom) < 1e-12) continue;
    double t = (a - origin).cross(e) / denom;
    double s = (a - origin).cross(dir) / denom;
    if (t >= 1e-9 && s >= -1e-9 && s <= 1.0 + 1e-9) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct PerimeterWalk {
  const Polygon* poly;
  std::vector<double> cum;  // cumulative edge start lengths, plus total

  explicit PerimeterWalk(const Polygon& p) : poly(&p) {
    cum.push_back(0);
    size_t n = p.vertices.size();
    for (size_t i = 0; i < n; ++i)
      cum.push_back(cum.back() + (p.vertices[(i + 1) % n] - p.vertices[i]).norm());
  }
  double total() const { return cum.back(); }
  Point2 at(double s) const {
    s = std::fmod(s, total());
    if (s < 0) s += total();
    size_t e = std::upper_bound(cum.begin(), cum.end(), s) - cum.begin();
    e = std::min(e, cum.size() - 1) - 1;
    size_t n = poly->vertices.size();
    const Point2& a = poly->vertices[e % n];
    const Point2& b = poly->vertices[(e + 1) % n];
    double len = cum[e + 1] - cum[e];
    double t = len > 0 ? (s - cum[e]) / len : 0;
    return a + (b - a) * t;
  }
};

}  // namespace

ConnectivityResult connectivity_analysis(const PolygonSetLocal& polys, int object_id,
                                         const LocalGrid& grid, double d_thres,
                                         double window_margin) {
  ConnectivityResult res;
  const int32_t stored = object_id + 1;
  IntGrid occ(grid.bg.origin, grid.bg.res, grid.bg.nx, grid.bg.ny, 0);
  for (size_t i = 0; i < occ.v.size(); ++i)
    occ.v[i] = (grid.bg.v[i] != 0 || grid.mov.v[i] != 0) ? 1 : 0;
  int wx0 = 0, wy0 = 0, wx1 = occ.nx - 1, wy1 = occ.ny - 1;
  {
    int ox0 = occ.nx, oy0 = occ.ny, ox1 = -1, oy1 = -1;
    for (int y = 0; y < grid.mov.ny; ++y)
      for (int x = 0; x < grid.mov.nx; ++x)
        if (grid.mov.at(x, y) == stored) {
          ox0 = std::min(ox0, x);
          oy0 = std::min(oy0, y);
          ox1 = std::max(ox1, x);
          oy1 = std::max(oy1, y);
        }
    if (ox1 >= 0) {
      int m = static_cast<int>(std::ceil(window_margin / occ.res));
      wx0 = std::max(0, ox0 - m);
      wy0 = std::max(0, oy0 - m);
      wx1 = std::min(occ.nx - 1, ox1 + m);
      wy1 = std::min(occ.ny - 1, oy1 + m);
      for (int y = 0; y < occ.ny; ++y)
        for (int x = 0; x < occ.nx; ++x)
          if (x < wx0 || x > wx1 || y < wy0 || y > wy1) occ.at(x, y) = 1;
    }
  }
  label_components(occ, [](int32_t v) { return v == 0; }, res.labels, false);

  std::set<int> adjacent;
  const int dx4[] = {1, -1, 0, 0}, dy4[] = {0, 0, 1, -1};
  for (int y = 0; y < grid.mov.ny; ++y)
    for (int x = 0; x < grid.mov.nx; ++x) {
      if (grid.mov.at(x, y) != stored) continue;
      for (int k = 0; k < 4; ++k) {
        int nx = x + dx4[k], ny = y + dy4[k];
        if (res.labels.in(nx, ny) && res.labels.at(nx, ny) != 0)
          adjacent.insert(res.labels.at(nx, ny));
      }
    }
  res.n_components = static_cast<int>(adjacent.size());

  const Polygon* obj = nullptr;
  for (const auto& p : polys.movable)
    if (p.id == object_id) obj = &p;
  if (!obj || obj->vertices.size() < 3) return res;

  // intersection points with background boundaries, as perimeter parameters
  PerimeterWalk walk(*obj);
  std::vector<double> params;
  std::vector<double> ts;
  size_t n = obj->vertices.size();
  for (size_t e = 0; e < n; ++e) {
    const Point2& a = obj->vertices[e];
    const Point2& b = obj->vertices[(e + 1) % n];
    double len = (b - a).norm();
    for (const auto& bg : polys.background) {
      size_t m = bg.vertices.size();
      for (size_t f = 0; f < m; ++f) {
        ts.clear();
        segment_intersection_params(a, b, bg.vertices[f], bg.vertices[(f + 1) % m], ts);
        for (double t : ts) params.push_back(walk.cum[e] + t * len);
      }
    }
  }
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end(),
                           [](double a, double b) { return b - a < 1e-9; }),
               params.end());
  if (params.size() >= 2 &&
      walk.total() - params.back() + params.front() < 1e-9)
    params.pop_back();
  if (params.size() < 2) return res;

  std::vector<Polygon> others;
  for (const auto& p : polys.background) others.push_back(p);
  for (const auto& p : polys.movable)
    if (p.id != object_id) others.push_back(p);

  for (size_t k = 0; k < params.size(); ++k) {
    double s0 = params[k];
    double s1 = params[(k + 1) % params.size()];
    if (k + 1 == params.size()) s1 += walk.total();
    if (s1 - s0 < 1e-9) continue;
    Point2 arc_mid = walk.at(0.5 * (s0 + s1));
    bool buried = false;
    for (const auto& bg : polys.background)
      if (bg.contains(arc_mid)) buried = true;
    if (buried) continue;

    Point2 pi = walk.at(s0), pj = walk.at(s1);
    Vec2 u = pj - pi;
    if (u.norm() < 1e-9) continue;
    Vec2 nhat = Vec2{u.y, -u.x}.normalized();  // outward side of the CCW arc
    Point2 pmid = (pi + pj) * 0.5;
    auto hits = ray_hits(pmid, nhat, *obj);
    Point2 exit = hits.empty() ? pmid : pmid + nhat * hits.back();

    double d_obs = std::numeric_limits<double>::infinity();
    for (const auto& p : others) d_obs = std::min(d_obs, p.distance_to_boundary(exit));
    double offset = std::min(d_thres, 0.5 * d_obs);

    for (int attempt = 0; attempt < 2; ++attempt, offset *= 0.5) {
      Point2 wp = exit + nhat * offset;
      Cell c = res.labels.world_to_cell(wp);
      if (!res.labels.in(c.x, c.y) || res.labels.at(c.x, c.y) == 0) continue;
      bool inside = obj->contains(wp);
      for (const auto& p : others)
        if (p.contains(wp)) inside = true;
      if (inside) continue;
      res.waypoints.push_back({wp, res.labels.at(c.x, c.y), object_id, exit});
      break;
    }
  }
  return res;
}

int verify_topo_visibility(const Point2& waypoint, const PolygonSetLocal& polys) {
  std::vector<Polygon> all = polys.all();
  std::vector<Point2> candidates;
  for (const auto& p : all)
    for (const auto& v : p.vertices) candidates.push_back(v);
  for (const auto& mov : polys.movable) {
    size_t n = mov.vertices.size();
    for (const auto& bg : polys.background) {
      size_t m = bg.vertices.size();
      for (size_t e = 0; e < n; ++e)
        for (size_t f = 0; f < m; ++f) {
          auto pt = segment_intersection_point(mov.vertices[e], mov.vertices[(e + 1) % n],
                                               bg.vertices[f], bg.vertices[(f + 1) % m]);
          if (pt) candidates.push_back(*pt);
        }
    }
  }
  int count = 0;
  std::vector<Point2> counted;
  for (const auto& c : candidates) {
    bool dup = false;
    for (const auto& seen : counted)
      if ((seen - c).norm() < kEps) dup = true;
    if (dup) continue;
    counted.push_back(c);
    if ((c - waypoint).norm() < kEps) continue;
    if (segment_visible(waypoint, c, all)) ++count;
  }
  return count;
}

// --- local-to-global merge --------------------------------------------------

void merge_local_into_global(DVGraph& global, const DVGraph& local, const MergeParams& params,
                             const std::vector<Polygon>& polygons) {
  if (global.frame != local.frame)
    throw std::invalid_argument("merge_local_into_global: frame mismatch");

  EdgeIndex index(polygons);
  std::map<int, int> local_to_global;
  std::set<int> matched_global;

  for (const auto& [lid, lv] : local.vertices) {
    int best = -1;
    double best_d = params.assoc_radius;
    for (const auto& [gid, gv] : global.vertices) {
      if (matched_global.count(gid)) continue;
      if (gv.kind != lv.kind) continue;
      if (lv.kind == VertexKind::TopoWaypoint && gv.object_id != lv.object_id) continue;
      double d = (gv.position - lv.position).norm();
      if (d <= best_d) {
        best_d = d;
        best = gid;
      }
    }
    if (best >= 0) {
      DVVertex& gv = global.vertices.at(best);
      gv.position = gv.position * (1.0 - params.alpha) + lv.position * params.alpha;
      gv.unobserved_count = 0;
      gv.source_polygon = lv.source_polygon;
      gv.object_id = lv.object_id;
      gv.component = lv.component;
      matched_global.insert(best);
      local_to_global[lid] = best;
    } else {
      DVVertex v = lv;
      v.id = -1;
      v.unobserved_count = 0;
      int gid = global.add_vertex(v);
      matched_global.insert(gid);
      local_to_global[lid] = gid;
    }
  }

  // voting: unmatched global vertices inside the field of view accumulate
  // misses; out-of-view vertices are left alone
  Point2 robot = params.robot_pose.position();
  std::vector<int> removed;
  for (auto& [gid, gv] : global.vertices) {
    if (matched_global.count(gid)) continue;
    if ((gv.position - robot).norm() > params.sensor_range) continue;
    if (!index.empty() && !index.visible(robot, gv.position)) continue;
    if (++gv.unobserved_count >= params.vote_threshold) removed.push_back(gid);
  }
  for (int gid : removed) global.remove_vertex(gid);

  for (const auto& e : local.vis_edges) {
    auto a = local_to_global.find(e.a);
    auto b = local_to_global.find(e.b);
    if (a != local_to_global.end() && b != local_to_global.end())
      global.add_vis_edge(a->second, b->second);
  }
  for (const auto& e : local.interaction_edges) {
    auto a = local_to_global.find(e.from);
    auto b = local_to_global.find(e.to);
    if (a == local_to_global.end() || b == local_to_global.end()) continue;
    InteractionEdge mapped = e;
    mapped.from = a->second;
    mapped.to = b->second;
    global.set_interaction_edge(std::move(mapped));
  }
  for (const auto& [id, a] : local.affordances) global.affordances[id] = a;

  // refresh lengths after smoothing, drop edges no longer collision-free
  for (auto& e : global.vis_edges)
    e.length = (global.vertices.at(e.a).position - global.vertices.at(e.b).position).norm();
  global.vis_edges.erase(
      std::remove_if(global.vis_edges.begin(), global.vis_edges.end(),
                     [&](const VisibilityEdge& e) {
                       const Point2& pa = global.vertices.at(e.a).position;
                       const Point2& pb = global.vertices.at(e.b).position;
                       return !index.empty() && !index.visible(pa, pb);
                     }),
      global.vis_edges.end());
  global.interaction_edges.erase(
      std::remove_if(global.interaction_edges.begin(), global.interaction_edges.end(),
                     [&](const InteractionEdge& e) {
                       if (e.from == e.to) return true;
                       if (!global.has_vertex(e.from) || !global.has_vertex(e.to)) return true;
                       const DVVertex& a = global.vertices.at(e.from);
                       const DVVertex& b = global.vertices.at(e.to);
                       return a.kind != VertexKind::TopoWaypoint ||
                              b.kind != VertexKind::TopoWaypoint ||
                              a.object_id != e.object_id || b.object_id != e.object_id;
                     }),
      global.interaction_edges.end());
}

}  // namespace inav
