#include "inav/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "inav/global_planner.hpp"

namespace inav {

using nlohmann::json;

const char* scenario_class_name(ScenarioClass c) {
  switch (c) {
    case ScenarioClass::Room: return "room";
    case ScenarioClass::RoomWithObjects: return "room_with_objects";
    case ScenarioClass::Office: return "office";
    case ScenarioClass::Tunnel: return "tunnel";
  }
  return "?";
}

ScenarioClass scenario_class_from_name(const std::string& name) {
  if (name == "room") return ScenarioClass::Room;
  if (name == "room_with_objects") return ScenarioClass::RoomWithObjects;
  if (name == "office") return ScenarioClass::Office;
  if (name == "tunnel") return ScenarioClass::Tunnel;
  throw std::invalid_argument("unknown scenario class: " + name);
}

const char* planner_name(PlannerKind k) {
  switch (k) {
    case PlannerKind::Ours: return "ours";
    case PlannerKind::GridAstar: return "grid_astar";
    case PlannerKind::FarLike: return "far_like";
  }
  return "?";
}

PlannerKind planner_from_name(const std::string& name) {
  if (name == "ours") return PlannerKind::Ours;
  if (name == "grid_astar") return PlannerKind::GridAstar;
  if (name == "far_like") return PlannerKind::FarLike;
  throw std::invalid_argument("unknown planner: " + name);
}

// --- generation ---------------------------------------------------------------

namespace {

Polygon rect(Point2 lo, Point2 hi) {
  return Polygon({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}});
}

void outer_walls(Scenario& s, double t) {
  Point2 a = s.bounds_min, b = s.bounds_max;
  s.background.push_back(rect({a.x, a.y}, {b.x, a.y + t}));
  s.background.push_back(rect({a.x, b.y - t}, {b.x, b.y}));
  s.background.push_back(rect({a.x, a.y}, {a.x + t, b.y}));
  s.background.push_back(rect({b.x - t, a.y}, {b.x, b.y}));
}

// Wall along one axis with door gaps cut out. vertical: the wall is the
// segment x = c, y in [lo, hi]; gaps are sorted center positions.
void wall_with_doors(std::vector<Polygon>& bg, bool vertical, double c, double lo, double hi,
                     double half_t, std::vector<double> gaps, double gap_w) {
  std::sort(gaps.begin(), gaps.end());
  double cur = lo;
  auto piece = [&](double a, double b) {
    if (b - a < 1e-9) return;
    if (vertical)
      bg.push_back(rect({c - half_t, a}, {c + half_t, b}));
    else
      bg.push_back(rect({a, c - half_t}, {b, c + half_t}));
  };
  for (double g : gaps) {
    piece(cur, g - gap_w / 2);
    cur = g + gap_w / 2;
  }
  piece(cur, hi);
}

struct Doorway {
  bool vertical_wall = true;  // wall orientation; the box is long along the wall
  Point2 center;
};

// Pushable box sealing a doorway, 0.25 m side gaps for a 3 m door.
MovableObjectTruth doorway_box(int id, const Doorway& d, double mass) {
  MovableObjectTruth m;
  m.id = id;
  m.mass = mass;
  if (d.vertical_wall)
    m.shape = Polygon({{-0.45, -1.25}, {0.45, -1.25}, {0.45, 1.25}, {-0.45, 1.25}},
                      PolyClass::Movable, id);
  else
    m.shape = Polygon({{-1.25, -0.45}, {1.25, -0.45}, {1.25, 0.45}, {-1.25, 0.45}},
                      PolyClass::Movable, id);
  m.pose = {d.center.x, d.center.y, 0};
  return m;
}

bool point_clear(const Scenario& s, const Point2& p, double clearance) {
  for (const auto& bg : s.background)
    if (bg.contains(p) || bg.distance_to_boundary(p) < clearance) return false;
  for (const auto& m : s.movables) {
    Polygon w = m.world_polygon();
    if (w.contains(p) || w.distance_to_boundary(p) < clearance) return false;
  }
  return true;
}

// Dense A* length over the scenario raster; movables included on demand.
std::optional<double> grid_length(const Scenario& s, const Point2& a, const Point2& b, double res,
                                  bool with_movables) {
  LocalGrid g = rasterize_scenario(s, res);
  IntGrid occ(g.bg.origin, g.bg.res, g.bg.nx, g.bg.ny, 0);
  for (size_t i = 0; i < occ.v.size(); ++i)
    occ.v[i] = (g.bg.v[i] != 0 || (with_movables && g.mov.v[i] != 0)) ? 1 : 0;
  return grid_astar(occ, [](int32_t v) { return v != 0; }, occ.world_to_cell(a),
                    occ.world_to_cell(b));
}

Scenario make_room(uint64_t seed, bool with_objects) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 1);
  Scenario s;
  s.seed = seed;
  s.name = std::string(with_objects ? "room_with_objects" : "room") + "-" + std::to_string(seed);
  s.bounds_min = {-16, -16};
  s.bounds_max = {16, 16};
  outer_walls(s, 0.5);

  std::uniform_real_distribution<double> part(-5.0, 5.0);
  double xv = part(rng), yh = part(rng);

  auto pick_doors = [&](double avoid) {
    std::uniform_real_distribution<double> pos(-11.5, 11.5);
    std::vector<double> out;
    int guard = 0;
    while (out.size() < 3 && ++guard < 4000) {
      double c = pos(rng);
      if (std::abs(c - avoid) < 3.5) continue;
      bool ok = true;
      for (double o : out)
        if (std::abs(c - o) < 4.0) ok = false;
      if (ok) out.push_back(c);
    }
    return out;
  };
  std::vector<double> vdoors = pick_doors(yh);
  std::vector<double> hdoors = pick_doors(xv);
  wall_with_doors(s.background, true, xv, -15.5, 15.5, 0.25, vdoors, 3.0);
  wall_with_doors(s.background, false, yh, -15.5, 15.5, 0.25, hdoors, 3.0);

  if (with_objects) {
    // every door of the vertical wall is sealed, so crossing it takes a push;
    // 0-3 further boxes land on the horizontal wall's doors
    std::vector<Doorway> doors;
    for (double y : vdoors) doors.push_back({true, {xv, y}});
    std::vector<Doorway> extra;
    for (double x : hdoors) extra.push_back({false, {x, yh}});
    std::shuffle(extra.begin(), extra.end(), rng);
    std::uniform_int_distribution<int> kd(0, 3);
    std::uniform_real_distribution<double> massd(1.0, 3.0);
    int k = kd(rng);
    doors.insert(doors.end(), extra.begin(), extra.begin() + k);
    for (size_t i = 0; i < doors.size(); ++i)
      s.movables.push_back(doorway_box(static_cast<int>(i), doors[i], massd(rng)));
  }

  LocalGrid g = rasterize_scenario(s, 0.15);
  IntGrid occ_free(g.bg.origin, g.bg.res, g.bg.nx, g.bg.ny, 0);
  for (size_t i = 0; i < occ_free.v.size(); ++i) occ_free.v[i] = g.bg.v[i] != 0 ? 1 : 0;
  auto blocked = [](int32_t v) { return v != 0; };

  std::uniform_real_distribution<double> coord(-14.0, 14.0);
  int guard = 0;
  while (s.tasks.size() < 10 && ++guard < 20000) {
    Point2 a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)};
    if ((a - b).norm() < 16.0) continue;
    if (with_objects && (std::min(a.x, b.x) > xv - 2.0 || std::max(a.x, b.x) < xv + 2.0))
      continue;  // must cross the sealed wall
    if (!point_clear(s, a, 1.0) || !point_clear(s, b, 1.0)) continue;
    if (!grid_astar(occ_free, blocked, occ_free.world_to_cell(a), occ_free.world_to_cell(b)))
      continue;
    s.tasks.push_back({a, b});
  }
  if (s.tasks.size() < 10) throw std::runtime_error("room generation: task sampling failed");
  return s;
}

Scenario make_office(uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 2);
  Scenario s;
  s.seed = seed;
  s.name = "office-" + std::to_string(seed);
  s.bounds_min = {-50, -40};
  s.bounds_max = {50, 40};
  outer_walls(s, 0.5);

  const double cw = 12.5, rh = 20.0;
  std::vector<double> cols, rows;
  for (int i = 1; i < 8; ++i) cols.push_back(-50 + cw * i);
  for (int j = 1; j < 4; ++j) rows.push_back(-40 + rh * j);

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // one door per wall segment between crossings
  std::vector<std::vector<double>> vdoor(7);  // [col][segment] door center y
  for (int i = 0; i < 7; ++i) {
    std::vector<double> gaps;
    for (int j = 0; j < 4; ++j) {
      double lo = -40 + rh * j;
      double c = lo + 3.0 + u01(rng) * (rh - 6.0);
      gaps.push_back(c);
      vdoor[i].push_back(c);
    }
    wall_with_doors(s.background, true, cols[i], -39.5, 39.5, 0.25, gaps, 3.0);
  }
  for (int j = 0; j < 3; ++j) {
    std::vector<double> gaps;
    for (int i = 0; i < 8; ++i) {
      double lo = -50 + cw * i;
      gaps.push_back(lo + 2.5 + u01(rng) * (cw - 5.0));
    }
    wall_with_doors(s.background, false, rows[j], -49.5, 49.5, 0.25, gaps, 3.0);
  }

  // central columns sealed except one door each, alternating top/bottom so a
  // detour has to zigzag; the boxes are pushable
  std::uniform_real_distribution<double> massd(1.0, 3.0);
  int id = 0;
  for (int k = 0; k < 3; ++k) {
    int col = 2 + k;  // columns at x = -12.5, 0, 12.5
    int open_seg = (k % 2 == 0) ? 3 : 0;
    for (int j = 0; j < 4; ++j) {
      if (j == open_seg) continue;
      Doorway d{true, {cols[col], vdoor[col][j]}};
      s.movables.push_back(doorway_box(id++, d, massd(rng)));
    }
  }

  std::uniform_real_distribution<double> sy(-36.0, 36.0);
  std::uniform_real_distribution<double> sx(40.0, 46.0);
  int guard = 0;
  while (s.tasks.size() < 5 && ++guard < 20000) {
    Point2 a{-sx(rng), sy(rng)}, b{sx(rng), sy(rng)};
    if ((a - b).norm() < 80.0) continue;
    if (!point_clear(s, a, 1.2) || !point_clear(s, b, 1.2)) continue;
    s.tasks.push_back({a, b});
  }
  if (s.tasks.size() < 5) throw std::runtime_error("office generation: task sampling failed");
  return s;
}

Scenario make_tunnel(uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 3);
  Scenario s;
  s.seed = seed;
  s.name = "tunnel-" + std::to_string(seed);
  s.bounds_min = {-165, -135};
  s.bounds_max = {165, 135};
  outer_walls(s, 1.0);

  const int NX = 22, NY = 18;
  const double cell = 15.0;
  auto cx = [&](int i) { return -165.0 + cell * (i + 0.5); };
  auto cy = [&](int j) { return -135.0 + cell * (j + 0.5); };

  // depth-first spanning-tree maze; uncarved lattice edges become walls
  std::vector<bool> visited(NX * NY, false);
  std::vector<bool> open_r(NX * NY, false);  // passage to (i+1, j)
  std::vector<bool> open_u(NX * NY, false);  // passage to (i, j+1)
  auto idx = [&](int i, int j) { return j * NX + i; };
  std::vector<std::pair<int, int>> stack{{0, 0}};
  visited[0] = true;
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    int dirs[4] = {0, 1, 2, 3};
    std::shuffle(dirs, dirs + 4, rng);
    bool moved = false;
    for (int d : dirs) {
      int ni = i + (d == 0) - (d == 1), nj = j + (d == 2) - (d == 3);
      if (ni < 0 || ni >= NX || nj < 0 || nj >= NY || visited[idx(ni, nj)]) continue;
      if (d == 0) open_r[idx(i, j)] = true;
      if (d == 1) open_r[idx(ni, nj)] = true;
      if (d == 2) open_u[idx(i, j)] = true;
      if (d == 3) open_u[idx(ni, nj)] = true;
      visited[idx(ni, nj)] = true;
      stack.push_back({ni, nj});
      moved = true;
      break;
    }
    if (!moved) stack.pop_back();
  }
  // extra loops so the network is not a pure tree
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int j = 0; j < NY; ++j)
    for (int i = 0; i < NX; ++i) {
      if (i + 1 < NX && !open_r[idx(i, j)] && u01(rng) < 0.12) open_r[idx(i, j)] = true;
      if (j + 1 < NY && !open_u[idx(i, j)] && u01(rng) < 0.12) open_u[idx(i, j)] = true;
    }
  for (int j = 0; j < NY; ++j)
    for (int i = 0; i < NX; ++i) {
      if (i + 1 < NX && !open_r[idx(i, j)]) {
        double x = -165.0 + cell * (i + 1);
        s.background.push_back(rect({x - 0.5, -135.0 + cell * j}, {x + 0.5, -135.0 + cell * (j + 1)}));
      }
      if (j + 1 < NY && !open_u[idx(i, j)]) {
        double y = -135.0 + cell * (j + 1);
        s.background.push_back(rect({-165.0 + cell * i, y - 0.5}, {-165.0 + cell * (i + 1), y + 0.5}));
      }
    }

  // pillars give the extracted map its vertex density
  std::uniform_real_distribution<double> side(1.6, 3.4), ang(0.0, M_PI / 2), jit(-3.5, 3.5);
  for (int j = 0; j < NY; ++j)
    for (int i = 0; i < NX; ++i) {
      if (u01(rng) > 0.8) continue;
      double h = side(rng) / 2, th = ang(rng);
      Point2 c{cx(i) + jit(rng), cy(j) + jit(rng)};
      double ca = std::cos(th), sa = std::sin(th);
      auto corner = [&](double u, double v) {
        return Point2{c.x + u * ca - v * sa, c.y + u * sa + v * ca};
      };
      s.background.push_back(
          Polygon({corner(-h, -h), corner(h, -h), corner(h, h), corner(-h, h)}));
    }

  std::uniform_int_distribution<int> ci(0, NX - 1), cj(0, NY - 1);
  std::uniform_real_distribution<double> off(-4.5, 4.5);
  int guard = 0;
  while (s.tasks.size() < 10 && ++guard < 20000) {
    Point2 a{cx(ci(rng)) + off(rng), cy(cj(rng)) + off(rng)};
    Point2 b{cx(ci(rng)) + off(rng), cy(cj(rng)) + off(rng)};
    if ((a - b).norm() < 100.0) continue;
    if (!point_clear(s, a, 1.2) || !point_clear(s, b, 1.2)) continue;
    s.tasks.push_back({a, b});
  }
  if (s.tasks.size() < 10) throw std::runtime_error("tunnel generation: task sampling failed");
  return s;
}

}  // namespace

Scenario generate_scenario(ScenarioClass cls, uint64_t seed) {
  Scenario s;
  switch (cls) {
    case ScenarioClass::Room: s = make_room(seed, false); break;
    case ScenarioClass::RoomWithObjects: s = make_room(seed, true); break;
    case ScenarioClass::Office: s = make_office(seed); break;
    case ScenarioClass::Tunnel: s = make_tunnel(seed); break;
  }
  for (size_t i = 0; i < s.background.size(); ++i) {
    s.background[i].cls = PolyClass::Background;
    s.background[i].id = static_cast<int>(i);
    s.background[i].ensure_ccw();
  }
  if (!s.tasks.empty()) s.robot.pose = {s.tasks[0].start.x, s.tasks[0].start.y, 0};
  s.validate();
  return s;
}

// --- ground truth raster, graph, oracle ----------------------------------------

LocalGrid rasterize_scenario(const Scenario& s, double res, double inflate_radius) {
  double margin = 2 * res;
  Point2 origin{s.bounds_min.x - margin, s.bounds_min.y - margin};
  int nx = static_cast<int>(std::ceil((s.bounds_max.x - s.bounds_min.x + 2 * margin) / res));
  int ny = static_cast<int>(std::ceil((s.bounds_max.y - s.bounds_min.y + 2 * margin) / res));
  LocalGrid g;
  g.bg = IntGrid(origin, res, nx, ny, 0);
  g.mov = IntGrid(origin, res, nx, ny, 0);
  g.center = {(s.bounds_min.x + s.bounds_max.x) / 2, (s.bounds_min.y + s.bounds_max.y) / 2};
  for (const auto& p : s.background) rasterize_polygon(g.bg, p, 1);
  for (const auto& m : s.movables) rasterize_polygon(g.mov, m.world_polygon(), m.id + 1);
  if (inflate_radius > 0) {
    int r_cells = static_cast<int>(std::ceil(inflate_radius / res));
    dilate_value(g.bg, 1, r_cells);
    std::set<int32_t> vals;
    for (int32_t v : g.mov.v)
      if (v != 0) vals.insert(v);
    for (int32_t v : vals) dilate_value(g.mov, v, r_cells);
  }
  return g;
}

DVGraph full_map_graph(const Scenario& s, const SystemConfig& cfg, double max_pair_distance,
                       PolygonSetLocal* polys_out) {
  LocalGrid g = rasterize_scenario(s, cfg.extraction.resolution, cfg.extraction.robot_radius);
  PolygonSetLocal polys = extract_contours(g, cfg.extraction);
  // Graph vertices come from the free-space boundary contours of the raster,
  // not from the polygon set: the hole decomposition splits large wall
  // structures into thousands of rectangles whose seam corners are useless as
  // route anchors. Free-component outer contours cover the wall boundary,
  // occupied-component contours cover islands (pillars, movables).
  IntGrid occ(g.bg.origin, g.bg.res, g.bg.nx, g.bg.ny, 0);
  for (size_t i = 0; i < occ.v.size(); ++i)
    occ.v[i] = (g.bg.v[i] != 0 || g.mov.v[i] != 0) ? 1 : 0;
  // only convex obstacle corners can anchor a shortest route; in a 5x5 window
  // around a contour cell, free coverage is ~19+ at a convex corner, ~15 along
  // a straight wall and ~9 at a concave one
  auto convex_corner = [&](const Point2& p) {
    Cell c = occ.world_to_cell(p);
    int free = 0;
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) {
        int x = c.x + dx, y = c.y + dy;
        if (!occ.in(x, y) || occ.at(x, y) == 0) ++free;
      }
    return free >= 17;
  };
  double tol = cfg.extraction.simplify_tol_factor * cfg.extraction.resolution;
  DVGraph graph;
  std::vector<int> ids;
  std::set<std::pair<int, int>> taken;
  auto add_rings = [&](const std::vector<std::vector<Cell>>& rings) {
    for (const auto& ring : rings) {
      std::vector<Point2> pts;
      pts.reserve(ring.size());
      for (const Cell& c : ring) pts.push_back(occ.cell_center(c));
      for (const Point2& p : simplify_ring(pts, tol)) {
        Cell c = occ.world_to_cell(p);
        if (!occ.in(c.x, c.y) || occ.at(c.x, c.y) != 0) continue;
        if (!convex_corner(p)) continue;
        if (!taken.insert({c.x, c.y}).second) continue;
        DVVertex v;
        v.position = p;
        v.kind = VertexKind::PolygonVertex;
        ids.push_back(graph.add_vertex(v));
      }
    }
  };
  // island contours (pillars, movables): trace the mask grown by one cell so
  // the ring lands in the free cells hugging the obstacle
  IntGrid grown = occ;
  dilate_value(grown, 1, 1);
  add_rings(trace_outer_contours(grown, [](int32_t v) { return v != 0; }));
  // corridor-facing wall boundaries are holes of the wall component, so they
  // come from the free components' own outer contours instead
  IntGrid freelab;
  int nfree = label_components(occ, [](int32_t v) { return v == 0; }, freelab, false);
  for (int lab = 1; lab <= nfree; ++lab)
    add_rings(trace_outer_contours(freelab, [lab](int32_t v) { return v == lab; }));
  EdgeIndex index(polys.all());
  for (size_t i = 0; i < ids.size(); ++i) {
    const Point2& a = graph.vertex(ids[i]).position;
    for (size_t j = i + 1; j < ids.size(); ++j) {
      const Point2& b = graph.vertex(ids[j]).position;
      double d = (a - b).norm();
      if (d < kEps || d > max_pair_distance) continue;
      if (index.visible(a, b)) graph.add_vis_edge(ids[i], ids[j]);
    }
  }
  if (polys_out) *polys_out = std::move(polys);
  return graph;
}

std::optional<double> shortest_length_oracle(const Scenario& s, const Point2& start,
                                             const Point2& goal, double res) {
  return grid_length(s, start, goal, res, false);
}

// --- metrics --------------------------------------------------------------------

double spl_term(bool success, double shortest, double achieved) {
  if (!success) return 0.0;
  if (shortest <= 0.0) return 1.0;
  return shortest / std::max(achieved, shortest);
}

double Metrics::spl() const {
  if (per_task.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : per_task) sum += spl_term(t.success, t.shortest_length, t.path_length);
  return sum / per_task.size();
}

double Metrics::total_distance() const {
  double sum = 0.0;
  for (const auto& t : per_task) sum += t.path_length;
  return sum;
}

double Metrics::median_search_ms() const {
  if (per_task.empty()) return 0.0;
  std::vector<double> v;
  for (const auto& t : per_task) v.push_back(t.search_ms);
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::string Metrics::table() const {
  std::ostringstream os;
  char row[160];
  snprintf(row, sizeof(row), "%s / %s\n", scenario_name.c_str(), planner.c_str());
  os << row;
  os << "task  ok  length[m]  shortest[m]  time[s]  search[ms]\n";
  for (size_t i = 0; i < per_task.size(); ++i) {
    const auto& t = per_task[i];
    snprintf(row, sizeof(row), "%4zu  %2s  %9.2f  %11.2f  %7.1f  %10.3f\n", i,
             t.success ? "y" : "n", t.path_length, t.shortest_length, t.travel_time, t.search_ms);
    os << row;
  }
  snprintf(row, sizeof(row), "SPL %.4f  total distance %.2f m  median search %.3f ms\n", spl(),
           total_distance(), median_search_ms());
  os << row;
  return os.str();
}

std::string Metrics::to_json() const {
  json j;
  j["scenario"] = scenario_name;
  j["planner"] = planner;
  j["spl"] = spl();
  j["total_distance"] = total_distance();
  j["median_search_ms"] = median_search_ms();
  j["tasks"] = json::array();
  for (const auto& t : per_task)
    j["tasks"].push_back({{"success", t.success},
                          {"path_length", t.path_length},
                          {"shortest_length", t.shortest_length},
                          {"travel_time", t.travel_time},
                          {"search_ms", t.search_ms}});
  return j.dump(2) + "\n";
}

// --- benchmark -------------------------------------------------------------------

namespace {

double median_time_ms(int reps, const std::function<void()>& fn) {
  std::vector<double> ms;
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  return ms[ms.size() / 2];
}

}  // namespace

Metrics run_benchmark(const Scenario& s, PlannerKind kind, const BenchmarkOptions& opt) {
  Metrics m;
  m.scenario_name = s.name;
  m.planner = planner_name(kind);
  size_t n = s.tasks.size();
  if (opt.max_tasks >= 0) n = std::min(n, static_cast<size_t>(opt.max_tasks));

  std::vector<double> shortest(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    auto l = shortest_length_oracle(s, s.tasks[i].start, s.tasks[i].goal, opt.grid_res);
    shortest[i] = l.value_or(0.0);
  }

  if (kind == PlannerKind::GridAstar) {
    LocalGrid g = rasterize_scenario(s, opt.grid_res, s.robot.radius);
    IntGrid occ(g.bg.origin, g.bg.res, g.bg.nx, g.bg.ny, 0);
    for (size_t i = 0; i < occ.v.size(); ++i)
      occ.v[i] = (g.bg.v[i] != 0 || g.mov.v[i] != 0) ? 1 : 0;
    auto blocked = [](int32_t v) { return v != 0; };
    for (size_t i = 0; i < n; ++i) {
      TaskMetrics tm;
      tm.shortest_length = shortest[i];
      std::optional<double> len;
      tm.search_ms = median_time_ms(3, [&] {
        len = grid_astar(occ, blocked, occ.world_to_cell(s.tasks[i].start),
                         occ.world_to_cell(s.tasks[i].goal));
      });
      tm.success = len.has_value();
      tm.path_length = len.value_or(0.0);
      tm.travel_time = tm.path_length / s.robot.max_speed;
      m.per_task.push_back(tm);
    }
    return m;
  }

  RunConfig rc = opt.run;
  if (kind == PlannerKind::FarLike) rc.system.max_gamma_per_cycle = 0;

  PolygonSetLocal polys;
  DVGraph graph = full_map_graph(s, rc.system, 40.0, &polys);
  EdgeIndex index(polys.all());

  for (size_t i = 0; i < n; ++i) {
    World world(s);
    RunResult r = run_mission(world, s.tasks[i], rc);
    TaskMetrics tm;
    tm.success = r.success;
    tm.path_length = r.distance;
    tm.shortest_length = shortest[i];
    tm.travel_time = r.sim_time;
    tm.search_ms = median_time_ms(
        5, [&] { plan(graph, s.tasks[i].start, s.tasks[i].goal, index); });
    m.per_task.push_back(tm);
    if (opt.traces) opt.traces->push_back(std::move(r));
  }
  return m;
}

// --- plots -----------------------------------------------------------------------

namespace {

void svg_poly(std::ostringstream& os, const Polygon& p, const char* fill) {
  os << "<polygon points=\"";
  char buf[48];
  for (const auto& v : p.vertices) {
    snprintf(buf, sizeof(buf), "%.2f,%.2f ", v.x, -v.y);
    os << buf;
  }
  os << "\" fill=\"" << fill << "\"/>\n";
}

std::string time_color(double f) {
  // blue -> orange ramp
  int r = static_cast<int>(std::lround(31 + f * (255 - 31)));
  int g = static_cast<int>(std::lround(119 + f * (127 - 119)));
  int b = static_cast<int>(std::lround(180 + f * (14 - 180)));
  char buf[8];
  snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string render_svg(const Scenario& s, const RunResult* trace, const DVGraph* graph,
                       const Task* task) {
  std::ostringstream os;
  double mg = 1.0;
  double x0 = s.bounds_min.x - mg, y0 = -s.bounds_max.y - mg;
  double w = s.bounds_max.x - s.bounds_min.x + 2 * mg;
  double h = s.bounds_max.y - s.bounds_min.y + 2 * mg;
  char buf[256];
  snprintf(buf, sizeof(buf),
           "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.2f %.2f %.2f %.2f\">\n", x0, y0,
           w, h);
  os << buf;
  snprintf(buf, sizeof(buf), "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                             "fill=\"#fdfdfd\"/>\n", x0, y0, w, h);
  os << buf;

  for (const auto& p : s.background) svg_poly(os, p, "#b03a2e");
  for (const auto& m : s.movables) svg_poly(os, m.world_polygon(), "#1e8449");

  if (graph) {
    for (const auto& e : graph->vis_edges) {
      const Point2& a = graph->vertex(e.a).position;
      const Point2& b = graph->vertex(e.b).position;
      snprintf(buf, sizeof(buf),
               "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#aab\" "
               "stroke-width=\"0.04\"/>\n", a.x, -a.y, b.x, -b.y);
      os << buf;
    }
    for (const auto& e : graph->interaction_edges) {
      const Point2& a = graph->vertex(e.from).position;
      const Point2& b = graph->vertex(e.to).position;
      snprintf(buf, sizeof(buf),
               "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#2471a3\" "
               "stroke-width=\"0.15\" stroke-dasharray=\"0.5 0.25\"/>\n", a.x, -a.y, b.x, -b.y);
      os << buf;
    }
  }

  if (trace && trace->trajectory.size() >= 2) {
    const auto& tr = trace->trajectory;
    const int buckets = 24;
    for (int k = 0; k < buckets; ++k) {
      size_t lo = tr.size() * k / buckets;
      size_t hi = std::min(tr.size() - 1, tr.size() * (k + 1) / buckets);
      if (hi <= lo) continue;
      os << "<polyline fill=\"none\" stroke=\"" << time_color(double(k) / (buckets - 1))
         << "\" stroke-width=\"0.25\" points=\"";
      for (size_t i = lo; i <= hi; ++i) {
        snprintf(buf, sizeof(buf), "%.2f,%.2f ", tr[i].x, -tr[i].y);
        os << buf;
      }
      os << "\"/>\n";
    }
  }

  if (task) {
    snprintf(buf, sizeof(buf),
             "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"0.45\" fill=\"#2e86c1\"/>\n", task->start.x,
             -task->start.y);
    os << buf;
    snprintf(buf, sizeof(buf),
             "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"0.45\" fill=\"none\" stroke=\"#c0392b\" "
             "stroke-width=\"0.2\"/>\n", task->goal.x, -task->goal.y);
    os << buf;
  }
  os << "</svg>\n";
  return os.str();
}

void emit_plots(const Scenario& s, const std::vector<RunResult>& traces,
                const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (size_t i = 0; i < traces.size(); ++i) {
    const Task* task = i < s.tasks.size() ? &s.tasks[i] : nullptr;
    std::string svg = render_svg(s, &traces[i], nullptr, task);
    std::ofstream out(out_dir + "/" + s.name + "_task" + std::to_string(i) + ".svg");
    out << svg;
  }
}

}  // namespace inav
