#include "inav/extraction.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace inav {

LocalGrid rasterize_and_inflate(const ScanFrame& scan, const ExtractionConfig& cfg) {
  int n = static_cast<int>(std::ceil(cfg.grid_size / cfg.resolution));
  Point2 center = scan.origin.position();
  Point2 origin{center.x - 0.5 * n * cfg.resolution, center.y - 0.5 * n * cfg.resolution};
  LocalGrid grid;
  grid.center = center;
  grid.bg = IntGrid(origin, cfg.resolution, n, n, 0);
  grid.mov = IntGrid(origin, cfg.resolution, n, n, 0);

  std::set<int> seen_ids;
  for (const auto& pt : scan.points) {
    Cell c = grid.bg.world_to_cell(pt.p);
    if (!grid.bg.in(c.x, c.y)) continue;
    if (pt.cls == PolyClass::Background) {
      grid.bg.at(c.x, c.y) = 1;
    } else {
      grid.mov.at(c.x, c.y) = pt.object_id + 1;
      seen_ids.insert(pt.object_id);
    }
  }

  int r_cells = static_cast<int>(std::ceil(cfg.robot_radius / cfg.resolution));
  dilate_value(grid.bg, 1, r_cells);
  for (int id : seen_ids) dilate_value(grid.mov, id + 1, r_cells);
  return grid;
}

// Occupied components that fully enclose free space (e.g. the walls of a
// closed room) cannot be represented by their outer contour alone: the
// enclosed free area would read as polygon interior. Such components are
// returned by label, to be decomposed into hole-free pieces instead.
static std::set<int32_t> enclosing_components(const IntGrid& g,
                                              const std::function<bool(int32_t)>& pred,
                                              const IntGrid& labels) {
  IntGrid free_labels;
  int nf = label_components(g, [&](int32_t v) { return !pred(v); }, free_labels, false);
  std::vector<bool> touches_border(nf + 1, false);
  for (int x = 0; x < g.nx; ++x) {
    if (free_labels.at(x, 0) > 0) touches_border[free_labels.at(x, 0)] = true;
    if (free_labels.at(x, g.ny - 1) > 0) touches_border[free_labels.at(x, g.ny - 1)] = true;
  }
  for (int y = 0; y < g.ny; ++y) {
    if (free_labels.at(0, y) > 0) touches_border[free_labels.at(0, y)] = true;
    if (free_labels.at(g.nx - 1, y) > 0) touches_border[free_labels.at(g.nx - 1, y)] = true;
  }
  std::set<int32_t> out;
  for (int y = 0; y < g.ny; ++y)
    for (int x = 0; x < g.nx; ++x) {
      int32_t fl = free_labels.at(x, y);
      if (fl <= 0 || touches_border[fl]) continue;
      const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        int nx = x + dx[k], ny = y + dy[k];
        if (labels.in(nx, ny) && labels.at(nx, ny) > 0) out.insert(labels.at(nx, ny));
      }
    }
  return out;
}

// Exact cover of one labeled component by axis-aligned rectangles (maximal
// identical row runs merged vertically). Rectangles are expanded slightly so
// adjacent pieces overlap and no free seam is left inside the region.
static std::vector<Polygon> rect_decompose(const IntGrid& labels, int32_t comp, double expand,
                                           PolyClass cls, int id) {
  std::vector<Polygon> out;
  auto emit = [&](int x0, int x1, int y0, int y1) {
    double lx = labels.origin.x + (x0 + 0.5) * labels.res - expand;
    double hx = labels.origin.x + (x1 + 0.5) * labels.res + expand;
    double ly = labels.origin.y + (y0 + 0.5) * labels.res - expand;
    double hy = labels.origin.y + (y1 + 0.5) * labels.res + expand;
    out.push_back(Polygon({{lx, ly}, {hx, ly}, {hx, hy}, {lx, hy}}, cls, id));
  };
  std::map<std::pair<int, int>, std::pair<int, int>> open;  // x-range -> (y0, y_last)
  for (int y = 0; y <= labels.ny; ++y) {
    std::set<std::pair<int, int>> row;
    if (y < labels.ny) {
      int x = 0;
      while (x < labels.nx) {
        if (labels.at(x, y) != comp) {
          ++x;
          continue;
        }
        int x0 = x;
        while (x < labels.nx && labels.at(x, y) == comp) ++x;
        row.insert({x0, x - 1});
      }
    }
    for (auto it = open.begin(); it != open.end();) {
      if (row.count(it->first)) {
        it->second.second = y;
        ++it;
      } else {
        emit(it->first.first, it->first.second, it->second.first, it->second.second);
        it = open.erase(it);
      }
    }
    for (const auto& r : row)
      if (!open.count(r)) open[r] = {y, y};
  }
  return out;
}

static std::vector<Polygon> contours_to_polygons(const IntGrid& g,
                                                 const std::function<bool(int32_t)>& pred,
                                                 const ExtractionConfig& cfg, PolyClass cls,
                                                 int id) {
  IntGrid labels;
  label_components(g, pred, labels, true);
  std::set<int32_t> enclosing = enclosing_components(g, pred, labels);

  std::vector<Polygon> out;
  for (int32_t comp : enclosing) {
    auto rects = rect_decompose(labels, comp, 0.6 * cfg.resolution, cls, id);
    out.insert(out.end(), rects.begin(), rects.end());
  }

  auto traceable = [&enclosing](int32_t v) { return v > 0 && !enclosing.count(v); };
  double min_area = cfg.min_area_cells * cfg.resolution * cfg.resolution;
  for (const auto& contour : trace_outer_contours(labels, traceable)) {
    if (contour.size() < 3) continue;
    std::vector<Point2> ring;
    ring.reserve(contour.size());
    for (const auto& c : contour) {
      Point2 p = g.cell_center(c);
      if (ring.empty() || (p - ring.back()).norm() > 1e-12) ring.push_back(p);
    }
    if (ring.size() >= 3 && (ring.front() - ring.back()).norm() < 1e-12) ring.pop_back();
    if (ring.size() < 3) continue;
    Polygon raw(ring, cls, id);
    raw.ensure_ccw();
    if (raw.area() < min_area) continue;
    // thin blobs can collapse at full tolerance; back off until the shape survives
    double tol = cfg.simplify_tol_factor * cfg.resolution;
    Polygon poly;
    for (;; tol *= 0.5) {
      std::vector<Point2> simplified = simplify_ring(ring, tol);
      poly = Polygon(std::move(simplified), cls, id);
      poly.ensure_ccw();
      if (poly.vertices.size() >= 3 && poly.area() >= 0.5 * raw.area()) break;
      if (tol < 0.25 * cfg.resolution) {
        poly = raw;
        break;
      }
    }
    out.push_back(std::move(poly));
  }
  return out;
}

PolygonSetLocal extract_contours(const LocalGrid& grid, const ExtractionConfig& cfg) {
  PolygonSetLocal out;
  out.background =
      contours_to_polygons(grid.bg, [](int32_t v) { return v != 0; }, cfg, PolyClass::Background,
                           -1);
  for (size_t i = 0; i < out.background.size(); ++i) out.background[i].id = static_cast<int>(i);

  std::set<int32_t> ids(grid.mov.v.begin(), grid.mov.v.end());
  ids.erase(0);
  for (int32_t stored : ids) {
    auto polys = contours_to_polygons(grid.mov, [stored](int32_t v) { return v == stored; }, cfg,
                                      PolyClass::Movable, stored - 1);
    // one object id, one polygon: keep the largest blob, drop fragments
    auto largest = std::max_element(polys.begin(), polys.end(),
                                    [](const Polygon& a, const Polygon& b) {
                                      return a.area() < b.area();
                                    });
    if (largest != polys.end()) out.movable.push_back(std::move(*largest));
  }
  return out;
}

static void dump_runs(std::ostringstream& os, const IntGrid& g) {
  for (int y = 0; y < g.ny; ++y) {
    bool any = false;
    for (int x = 0; x < g.nx; ++x)
      if (g.at(x, y) != 0) any = true;
    if (!any) continue;
    os << y << ":";
    int x = 0;
    while (x < g.nx) {
      if (g.at(x, y) == 0) {
        ++x;
        continue;
      }
      int32_t v = g.at(x, y);
      int x0 = x;
      while (x < g.nx && g.at(x, y) == v) ++x;
      os << " " << x0 << "-" << (x - 1) << "=" << v;
    }
    os << "\n";
  }
}

std::string dump_debug(const LocalGrid& grid, const PolygonSetLocal& polys) {
  std::ostringstream os;
  os.precision(6);
  os << "LOCALGRID v1 " << grid.bg.nx << " " << grid.bg.ny << " " << grid.bg.res << " "
     << grid.bg.origin.x << " " << grid.bg.origin.y << "\n";
  os << "[bg]\n";
  dump_runs(os, grid.bg);
  os << "[mov]\n";
  dump_runs(os, grid.mov);
  auto dump_poly = [&](const Polygon& p, const char* tag) {
    os << tag << " " << p.id << " " << p.vertices.size();
    for (const auto& v : p.vertices) os << " " << v.x << " " << v.y;
    os << "\n";
  };
  for (const auto& p : polys.background) dump_poly(p, "poly_bg");
  for (const auto& p : polys.movable) dump_poly(p, "poly_mov");
  return os.str();
}

}  // namespace inav
