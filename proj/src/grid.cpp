#include "inav/grid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace inav {

std::vector<Cell> disk_offsets(int r_cells) {
  std::vector<Cell> out;
  for (int dy = -r_cells; dy <= r_cells; ++dy)
    for (int dx = -r_cells; dx <= r_cells; ++dx)
      if (dx * dx + dy * dy <= r_cells * r_cells) out.push_back({dx, dy});
  return out;
}

void dilate_value(IntGrid& g, int32_t value, int r_cells) {
  if (r_cells <= 0) return;
  std::vector<Cell> seeds;
  for (int y = 0; y < g.ny; ++y)
    for (int x = 0; x < g.nx; ++x)
      if (g.at(x, y) == value) seeds.push_back({x, y});
  auto disk = disk_offsets(r_cells);
  for (const auto& s : seeds)
    for (const auto& d : disk) {
      int x = s.x + d.x, y = s.y + d.y;
      if (g.in(x, y) && g.at(x, y) == 0) g.at(x, y) = value;
    }
}

int label_components(const IntGrid& g, const std::function<bool(int32_t)>& pred, IntGrid& labels,
                     bool eight_connected) {
  labels = IntGrid(g.origin, g.res, g.nx, g.ny, 0);
  int next = 0;
  std::vector<Cell> stack;
  const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
  int ndirs = eight_connected ? 8 : 4;
  for (int y = 0; y < g.ny; ++y)
    for (int x = 0; x < g.nx; ++x) {
      if (!pred(g.at(x, y)) || labels.at(x, y) != 0) continue;
      ++next;
      stack.push_back({x, y});
      labels.at(x, y) = next;
      while (!stack.empty()) {
        Cell c = stack.back();
        stack.pop_back();
        for (int k = 0; k < ndirs; ++k) {
          int nx = c.x + dx8[k], ny = c.y + dy8[k];
          if (!g.in(nx, ny) || labels.at(nx, ny) != 0 || !pred(g.at(nx, ny))) continue;
          labels.at(nx, ny) = next;
          stack.push_back({nx, ny});
        }
      }
    }
  return next;
}

std::vector<std::vector<Cell>> trace_outer_contours(const IntGrid& g,
                                                    const std::function<bool(int32_t)>& pred) {
  IntGrid labels;
  int ncomp = label_components(g, pred, labels, true);
  std::vector<std::vector<Cell>> contours(ncomp);
  std::vector<bool> done(ncomp + 1, false);

  auto fg = [&](int x, int y) { return g.in(x, y) && pred(g.at(x, y)); };
  // Moore neighborhood in clockwise order starting East
  const int mx[] = {1, 1, 0, -1, -1, -1, 0, 1};
  const int my[] = {0, -1, -1, -1, 0, 1, 1, 1};

  for (int y = 0; y < g.ny; ++y)
    for (int x = 0; x < g.nx; ++x) {
      if (!fg(x, y)) continue;
      int lab = labels.at(x, y);
      if (done[lab]) continue;
      done[lab] = true;

      std::vector<Cell>& contour = contours[lab - 1];
      Cell start{x, y};
      contour.push_back(start);
      // backtrack: the background cell we examined before entering start;
      // scan order guarantees (x-1, y) is background or off-grid
      Cell cur = start;
      int back_dir = 4;  // pointing West
      size_t guard = static_cast<size_t>(g.nx) * g.ny * 4 + 16;
      Cell second{-1, -1};
      bool have_second = false;
      while (guard-- > 0) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
          int dir = (back_dir + k) % 8;
          if (fg(cur.x + mx[dir], cur.y + my[dir])) {
            found = dir;
            break;
          }
        }
        if (found < 0) break;  // isolated cell
        Cell next{cur.x + mx[found], cur.y + my[found]};
        if (!have_second) {
          second = next;
          have_second = true;
        } else if (cur == start && next == second && contour.size() > 2) {
          break;  // closed the loop
        }
        contour.push_back(next);
        // new backtrack direction: from next towards the cell before `found`
        int prev_dir = (found + 7) % 8;
        Cell back{cur.x + mx[prev_dir], cur.y + my[prev_dir]};
        // direction index from next to back
        int bdx = back.x - next.x, bdy = back.y - next.y;
        back_dir = 0;
        for (int k = 0; k < 8; ++k)
          if (mx[k] == bdx && my[k] == bdy) back_dir = k;
        cur = next;
      }
      if (!contour.empty() && contour.back() == start) contour.pop_back();
    }
  return contours;
}

static void dp_recurse(const std::vector<Point2>& pts, size_t i, size_t j, double tol,
                       std::vector<bool>& keep) {
  if (j <= i + 1) return;
  double maxd = -1;
  size_t maxk = i;
  for (size_t k = i + 1; k < j; ++k) {
    double d = dist_point_segment(pts[k], pts[i], pts[j]);
    if (d > maxd) {
      maxd = d;
      maxk = k;
    }
  }
  if (maxd > tol) {
    keep[maxk] = true;
    dp_recurse(pts, i, maxk, tol, keep);
    dp_recurse(pts, maxk, j, tol, keep);
  }
}

std::vector<Point2> simplify_ring(const std::vector<Point2>& ring, double tol) {
  size_t n = ring.size();
  if (n < 4) return ring;
  // split the ring at vertex 0 and its farthest vertex
  size_t far = 1;
  double maxd = 0;
  for (size_t i = 1; i < n; ++i) {
    double d = (ring[i] - ring[0]).norm2();
    if (d > maxd) {
      maxd = d;
      far = i;
    }
  }
  std::vector<bool> keep(n, false);
  keep[0] = keep[far] = true;
  dp_recurse(ring, 0, far, tol, keep);
  // second chain wraps around; unroll it
  std::vector<Point2> chain;
  std::vector<size_t> idx;
  for (size_t i = far; i <= n; ++i) {
    chain.push_back(ring[i % n]);
    idx.push_back(i % n);
  }
  std::vector<bool> keep2(chain.size(), false);
  keep2.front() = keep2.back() = true;
  dp_recurse(chain, 0, chain.size() - 1, tol, keep2);
  for (size_t i = 0; i < chain.size(); ++i)
    if (keep2[i]) keep[idx[i]] = true;

  std::vector<Point2> out;
  for (size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(ring[i]);
  return out;
}

void rasterize_polygon(IntGrid& g, const Polygon& poly, int32_t value) {
  double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
  for (const auto& v : poly.vertices) {
    minx = std::min(minx, v.x);
    maxx = std::max(maxx, v.x);
    miny = std::min(miny, v.y);
    maxy = std::max(maxy, v.y);
  }
  Cell lo = g.world_to_cell({minx, miny});
  Cell hi = g.world_to_cell({maxx, maxy});
  for (int y = std::max(0, lo.y); y <= std::min(g.ny - 1, hi.y); ++y)
    for (int x = std::max(0, lo.x); x <= std::min(g.nx - 1, hi.x); ++x)
      if (poly.contains(g.cell_center({x, y}))) g.at(x, y) = value;
}

std::optional<double> grid_astar(const IntGrid& g, const std::function<bool(int32_t)>& blocked,
                                 Cell start, Cell goal, std::vector<Cell>* path) {
  if (!g.in(start.x, start.y) || !g.in(goal.x, goal.y)) return std::nullopt;
  if (blocked(g.at(start.x, start.y)) || blocked(g.at(goal.x, goal.y))) return std::nullopt;
  const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
  const double step[] = {1, 1, 1, 1, M_SQRT2, M_SQRT2, M_SQRT2, M_SQRT2};
  size_t N = static_cast<size_t>(g.nx) * g.ny;
  std::vector<double> dist(N, std::numeric_limits<double>::infinity());
  std::vector<int32_t> parent(N, -1);
  auto id = [&](const Cell& c) { return static_cast<size_t>(c.y) * g.nx + c.x; };
  auto heur = [&](const Cell& c) {
    double dx = std::abs(c.x - goal.x), dy = std::abs(c.y - goal.y);
    return (std::max(dx, dy) - std::min(dx, dy)) + M_SQRT2 * std::min(dx, dy);
  };
  using QE = std::pair<double, size_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;
  dist[id(start)] = 0;
  open.push({heur(start), id(start)});
  while (!open.empty()) {
    auto [f, ci] = open.top();
    open.pop();
    Cell c{static_cast<int>(ci % g.nx), static_cast<int>(ci / g.nx)};
    if (f > dist[ci] + heur(c) + 1e-12) continue;
    if (c == goal) {
      if (path) {
        path->clear();
        for (int64_t i = static_cast<int64_t>(ci); i >= 0; i = parent[i])
          path->push_back({static_cast<int>(i % g.nx), static_cast<int>(i / g.nx)});
        std::reverse(path->begin(), path->end());
      }
      return dist[ci] * g.res;
    }
    for (int k = 0; k < 8; ++k) {
      Cell n{c.x + dx8[k], c.y + dy8[k]};
      if (!g.in(n.x, n.y) || blocked(g.at(n.x, n.y))) continue;
      size_t ni = id(n);
      double nd = dist[ci] + step[k];
      if (nd < dist[ni] - 1e-12) {
        dist[ni] = nd;
        parent[ni] = static_cast<int32_t>(ci);
        open.push({nd + heur(n), ni});
      }
    }
  }
  return std::nullopt;
}

}  // namespace inav
