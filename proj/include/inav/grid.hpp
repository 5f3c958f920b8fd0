#pragma once
// Raster utilities shared by extraction, connectivity analysis and the
// dense-grid baseline planner.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "inav/geometry.hpp"

namespace inav {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell& o) const { return x == o.x && y == o.y; }
};

// Row-major int32 raster anchored at a world-frame origin (lower-left corner).
struct IntGrid {
  Point2 origin;
  double res = 0.15;
  int nx = 0, ny = 0;
  std::vector<int32_t> v;

  IntGrid() = default;
  IntGrid(Point2 o, double r, int nx_, int ny_, int32_t fill = 0)
      : origin(o), res(r), nx(nx_), ny(ny_), v(static_cast<size_t>(nx_) * ny_, fill) {}

  bool in(int x, int y) const { return x >= 0 && x < nx && y >= 0 && y < ny; }
  int32_t& at(int x, int y) { return v[static_cast<size_t>(y) * nx + x]; }
  int32_t at(int x, int y) const { return v[static_cast<size_t>(y) * nx + x]; }
  int32_t get(int x, int y, int32_t outside) const { return in(x, y) ? at(x, y) : outside; }

  Cell world_to_cell(const Point2& p) const {
    return {static_cast<int>(std::floor((p.x - origin.x) / res)),
            static_cast<int>(std::floor((p.y - origin.y) / res))};
  }
  Point2 cell_center(const Cell& c) const {
    return {origin.x + (c.x + 0.5) * res, origin.y + (c.y + 0.5) * res};
  }
};

// Offsets of a filled disk of the given cell radius.
std::vector<Cell> disk_offsets(int r_cells);

// Dilate all cells whose value matches `value` by a disk; empty target cells only.
void dilate_value(IntGrid& g, int32_t value, int r_cells);

// Label 8-connected components of cells satisfying pred; labels start at 1.
// Returns the number of components.
int label_components(const IntGrid& g, const std::function<bool(int32_t)>& pred, IntGrid& labels,
                     bool eight_connected = true);

// Moore-neighbor border following: outer contour (CCW, cell coordinates) of each
// 8-connected component of cells satisfying pred.
std::vector<std::vector<Cell>> trace_outer_contours(const IntGrid& g,
                                                    const std::function<bool(int32_t)>& pred);

// Douglas-Peucker simplification of a closed ring.
std::vector<Point2> simplify_ring(const std::vector<Point2>& ring, double tol);

// Rasterize a polygon interior (cells whose center is inside) with `value`.
void rasterize_polygon(IntGrid& g, const Polygon& poly, int32_t value);

// 8-connected A* over free cells (pred true = blocked). Returns path length in
// meters, or nullopt when unreachable.
std::optional<double> grid_astar(const IntGrid& g, const std::function<bool(int32_t)>& blocked,
                                 Cell start, Cell goal, std::vector<Cell>* path = nullptr);

}  // namespace inav
