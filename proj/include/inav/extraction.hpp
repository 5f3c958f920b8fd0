#pragma once
// Polygon extraction front-end: class-labeled scan -> robot-centered local grid
// -> inflated occupancy -> simplified polygons per class.

#include <string>
#include <vector>

#include "inav/grid.hpp"
#include "inav/world.hpp"

namespace inav {

struct ExtractionConfig {
  double grid_size = 60.0;    // m, robot-centered
  double resolution = 0.15;   // m/cell
  double robot_radius = 0.15; // inflation radius
  double simplify_tol_factor = 1.5;  // Douglas-Peucker tol = factor * resolution
  double min_area_cells = 2.0;       // smaller blobs dropped as noise
};

struct LocalGrid {
  IntGrid bg;   // 1 = occupied background
  IntGrid mov;  // object id + 1; 0 = empty
  Point2 center;  // robot position (grid midpoint)

  bool bg_occupied(int x, int y) const { return bg.at(x, y) != 0; }
  int movable_id(int x, int y) const { return mov.at(x, y) - 1; }  // -1 when empty
};

struct PolygonSetLocal {
  std::vector<Polygon> background;
  std::vector<Polygon> movable;  // Polygon::id carries the object id

  std::vector<Polygon> all() const {
    std::vector<Polygon> out = background;
    out.insert(out.end(), movable.begin(), movable.end());
    return out;
  }
};

LocalGrid rasterize_and_inflate(const ScanFrame& scan, const ExtractionConfig& cfg = {});
PolygonSetLocal extract_contours(const LocalGrid& grid, const ExtractionConfig& cfg = {});

// Text dump (cell runs + polygon vertex lists) for golden-file tests.
std::string dump_debug(const LocalGrid& grid, const PolygonSetLocal& polys);

}  // namespace inav
