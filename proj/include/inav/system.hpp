#pragma once
// Closed-loop integration: occupancy mapping from scans, global polygon
// extraction, graph maintenance (merge voting, topological waypoints, push
// planning for waypoint pairs) and the mission loop driving the executor
// against the simulator.

#include <set>
#include <tuple>

#include "inav/dvgraph.hpp"
#include "inav/executor.hpp"
#include "inav/extraction.hpp"
#include "inav/interaction.hpp"
#include "inav/world.hpp"

namespace inav {

struct SystemConfig {
  // Raster contours run through boundary cell centers (half a cell under
  // coverage) and simplification cuts corners inward by up to the tolerance,
  // so inflate by three cells to keep real robot clearance everywhere.
  ExtractionConfig extraction = [] {
    ExtractionConfig e;
    e.robot_radius = 0.45;
    e.simplify_tol_factor = 1.0;
    return e;
  }();
  SensorConfig sensor;
  MergeParams merge;
  InteractionConfig interaction;
  double waypoint_offset = 0.5;  // max waypoint standoff from the object boundary
  int max_gamma_per_cycle = 6;   // push searches per graph update
};

// Persistent map + graph state fed by scans.
class NavigationSystem {
 public:
  NavigationSystem(Point2 bounds_min, Point2 bounds_max, SystemConfig cfg = {});

  // Raycast update of the occupancy grid: free space carved along each beam,
  // hit cells labeled by class (2 = background, 3 + id = movable).
  void observe(const ScanFrame& scan);

  // One graph maintenance cycle: re-extract global polygons when the map
  // changed, build the local graph with topological waypoints, merge it into
  // the global graph, then plan push primitives for unseen waypoint pairs.
  void update_graph(const ScanFrame& scan);

  DVGraph& graph() { return graph_; }
  const DVGraph& graph() const { return graph_; }
  const PolygonSetLocal& polygons() const { return polys_; }
  const EdgeIndex& obstacles() const { return index_; }
  const IntGrid& occupancy() const { return occ_; }
  const LocalGrid& global_grid() const { return grid_; }

 private:
  void extract_global();

  SystemConfig cfg_;
  IntGrid occ_;
  bool dirty_ = true;
  DVGraph graph_;
  PolygonSetLocal polys_;
  EdgeIndex index_;
  LocalGrid grid_;  // dilated class grids matching polys_
  std::set<std::tuple<int, int, int, int64_t, int64_t>> gamma_done_;
};

struct RunConfig {
  double tick_dt = 0.1;         // 10 Hz control
  int graph_update_period = 4;  // ticks between graph updates (2.5 Hz)
  int max_ticks = 4000;
  bool record_trace = true;
  ExecutorParams executor;
  SystemConfig system;
};

struct RunResult {
  bool success = false;
  ExecMode final_mode = ExecMode::Failed;
  double distance = 0.0;  // robot path length, m
  double sim_time = 0.0;
  int ticks = 0;
  int replans = 0;
  std::vector<Point2> trajectory;
  std::string trace_csv;
  std::string graph_text;  // final graph, serialized
};

// Close the loop on one task: scan, map, plan, act until Done/Failed/budget.
RunResult run_mission(World& world, const Task& task, const RunConfig& cfg = {});

}  // namespace inav
