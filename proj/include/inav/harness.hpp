#pragma once
// Benchmark harness: procedural scenario generation, baseline planners, SPL
// metrics against a dense-grid oracle, and SVG trajectory plots.

#include <optional>
#include <string>
#include <vector>

#include "inav/system.hpp"

namespace inav {

enum class ScenarioClass { Room, RoomWithObjects, Office, Tunnel };

const char* scenario_class_name(ScenarioClass c);
ScenarioClass scenario_class_from_name(const std::string& name);  // throws on unknown

// Deterministic per (class, seed). Room: 32x32 m with two partition walls and
// doorways; RoomWithObjects blocks 3-6 doorways with pushable boxes; Office:
// 100x80 m room grid with boxes sealing the central columns except one door
// each; Tunnel: 330x270 m corridor maze with pillars (dense vertex count).
// All task start/goal pairs are in free space with straight-line separation at
// or above the class threshold, so the optimal path meets it too.
Scenario generate_scenario(ScenarioClass cls, uint64_t seed);

// Ground-truth class-labeled raster of the whole scenario (same encoding as
// the online map pipeline), optionally inflated by a robot radius.
LocalGrid rasterize_scenario(const Scenario& s, double res = 0.15, double inflate_radius = 0.0);

// The graph a complete exploration converges to: ground-truth raster at the
// system's extraction settings, contour polygons, visibility edges between
// vertex pairs up to max_pair_distance apart (longer edges add nothing on
// these maps and would dominate construction time).
DVGraph full_map_graph(const Scenario& s, const SystemConfig& cfg = {},
                       double max_pair_distance = 40.0, PolygonSetLocal* polys_out = nullptr);

// Dense-grid A* without inflation and with movable objects excluded (they are
// displaceable in principle): the shortest-length oracle l_i of SPL.
std::optional<double> shortest_length_oracle(const Scenario& s, const Point2& start,
                                             const Point2& goal, double res = 0.15);

enum class PlannerKind { Ours, GridAstar, FarLike };

const char* planner_name(PlannerKind k);
PlannerKind planner_from_name(const std::string& name);  // throws on unknown

struct TaskMetrics {
  bool success = false;
  double path_length = 0.0;      // achieved p_i, m
  double shortest_length = 0.0;  // oracle l_i, m
  double travel_time = 0.0;      // s
  double search_ms = 0.0;        // median global-search time for this task
};

struct Metrics {
  std::string scenario_name;
  std::string planner;
  std::vector<TaskMetrics> per_task;

  // (1/N) sum S_i * l_i / max(p_i, l_i), in [0, 1]
  double spl() const;
  double total_distance() const;
  double median_search_ms() const;
  std::string table() const;    // aligned text table
  std::string to_json() const;  // machine-readable
};

// One task's SPL contribution.
double spl_term(bool success, double shortest, double achieved);

struct BenchmarkOptions {
  RunConfig run;           // closed-loop settings for Ours / FarLike
  double grid_res = 0.15;  // dense-baseline and oracle resolution
  int max_tasks = -1;      // limit on tasks executed, -1 = all
  std::vector<RunResult>* traces = nullptr;  // filled for closed-loop planners
};

// Executes every task of the scenario with the chosen planner. Ours and
// FarLike run the closed mission loop (FarLike never installs interaction
// edges); GridAstar plans on the ground-truth occupancy grid. Search time is
// measured on the search alone, never on map or graph construction.
Metrics run_benchmark(const Scenario& s, PlannerKind kind, const BenchmarkOptions& opt = {});

// Deterministic SVG: background polygons red, movable green, optional graph
// edges, optional trajectory colored by time with start/goal markers.
std::string render_svg(const Scenario& s, const RunResult* trace = nullptr,
                       const DVGraph* graph = nullptr, const Task* task = nullptr);

// One SVG per trace, written to out_dir as <scenario>_task<i>.svg.
void emit_plots(const Scenario& s, const std::vector<RunResult>& traces,
                const std::string& out_dir);

}  // namespace inav
