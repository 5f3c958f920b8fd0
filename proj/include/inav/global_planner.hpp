#pragma once
// Shortest-path search over the mixed graph: undirected visibility edges in
// meters plus directed interaction edges with cost J (same units), so one
// search trades driving around against pushing through.

#include <vector>

#include "inav/dvgraph.hpp"
#include "inav/geometry.hpp"

namespace inav {

enum class SegmentKind : uint8_t { Visibility = 0, Interaction = 1 };

struct GlobalPath {
  bool found = false;
  std::vector<int> vertex_ids;  // -1 robot, -2 goal, graph ids otherwise
  std::vector<Point2> positions;
  std::vector<SegmentKind> segment_kinds;  // size = positions.size() - 1
  std::vector<int> segment_objects;        // object id per interaction segment, -1 else
  double cost = 0.0;
};

// Dijkstra from robot to goal over a graph snapshot. Robot and goal enter as
// temporary vertices connected to every vertex visible w.r.t. `obstacles`
// (unknown space blocks nothing, so unexplored regions are optimistically
// traversable). Deterministic tie-breaking by (cost, hops, vertex id).
// Endpoint connections are tried against vertices within endpoint_radius
// first; if an endpoint finds none there, the limit is lifted for it, so the
// radius only bounds the visibility work on large graphs.
GlobalPath plan(const DVGraph& snapshot, const Point2& robot, const Point2& goal,
                const EdgeIndex& obstacles, double endpoint_radius = 30.0);

}  // namespace inav
