#pragma once
// Directed visibility graph: polygon vertices + visibility edges for
// collision-free travel, topological waypoints per blocking object, directed
// interaction edges carrying push primitives, and the local-to-global merge
// with vertex voting.

#include <map>
#include <string>
#include <vector>

#include "inav/extraction.hpp"
#include "inav/geometry.hpp"
#include "inav/primitives.hpp"

namespace inav {

enum class VertexKind : uint8_t { PolygonVertex = 0, TopoWaypoint = 1, Robot = 2, Goal = 3 };

struct DVVertex {
  int id = -1;
  Point2 position;
  VertexKind kind = VertexKind::PolygonVertex;
  int source_polygon = -1;   // polygon id (PolygonVertex)
  int object_id = -1;        // movable object that created a TopoWaypoint
  int component = -1;        // free-space component id (TopoWaypoint)
  int unobserved_count = 0;  // consecutive in-view frames without a match
};

struct VisibilityEdge {
  int a = -1, b = -1;  // canonical a < b
  double length = 0.0;
};

struct InteractionEdge {
  int from = -1, to = -1;  // TopoWaypoint vertex ids, directed
  int object_id = -1;
  double cost = 0.0;  // J, meters-equivalent
  PushPrimitive primitive;
};

class DVGraph {
 public:
  std::string frame = "world";
  std::map<int, DVVertex> vertices;  // keyed by id, ordered for determinism
  std::vector<VisibilityEdge> vis_edges;
  std::vector<InteractionEdge> interaction_edges;
  std::map<int, Affordance> affordances;  // keyed by object id
  int next_id = 0;

  int add_vertex(DVVertex v);
  bool has_vertex(int id) const { return vertices.count(id) != 0; }
  const DVVertex& vertex(int id) const { return vertices.at(id); }
  void remove_vertex(int id);  // drops incident edges of both kinds
  bool has_vis_edge(int a, int b) const;
  void add_vis_edge(int a, int b);  // no-op when already present
  void set_interaction_edge(InteractionEdge e);  // replaces same (from, to)
  void remove_interaction_edges(int object_id);

  // Adjacency over visibility edges: vertex id -> (neighbor id, length).
  std::map<int, std::vector<std::pair<int, double>>> visibility_adjacency() const;

  DVGraph snapshot() const { return *this; }

  // Versioned text format; round-trips bit-exact.
  std::string serialize() const;
  static DVGraph parse(const std::string& text);
};

// One vertex per polygon vertex of both classes; visibility edges between all
// mutually visible pairs, with both classes blocking. No interaction edges.
DVGraph build_local_graph(const PolygonSetLocal& polys);

struct TopoWaypoint {
  Point2 position;
  int component = -1;  // free-space flood-fill label
  int object_id = -1;
  Point2 exit_point;  // boundary point the waypoint was offset from
};

struct ConnectivityResult {
  int n_components = 0;  // free-space components adjacent to the object
  std::vector<TopoWaypoint> waypoints;
  IntGrid labels;  // component label per free cell, 0 = occupied
};

// Free-space components around one movable object (flood fill on the local
// grid, both classes as obstacles) and one waypoint per free boundary gap:
// consecutive intersection points of the object boundary with background
// boundaries bound a gap; the waypoint sits at the gap's exit point pushed
// min(d_thres, d_obs/2) into free space along the gap normal. The flood fill
// is confined to a window of `window_margin` around the object so that a
// distant detour does not merge components the object separates locally.
ConnectivityResult connectivity_analysis(const PolygonSetLocal& polys, int object_id,
                                         const LocalGrid& grid, double d_thres = 0.5,
                                         double window_margin = 3.0);

// Number of component boundary vertices (polygon vertices plus cross-class
// boundary intersection points) visible from the waypoint.
int verify_topo_visibility(const Point2& waypoint, const PolygonSetLocal& polys);

struct MergeParams {
  Pose2 robot_pose;
  double sensor_range = 15.0;  // FOV radius for the voting rule
  double assoc_radius = 0.3;   // nearest-neighbor association distance
  double alpha = 0.5;          // position smoothing weight of the new observation
  int vote_threshold = 5;      // in-view misses before removal
};

// Merge one local graph into the global one. Matched vertices are smoothed and
// their miss counts reset; unmatched local vertices are inserted; unmatched
// global vertices inside the field of view accumulate misses and are removed
// at the threshold, out-of-view vertices are untouched. `polygons` is the
// current obstacle set, used for the line-of-sight part of the FOV test and to
// drop visibility edges that are no longer collision-free.
void merge_local_into_global(DVGraph& global, const DVGraph& local, const MergeParams& params,
                             const std::vector<Polygon>& polygons);

}  // namespace inav
