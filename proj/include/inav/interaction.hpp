#pragma once
// Push-manipulation planning: stable-push cones (sticking line contact),
// hybrid A* over contact point x object pose with contact switching, and the
// disengagement-width heuristic.

#include <map>
#include <string>
#include <vector>

#include "inav/dvgraph.hpp"
#include "inav/extraction.hpp"
#include "inav/primitives.hpp"

namespace inav {

// Admissible curvature interval kappa = omega / v for one contact. A push is
// stable when the contact sticks: the support-friction wrench of the rotation
// is balanced by contact forces inside the friction cones of the two line
// contact endpoints.
struct StableCone {
  int edge = 0;
  bool valid = false;        // false when no stable interval contains kappa = 0
  double kappa_min = 0.0;
  double kappa_max = 0.0;
};

struct InteractionConfig {
  double robot_radius = 0.15;
  double robot_contact_width = 0.2;  // line contact footprint; shorter edges rejected
  double push_speed = 0.2;           // m/s
  double arc_length = 0.3;           // m per push step
  double pose_bin_xy = 0.15;         // m, closed-set deduplication
  double pose_bin_theta = 10.0 * M_PI / 180.0;
  int curvature_samples = 7;
  int node_budget = 20000;
  double goal_grid_res = 0.15;
  double goal_region_margin = 3.0;  // m around object + waypoints for the goal grid
  // Overlap tolerance between the (inflated) object polygon and (inflated)
  // obstacles; raised automatically to the start pose's overlap.
  double allowed_penetration = 0.3;
  double robot_clearance = 0.0;  // extra margin of the robot center to obstacles
  bool record_trace = false;
};

// Throws std::invalid_argument when the contact edge is shorter than
// contact_width (no line contact possible).
StableCone stable_cone(const Polygon& object, const ContactPoint& contact, double k,
                       double contact_width = 0.2, double robot_radius = 0.15);

// Overlap regions of the object with the background and the disengagement
// heuristic: width of the single region, or width of the convex hull of all
// region vertices when there are several. Scaled by u_x.
std::pair<std::vector<Polygon>, double> heuristic_polygons(const Polygon& object_at_pose,
                                                           const std::vector<Polygon>& background,
                                                           double u_x = 1.0);

struct HybridState {
  int contact = -1;  // index into the candidate contact list
  Pose2 pose;        // object pose relative to the planning-time placement
};

struct SearchResult {
  bool success = false;
  std::string failure;  // "no contact" | "budget" | "not pushable"
  PushPrimitive primitive;
  int nodes_expanded = 0;
  std::string trace;  // populated when cfg.record_trace
};

// Shared geometry caches for one push planning problem: contact candidates,
// per-contact stable cones, switch detours and the connectivity goal test.
class PushSearchContext {
 public:
  PushSearchContext(const Polygon& object, const PolygonSetLocal& polys, const Affordance& aff,
                    const Point2& start_wp, const Point2& goal_wp,
                    const InteractionConfig& cfg = {}, const IntGrid* known = nullptr);

  const std::vector<ContactPoint>& contacts() const { return contacts_; }
  const StableCone& cone(int contact) const { return cones_[contact]; }
  const Polygon& object() const { return object_; }
  Polygon object_at(const Pose2& pose) const { return object_.transformed(pose); }

  // Robot disk placement for a contact at an object pose, collision checked
  // against the obstacle set.
  Point2 robot_center(int contact, const Pose2& pose) const;
  bool contact_feasible(int contact, const Pose2& pose) const;
  bool pose_feasible(const Pose2& pose) const;  // object overlap within tolerance

  struct Successor {
    HybridState state;
    double cost = 0.0;
    PushAction action;
  };
  std::vector<Successor> expand(const HybridState& s);

  double heuristic(const Pose2& pose);
  // true when the robot can reach `p` from the start waypoint with the object
  // parked at its initial pose (raster flood fill, robot-width channels only)
  bool reachable_from_start(const Point2& p);
  // Raster BFS between the waypoints with the object at `pose`. With
  // `require_known` every traversed cell must also be observed free in the
  // known-occupancy grid: claiming an existing route needs positive evidence,
  // while goal tests during the push search stay optimistic about unseen space.
  bool goal_connected(const Pose2& pose, bool require_known = false);
  double switch_cost(const Pose2& pose, int from_contact, int to_contact,
                     std::vector<Point2>* path = nullptr);

  std::tuple<int64_t, int64_t, int64_t> pose_bin(const Pose2& pose) const;

 private:
  InteractionConfig cfg_;
  Polygon object_;
  Affordance aff_;
  Point2 start_wp_, goal_wp_;
  std::vector<Polygon> obstacles_;  // background + other movables
  std::vector<ContactPoint> contacts_;
  std::vector<StableCone> cones_;
  double allowed_pen_ = 0.0;
  Polygon object_inflated_;        // for switch detours
  IntGrid goal_base_;              // obstacles rasterized once
  const IntGrid* known_ = nullptr; // raw occupancy, 1 = observed free
  IntGrid start_reach_;            // flood fill from the start waypoint, 2 = reached
  bool start_reach_ready_ = false;
  std::map<std::tuple<int64_t, int64_t, int64_t>, bool> goal_cache_;
  std::map<std::tuple<int64_t, int64_t, int64_t>, double> heur_cache_;
  std::map<std::tuple<int64_t, int64_t, int64_t, int, int>, double> switch_cache_;
};

// Hybrid A* push search between two waypoints of one object's component set.
SearchResult search_primitive(const Point2& start_wp, const Point2& goal_wp, const Polygon& object,
                              const PolygonSetLocal& polys, const Affordance& aff,
                              const InteractionConfig& cfg = {}, const IntGrid* known = nullptr);

struct GammaResult {
  bool success = false;
  std::string failure;
  double J = 0.0;
  PushPrimitive primitive;
  Affordance affordance;
  int nodes_expanded = 0;
};

// Wraps search_primitive with the object's affordance; retries at half arc
// length when the node budget runs out. On success installs the directed
// interaction edge into `install_in` (when given valid waypoint ids).
GammaResult gamma(const Point2& from, const Point2& to, const Polygon& object,
                  const PolygonSetLocal& polys, const Affordance& aff,
                  const InteractionConfig& cfg = {}, DVGraph* install_in = nullptr,
                  int from_id = -1, int to_id = -1, const IntGrid* known = nullptr);

}  // namespace inav
