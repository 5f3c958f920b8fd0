#pragma once
// 2D geometry kernel: points, poses, simple polygons, visibility tests,
// polygon width (rotating calipers), offsetting and clipping.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace inav {

// Global tolerance for point equality and on-boundary tests [m].
constexpr double kEps = 1e-6;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 normalized() const {
    double n = norm();
    return n > 0 ? Vec2{x / n, y / n} : Vec2{0, 0};
  }
  // 90 degree counter-clockwise rotation.
  Vec2 perp() const { return {-y, x}; }
  Vec2 rotated(double a) const {
    double c = std::cos(a), s = std::sin(a);
    return {c * x - s * y, s * x + c * y};
  }
};

using Point2 = Vec2;

inline double normalize_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;  // heading, normalized to (-pi, pi]

  Pose2() = default;
  Pose2(double x_, double y_, double psi_) : x(x_), y(y_), psi(normalize_angle(psi_)) {}

  Point2 position() const { return {x, y}; }
  Vec2 heading() const { return {std::cos(psi), std::sin(psi)}; }
  // Body frame -> world frame.
  Point2 transform(const Point2& body) const {
    Vec2 r = body.rotated(psi);
    return {x + r.x, y + r.y};
  }
  Point2 inverse_transform(const Point2& world) const {
    Vec2 d{world.x - x, world.y - y};
    return d.rotated(-psi);
  }
};

enum class PolyClass : uint8_t { Background = 0, Movable = 1 };

// Simple polygon, CCW outer ring, no holes.
struct Polygon {
  std::vector<Point2> vertices;
  PolyClass cls = PolyClass::Background;
  int id = -1;

  Polygon() = default;
  explicit Polygon(std::vector<Point2> v, PolyClass c = PolyClass::Background, int id_ = -1)
      : vertices(std::move(v)), cls(c), id(id_) {}

  size_t size() const { return vertices.size(); }
  // Signed area, positive for CCW.
  double signed_area() const;
  double area() const { return std::abs(signed_area()); }
  Point2 centroid() const;
  double perimeter() const;
  void ensure_ccw();
  Polygon transformed(const Pose2& pose) const;

  bool contains(const Point2& p) const;                 // boundary counts as inside
  bool contains_strict(const Point2& p) const;          // interior, > kEps from boundary
  double distance_to_boundary(const Point2& p) const;   // unsigned
};

// --- low level predicates -------------------------------------------------

inline double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (b - a).cross(c - a);
}

double dist_point_segment(const Point2& p, const Point2& a, const Point2& b);

// Proper crossing of open segments (interiors intersect transversally).
bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

// Intersection parameter(s) of segment ab with segment cd, as t along ab in [0,1].
// Touching contacts included; collinear overlap reports both overlap ends.
void segment_intersection_params(const Point2& a, const Point2& b,
                                 const Point2& c, const Point2& d,
                                 std::vector<double>& out_ts);

// Intersection point of segments, if a single transversal one exists.
std::optional<Point2> segment_intersection_point(const Point2& a, const Point2& b,
                                                 const Point2& c, const Point2& d);

// Nearest hit parameter t >= 0 of ray origin + t*dir against polygon boundary.
std::optional<double> ray_polygon_hit(const Point2& origin, const Vec2& dir, const Polygon& poly);

// --- module operations ----------------------------------------------------

// True iff the open segment (a,b) intersects no obstacle interior.
// Grazing a boundary or touching at vertices does not break visibility.
bool segment_visible(const Point2& a, const Point2& b, const std::vector<Polygon>& obstacles);
bool segment_visible(const Point2& a, const Point2& b, const Polygon& obstacle);

// CCW convex hull; throws std::invalid_argument for <3 points or all collinear.
Polygon convex_hull(std::vector<Point2> points);

// Minimum distance between two parallel supporting lines (rotating calipers).
double polygon_width(const Polygon& p);

// Outward offset by r >= 0; convex corners rounded with chord sagitta <= 0.02 m.
// Throws std::invalid_argument for r < 0.
Polygon inflate(const Polygon& p, double r);

// Simple polygons covering the intersection region; empty if disjoint.
std::vector<Polygon> polygon_intersection(const Polygon& a, const Polygon& b);

bool polygons_overlap(const Polygon& a, const Polygon& b);

// --- rigid motion helpers (shared by the simulator and the push planner) ---

// Exact-arc unicycle step: velocity v along heading, yaw rate omega.
Pose2 unicycle_step(const Pose2& pose, double v, double omega, double dt);

// Advance an object pose rigidly attached to a pusher with center robot_center,
// heading along the push normal, commanded (v, omega), for dt.
Pose2 advance_push_pose(const Pose2& obj, const Point2& robot_center, const Vec2& heading,
                        double v, double omega, double dt);

// --- spatial index over polygon edges for fast visibility queries ----------

class EdgeIndex {
 public:
  EdgeIndex() = default;
  explicit EdgeIndex(const std::vector<Polygon>& polys, double cell = 2.0);

  bool visible(const Point2& a, const Point2& b) const;
  const std::vector<Polygon>& polygons() const { return polys_; }
  bool empty() const { return polys_.empty(); }

 private:
  struct EdgeRef { int poly; int edge; };
  void cells_of_segment(const Point2& a, const Point2& b, std::vector<int64_t>& out) const;
  int64_t key(int ix, int iy) const { return (static_cast<int64_t>(ix) << 32) ^ (iy & 0xffffffffLL); }

  std::vector<Polygon> polys_;
  std::vector<std::pair<Point2, Point2>> bboxes_;  // per polygon
  double cell_ = 2.0;
  std::unordered_map<int64_t, std::vector<EdgeRef>> table_;
  std::unordered_map<int64_t, std::vector<int>> bbox_table_;  // cell -> polygons
};

}  // namespace inav
