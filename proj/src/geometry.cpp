#include "inav/geometry.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_set>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

namespace inav {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false, true>;  // ccw, closed
using BMultiPolygon = bg::model::multi_polygon<BPolygon>;

// --- Polygon --------------------------------------------------------------

double Polygon::signed_area() const {
  double a = 0.0;
  size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& p = vertices[i];
    const Point2& q = vertices[(i + 1) % n];
    a += p.cross(q);
  }
  return 0.5 * a;
}

Point2 Polygon::centroid() const {
  double a = signed_area();
  size_t n = vertices.size();
  if (std::abs(a) < 1e-12) {
    Point2 m;
    for (const auto& v : vertices) m += v;
    return m / static_cast<double>(n);
  }
  double cx = 0.0, cy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Point2& p = vertices[i];
    const Point2& q = vertices[(i + 1) % n];
    double w = p.cross(q);
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

double Polygon::perimeter() const {
  double s = 0.0;
  size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i) s += (vertices[(i + 1) % n] - vertices[i]).norm();
  return s;
}

void Polygon::ensure_ccw() {
  if (signed_area() < 0) std::reverse(vertices.begin(), vertices.end());
}

Polygon Polygon::transformed(const Pose2& pose) const {
  Polygon out = *this;
  for (auto& v : out.vertices) v = pose.transform(v);
  return out;
}

double Polygon::distance_to_boundary(const Point2& p) const {
  double d = std::numeric_limits<double>::infinity();
  size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i)
    d = std::min(d, dist_point_segment(p, vertices[i], vertices[(i + 1) % n]));
  return d;
}

static bool even_odd_inside(const Point2& p, const std::vector<Point2>& vs) {
  bool inside = false;
  size_t n = vs.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = vs[i];
    const Point2& b = vs[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

bool Polygon::contains(const Point2& p) const {
  if (distance_to_boundary(p) <= kEps) return true;
  return even_odd_inside(p, vertices);
}

bool Polygon::contains_strict(const Point2& p) const {
  if (distance_to_boundary(p) <= kEps) return false;
  return even_odd_inside(p, vertices);
}

// --- predicates -----------------------------------------------------------

double dist_point_segment(const Point2& p, const Point2& a, const Point2& b) {
  Vec2 ab = b - a;
  double len2 = ab.norm2();
  if (len2 < 1e-24) return (p - a).norm();
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  double d1 = orient(c, d, a);
  double d2 = orient(c, d, b);
  double d3 = orient(a, b, c);
  double d4 = orient(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

void segment_intersection_params(const Point2& a, const Point2& b,
                                 const Point2& c, const Point2& d,
                                 std::vector<double>& out_ts) {
  Vec2 r = b - a;
  Vec2 s = d - c;
  double denom = r.cross(s);
  double len_r = r.norm();
  double len_s = s.norm();
  if (len_r < 1e-12) return;
  double t_eps = kEps / len_r;
  if (std::abs(denom) < 1e-12 * len_r * len_s) {
    // parallel; collinear overlap reports both clamped ends
    if (std::abs((c - a).cross(r)) > kEps * len_r) return;
    double t0 = (c - a).dot(r) / r.norm2();
    double t1 = (d - a).dot(r) / r.norm2();
    if (t0 > t1) std::swap(t0, t1);
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, 1.0);
    if (t0 <= t1) {
      out_ts.push_back(t0);
      out_ts.push_back(t1);
    }
    return;
  }
  double t = (c - a).cross(s) / denom;
  double u = (c - a).cross(r) / denom;
  double u_eps = kEps / std::max(len_s, 1e-12);
  if (t >= -t_eps && t <= 1 + t_eps && u >= -u_eps && u <= 1 + u_eps)
    out_ts.push_back(std::clamp(t, 0.0, 1.0));
}

std::optional<Point2> segment_intersection_point(const Point2& a, const Point2& b,
                                                 const Point2& c, const Point2& d) {
  Vec2 r = b - a;
  Vec2 s = d - c;
  double denom = r.cross(s);
  if (std::abs(denom) < 1e-14) return std::nullopt;
  double t = (c - a).cross(s) / denom;
  double u = (c - a).cross(r) / denom;
  double te = kEps / std::max(r.norm(), 1e-12);
  double ue = kEps / std::max(s.norm(), 1e-12);
  if (t < -te || t > 1 + te || u < -ue || u > 1 + ue) return std::nullopt;
  return a + r * std::clamp(t, 0.0, 1.0);
}

std::optional<double> ray_polygon_hit(const Point2& origin, const Vec2& dir, const Polygon& poly) {
  double best = std::numeric_limits<double>::infinity();
  size_t n = poly.vertices.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& c = poly.vertices[i];
    const Point2& d = poly.vertices[(i + 1) % n];
    Vec2 s = d - c;
    double denom = dir.cross(s);
    if (std::abs(denom) < 1e-14) continue;
    double t = (c - origin).cross(s) / denom;
    double u = (c - origin).cross(dir) / denom;
    if (t >= -kEps && u >= -1e-9 && u <= 1 + 1e-9) best = std::min(best, std::max(t, 0.0));
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

// --- visibility -----------------------------------------------------------

static bool segment_blocked_by(const Point2& a, const Point2& b, const Polygon& poly,
                               std::vector<double>& ts_scratch) {
  // bbox reject
  double minx = std::min(a.x, b.x), maxx = std::max(a.x, b.x);
  double miny = std::min(a.y, b.y), maxy = std::max(a.y, b.y);
  double pminx = 1e300, pmaxx = -1e300, pminy = 1e300, pmaxy = -1e300;
  for (const auto& v : poly.vertices) {
    pminx = std::min(pminx, v.x);
    pmaxx = std::max(pmaxx, v.x);
    pminy = std::min(pminy, v.y);
    pmaxy = std::max(pmaxy, v.y);
  }
  if (maxx < pminx - kEps || minx > pmaxx + kEps || maxy < pminy - kEps || miny > pmaxy + kEps)
    return false;

  ts_scratch.clear();
  size_t n = poly.vertices.size();
  for (size_t i = 0; i < n; ++i)
    segment_intersection_params(a, b, poly.vertices[i], poly.vertices[(i + 1) % n], ts_scratch);
  ts_scratch.push_back(0.0);
  ts_scratch.push_back(1.0);
  std::sort(ts_scratch.begin(), ts_scratch.end());
  // test interval midpoints for strict interior
  for (size_t i = 0; i + 1 < ts_scratch.size(); ++i) {
    double tm = 0.5 * (ts_scratch[i] + ts_scratch[i + 1]);
    if (tm <= 0.0 || tm >= 1.0) continue;
    Point2 m = a + (b - a) * tm;
    if (poly.contains_strict(m)) return true;
  }
  return false;
}

bool segment_visible(const Point2& a, const Point2& b, const Polygon& obstacle) {
  if ((b - a).norm() < kEps) return true;
  std::vector<double> ts;
  return !segment_blocked_by(a, b, obstacle, ts);
}

bool segment_visible(const Point2& a, const Point2& b, const std::vector<Polygon>& obstacles) {
  if ((b - a).norm() < kEps) return true;
  std::vector<double> ts;
  for (const auto& poly : obstacles)
    if (segment_blocked_by(a, b, poly, ts)) return false;
  return true;
}

// --- convex hull & width ---------------------------------------------------

Polygon convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& p, const Point2& q) {
    return p.x < q.x || (p.x == q.x && p.y < q.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& p, const Point2& q) {
                          return (p - q).norm() < 1e-12;
                        }),
            pts.end());
  size_t n = pts.size();
  if (n < 3) throw std::invalid_argument("convex_hull: need >= 3 distinct points");
  std::vector<Point2> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {  // upper
    while (k >= lower && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw std::invalid_argument("convex_hull: all points collinear");
  Polygon out;
  out.vertices = std::move(hull);
  return out;
}

static double dist_to_line(const Point2& p, const Point2& a, const Point2& b) {
  Vec2 ab = b - a;
  double len = ab.norm();
  if (len < 1e-15) return (p - a).norm();
  return std::abs(ab.cross(p - a)) / len;
}

double polygon_width(const Polygon& p) {
  Polygon hull;
  try {
    hull = convex_hull(p.vertices);
  } catch (const std::invalid_argument&) {
    return 0.0;  // degenerate
  }
  const auto& h = hull.vertices;
  size_t m = h.size();
  double best = std::numeric_limits<double>::infinity();
  size_t j = 1;
  for (size_t i = 0; i < m; ++i) {
    const Point2& a = h[i];
    const Point2& b = h[(i + 1) % m];
    // advance antipodal vertex; distance to the edge line is unimodal on a convex ring
    while (dist_to_line(h[(j + 1) % m], a, b) > dist_to_line(h[j % m], a, b)) ++j;
    best = std::min(best, dist_to_line(h[j % m], a, b));
  }
  return best;
}

// --- boost conversions ------------------------------------------------------

static BPolygon to_boost(const Polygon& p) {
  BPolygon out;
  for (const auto& v : p.vertices) bg::append(out.outer(), BPoint(v.x, v.y));
  if (!p.vertices.empty())
    bg::append(out.outer(), BPoint(p.vertices.front().x, p.vertices.front().y));
  bg::correct(out);
  return out;
}

static Polygon from_boost_outer(const BPolygon& bp, PolyClass cls, int id) {
  Polygon out;
  out.cls = cls;
  out.id = id;
  const auto& ring = bp.outer();
  for (size_t i = 0; i + 1 < ring.size(); ++i)  // drop closing point
    out.vertices.push_back({bg::get<0>(ring[i]), bg::get<1>(ring[i])});
  out.ensure_ccw();
  return out;
}

Polygon inflate(const Polygon& p, double r) {
  if (r < 0) throw std::invalid_argument("inflate: negative radius unsupported");
  if (r == 0.0) return p;
  // points per circle so the chord sagitta stays <= 0.02 m
  constexpr double kSagitta = 0.02;
  int npts = 8;
  if (r > kSagitta) {
    npts = static_cast<int>(std::ceil(M_PI / std::acos(1.0 - kSagitta / r)));
    npts = std::clamp(npts, 8, 256);
  }
  BMultiPolygon in, out;
  in.push_back(to_boost(p));
  bg::strategy::buffer::distance_symmetric<double> dist(r);
  bg::strategy::buffer::join_round join(npts);
  bg::strategy::buffer::end_round endr(npts);
  bg::strategy::buffer::point_circle circ(npts);
  bg::strategy::buffer::side_straight side;
  bg::buffer(in, out, dist, side, join, endr, circ);
  if (out.empty()) throw std::runtime_error("inflate: empty buffer result");
  // outward offset of a simple polygon has one outer component; keep the largest
  size_t best = 0;
  double best_area = -1;
  for (size_t i = 0; i < out.size(); ++i) {
    double a = bg::area(out[i]);
    if (a > best_area) { best_area = a; best = i; }
  }
  return from_boost_outer(out[best], p.cls, p.id);
}

std::vector<Polygon> polygon_intersection(const Polygon& a, const Polygon& b) {
  BMultiPolygon out;
  bg::intersection(to_boost(a), to_boost(b), out);
  std::vector<Polygon> result;
  for (const auto& bp : out) {
    Polygon poly = from_boost_outer(bp, a.cls, -1);
    if (poly.vertices.size() >= 3 && poly.area() > 1e-10) result.push_back(std::move(poly));
  }
  return result;
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  size_t na = a.vertices.size(), nb = b.vertices.size();
  double aminx = 1e300, amaxx = -1e300, aminy = 1e300, amaxy = -1e300;
  for (const auto& v : a.vertices) {
    aminx = std::min(aminx, v.x); amaxx = std::max(amaxx, v.x);
    aminy = std::min(aminy, v.y); amaxy = std::max(amaxy, v.y);
  }
  for (const auto& v : b.vertices) {
    if (v.x < aminx - kEps || v.x > amaxx + kEps || v.y < aminy - kEps || v.y > amaxy + kEps)
      continue;
    if (a.contains_strict(v)) return true;
  }
  for (const auto& v : a.vertices)
    if (b.contains_strict(v)) return true;
  for (size_t i = 0; i < na; ++i)
    for (size_t j = 0; j < nb; ++j)
      if (segments_cross(a.vertices[i], a.vertices[(i + 1) % na],
                         b.vertices[j], b.vertices[(j + 1) % nb]))
        return true;
  return false;
}

// --- rigid motion -----------------------------------------------------------

Pose2 unicycle_step(const Pose2& pose, double v, double omega, double dt) {
  if (std::abs(omega) < 1e-12) {
    Vec2 h = pose.heading();
    return {pose.x + v * h.x * dt, pose.y + v * h.y * dt, pose.psi};
  }
  double radius = v / omega;
  double psi1 = pose.psi + omega * dt;
  return {pose.x + radius * (std::sin(psi1) - std::sin(pose.psi)),
          pose.y - radius * (std::cos(psi1) - std::cos(pose.psi)), psi1};
}

Pose2 advance_push_pose(const Pose2& obj, const Point2& robot_center, const Vec2& heading,
                        double v, double omega, double dt) {
  if (std::abs(omega) < 1e-12) {
    Vec2 d = heading * (v * dt);
    return {obj.x + d.x, obj.y + d.y, obj.psi};
  }
  Point2 cor = robot_center + heading.perp() * (v / omega);
  double theta = omega * dt;
  Vec2 rel = obj.position() - cor;
  Point2 npos = cor + rel.rotated(theta);
  return {npos.x, npos.y, obj.psi + theta};
}

// --- EdgeIndex ---------------------------------------------------------------

EdgeIndex::EdgeIndex(const std::vector<Polygon>& polys, double cell)
    : polys_(polys), cell_(cell) {
  bboxes_.reserve(polys_.size());
  for (int pi = 0; pi < static_cast<int>(polys_.size()); ++pi) {
    const auto& vs = polys_[pi].vertices;
    Point2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const auto& v : vs) {
      lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y);
    }
    bboxes_.push_back({lo, hi});
    int cx0 = static_cast<int>(std::floor(lo.x / cell_));
    int cx1 = static_cast<int>(std::floor(hi.x / cell_));
    int cy0 = static_cast<int>(std::floor(lo.y / cell_));
    int cy1 = static_cast<int>(std::floor(hi.y / cell_));
    for (int ix = cx0; ix <= cx1; ++ix)
      for (int iy = cy0; iy <= cy1; ++iy) bbox_table_[key(ix, iy)].push_back(pi);
    size_t n = vs.size();
    for (int ei = 0; ei < static_cast<int>(n); ++ei) {
      const Point2& a = vs[ei];
      const Point2& b = vs[(ei + 1) % n];
      int ix0 = static_cast<int>(std::floor(std::min(a.x, b.x) / cell_));
      int ix1 = static_cast<int>(std::floor(std::max(a.x, b.x) / cell_));
      int iy0 = static_cast<int>(std::floor(std::min(a.y, b.y) / cell_));
      int iy1 = static_cast<int>(std::floor(std::max(a.y, b.y) / cell_));
      for (int ix = ix0; ix <= ix1; ++ix)
        for (int iy = iy0; iy <= iy1; ++iy)
          table_[key(ix, iy)].push_back({pi, ei});
    }
  }
}

void EdgeIndex::cells_of_segment(const Point2& a, const Point2& b, std::vector<int64_t>& out) const {
  double len = (b - a).norm();
  int steps = std::max(1, static_cast<int>(std::ceil(len / (cell_ * 0.5))));
  out.clear();
  for (int i = 0; i <= steps; ++i) {
    Point2 p = a + (b - a) * (static_cast<double>(i) / steps);
    int ix = static_cast<int>(std::floor(p.x / cell_));
    int iy = static_cast<int>(std::floor(p.y / cell_));
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) out.push_back(key(ix + dx, iy + dy));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

bool EdgeIndex::visible(const Point2& a, const Point2& b) const {
  if ((b - a).norm() < kEps) return true;
  std::vector<int64_t> keys;
  cells_of_segment(a, b, keys);
  // a proper crossing of a boundary edge means the segment enters the interior;
  // touching contacts (vertex hits, collinear overlap) need the interval test
  std::unordered_map<int, std::vector<double>> ts_by_poly;
  std::unordered_set<int64_t> seen;
  std::vector<double> ts;
  for (int64_t k : keys) {
    auto it = table_.find(k);
    if (it == table_.end()) continue;
    for (const auto& er : it->second) {
      if (!seen.insert((static_cast<int64_t>(er.poly) << 24) | er.edge).second) continue;
      const auto& vs = polys_[er.poly].vertices;
      const Point2& c = vs[er.edge];
      const Point2& d = vs[(er.edge + 1) % vs.size()];
      if (segments_cross(a, b, c, d)) return false;
      ts.clear();
      segment_intersection_params(a, b, c, d, ts);
      if (!ts.empty()) {
        auto& dst = ts_by_poly[er.poly];
        dst.insert(dst.end(), ts.begin(), ts.end());
      }
    }
  }
  for (auto& [pi, tps] : ts_by_poly) {
    tps.push_back(0.0);
    tps.push_back(1.0);
    std::sort(tps.begin(), tps.end());
    for (size_t i = 0; i + 1 < tps.size(); ++i) {
      double tm = 0.5 * (tps[i] + tps[i + 1]);
      if (tm <= 0.0 || tm >= 1.0) continue;
      if (polys_[pi].contains_strict(a + (b - a) * tm)) return false;
    }
  }
  // segments with no boundary contact can still run fully inside a polygon
  Point2 mid = (a + b) * 0.5;
  int mx = static_cast<int>(std::floor(mid.x / cell_));
  int my = static_cast<int>(std::floor(mid.y / cell_));
  auto itc = bbox_table_.find(key(mx, my));
  if (itc != bbox_table_.end()) {
    for (int pi : itc->second) {
      if (ts_by_poly.count(pi)) continue;
      const auto& bb = bboxes_[pi];
      if (mid.x >= bb.first.x - kEps && mid.x <= bb.second.x + kEps &&
          mid.y >= bb.first.y - kEps && mid.y <= bb.second.y + kEps &&
          polys_[pi].contains_strict(mid))
        return false;
    }
  }
  return true;
}

}  // namespace inav
