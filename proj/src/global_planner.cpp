#include "inav/global_planner.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace inav {

GlobalPath plan(const DVGraph& snapshot, const Point2& robot, const Point2& goal,
                const EdgeIndex& obstacles, double endpoint_radius) {
  GlobalPath out;

  // compact indexing: 0 = robot, 1 = goal, then graph vertices by ascending id
  std::vector<int> ids{-1, -2};
  std::vector<Point2> pos{robot, goal};
  std::unordered_map<int, size_t> index;
  for (const auto& [id, v] : snapshot.vertices) {
    index[id] = ids.size();
    ids.push_back(id);
    pos.push_back(v.position);
  }
  size_t n = ids.size();

  struct Edge {
    size_t to;
    double cost;
    SegmentKind kind;
    int object;
  };
  std::vector<std::vector<Edge>> adj(n);
  auto add_undirected = [&](size_t a, size_t b, double c) {
    adj[a].push_back({b, c, SegmentKind::Visibility, -1});
    adj[b].push_back({a, c, SegmentKind::Visibility, -1});
  };
  for (const auto& e : snapshot.vis_edges) {
    auto a = index.find(e.a);
    auto b = index.find(e.b);
    if (a != index.end() && b != index.end()) add_undirected(a->second, b->second, e.length);
  }
  for (const auto& e : snapshot.interaction_edges) {
    auto a = index.find(e.from);
    auto b = index.find(e.to);
    if (a != index.end() && b != index.end())
      adj[a->second].push_back({b->second, e.cost, SegmentKind::Interaction, e.object_id});
  }
  // temporary connections for robot and goal; an inflated obstacle that
  // contains the robot (hugging a wall or an object it just pushed) must not
  // seal it in, so such polygons are ignored for the robot endpoint. The goal
  // gets no such exception: a goal inside an obstacle is unreachable.
  std::vector<size_t> robot_in, goal_in;
  for (size_t k = 0; k < obstacles.polygons().size(); ++k)
    if (obstacles.polygons()[k].contains(robot)) robot_in.push_back(k);
  auto endpoint_visible = [&](const Point2& from, const Point2& to,
                              const std::vector<size_t>& skip) {
    if (skip.empty()) return obstacles.visible(from, to);
    for (size_t k = 0; k < obstacles.polygons().size(); ++k) {
      if (std::find(skip.begin(), skip.end(), k) != skip.end()) continue;
      if (!segment_visible(from, to, obstacles.polygons()[k])) return false;
    }
    return true;
  };
  auto connect_endpoint = [&](size_t ep, const Point2& p, const std::vector<size_t>& skip) {
    for (double radius = endpoint_radius;; radius = std::numeric_limits<double>::infinity()) {
      bool any = false;
      for (size_t i = 2; i < n; ++i) {
        double d = (p - pos[i]).norm();
        if (d > radius) continue;
        if (endpoint_visible(p, pos[i], skip)) {
          add_undirected(ep, i, d);
          any = true;
        }
      }
      if (any || radius > 1e300 || n <= 2) return;
    }
  };
  connect_endpoint(0, robot, robot_in);
  connect_endpoint(1, goal, goal_in);
  if (endpoint_visible(robot, goal, robot_in) && endpoint_visible(goal, robot, goal_in))
    add_undirected(0, 1, (robot - goal).norm());

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<int> hops(n, 0);
  std::vector<int> parent(n, -1);
  std::vector<int> parent_edge(n, -1);  // index into adj[parent]
  using QE = std::tuple<double, int, int>;  // (cost, hops, compact index)
  std::priority_queue<QE, std::vector<QE>, std::greater<>> open;
  dist[0] = 0;
  open.push({0.0, 0, 0});
  while (!open.empty()) {
    auto [d, h, i] = open.top();
    open.pop();
    if (d > dist[i] + 1e-15 || h > hops[i]) continue;
    if (i == 1) break;
    for (size_t k = 0; k < adj[i].size(); ++k) {
      const Edge& e = adj[i][k];
      double nd = d + e.cost;
      int nh = h + 1;
      size_t j = e.to;
      // equal-cost ties resolved by hop count; adjacency order is fixed, so
      // the result is deterministic
      bool better = nd < dist[j] - 1e-15 || (nd <= dist[j] + 1e-15 && nh < hops[j]);
      if (!better) continue;
      dist[j] = nd;
      hops[j] = nh;
      parent[j] = static_cast<int>(i);
      parent_edge[j] = static_cast<int>(k);
      open.push({nd, nh, static_cast<int>(j)});
    }
  }
  if (dist[1] == kInf) return out;

  std::vector<size_t> chain;
  for (int i = 1; i != -1; i = parent[i]) {
    chain.push_back(i);
    if (i == 0) break;
  }
  std::reverse(chain.begin(), chain.end());
  out.found = true;
  out.cost = dist[1];
  for (size_t c = 0; c < chain.size(); ++c) {
    out.vertex_ids.push_back(ids[chain[c]]);
    out.positions.push_back(pos[chain[c]]);
    if (c + 1 < chain.size()) {
      const Edge& e = adj[chain[c]][parent_edge[chain[c + 1]]];
      out.segment_kinds.push_back(e.kind);
      out.segment_objects.push_back(e.object);
    }
  }
  return out;
}

}  // namespace inav
