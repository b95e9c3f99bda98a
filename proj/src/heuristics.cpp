#include "hfsp/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <utility>

namespace hfsp {

std::string to_string(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kSld: return "sld";
    case HeuristicKind::kSup: return "sup";
    case HeuristicKind::kZero: return "zero";
  }
  return "?";
}

HeuristicKind parse_heuristic(const std::string& name) {
  if (name == "sld") return HeuristicKind::kSld;
  if (name == "sup") return HeuristicKind::kSup;
  if (name == "zero") return HeuristicKind::kZero;
  throw std::invalid_argument("unknown heuristic '" + name + "' (expected sld, sup or zero)");
}

double euclidean_distance(const NodeCoord& a, const NodeCoord& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = (a.z && b.z) ? *a.z - *b.z : 0.0;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

HeuristicTable sld_table(const Instance& in) {
  if (in.nodes.empty()) throw std::invalid_argument("sld heuristic needs node coordinates");
  HeuristicTable t;
  t.kind = HeuristicKind::kSld;
  const NodeCoord& goal = in.nodes.at(in.goal);
  t.h.reserve(in.node_count());
  for (const NodeCoord& c : in.nodes) t.h.push_back(euclidean_distance(c, goal));
  t.h[in.goal] = 0.0;
  for (const Edge& e : in.edges) {
    const double straight = euclidean_distance(in.nodes[e.from], in.nodes[e.to]);
    if (e.cost < straight * (1.0 - 1e-9)) {
      t.admissible_by_construction = false;
      break;
    }
  }
  return t;
}

namespace {

// Reverse Dijkstra from the goal. Returns distances and, per node, the edge
// taken toward the goal on a shortest path.
std::pair<std::vector<double>, std::vector<EdgeId>> reverse_sweep(const Instance& in) {
  std::vector<double> dist(in.node_count(), kUnreachable);
  std::vector<EdgeId> next_edge(in.node_count(), kNoEdge);
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[in.goal] = 0.0;
  heap.emplace(0.0, in.goal);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (EdgeId e : in.in_edges(v)) {
      const Edge& edge = in.edges[e];
      const double nd = d + edge.cost;
      if (nd < dist[edge.from]) {
        dist[edge.from] = nd;
        next_edge[edge.from] = e;
        heap.emplace(nd, edge.from);
      }
    }
  }
  return {std::move(dist), std::move(next_edge)};
}

// Dijkstra from the start, stopping at the goal. Costs accumulate in path
// order, as in the solver, so the result bounds every start-goal path cost
// as computed there (floating-point addition is monotone).
double forward_distance(const Instance& in) {
  std::vector<double> dist(in.node_count(), kUnreachable);
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[in.start] = 0.0;
  heap.emplace(0.0, in.start);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (v == in.goal) return d;
    if (d > dist[v]) continue;
    for (EdgeId e : in.out_edges(v)) {
      const Edge& edge = in.edges[e];
      const double nd = d + edge.cost;
      if (nd < dist[edge.to]) {
        dist[edge.to] = nd;
        heap.emplace(nd, edge.to);
      }
    }
  }
  return kUnreachable;
}

}  // namespace

HeuristicTable sup_table(const Instance& in) {
  HeuristicTable t;
  t.kind = HeuristicKind::kSup;
  t.h = reverse_sweep(in).first;
  // same value up to rounding; the forward sum is the one path costs are compared with
  t.h[in.start] = forward_distance(in);
  return t;
}

HeuristicTable zero_table(const Instance& in) {
  HeuristicTable t;
  t.kind = HeuristicKind::kZero;
  t.h.assign(in.node_count(), 0.0);
  return t;
}

HeuristicTable make_heuristic(const Instance& in, HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kSld: return sld_table(in);
    case HeuristicKind::kSup: return sup_table(in);
    case HeuristicKind::kZero: return zero_table(in);
  }
  throw std::invalid_argument("bad heuristic kind");
}

UnconstrainedPath sup_path(const Instance& in) {
  auto [dist, next_edge] = reverse_sweep(in);
  if (dist[in.start] == kUnreachable) throw std::runtime_error("no path from start to goal");
  UnconstrainedPath p;
  NodeId v = in.start;
  p.path.push_back(v);
  while (v != in.goal) {
    const EdgeId e = next_edge[v];
    p.edges.push_back(e);
    v = in.edges[e].to;
    p.path.push_back(v);
  }
  for (EdgeId e : p.edges) p.cost += in.edges[e].cost;
  return p;
}

}  // namespace hfsp
