#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfsp/instance.hpp"

namespace hfsp {

enum class HeuristicKind { kSld, kSup, kZero };

std::string to_string(HeuristicKind kind);
HeuristicKind parse_heuristic(const std::string& name);

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Admissible cost-to-go estimate per node. h(goal) == 0; nodes that cannot
/// reach the goal hold kUnreachable.
struct HeuristicTable {
  HeuristicKind kind = HeuristicKind::kZero;
  std::vector<double> h;
  /// SLD only: false when some edge cost is shorter than the straight line
  /// between its endpoints, in which case SLD may overestimate.
  bool admissible_by_construction = true;

  double operator[](NodeId n) const { return h[n]; }
};

/// Straight-line distance to the goal. Throws std::invalid_argument if the
/// instance has no coordinates.
HeuristicTable sld_table(const Instance& instance);

/// Shortest unconstrained path cost to the goal, from one reverse Dijkstra
/// sweep over edge costs. h(start) comes from a forward search instead, so it
/// never exceeds a path cost summed from the start, even by rounding.
HeuristicTable sup_table(const Instance& instance);

HeuristicTable zero_table(const Instance& instance);

HeuristicTable make_heuristic(const Instance& instance, HeuristicKind kind);

/// The start->goal shortest path ignoring battery, fuel and noise.
/// Throws std::runtime_error if the goal is unreachable.
struct UnconstrainedPath {
  std::vector<NodeId> path;
  std::vector<EdgeId> edges;
  double cost = 0.0;
};
UnconstrainedPath sup_path(const Instance& instance);

double euclidean_distance(const NodeCoord& a, const NodeCoord& b);

}  // namespace hfsp
