#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hfsp {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

/// Battery charge or fuel, as an integer count of quantization steps.
/// All solver arithmetic on resources is exact.
struct ResourceUnits {
  std::int64_t value = 0;

  constexpr ResourceUnits() = default;
  constexpr explicit ResourceUnits(std::int64_t v) : value(v) {}

  constexpr auto operator<=>(const ResourceUnits&) const = default;

  constexpr ResourceUnits& operator+=(ResourceUnits o) {
    value += o.value;
    return *this;
  }
  constexpr ResourceUnits& operator-=(ResourceUnits o) {
    value -= o.value;
    return *this;
  }
  friend constexpr ResourceUnits operator+(ResourceUnits a, ResourceUnits b) { return a += b; }
  friend constexpr ResourceUnits operator-(ResourceUnits a, ResourceUnits b) { return a -= b; }
};

constexpr ResourceUnits operator""_ru(unsigned long long v) {
  return ResourceUnits{static_cast<std::int64_t>(v)};
}

struct NodeCoord {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> z;  // absent for planar instances
};

struct Edge {
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  double cost = 0.0;      // D
  ResourceUnits drain;    // C, battery used to fly the edge
  ResourceUnits recharge; // Z, battery gained and fuel burned with the generator on
  bool gen_allowed = true;
  bool gliding = false;
};

/// A directed, parameterized graph plus the vehicle's initial state.
///
/// Construct with the fields below, then call finalize() to build the
/// adjacency index. Instances are immutable after finalize().
class Instance {
 public:
  std::vector<NodeCoord> nodes;
  std::vector<Edge> edges;
  NodeId start = 0;
  NodeId goal = 0;
  ResourceUnits b0;
  ResourceUnits bmin;
  ResourceUnits bmax;
  ResourceUnits q0;
  ResourceUnits startup_drain;  // V
  /// Resource units per nominal energy unit in the file format.
  std::int64_t quantization = 1000;
  std::map<std::string, std::string> meta;

  void finalize();

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  /// Edge ids leaving / entering `n`, in edge-list order. Valid after finalize().
  const std::vector<EdgeId>& out_edges(NodeId n) const { return out_[n]; }
  const std::vector<EdgeId>& in_edges(NodeId n) const { return in_[n]; }

  /// Id of the edge u->v, if any.
  std::optional<EdgeId> find_edge(NodeId u, NodeId v) const;

  bool is_3d() const;

 private:
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

/// Minimum-cost path with a generator schedule and replayed resource traces.
struct Solution {
  std::vector<NodeId> path;
  std::vector<bool> gen;  // one entry per path edge
  double cost = 0.0;
  std::vector<ResourceUnits> battery;  // one entry per path node
  std::vector<ResourceUnits> fuel;
};

enum class ViolationCode {
  kBounds,          // Bmin <= B0 <= Bmax etc.
  kEndpoints,       // start / goal
  kEdge,            // malformed edge
  kDuplicateEdge,
  kSelfLoop,
  kGliding,
  kCoordinate,
  kPath,            // solution path structure
  kNoiseRestriction,
  kBattery,
  kFuel,
  kCost,
  kTrace,
};

struct Violation {
  ViolationCode code;
  std::string message;
};

/// Every violated instance invariant, in a stable order. Empty means valid.
std::vector<Violation> validate(const Instance& instance);

/// Replays the battery/fuel recurrences from scratch along `solution` and
/// returns the first violated constraint, or nullopt if feasible.
///
/// The replay shares no code with the solver: battery is debited by the edge
/// drain and, on an off->on generator transition, the startup drain; the
/// pre-recharge balance must stay at or above Bmin; the recharge is then
/// credited and clamped at Bmax.
std::optional<Violation> check_solution(const Instance& instance, const Solution& solution);

std::string to_string(ViolationCode code);

}  // namespace hfsp
