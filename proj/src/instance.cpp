#include "hfsp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace hfsp {

void Instance::finalize() {
  out_.assign(nodes.size(), {});
  in_.assign(nodes.size(), {});
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    if (edge.from < nodes.size()) out_[edge.from].push_back(e);
    if (edge.to < nodes.size()) in_[edge.to].push_back(e);
  }
}

std::optional<EdgeId> Instance::find_edge(NodeId u, NodeId v) const {
  if (u >= out_.size()) return std::nullopt;
  for (EdgeId e : out_[u]) {
    if (edges[e].to == v) return e;
  }
  return std::nullopt;
}

bool Instance::is_3d() const {
  return !nodes.empty() && nodes.front().z.has_value();
}

std::string to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::kBounds: return "bounds";
    case ViolationCode::kEndpoints: return "endpoints";
    case ViolationCode::kEdge: return "edge";
    case ViolationCode::kDuplicateEdge: return "duplicate edge";
    case ViolationCode::kSelfLoop: return "self loop";
    case ViolationCode::kGliding: return "gliding";
    case ViolationCode::kCoordinate: return "coordinate";
    case ViolationCode::kPath: return "path";
    case ViolationCode::kNoiseRestriction: return "noise restriction";
    case ViolationCode::kBattery: return "battery";
    case ViolationCode::kFuel: return "fuel";
    case ViolationCode::kCost: return "cost";
    case ViolationCode::kTrace: return "trace";
  }
  return "unknown";
}

namespace {

std::string edge_name(const Edge& e) {
  return "(" + std::to_string(e.from) + "," + std::to_string(e.to) + ")";
}

}  // namespace

std::vector<Violation> validate(const Instance& in) {
  std::vector<Violation> out;
  auto add = [&](ViolationCode code, std::string msg) { out.push_back({code, std::move(msg)}); };

  if (in.b0 < in.bmin) add(ViolationCode::kBounds, "B0 below Bmin");
  if (in.b0 > in.bmax) add(ViolationCode::kBounds, "B0 above Bmax");
  if (in.bmin > in.bmax) add(ViolationCode::kBounds, "Bmin above Bmax");
  if (in.bmin.value < 0) add(ViolationCode::kBounds, "Bmin negative");
  if (in.q0.value < 0) add(ViolationCode::kBounds, "Q0 negative");
  if (in.startup_drain.value < 0) add(ViolationCode::kBounds, "startup drain V negative");
  if (in.quantization <= 0) add(ViolationCode::kBounds, "quantization must be positive");

  const auto n = in.nodes.size();
  if (in.start >= n) add(ViolationCode::kEndpoints, "start is not a valid node id");
  if (in.goal >= n) add(ViolationCode::kEndpoints, "goal is not a valid node id");
  if (in.start == in.goal) add(ViolationCode::kEndpoints, "start equals goal");

  const bool dim3 = in.is_3d();
  for (std::size_t i = 0; i < n; ++i) {
    const NodeCoord& c = in.nodes[i];
    const bool finite = std::isfinite(c.x) && std::isfinite(c.y) && (!c.z || std::isfinite(*c.z));
    if (!finite) add(ViolationCode::kCoordinate, "node " + std::to_string(i) + " has a non-finite coordinate");
    if (c.z.has_value() != dim3) {
      add(ViolationCode::kCoordinate, "node " + std::to_string(i) + " mixes 2D and 3D coordinates");
    }
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Edge& e : in.edges) {
    const std::string name = edge_name(e);
    if (e.from >= n || e.to >= n) {
      add(ViolationCode::kEdge, "edge " + name + " references a missing node");
      continue;
    }
    if (e.from == e.to) add(ViolationCode::kSelfLoop, "self-loop at node " + std::to_string(e.from));
    if (!seen.insert({e.from, e.to}).second) add(ViolationCode::kDuplicateEdge, "duplicate edge " + name);
    if (!(e.cost > 0.0) || !std::isfinite(e.cost)) {
      add(ViolationCode::kEdge, "edge " + name + " cost must be finite and positive");
    }
    if (e.drain.value < 0) add(ViolationCode::kEdge, "edge " + name + " has negative drain");
    if (e.recharge.value < 0) add(ViolationCode::kEdge, "edge " + name + " has negative recharge");
    if (e.gliding && e.drain.value != 0) {
      add(ViolationCode::kGliding, "gliding edge with nonzero drain " + name);
    }
  }
  return out;
}

std::optional<Violation> check_solution(const Instance& in, const Solution& sol) {
  auto fail = [](ViolationCode code, std::string msg) { return Violation{code, std::move(msg)}; };
  const auto& path = sol.path;

  if (path.empty()) return fail(ViolationCode::kPath, "empty path");
  if (path.front() != in.start) return fail(ViolationCode::kPath, "path does not begin at start");
  if (path.back() != in.goal) return fail(ViolationCode::kPath, "path does not end at goal");
  if (sol.gen.size() + 1 != path.size()) return fail(ViolationCode::kPath, "gen length must be path length - 1");
  if (sol.battery.size() != path.size() || sol.fuel.size() != path.size()) {
    return fail(ViolationCode::kTrace, "trace length must equal path length");
  }
  std::set<NodeId> visited;
  for (NodeId v : path) {
    if (v >= in.node_count()) return fail(ViolationCode::kPath, "path node " + std::to_string(v) + " out of range");
    if (!visited.insert(v).second) return fail(ViolationCode::kPath, "node " + std::to_string(v) + " repeats");
  }

  std::int64_t battery = in.b0.value;
  std::int64_t fuel = in.q0.value;
  bool generator_was_on = false;
  double cost = 0.0;
  if (battery < in.bmin.value || battery > in.bmax.value) {
    return fail(ViolationCode::kBattery, "initial battery outside [Bmin, Bmax] at node " + std::to_string(path[0]));
  }
  if (sol.battery[0].value != battery || sol.fuel[0].value != fuel) {
    return fail(ViolationCode::kTrace, "trace mismatch at node " + std::to_string(path[0]));
  }

  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const NodeId u = path[i];
    const NodeId v = path[i + 1];
    const auto e = in.find_edge(u, v);
    if (!e) {
      return fail(ViolationCode::kPath, "no edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
    const Edge& edge = in.edges[*e];
    const bool on = sol.gen[i];
    if (on && !edge.gen_allowed) {
      return fail(ViolationCode::kNoiseRestriction,
                  "noise restriction: generator on over edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
    cost += edge.cost;
    battery -= edge.drain.value;
    if (on && !generator_was_on) battery -= in.startup_drain.value;
    if (battery < in.bmin.value) {
      return fail(ViolationCode::kBattery,
                  "battery below Bmin while flying into node " + std::to_string(v));
    }
    if (on) {
      battery = std::min(in.bmax.value, battery + edge.recharge.value);
      fuel -= edge.recharge.value;
    } else {
      battery = std::min(in.bmax.value, battery);
    }
    if (fuel < 0) return fail(ViolationCode::kFuel, "fuel below zero at node " + std::to_string(v));
    generator_was_on = on;
    if (sol.battery[i + 1].value != battery) {
      return fail(ViolationCode::kTrace, "battery trace mismatch at node " + std::to_string(v));
    }
    if (sol.fuel[i + 1].value != fuel) {
      return fail(ViolationCode::kTrace, "fuel trace mismatch at node " + std::to_string(v));
    }
  }

  const double tol = 1e-9 * std::max(1.0, std::abs(cost));
  if (std::abs(sol.cost - cost) > tol) return fail(ViolationCode::kCost, "cost differs from the sum of edge costs");
  return std::nullopt;
}

}  // namespace hfsp
