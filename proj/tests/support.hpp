#pragma once

#include <string>
#include <vector>

#include "hfsp/generators.hpp"
#include "hfsp/instance.hpp"
#include "hfsp/instance_io.hpp"

namespace hfsp::testing {

inline std::string data_path(const std::string& name) { return std::string(HFSP_TEST_DATA) + "/" + name; }

inline Instance load_fixture(const std::string& name) {
  LoadResult r = load_instance(read_file(data_path(name)));
  if (!r.violations.empty()) throw std::runtime_error(name + ": " + r.violations.front().message);
  return std::move(r.instance);
}

struct E {
  NodeId u, v;
  double d;
  std::int64_t c, z;
  bool gen = true;
  bool glide = false;
};

struct Resources {
  std::int64_t b0, bmin, bmax, q0, v;
};

// Quantization 1: resource values are given directly in units.
inline Instance make_instance(std::vector<NodeCoord> nodes, const std::vector<E>& edges, NodeId s, NodeId t,
                              Resources r) {
  Instance in;
  in.nodes = std::move(nodes);
  for (const E& e : edges) {
    Edge edge;
    edge.from = e.u;
    edge.to = e.v;
    edge.cost = e.d;
    edge.drain = ResourceUnits{e.c};
    edge.recharge = ResourceUnits{e.z};
    edge.gen_allowed = e.gen;
    edge.gliding = e.glide;
    in.edges.push_back(edge);
  }
  in.start = s;
  in.goal = t;
  in.b0 = ResourceUnits{r.b0};
  in.bmin = ResourceUnits{r.bmin};
  in.bmax = ResourceUnits{r.bmax};
  in.q0 = ResourceUnits{r.q0};
  in.startup_drain = ResourceUnits{r.v};
  in.quantization = 1;
  in.finalize();
  return in;
}

/// Seeded instances of at most 10 nodes over every family and dimension,
/// with Q0 = 0 on every fifth and V > 0 on every other one. Draws are not
/// filtered for feasibility.
inline std::vector<Instance> small_suite(std::size_t count, std::uint64_t seed) {
  std::vector<Instance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    GenSpec s;
    s.seed = seed + i;
    s.require_feasible = false;
    switch (i % 6) {
      case 0: s.n_nodes = 6 + i % 5; s.k_neighbors = 3; break;
      case 1: s.dim = 3; s.n_nodes = 7 + i % 4; s.k_neighbors = 3; break;
      case 2: s.family = GraphFamily::kLattice; s.n_nodes = 9; break;
      case 3: s.family = GraphFamily::kLattice; s.dim = 3; s.lattice_dims = std::array<std::size_t, 3>{2, 2, 2}; break;
      case 4: s.family = GraphFamily::kLattice; s.lattice_dims = std::array<std::size_t, 3>{2, 5, 1}; break;
      default: s.n_nodes = 10; s.k_neighbors = 4; break;
    }
    s.b_frac = 0.3 + 0.2 * static_cast<double>(i % 4);
    s.q_frac = i % 5 == 4 ? 0.0 : 1.2;
    s.v_frac = i % 2 == 1 ? 0.05 + 0.05 * static_cast<double>(i % 3) : 0.0;
    out.push_back(generate(s));
  }
  return out;
}

}  // namespace hfsp::testing
