#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfsp/instance.hpp"

namespace hfsp {

/// Portable random source: std::mt19937_64 seeded with a SplitMix64 mix of the
/// 64-bit seed. Doubles take the top 53 bits; bounded integers use rejection.
/// Only the engine's bit stream is relied upon, never a std distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the `attempt`-th regeneration for a base seed.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t attempt);

enum class GraphFamily { kEuclidean, kLattice };

std::string to_string(GraphFamily f);
GraphFamily parse_family(const std::string& name);

struct GenSpec {
  GraphFamily family = GraphFamily::kEuclidean;
  int dim = 2;
  std::size_t n_nodes = 100;
  /// Lattice box size; when empty a square (2D) or cube (3D) of n_nodes is used.
  std::optional<std::array<std::size_t, 3>> lattice_dims;
  std::size_t k_neighbors = 4;

  double noise_target = 0.32;
  double noise_window = 0.03;
  double zone_side_min = 0.10;  // fraction of the domain side
  double zone_side_max = 0.35;

  double alpha = 1.0;           // C / D on level edges
  double beta = 1.5;            // Z / D on level edges
  double uphill_factor = 1.5;
  double glide_z_factor = 0.5;

  double b_frac = 0.3;   // Bmax = B0 = b_frac * SUP-path energy
  double q_frac = 1.2;   // Q0 = q_frac * SUP-path energy
  double v_frac = 0.01;  // V = v_frac * SUP-path energy
  std::int64_t quantization = 1000;

  std::uint64_t seed = 1;
  int max_attempts = 20;
  /// Run the solver on each draw and regenerate if it is infeasible.
  bool require_feasible = true;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Validates the spec; throws std::invalid_argument on bad parameters.
void check_spec(const GenSpec& spec);

/// Uniform random points, k-nearest-neighbour undirected edges.
Instance gen_euclidean(const GenSpec& spec);

/// Unit-spaced grid: 4-neighbourhood in 2D, 12-neighbourhood in 3D (planar
/// moves, alone or combined with one step up or down).
Instance gen_lattice(const GenSpec& spec);

Instance generate(const GenSpec& spec);

/// One Euclidean point set and noise-zone layout, connected at each k in `ks`.
/// Zones are calibrated on the first k.
std::vector<Instance> gen_euclidean_connectivity(const GenSpec& spec, const std::vector<std::size_t>& ks);

/// Indices of the k nearest other points to every point (ties by index),
/// each list sorted by distance.
std::vector<std::vector<NodeId>> k_nearest(const std::vector<NodeCoord>& points, std::size_t k);

/// Fraction of undirected edges (node pairs) whose generator is disallowed.
double noise_fraction(const Instance& instance);

/// Number of distinct unordered node pairs joined by an edge.
std::size_t undirected_edge_count(const Instance& instance);

}  // namespace hfsp
