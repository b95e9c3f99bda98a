#include "hfsp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <utility>

#include "hfsp/heuristics.hpp"
#include "hfsp/instance_io.hpp"
#include "hfsp/labeling.hpp"

namespace hfsp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t attempt) {
  return attempt == 0 ? seed : splitmix64(seed ^ splitmix64(attempt));
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::string to_string(GraphFamily f) { return f == GraphFamily::kEuclidean ? "euclidean" : "lattice"; }

GraphFamily parse_family(const std::string& name) {
  if (name == "euclidean") return GraphFamily::kEuclidean;
  if (name == "lattice") return GraphFamily::kLattice;
  throw std::invalid_argument("unknown graph family '" + name + "'");
}

namespace {

using NodePair = std::pair<NodeId, NodeId>;

struct Layout {
  int dim = 2;
  std::vector<NodeCoord> points;
  std::array<double, 3> extent{1.0, 1.0, 1.0};
};

struct Zone {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
};

double axis(const NodeCoord& p, int a) { return a == 0 ? p.x : a == 1 ? p.y : p.z.value_or(0.0); }

std::size_t integer_root(std::size_t n, int dim) {
  auto r = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / dim)));
  std::size_t p = 1;
  for (int i = 0; i < dim; ++i) p *= r;
  return p == n ? r : 0;
}

std::array<std::size_t, 3> lattice_box(const GenSpec& spec) {
  if (spec.lattice_dims) {
    auto d = *spec.lattice_dims;
    if (spec.dim == 2) d[2] = 1;
    return d;
  }
  const std::size_t side = integer_root(spec.n_nodes, spec.dim);
  if (side == 0) {
    throw std::invalid_argument("lattice n_nodes must be a perfect " + std::string(spec.dim == 2 ? "square" : "cube") +
                                " unless lattice_dims is given");
  }
  return {side, side, spec.dim == 3 ? side : 1};
}

Layout random_layout(const GenSpec& spec, Rng& rng) {
  Layout layout;
  layout.dim = spec.dim;
  layout.points.reserve(spec.n_nodes);
  for (std::size_t i = 0; i < spec.n_nodes; ++i) {
    NodeCoord c;
    c.x = rng.uniform();
    c.y = rng.uniform();
    if (spec.dim == 3) c.z = rng.uniform();
    layout.points.push_back(c);
  }
  return layout;
}

Layout lattice_layout(const std::array<std::size_t, 3>& box, int dim) {
  Layout layout;
  layout.dim = dim;
  for (std::size_t z = 0; z < box[2]; ++z) {
    for (std::size_t y = 0; y < box[1]; ++y) {
      for (std::size_t x = 0; x < box[0]; ++x) {
        NodeCoord c{static_cast<double>(x), static_cast<double>(y), std::nullopt};
        if (dim == 3) c.z = static_cast<double>(z);
        layout.points.push_back(c);
      }
    }
  }
  for (int a = 0; a < 3; ++a) layout.extent[a] = static_cast<double>(std::max<std::size_t>(box[a], 2) - 1);
  return layout;
}

std::vector<NodePair> knn_pairs(const std::vector<NodeCoord>& points, std::size_t k) {
  const auto lists = k_nearest(points, k);
  std::vector<NodePair> pairs;
  pairs.reserve(points.size() * k);
  for (NodeId i = 0; i < lists.size(); ++i) {
    for (NodeId j : lists[i]) pairs.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

std::vector<NodePair> lattice_pairs(const std::array<std::size_t, 3>& box, int dim) {
  std::vector<NodePair> pairs;
  const auto nx = static_cast<long>(box[0]), ny = static_cast<long>(box[1]), nz = static_cast<long>(box[2]);
  auto index = [&](long x, long y, long z) { return static_cast<NodeId>(x + nx * (y + ny * z)); };
  const int planar[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const std::vector<long> vertical = dim == 3 ? std::vector<long>{-1, 0, 1} : std::vector<long>{0};
  for (long z = 0; z < nz; ++z) {
    for (long y = 0; y < ny; ++y) {
      for (long x = 0; x < nx; ++x) {
        for (const auto& m : planar) {
          for (long dz : vertical) {
            const long tx = x + m[0], ty = y + m[1], tz = z + dz;
            if (tx < 0 || ty < 0 || tz < 0 || tx >= nx || ty >= ny || tz >= nz) continue;
            const NodeId a = index(x, y, z), b = index(tx, ty, tz);
            if (a < b) pairs.emplace_back(a, b);
          }
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

NodePair farthest_pair(const std::vector<NodeCoord>& points) {
  NodePair best{0, 1};
  double best_d2 = -1.0;
  for (NodeId i = 0; i < points.size(); ++i) {
    for (NodeId j = i + 1; j < points.size(); ++j) {
      const double d = euclidean_distance(points[i], points[j]);
      if (d > best_d2) {
        best_d2 = d;
        best = {i, j};
      }
    }
  }
  return best;
}

bool connected(std::size_t n, const std::vector<NodePair>& pairs, NodeId s, NodeId t) {
  std::vector<std::vector<NodeId>> adj(n);
  for (auto [a, b] : pairs) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(n, false);
  std::vector<NodeId> stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (u == t) return true;
    for (NodeId v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return false;
}

bool inside(const Zone& z, const NodeCoord& p, int dim) {
  for (int a = 0; a < dim; ++a) {
    const double v = axis(p, a);
    if (v < z.lo[a] || v > z.hi[a]) return false;
  }
  return true;
}

Zone random_zone(const Layout& layout, const GenSpec& spec, Rng& rng) {
  Zone z;
  for (int a = 0; a < layout.dim; ++a) {
    const double side = rng.uniform(spec.zone_side_min, spec.zone_side_max) * layout.extent[a];
    const double lo = rng.uniform() * (layout.extent[a] - side);
    z.lo[a] = lo;
    z.hi[a] = lo + side;
  }
  return z;
}

std::vector<bool> restricted_pairs(const Layout& layout, const std::vector<NodePair>& pairs,
                                   const std::vector<Zone>& zones) {
  std::vector<bool> flags(pairs.size(), false);
  for (const Zone& z : zones) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!flags[i] && inside(z, layout.points[pairs[i].first], layout.dim) &&
          inside(z, layout.points[pairs[i].second], layout.dim)) {
        flags[i] = true;
      }
    }
  }
  return flags;
}

// Adds random zones until the restricted fraction reaches the window; a round
// that overshoots is discarded. Falls back to the closest round seen.
std::vector<Zone> calibrate_zones(const Layout& layout, const std::vector<NodePair>& pairs, const GenSpec& spec,
                                  Rng& rng) {
  if (spec.noise_target <= 0.0 || pairs.empty()) return {};
  constexpr int kRounds = 200;
  constexpr std::size_t kMaxZones = 4096;
  constexpr std::size_t kMaxIdleZones = 256;  // a round ends after this many zones that restrict nothing new
  const double lo = spec.noise_target - spec.noise_window;
  const double hi = spec.noise_target + spec.noise_window;

  std::vector<Zone> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int round = 0; round < kRounds; ++round) {
    std::vector<Zone> zones;
    std::vector<bool> flags(pairs.size(), false);
    std::size_t restricted = 0;
    double fraction = 0.0;
    std::size_t idle = 0;
    while (fraction < lo && zones.size() < kMaxZones && idle < kMaxIdleZones) {
      const Zone z = random_zone(layout, spec, rng);
      const std::size_t before = restricted;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!flags[i] && inside(z, layout.points[pairs[i].first], layout.dim) &&
            inside(z, layout.points[pairs[i].second], layout.dim)) {
          flags[i] = true;
          ++restricted;
        }
      }
      idle = restricted == before ? idle + 1 : 0;
      zones.push_back(z);
      fraction = static_cast<double>(restricted) / static_cast<double>(pairs.size());
    }
    if (fraction >= lo && fraction <= hi) return zones;
    const double gap = std::abs(fraction - spec.noise_target);
    if (gap < best_gap) {
      best_gap = gap;
      best = zones;
    }
  }
  return best;
}

Instance assemble(const Layout& layout, const std::vector<NodePair>& pairs, const std::vector<bool>& restricted,
                  NodePair endpoints, const GenSpec& spec) {
  Instance in;
  in.nodes = layout.points;
  in.start = endpoints.first;
  in.goal = endpoints.second;
  in.quantization = spec.quantization;
  in.edges.reserve(pairs.size() * 2);

  auto directed = [&](NodeId u, NodeId v, double length, bool allowed) {
    Edge e;
    e.from = u;
    e.to = v;
    e.cost = length;
    e.gen_allowed = allowed;
    const double rise = axis(in.nodes[v], 2) - axis(in.nodes[u], 2);
    double c = spec.alpha * length;
    double z = spec.beta * length;
    if (layout.dim == 3 && rise > 0.0) {
      c *= spec.uphill_factor;
      z *= spec.uphill_factor;
    } else if (layout.dim == 3 && rise < 0.0) {
      c = 0.0;
      z *= spec.glide_z_factor;
      e.gliding = true;
    }
    e.drain = quantize(c, spec.quantization);
    e.recharge = quantize(z, spec.quantization);
    in.edges.push_back(e);
  };
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [a, b] = pairs[i];
    const double length = euclidean_distance(in.nodes[a], in.nodes[b]);
    directed(a, b, length, !restricted[i]);
    directed(b, a, length, !restricted[i]);
  }
  in.finalize();

  const UnconstrainedPath sup = sup_path(in);
  std::int64_t energy = 0;
  for (EdgeId e : sup.edges) energy += in.edges[e].drain.value;
  auto scaled = [&](double frac) { return ResourceUnits{std::llround(frac * static_cast<double>(energy))}; };
  in.bmax = scaled(spec.b_frac);
  in.b0 = in.bmax;
  in.bmin = ResourceUnits{0};
  in.q0 = scaled(spec.q_frac);
  in.startup_drain = scaled(spec.v_frac);
  return in;
}

void record_meta(Instance& in, const GenSpec& spec, std::uint64_t attempt, std::uint64_t infeasible_draws) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  in.meta["family"] = to_string(spec.family);
  in.meta["dim"] = std::to_string(spec.dim);
  in.meta["n_nodes"] = std::to_string(in.node_count());
  if (spec.family == GraphFamily::kEuclidean) in.meta["k_neighbors"] = std::to_string(spec.k_neighbors);
  in.meta["seed"] = std::to_string(spec.seed);
  in.meta["attempt"] = std::to_string(attempt);
  in.meta["infeasible_draws"] = std::to_string(infeasible_draws);
  in.meta["noise_fraction"] = num(noise_fraction(in));
  in.meta["energy_ratios"] = num(spec.alpha) + "," + num(spec.beta) + "," + num(spec.uphill_factor) + "," +
                             num(spec.glide_z_factor);
  in.meta["calibration"] = num(spec.b_frac) + "," + num(spec.q_frac) + "," + num(spec.v_frac);
  in.meta["rng"] = "mt19937_64(splitmix64(seed))";
}

bool solver_feasible(const Instance& in) {
  SolverConfig config;
  config.selection = Selection::kLabel;
  config.heuristic = HeuristicKind::kSup;
  return solve(in, config).status == SolveStatus::kOptimal;
}

// Draws instances for each k in `ks` from one layout until all are connected
// and (optionally) feasible.
std::vector<Instance> draw(const GenSpec& spec, const std::vector<std::size_t>& ks) {
  check_spec(spec);
  std::uint64_t infeasible_draws = 0;
  std::string last_problem;
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    Rng rng(derived_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
    Layout layout;
    std::vector<std::vector<NodePair>> pair_sets;
    if (spec.family == GraphFamily::kEuclidean) {
      layout = random_layout(spec, rng);
      for (std::size_t k : ks) pair_sets.push_back(knn_pairs(layout.points, k));
    } else {
      const auto box = lattice_box(spec);
      layout = lattice_layout(box, spec.dim);
      pair_sets.push_back(lattice_pairs(box, spec.dim));
    }
    const NodePair endpoints = farthest_pair(layout.points);
    bool ok = true;
    for (const auto& pairs : pair_sets) ok = ok && connected(layout.points.size(), pairs, endpoints.first, endpoints.second);
    if (!ok) {
      last_problem = "start and goal are disconnected";
      continue;
    }
    const auto zones = calibrate_zones(layout, pair_sets.front(), spec, rng);

    std::vector<Instance> out;
    for (const auto& pairs : pair_sets) {
      out.push_back(assemble(layout, pairs, restricted_pairs(layout, pairs, zones), endpoints, spec));
    }
    if (spec.require_feasible && !std::all_of(out.begin(), out.end(), solver_feasible)) {
      ++infeasible_draws;
      last_problem = "no feasible schedule";
      continue;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      GenSpec used = spec;
      if (spec.family == GraphFamily::kEuclidean) used.k_neighbors = ks[i];
      record_meta(out[i], used, static_cast<std::uint64_t>(attempt), infeasible_draws);
    }
    return out;
  }
  throw GenerationError("generation failed after " + std::to_string(spec.max_attempts) + " attempts: " + last_problem);
}

}  // namespace

void check_spec(const GenSpec& spec) {
  if (spec.dim != 2 && spec.dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (spec.family == GraphFamily::kLattice && spec.lattice_dims) {
    const auto& d = *spec.lattice_dims;
    const std::size_t n = d[0] * d[1] * (spec.dim == 3 ? d[2] : 1);
    if (n < 2) throw std::invalid_argument("lattice must have at least 2 nodes");
  } else if (spec.n_nodes < 2) {
    throw std::invalid_argument("n_nodes must be at least 2");
  }
  if (spec.k_neighbors < 1) throw std::invalid_argument("k_neighbors must be at least 1");
  if (spec.noise_target < 0.0 || spec.noise_target >= 1.0) throw std::invalid_argument("noise_target must be in [0,1)");
  if (spec.zone_side_min <= 0.0 || spec.zone_side_max > 1.0 || spec.zone_side_min > spec.zone_side_max) {
    throw std::invalid_argument("zone side fractions must satisfy 0 < min <= max <= 1");
  }
  if (spec.alpha < 0 || spec.beta < 0 || spec.uphill_factor < 0 || spec.glide_z_factor < 0) {
    throw std::invalid_argument("energy ratios must be nonnegative");
  }
  if (spec.b_frac < 0 || spec.q_frac < 0 || spec.v_frac < 0) throw std::invalid_argument("calibration fractions must be nonnegative");
  if (spec.quantization <= 0) throw std::invalid_argument("quantization must be positive");
  if (spec.max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
}

Instance gen_euclidean(const GenSpec& spec) {
  if (spec.family != GraphFamily::kEuclidean) throw std::invalid_argument("gen_euclidean needs family euclidean");
  return std::move(draw(spec, {spec.k_neighbors}).front());
}

Instance gen_lattice(const GenSpec& spec) {
  if (spec.family != GraphFamily::kLattice) throw std::invalid_argument("gen_lattice needs family lattice");
  return std::move(draw(spec, {0}).front());
}

Instance generate(const GenSpec& spec) {
  return spec.family == GraphFamily::kEuclidean ? gen_euclidean(spec) : gen_lattice(spec);
}

std::vector<Instance> gen_euclidean_connectivity(const GenSpec& spec, const std::vector<std::size_t>& ks) {
  if (spec.family != GraphFamily::kEuclidean) throw std::invalid_argument("connectivity sweeps need family euclidean");
  if (ks.empty()) throw std::invalid_argument("connectivity sweep needs at least one k");
  for (std::size_t k : ks) {
    if (k < 1) throw std::invalid_argument("k_neighbors must be at least 1");
  }
  return draw(spec, ks);
}

// ---------------------------------------------------------------------------

std::vector<std::vector<NodeId>> k_nearest(const std::vector<NodeCoord>& points, std::size_t k) {
  const std::size_t n = points.size();
  std::vector<std::vector<NodeId>> out(n);
  if (n < 2 || k == 0) return out;
  k = std::min(k, n - 1);
  const int dim = (points.front().z.has_value()) ? 3 : 2;

  std::array<double, 3> lo{}, hi{};
  for (int a = 0; a < dim; ++a) {
    lo[a] = std::numeric_limits<double>::infinity();
    hi[a] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& p : points) {
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], axis(p, a));
      hi[a] = std::max(hi[a], axis(p, a));
    }
  }
  // about two points per cell
  const auto per_axis = static_cast<long>(std::max(1.0, std::floor(std::pow(static_cast<double>(n) / 2.0, 1.0 / dim))));
  std::array<long, 3> cells{1, 1, 1};
  std::array<double, 3> width{1.0, 1.0, 1.0};
  for (int a = 0; a < dim; ++a) {
    cells[a] = per_axis;
    width[a] = std::max((hi[a] - lo[a]) / static_cast<double>(per_axis), 1e-300);
  }
  auto cell_of = [&](const NodeCoord& p, int a) {
    return std::clamp(static_cast<long>((axis(p, a) - lo[a]) / width[a]), 0L, cells[a] - 1);
  };
  auto flat = [&](long x, long y, long z) { return static_cast<std::size_t>(x + cells[0] * (y + cells[1] * z)); };
  std::vector<std::vector<NodeId>> grid(static_cast<std::size_t>(cells[0] * cells[1] * cells[2]));
  for (NodeId i = 0; i < n; ++i) {
    grid[flat(cell_of(points[i], 0), cell_of(points[i], 1), dim == 3 ? cell_of(points[i], 2) : 0)].push_back(i);
  }
  const double min_width = *std::min_element(width.begin(), width.begin() + dim);
  const long max_ring = *std::max_element(cells.begin(), cells.end());

  using Candidate = std::pair<double, NodeId>;  // (squared distance, id); max-heap keeps the k best
  for (NodeId i = 0; i < n; ++i) {
    const NodeCoord& p = points[i];
    const long cx = cell_of(p, 0), cy = cell_of(p, 1), cz = dim == 3 ? cell_of(p, 2) : 0;
    std::priority_queue<Candidate> best;
    for (long r = 0; r <= max_ring; ++r) {
      const long zr = dim == 3 ? r : 0;
      for (long z = cz - zr; z <= cz + zr; ++z) {
        if (z < 0 || z >= cells[2]) continue;
        for (long y = cy - r; y <= cy + r; ++y) {
          if (y < 0 || y >= cells[1]) continue;
          for (long x = cx - r; x <= cx + r; ++x) {
            if (x < 0 || x >= cells[0]) continue;
            const long ring = std::max({std::abs(x - cx), std::abs(y - cy), std::abs(z - cz)});
            if (ring != r) continue;
            for (NodeId j : grid[flat(x, y, z)]) {
              if (j == i) continue;
              const double dx = p.x - points[j].x, dy = p.y - points[j].y;
              const double dz = dim == 3 ? *p.z - *points[j].z : 0.0;
              const Candidate c{dx * dx + dy * dy + dz * dz, j};
              if (best.size() < k) {
                best.push(c);
              } else if (c < best.top()) {
                best.pop();
                best.push(c);
              }
            }
          }
        }
      }
      // anything outside the scanned block is at least r cell widths away
      if (best.size() == k) {
        const double reach = static_cast<double>(r) * min_width;
        if (best.top().first <= reach * reach) break;
      }
    }
    auto& list = out[i];
    list.resize(best.size());
    for (std::size_t pos = best.size(); pos-- > 0;) {
      list[pos] = best.top().second;
      best.pop();
    }
  }
  return out;
}

double noise_fraction(const Instance& in) {
  std::set<std::pair<NodeId, NodeId>> all, restricted;
  for (const Edge& e : in.edges) {
    const auto key = std::minmax(e.from, e.to);
    all.insert(key);
    if (!e.gen_allowed) restricted.insert(key);
  }
  return all.empty() ? 0.0 : static_cast<double>(restricted.size()) / static_cast<double>(all.size());
}

std::size_t undirected_edge_count(const Instance& in) {
  std::set<std::pair<NodeId, NodeId>> all;
  for (const Edge& e : in.edges) all.insert(std::minmax(e.from, e.to));
  return all.size();
}

}  // namespace hfsp
