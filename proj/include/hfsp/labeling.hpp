#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "hfsp/heuristics.hpp"
#include "hfsp/instance.hpp"

namespace hfsp {

using LabelId = std::uint32_t;
inline constexpr LabelId kNoLabel = std::numeric_limits<LabelId>::max();

/// State of one partial path ending at `node`.
struct Label {
  NodeId node = kNoNode;
  double cost = 0.0;  // cost to arrive
  ResourceUnits battery;
  ResourceUnits fuel;
  /// Generator state on the incoming edge; off for the start label.
  bool generator_on = false;
  LabelId parent = kNoLabel;
  EdgeId via = kNoEdge;
  double f = 0.0;  // cost + heuristic estimate, cached at insertion
};

/// Weak Pareto dominance on (cost, battery, fuel, generator state) with
/// on > off. False for labels that are equal in all four; see equivalent().
bool dominates(const Label& a, const Label& b);
bool equivalent(const Label& a, const Label& b);

/// Resource update for one edge, ignoring path structure. nullopt when the
/// generator would run on a noise-restricted edge, when the battery balance
/// after drain and startup falls below Bmin, or when fuel would go negative.
/// The returned label has no parent and f == cost.
std::optional<Label> extend_resources(const Label& label, EdgeId edge, bool gen_on, const Instance& instance);

/// Labels by id. Ids are stable, so parent links stay valid while labels are
/// pruned from the search.
class LabelPool {
 public:
  LabelId add(const Label& label);
  const Label& operator[](LabelId id) const { return labels_[id]; }
  std::size_t size() const { return labels_.size(); }
  /// True if `node` is visited by the path of `id` (including its own node).
  bool on_path(LabelId id, NodeId node) const;
  void reserve(std::size_t n) { labels_.reserve(n); }

 private:
  std::vector<Label> labels_;
};

/// extend_resources() plus the simple-path rule: infeasible if the edge head
/// already lies on the label's path.
std::optional<Label> extend(const LabelPool& pool, LabelId label, EdgeId edge, bool gen_on, const Instance& instance);

/// Priority queue of open labels keyed by f (ties: larger battery, larger fuel,
/// then insertion order) together with each node's efficient labels, open and
/// closed. Every label kept in a node's list is undominated within that list.
class OpenList {
 public:
  /// With `elementary`, a label only dominates labels whose path visits every
  /// node of its own path.
  explicit OpenList(std::size_t node_count, bool elementary = false);

  bool empty() const { return open_count_ == 0; }
  std::size_t size() const { return open_count_; }
  std::size_t peak_size() const { return peak_open_; }

  const LabelPool& pool() const { return pool_; }
  const Label& operator[](LabelId id) const { return pool_[id]; }
  bool is_open(LabelId id) const { return status_[id] == Status::kOpen; }

  /// Open and closed efficient labels currently kept for `node`.
  const std::vector<LabelId>& efficient(NodeId node) const { return per_node_[node]; }
  std::vector<LabelId> open_labels(NodeId node) const;

  /// True if a kept label at the same node dominates or equals `candidate`.
  bool is_dominated(const Label& candidate) const;

  /// Adds `label` as open, dropping every kept label at its node that it
  /// dominates. Returns the new id; `removed` receives the number dropped.
  LabelId insert(const Label& label, std::size_t* removed = nullptr);

  /// Removes and returns the minimum open label.
  LabelId pop_min();
  /// Minimum open label without removing it.
  LabelId peek_min();
  /// Removes every open label of `node`, returned in ascending priority order.
  std::vector<LabelId> take_node(NodeId node);

  /// Priority order used by the queue: true if `a` is served before `b`.
  bool precedes(LabelId a, LabelId b) const;

 private:
  enum class Status : std::uint8_t { kOpen, kClosed, kPruned };

  struct HeapEntry {
    double f;
    std::int64_t battery;
    std::int64_t fuel;
    LabelId id;
  };
  struct HeapOrder {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const;
  };

  void drop_stale();
  bool visits_subset(const Label& inner, const Label& outer) const;
  bool prunes(const Label& a, const Label& b) const;

  bool elementary_;
  LabelPool pool_;
  std::vector<Status> status_;
  std::vector<std::vector<LabelId>> per_node_;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap_;
  std::size_t open_count_ = 0;
  std::size_t peak_open_ = 0;
};

enum class Selection { kLabel, kNode };

std::string to_string(Selection s);
Selection parse_selection(const std::string& name);

/// Treat the single minimum-f open label.
LabelId select_label(OpenList& open);

/// Treat every open label of the node that owns the minimum-f label.
std::pair<std::vector<LabelId>, NodeId> select_node(OpenList& open);

struct SolverConfig {
  Selection selection = Selection::kLabel;
  HeuristicKind heuristic = HeuristicKind::kSup;
  std::optional<std::uint64_t> max_labels;
  std::optional<double> max_seconds;
  /// Restrict dominance to labels with visited-node subsets. Exact on every
  /// instance; the default rule can prune the optimum on some directed graphs
  /// where a dominating label's path blocks the only feasible continuation.
  bool elementary = false;
};

struct SolveStats {
  std::uint64_t labels_created = 0;   // inserted into the open list, start label included
  std::uint64_t labels_treated = 0;
  std::uint64_t labels_pruned = 0;    // rejected or removed by dominance / equivalence
  std::uint64_t labels_infeasible = 0;
  std::uint64_t peak_open = 0;
  double wall_time = 0.0;       // seconds, search loop only
  double heuristic_time = 0.0;  // seconds spent building the heuristic table
  std::vector<std::uint32_t> created_per_node;
};

enum class SolveStatus { kOptimal, kInfeasible, kLimitReached };

std::string to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Solution> solution;
  SolveStats stats;
  /// Smallest open f when a limit stops the search; a lower bound on the optimum.
  double bound = 0.0;
};

/// Exact label-correcting search. The instance must be finalized and valid.
SolveResult solve(const Instance& instance, const SolverConfig& config);

/// As above with a precomputed heuristic (config.heuristic is ignored).
SolveResult solve(const Instance& instance, const SolverConfig& config, const HeuristicTable& heuristic);

/// Rebuilds the path and generator schedule of `label` and replays its traces.
Solution extract_path(const LabelPool& pool, LabelId label, const Instance& instance);

}  // namespace hfsp
