#include "hfsp/labeling.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace hfsp {

bool equivalent(const Label& a, const Label& b) {
  return a.cost == b.cost && a.battery == b.battery && a.fuel == b.fuel && a.generator_on == b.generator_on;
}

bool dominates(const Label& a, const Label& b) {
  return a.cost <= b.cost && a.battery >= b.battery && a.fuel >= b.fuel && a.generator_on >= b.generator_on &&
         !equivalent(a, b);
}

std::optional<Label> extend_resources(const Label& label, EdgeId edge_id, bool gen_on, const Instance& in) {
  const Edge& edge = in.edges[edge_id];
  if (gen_on && !edge.gen_allowed) return std::nullopt;

  ResourceUnits battery = label.battery - edge.drain;
  if (gen_on && !label.generator_on) battery -= in.startup_drain;
  if (battery < in.bmin) return std::nullopt;

  ResourceUnits fuel = label.fuel;
  if (gen_on) {
    battery += edge.recharge;
    fuel -= edge.recharge;
    if (fuel.value < 0) return std::nullopt;
  }
  battery = std::min(battery, in.bmax);

  Label next;
  next.node = edge.to;
  next.cost = label.cost + edge.cost;
  next.battery = battery;
  next.fuel = fuel;
  next.generator_on = gen_on;
  next.via = edge_id;
  next.f = next.cost;
  return next;
}

LabelId LabelPool::add(const Label& label) {
  if (labels_.size() >= kNoLabel) throw std::length_error("label pool exhausted");
  labels_.push_back(label);
  return static_cast<LabelId>(labels_.size() - 1);
}

bool LabelPool::on_path(LabelId id, NodeId node) const {
  for (LabelId cur = id; cur != kNoLabel; cur = labels_[cur].parent) {
    if (labels_[cur].node == node) return true;
  }
  return false;
}

std::optional<Label> extend(const LabelPool& pool, LabelId id, EdgeId edge, bool gen_on, const Instance& in) {
  if (pool.on_path(id, in.edges[edge].to)) return std::nullopt;
  auto next = extend_resources(pool[id], edge, gen_on, in);
  if (next) next->parent = id;
  return next;
}

// ---------------------------------------------------------------------------

bool OpenList::HeapOrder::operator()(const HeapEntry& a, const HeapEntry& b) const {
  // true when `a` is served after `b`
  if (a.f != b.f) return a.f > b.f;
  if (a.battery != b.battery) return a.battery < b.battery;
  if (a.fuel != b.fuel) return a.fuel < b.fuel;
  return a.id > b.id;
}

OpenList::OpenList(std::size_t node_count, bool elementary) : elementary_(elementary), per_node_(node_count) {}

bool OpenList::visits_subset(const Label& inner, const Label& outer) const {
  auto covered = [&](NodeId n) {
    return n == outer.node || (outer.parent != kNoLabel && pool_.on_path(outer.parent, n));
  };
  if (!covered(inner.node)) return false;
  for (LabelId id = inner.parent; id != kNoLabel; id = pool_[id].parent) {
    if (!covered(pool_[id].node)) return false;
  }
  return true;
}

// `a` removes `b`: dominance or equivalence, plus path containment when elementary
bool OpenList::prunes(const Label& a, const Label& b) const {
  if (!dominates(a, b) && !equivalent(a, b)) return false;
  return !elementary_ || visits_subset(a, b);
}

bool OpenList::precedes(LabelId a, LabelId b) const {
  const Label& la = pool_[a];
  const Label& lb = pool_[b];
  return HeapOrder{}({lb.f, lb.battery.value, lb.fuel.value, b}, {la.f, la.battery.value, la.fuel.value, a});
}

bool OpenList::is_dominated(const Label& candidate) const {
  for (LabelId id : per_node_[candidate.node]) {
    if (prunes(pool_[id], candidate)) return true;
  }
  return false;
}

LabelId OpenList::insert(const Label& label, std::size_t* removed) {
  auto& list = per_node_[label.node];
  std::size_t dropped = 0;
  std::erase_if(list, [&](LabelId id) {
    if (!dominates(label, pool_[id]) || (elementary_ && !visits_subset(label, pool_[id]))) return false;
    if (status_[id] == Status::kOpen) {
      status_[id] = Status::kPruned;
      --open_count_;
    }
    ++dropped;
    return true;
  });
  if (removed) *removed = dropped;

  const LabelId id = pool_.add(label);
  status_.push_back(Status::kOpen);
  list.push_back(id);
  heap_.push({label.f, label.battery.value, label.fuel.value, id});
  ++open_count_;
  peak_open_ = std::max(peak_open_, open_count_);
  return id;
}

void OpenList::drop_stale() {
  while (!heap_.empty() && status_[heap_.top().id] != Status::kOpen) heap_.pop();
}

LabelId OpenList::peek_min() {
  drop_stale();
  if (heap_.empty()) throw std::logic_error("open list is empty");
  return heap_.top().id;
}

LabelId OpenList::pop_min() {
  const LabelId id = peek_min();
  heap_.pop();
  status_[id] = Status::kClosed;
  --open_count_;
  return id;
}

std::vector<LabelId> OpenList::open_labels(NodeId node) const {
  std::vector<LabelId> out;
  for (LabelId id : per_node_[node]) {
    if (status_[id] == Status::kOpen) out.push_back(id);
  }
  return out;
}

std::vector<LabelId> OpenList::take_node(NodeId node) {
  std::vector<LabelId> out = open_labels(node);
  std::sort(out.begin(), out.end(), [this](LabelId a, LabelId b) { return precedes(a, b); });
  for (LabelId id : out) status_[id] = Status::kClosed;
  open_count_ -= out.size();
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Selection s) { return s == Selection::kLabel ? "label" : "node"; }

Selection parse_selection(const std::string& name) {
  if (name == "label") return Selection::kLabel;
  if (name == "node") return Selection::kNode;
  throw std::invalid_argument("unknown selection '" + name + "' (expected label or node)");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kLimitReached: return "limit";
  }
  return "?";
}

LabelId select_label(OpenList& open) { return open.pop_min(); }

std::pair<std::vector<LabelId>, NodeId> select_node(OpenList& open) {
  const NodeId node = open[open.peek_min()].node;
  return {open.take_node(node), node};
}

Solution extract_path(const LabelPool& pool, LabelId id, const Instance& in) {
  std::vector<LabelId> chain;
  for (LabelId cur = id; cur != kNoLabel; cur = pool[cur].parent) chain.push_back(cur);
  std::reverse(chain.begin(), chain.end());

  Solution sol;
  Label state = pool[chain.front()];
  sol.path.push_back(state.node);
  sol.battery.push_back(state.battery);
  sol.fuel.push_back(state.fuel);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const Label& stored = pool[chain[i]];
    auto next = extend_resources(state, stored.via, stored.generator_on, in);
    if (!next || next->battery != stored.battery || next->fuel != stored.fuel || next->node != stored.node) {
      throw std::logic_error("label chain does not replay");
    }
    state = *next;
    sol.path.push_back(state.node);
    sol.gen.push_back(state.generator_on);
    sol.battery.push_back(state.battery);
    sol.fuel.push_back(state.fuel);
  }
  sol.cost = state.cost;
  return sol;
}

namespace {

// Heuristic values are sums of doubles taken in a different order than the
// label costs they are compared against. Shrinking them by a relative margin
// far above accumulated rounding keeps f from overshooting the true optimum.
constexpr double kHeuristicShrink = 1.0 - 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

SolveResult solve(const Instance& in, const SolverConfig& config) {
  const auto t0 = Clock::now();
  const HeuristicTable table = make_heuristic(in, config.heuristic);
  const double heuristic_time = seconds_since(t0);
  SolveResult result = solve(in, config, table);
  result.stats.heuristic_time = heuristic_time;
  return result;
}

SolveResult solve(const Instance& in, const SolverConfig& config, const HeuristicTable& heuristic) {
  const auto t0 = Clock::now();
  SolveResult result;
  SolveStats& stats = result.stats;
  stats.created_per_node.assign(in.node_count(), 0);

  auto finish = [&](SolveStatus status) {
    result.status = status;
    stats.wall_time = std::max(seconds_since(t0), 1e-9);
    return result;
  };

  if (heuristic[in.start] == kUnreachable) return finish(SolveStatus::kInfeasible);

  OpenList open(in.node_count(), config.elementary);
  Label start;
  start.node = in.start;
  start.battery = in.b0;
  start.fuel = in.q0;
  start.f = heuristic[in.start] * kHeuristicShrink;
  open.insert(start);
  stats.labels_created = 1;
  stats.created_per_node[in.start] = 1;

  std::vector<LabelId> batch;
  std::uint64_t iteration = 0;
  while (!open.empty()) {
    if (config.max_labels && stats.labels_created > *config.max_labels) {
      result.bound = open[open.peek_min()].f;
      stats.peak_open = open.peak_size();
      return finish(SolveStatus::kLimitReached);
    }
    if (config.max_seconds && (++iteration & 255u) == 0 && seconds_since(t0) > *config.max_seconds) {
      result.bound = open[open.peek_min()].f;
      stats.peak_open = open.peak_size();
      return finish(SolveStatus::kLimitReached);
    }

    NodeId node;
    if (config.selection == Selection::kLabel) {
      batch.assign(1, select_label(open));
      node = open[batch.front()].node;
    } else {
      std::tie(batch, node) = select_node(open);
    }

    if (node == in.goal) {
      // batch is in priority order, so the first label has minimum f == cost
      result.solution = extract_path(open.pool(), batch.front(), in);
      result.bound = result.solution->cost;
      stats.peak_open = open.peak_size();
      return finish(SolveStatus::kOptimal);
    }

    for (LabelId id : batch) {
      ++stats.labels_treated;
      for (EdgeId e : in.out_edges(node)) {
        const NodeId head = in.edges[e].to;
        const double h = heuristic[head];
        for (bool gen_on : {true, false}) {
          auto next = extend_resources(open[id], e, gen_on, in);
          if (!next || h == kUnreachable) {
            ++stats.labels_infeasible;
            continue;
          }
          next->parent = id;
          next->f = next->cost + h * kHeuristicShrink;
          if (open.is_dominated(*next)) {
            ++stats.labels_pruned;
            continue;
          }
          if (open.pool().on_path(id, head)) {
            ++stats.labels_infeasible;
            continue;
          }
          std::size_t removed = 0;
          open.insert(*next, &removed);
          stats.labels_pruned += removed;
          ++stats.labels_created;
          ++stats.created_per_node[head];
        }
      }
    }
  }

  stats.peak_open = open.peak_size();
  return finish(SolveStatus::kInfeasible);
}

}  // namespace hfsp
