#include <algorithm>

#include "hfsp/verify.hpp"

namespace hfsp {

namespace {

class Enumerator {
 public:
  Enumerator(const Instance& in, const OracleBudget& budget)
      : in_(in), budget_(budget), visited_(in.node_count(), false) {}

  OracleResult run() {
    visited_[in_.start] = true;
    path_.push_back(in_.start);
    battery_.push_back(in_.b0.value);
    fuel_.push_back(in_.q0.value);
    descend(0.0, false);
    return std::move(result_);
  }

 private:
  void descend(double cost, bool generator_on) {
    if (++result_.states_visited > budget_.max_states) {
      throw BudgetExceeded("oracle state budget exceeded");
    }
    const NodeId here = path_.back();
    if (here == in_.goal) {
      ++result_.enumerated_count;
      if (!result_.feasible || cost < result_.optimal_cost) {
        result_.feasible = true;
        result_.optimal_cost = cost;
        result_.solution = Solution{path_, gen_, cost, {}, {}};
        for (auto b : battery_) result_.solution->battery.emplace_back(b);
        for (auto f : fuel_) result_.solution->fuel.emplace_back(f);
      }
      return;
    }

    const std::int64_t battery = battery_.back();
    const std::int64_t fuel = fuel_.back();
    for (const Edge& e : in_.edges) {
      if (e.from != here || visited_[e.to]) continue;
      for (bool on : {false, true}) {
        if (on && !e.gen_allowed) continue;
        // debit drain and startup, check, then credit recharge
        std::int64_t b = battery - e.drain.value - ((on && !generator_on) ? in_.startup_drain.value : 0);
        if (b < in_.bmin.value) continue;
        std::int64_t q = fuel;
        if (on) {
          b += e.recharge.value;
          q -= e.recharge.value;
        }
        if (q < 0) continue;
        b = std::min(b, in_.bmax.value);

        visited_[e.to] = true;
        path_.push_back(e.to);
        gen_.push_back(on);
        battery_.push_back(b);
        fuel_.push_back(q);
        descend(cost + e.cost, on);
        fuel_.pop_back();
        battery_.pop_back();
        gen_.pop_back();
        path_.pop_back();
        visited_[e.to] = false;
      }
    }
  }

  const Instance& in_;
  OracleBudget budget_;
  std::vector<bool> visited_;
  std::vector<NodeId> path_;
  std::vector<bool> gen_;
  std::vector<std::int64_t> battery_;
  std::vector<std::int64_t> fuel_;
  OracleResult result_;
};

}  // namespace

OracleResult oracle_solve(const Instance& instance, const OracleBudget& budget) {
  if (instance.node_count() > budget.max_nodes) {
    throw BudgetExceeded("instance has " + std::to_string(instance.node_count()) + " nodes; oracle limit is " +
                         std::to_string(budget.max_nodes));
  }
  return Enumerator(instance, budget).run();
}

}  // namespace hfsp
