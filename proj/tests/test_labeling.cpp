#include <doctest.h>

#include "hfsp/heuristics.hpp"
#include "hfsp/labeling.hpp"
#include "hfsp/verify.hpp"
#include "support.hpp"

using namespace hfsp;
using hfsp::testing::make_instance;

namespace {

Label label(double d, std::int64_t b, std::int64_t q, bool on, NodeId node = 0) {
  Label l;
  l.node = node;
  l.cost = d;
  l.battery = ResourceUnits{b};
  l.fuel = ResourceUnits{q};
  l.generator_on = on;
  l.f = d;
  return l;
}

// Single edge 0->1 with D=4, C=3, Z=5; Bmax=20, V=2.
Instance one_edge(bool gen_allowed = true) {
  return make_instance({{0, 0}, {4, 0}}, {{0, 1, 4.0, 3, 5, gen_allowed}}, 0, 1, {8, 0, 20, 12, 2});
}

}  // namespace

TEST_CASE("dominance examples") {
  CHECK(dominates(label(5, 10, 10, true), label(6, 9, 9, false)));
  CHECK_FALSE(dominates(label(5, 10, 10, false), label(4, 12, 8, false)));
  CHECK_FALSE(dominates(label(4, 12, 8, false), label(5, 10, 10, false)));
  CHECK_FALSE(dominates(label(5, 10, 10, true), label(5, 10, 10, true)));
  CHECK(equivalent(label(5, 10, 10, true), label(5, 10, 10, true)));
}

TEST_CASE("dominance is weak in each coordinate and orders on above off") {
  CHECK(dominates(label(5, 10, 10, true), label(5, 10, 10, false)));
  CHECK_FALSE(dominates(label(5, 10, 10, false), label(5, 10, 10, true)));
  CHECK(dominates(label(5, 10, 10, false), label(5, 9, 10, false)));
  CHECK_FALSE(dominates(label(5, 10, 10, false), label(5, 10, 11, false)));
  CHECK_FALSE(equivalent(label(5, 10, 10, false), label(5, 10, 10, true)));
}

TEST_CASE("extend applies drain, startup and recharge") {
  const Instance in = one_edge();
  const Label start = label(10, 8, 12, false);

  const auto on = extend_resources(start, 0, true, in);
  REQUIRE(on);
  CHECK(on->cost == 14.0);
  CHECK(on->battery == ResourceUnits{8});
  CHECK(on->fuel == ResourceUnits{7});
  CHECK(on->generator_on);

  const auto off = extend_resources(start, 0, false, in);
  REQUIRE(off);
  CHECK(off->cost == 14.0);
  CHECK(off->battery == ResourceUnits{5});
  CHECK(off->fuel == ResourceUnits{12});
  CHECK_FALSE(off->generator_on);

  // already running: no startup drain
  const auto running = extend_resources(label(10, 8, 12, true), 0, true, in);
  REQUIRE(running);
  CHECK(running->battery == ResourceUnits{10});
}

TEST_CASE("extend along a gliding edge") {
  const Instance in = make_instance({{0, 0, 1}, {1, 0, 0}}, {{0, 1, 1.0, 0, 2, true, true}}, 0, 1, {5, 0, 20, 3, 4});
  const auto l = extend_resources(label(0, 5, 3, true), 0, true, in);
  REQUIRE(l);
  CHECK(l->battery == ResourceUnits{7});
  CHECK(l->fuel == ResourceUnits{1});

  const Instance capped = make_instance({{0, 0, 1}, {1, 0, 0}}, {{0, 1, 1.0, 0, 2, true, true}}, 0, 1, {5, 0, 6, 3, 4});
  CHECK(extend_resources(label(0, 5, 3, true), 0, true, capped)->battery == ResourceUnits{6});
}

TEST_CASE("extend infeasibility") {
  CHECK_FALSE(extend_resources(label(0, 8, 12, false), 0, true, one_edge(false)));
  CHECK(extend_resources(label(0, 8, 12, false), 0, false, one_edge(false)));

  const Instance in = one_edge();
  // drain and startup are debited before the recharge is credited: 4 - 3 - 2 < 0
  CHECK_FALSE(extend_resources(label(0, 4, 12, false), 0, true, in));
  CHECK(extend_resources(label(0, 5, 12, false), 0, true, in));
  CHECK_FALSE(extend_resources(label(0, 2, 12, false), 0, false, in));
  // fuel would go negative
  CHECK_FALSE(extend_resources(label(0, 8, 4, false), 0, true, in));
  CHECK(extend_resources(label(0, 8, 5, false), 0, true, in));
}

TEST_CASE("extend enforces the simple-path rule") {
  const Instance in = make_instance({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 1.0, 0, 0}, {1, 0, 1.0, 0, 0}, {1, 2, 1.0, 0, 0}},
                                    0, 2, {5, 0, 5, 0, 0});
  LabelPool pool;
  const LabelId s = pool.add(label(0, 5, 0, false, 0));
  const auto at1 = extend(pool, s, 0, false, in);
  REQUIRE(at1);
  CHECK(at1->parent == s);
  const LabelId l1 = pool.add(*at1);
  CHECK(pool.on_path(l1, 0));
  CHECK_FALSE(pool.on_path(l1, 2));
  CHECK_FALSE(extend(pool, l1, 1, false, in));
  CHECK(extend(pool, l1, 2, false, in));
}

TEST_CASE("select_label takes the minimum f with the documented tie-break") {
  OpenList open(4);
  Label a = label(7, 1, 1, false, 0);
  Label b = label(5, 1, 1, false, 1);
  Label c = label(9, 1, 1, false, 2);
  open.insert(a);
  const LabelId ib = open.insert(b);
  open.insert(c);
  CHECK(open.size() == 3);
  CHECK(select_label(open) == ib);
  CHECK(open.size() == 2);

  OpenList ties(2);
  ties.insert(label(5, 3, 1, false, 0));
  const LabelId larger_b = ties.insert(label(5, 4, 0, false, 1));
  CHECK(select_label(ties) == larger_b);

  OpenList fifo(2);
  const LabelId first = fifo.insert(label(5, 3, 1, false, 0));
  fifo.insert(label(5, 3, 1, false, 1));
  CHECK(select_label(fifo) == first);

  OpenList fuel(2);
  fuel.insert(label(5, 3, 1, false, 0));
  const LabelId more_fuel = fuel.insert(label(5, 3, 2, false, 1));
  CHECK(select_label(fuel) == more_fuel);
}

TEST_CASE("select_node returns every open label of the minimum node") {
  OpenList open(3);
  // incomparable labels at node 1
  const LabelId u5 = open.insert(label(5, 1, 1, false, 1));
  const LabelId u8 = open.insert(label(8, 9, 1, false, 1));
  open.insert(label(6, 1, 1, false, 2));
  auto [labels, node] = select_node(open);
  CHECK(node == 1);
  CHECK(labels == std::vector<LabelId>{u5, u8});
  CHECK(open.size() == 1);
  CHECK(open.open_labels(1).empty());
  CHECK(open.efficient(1).size() == 2);  // still kept as closed

  OpenList single(2);
  const LabelId only = single.insert(label(3, 1, 1, false, 0));
  single.insert(label(4, 1, 1, false, 1));
  auto [one, at] = select_node(single);
  CHECK(one == std::vector<LabelId>{only});
  CHECK(at == 0);
}

TEST_CASE("select_node excludes closed labels") {
  OpenList open(2);
  const LabelId early = open.insert(label(1, 1, 1, false, 1));
  CHECK(select_label(open) == early);  // now closed
  const LabelId later = open.insert(label(2, 5, 1, false, 1));
  auto [labels, node] = select_node(open);
  CHECK(node == 1);
  CHECK(labels == std::vector<LabelId>{later});
}

TEST_CASE("open list pruning against open and closed labels") {
  OpenList open(2);
  const LabelId a = open.insert(label(5, 5, 5, false, 1));
  CHECK(open.is_dominated(label(6, 4, 4, false, 1)));
  CHECK(open.is_dominated(label(5, 5, 5, false, 1)));  // equivalent: newer discarded
  CHECK_FALSE(open.is_dominated(label(4, 4, 4, false, 1)));
  std::size_t removed = 0;
  open.insert(label(4, 6, 6, false, 1), &removed);
  CHECK(removed == 1);
  CHECK_FALSE(open.is_open(a));
  CHECK(open.size() == 1);

  select_label(open);  // close the survivor
  CHECK(open.is_dominated(label(9, 1, 1, false, 1)));
}

TEST_CASE("triangle: the battery forces the detour") {
  const Instance in = hfsp::testing::load_fixture("triangle.json");
  for (Selection sel : {Selection::kLabel, Selection::kNode}) {
    for (HeuristicKind h : {HeuristicKind::kSup, HeuristicKind::kSld, HeuristicKind::kZero}) {
      SolverConfig c;
      c.selection = sel;
      c.heuristic = h;
      const SolveResult r = solve(in, c);
      REQUIRE(r.status == SolveStatus::kOptimal);
      CHECK(r.solution->cost == 12.0);
      CHECK(r.solution->path == std::vector<NodeId>{0, 1, 2});
      CHECK(r.solution->battery == std::vector<ResourceUnits>{ResourceUnits{8000}, ResourceUnits{5000}, ResourceUnits{2000}});
      CHECK_FALSE(check_solution(in, *r.solution));
    }
  }
}

TEST_CASE("infeasible instance") {
  const Instance in = hfsp::testing::load_fixture("infeasible.json");
  const SolveResult r = solve(in, SolverConfig{});
  CHECK(r.status == SolveStatus::kInfeasible);
  CHECK_FALSE(r.solution);
  CHECK(r.stats.labels_created >= 1);
}

TEST_CASE("lower bound is attained when the SUP path flies with the generator off") {
  const Instance in = hfsp::testing::load_fixture("sup_attained.json");
  const SolveResult r = solve(in, SolverConfig{});
  REQUIRE(r.solution);
  CHECK(r.solution->cost == sup_table(in)[in.start]);
  CHECK(r.solution->path == sup_path(in).path);
}

TEST_CASE("extract_path") {
  const Instance in = make_instance({{0, 0}, {4, 0}}, {{0, 1, 4.0, 1, 1}}, 0, 1, {5, 0, 5, 5, 0});
  LabelPool pool;
  const LabelId s = pool.add(label(0, 5, 5, false, 0));
  const Solution at_start = extract_path(pool, s, in);
  CHECK(at_start.path == std::vector<NodeId>{0});
  CHECK(at_start.gen.empty());
  CHECK(at_start.cost == 0.0);

  const LabelId u = pool.add(*extend(pool, s, 0, false, in));
  const Solution one = extract_path(pool, u, in);
  CHECK(one.path == std::vector<NodeId>{0, 1});
  CHECK(one.gen == std::vector<bool>{false});
  CHECK(one.cost == 4.0);
  CHECK(one.battery.back() == pool[u].battery);
  CHECK(one.fuel.back() == pool[u].fuel);
}

TEST_CASE("Q0 = 0 admits no generator use") {
  std::size_t seen = 0;
  for (const Instance& in : hfsp::testing::small_suite(60, 7000)) {
    if (in.q0.value != 0) continue;
    const SolveResult r = solve(in, SolverConfig{});
    const OracleResult o = oracle_solve(in);
    CHECK(r.solution.has_value() == o.feasible);
    if (!r.solution) continue;
    ++seen;
    CHECK(r.solution->cost == o.optimal_cost);
    for (bool g : r.solution->gen) CHECK_FALSE(g);
  }
  CHECK(seen > 0);
}

TEST_CASE("solver agrees with the oracle and respects the label bound") {
  std::size_t feasible = 0;
  for (const Instance& in : hfsp::testing::small_suite(60, 1)) {
    const OracleResult o = oracle_solve(in);
    feasible += o.feasible;
    const double bound = 2.0 * static_cast<double>(in.bmax.value - in.bmin.value + 1) * static_cast<double>(in.q0.value + 1);
    for (Selection sel : {Selection::kLabel, Selection::kNode}) {
      for (HeuristicKind h : {HeuristicKind::kSup, HeuristicKind::kSld, HeuristicKind::kZero}) {
        SolverConfig c;
        c.selection = sel;
        c.heuristic = h;
        const SolveResult r = solve(in, c);
        REQUIRE(r.status != SolveStatus::kLimitReached);
        CHECK(r.solution.has_value() == o.feasible);
        if (r.solution) {
          CHECK(r.solution->cost == o.optimal_cost);
          CHECK_FALSE(check_solution(in, *r.solution));
          CHECK(r.solution->cost >= sup_table(in)[in.start]);
        }
        CHECK(r.stats.labels_treated <= r.stats.labels_created);
        for (std::uint32_t n : r.stats.created_per_node) CHECK(static_cast<double>(n) <= bound);
      }
    }
  }
  CHECK(feasible >= 30);
}

TEST_CASE("SUP treats no more labels than ZERO") {
  for (const Instance& in : hfsp::testing::small_suite(40, 500)) {
    for (Selection sel : {Selection::kLabel, Selection::kNode}) {
      SolverConfig sup;
      sup.selection = sel;
      SolverConfig zero = sup;
      zero.heuristic = HeuristicKind::kZero;
      const SolveResult a = solve(in, sup);
      const SolveResult b = solve(in, zero);
      CHECK(a.solution.has_value() == b.solution.has_value());
      if (a.solution) CHECK(a.solution->cost == b.solution->cost);
      CHECK(a.stats.labels_treated <= b.stats.labels_treated);
    }
  }
}

TEST_CASE("solve is deterministic") {
  GenSpec s;
  s.n_nodes = 300;
  s.seed = 9;
  const Instance in = generate(s);
  for (Selection sel : {Selection::kLabel, Selection::kNode}) {
    SolverConfig c;
    c.selection = sel;
    const SolveResult a = solve(in, c);
    const SolveResult b = solve(in, c);
    REQUIRE(a.solution);
    CHECK(a.solution->path == b.solution->path);
    CHECK(a.solution->gen == b.solution->gen);
    CHECK(a.stats.labels_created == b.stats.labels_created);
    CHECK(a.stats.labels_treated == b.stats.labels_treated);
    CHECK(a.stats.labels_pruned == b.stats.labels_pruned);
    CHECK(a.stats.created_per_node == b.stats.created_per_node);
  }
}

TEST_CASE("limits stop the search with a valid lower bound") {
  GenSpec s;
  s.n_nodes = 500;
  s.seed = 4;
  const Instance in = generate(s);
  const SolveResult full = solve(in, SolverConfig{});
  REQUIRE(full.solution);
  SolverConfig c;
  c.max_labels = 50;
  const SolveResult cut = solve(in, c);
  CHECK(cut.status == SolveStatus::kLimitReached);
  CHECK_FALSE(cut.solution);
  CHECK(cut.bound <= full.solution->cost);

  SolverConfig timed;
  timed.max_seconds = 0.0;
  const SolveResult t = solve(in, timed);
  CHECK(t.status == SolveStatus::kLimitReached);
}

TEST_CASE("elementary dominance keeps the optimum that path-blind dominance loses") {
  const Instance in = hfsp::testing::load_fixture("dominance_trap.json");
  const OracleResult o = oracle_solve(in);
  REQUIRE(o.feasible);
  CHECK(o.optimal_cost == 4.5);
  for (Selection sel : {Selection::kLabel, Selection::kNode}) {
    SolverConfig c;
    c.selection = sel;
    c.elementary = true;
    const SolveResult r = solve(in, c);
    REQUIRE(r.solution);
    CHECK(r.solution->cost == 4.5);
    CHECK(r.solution->path == std::vector<NodeId>{0, 2, 1, 3});
  }
}

TEST_CASE("elementary dominance agrees with the oracle") {
  for (const Instance& in : hfsp::testing::small_suite(30, 900)) {
    const OracleResult o = oracle_solve(in);
    SolverConfig c;
    c.elementary = true;
    const SolveResult r = solve(in, c);
    CHECK(r.solution.has_value() == o.feasible);
    if (r.solution) CHECK(r.solution->cost == o.optimal_cost);
  }
}

TEST_CASE("selection names") {
  CHECK(parse_selection("label") == Selection::kLabel);
  CHECK(parse_selection("node") == Selection::kNode);
  CHECK_THROWS(parse_selection("edge"));
  CHECK(to_string(SolveStatus::kLimitReached) == "limit");
}
