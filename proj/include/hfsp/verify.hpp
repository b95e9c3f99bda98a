#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hfsp/instance.hpp"

namespace hfsp {

// ---------------------------------------------------------------------------
// Exhaustive oracle

struct OracleBudget {
  std::size_t max_nodes = 12;
  std::uint64_t max_states = 50'000'000;  // DFS states (partial path, partial schedule)
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  bool feasible = false;
  double optimal_cost = 0.0;
  std::optional<Solution> solution;
  /// Complete feasible (path, generator pattern) pairs reaching the goal.
  std::uint64_t enumerated_count = 0;
  std::uint64_t states_visited = 0;
};

/// Depth-first enumeration of every simple start->goal path under every
/// generator on/off pattern. Prefixes are pruned on infeasibility only.
/// Throws BudgetExceeded when the instance is too large.
OracleResult oracle_solve(const Instance& instance, const OracleBudget& budget = {});

// ---------------------------------------------------------------------------
// MILP model and LP text format

enum class RowSense { kLe, kGe, kEq };

struct LinearRow {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;
};

struct VariableBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

/// A linear model as written to / read from LP text. Variables not listed in
/// `bounds` default to [0, +inf).
struct MilpModel {
  std::vector<std::pair<std::string, double>> objective;  // minimized
  std::vector<LinearRow> rows;
  std::map<std::string, VariableBounds> bounds;
  std::vector<std::string> binaries;
};

enum class StartupForm {
  /// w_uv >= g_uv - sum_k g_ku, drain -V*w_uv: startup paid on off->on switches only.
  kCorrected,
  /// -V*(1 - sum_k g_ku) on both battery recurrences, as originally stated.
  kLiteral,
};

/// Row naming: deg_S, deg_T, deg_<i>, batt_le_<u>_<v>, fuel_le_<u>_<v>,
/// gx_<u>_<v>; corrected form adds startup_<u>_<v>, batt_pre_<u>_<v> and
/// indeg_<i>; literal form adds batt_ge_<u>_<v>. Variables: x_<u>_<v>,
/// g_<u>_<v>, w_<u>_<v> (corrected only), b_<i>, q_<i>. Resources are
/// expressed in integer resource units.
MilpModel build_milp(const Instance& instance, StartupForm form = StartupForm::kCorrected);

std::string to_lp_text(const MilpModel& model, std::string_view comment = {});

class LpParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads the LP subset written by to_lp_text().
MilpModel parse_lp_text(std::string_view text);

inline std::string export_milp(const Instance& instance, StartupForm form = StartupForm::kCorrected) {
  return to_lp_text(build_milp(instance, form));
}

using Assignment = std::map<std::string, double>;

/// The MILP assignment encoding `solution`: x and g on path edges, node
/// battery and fuel from the traces, startup indicators w. Nodes off the path
/// get b = Bmin and q = 0.
Assignment to_assignment(const Instance& instance, const Solution& solution);

struct RowViolation {
  std::string row;
  double amount = 0.0;  // how far the row is from being satisfied
};

/// Substitutes `values` into every row, bound and integrality requirement.
/// Missing variables count as 0. Returns all violations beyond `tolerance`.
std::vector<RowViolation> check_assignment(const MilpModel& model, const Assignment& values, double tolerance = 1e-9);

double objective_value(const MilpModel& model, const Assignment& values);

class ImportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses whitespace-separated `name value` lines (blank lines and lines
/// starting with '#' are ignored).
Assignment parse_assignment(std::string_view text);

/// Rebuilds the path and generator schedule from x and g values, replays the
/// traces, and checks feasibility. Throws ImportError on fractional values,
/// a missing start edge, a broken path, extra x-support ("subtour detected")
/// or an infeasible plan.
Solution import_milp_solution(const Instance& instance, std::string_view solver_output);

}  // namespace hfsp
