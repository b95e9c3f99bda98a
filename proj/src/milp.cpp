#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "hfsp/verify.hpp"

namespace hfsp {

namespace {

std::string edge_suffix(const Edge& e) { return std::to_string(e.from) + "_" + std::to_string(e.to); }
std::string x_var(const Edge& e) { return "x_" + edge_suffix(e); }
std::string g_var(const Edge& e) { return "g_" + edge_suffix(e); }
std::string w_var(const Edge& e) { return "w_" + edge_suffix(e); }
std::string b_var(NodeId n) { return "b_" + std::to_string(n); }
std::string q_var(NodeId n) { return "q_" + std::to_string(n); }

}  // namespace

MilpModel build_milp(const Instance& in, StartupForm form) {
  MilpModel m;
  const double bmin = static_cast<double>(in.bmin.value);
  const double bmax = static_cast<double>(in.bmax.value);
  const double v = static_cast<double>(in.startup_drain.value);
  const double q0 = static_cast<double>(in.q0.value);

  std::int64_t max_cz = 0;
  std::int64_t max_z = 0;
  for (const Edge& e : in.edges) {
    max_cz = std::max(max_cz, e.drain.value + e.recharge.value);
    max_z = std::max(max_z, e.recharge.value);
  }
  const double big_m_battery = (bmax - bmin) + v + static_cast<double>(max_cz);
  const double big_m_fuel = q0 + static_cast<double>(max_z);

  for (const Edge& e : in.edges) m.objective.emplace_back(x_var(e), e.cost);

  // degree constraints
  {
    LinearRow out_of_start{"deg_S", {}, RowSense::kEq, 1.0};
    for (EdgeId id : in.out_edges(in.start)) out_of_start.terms.emplace_back(x_var(in.edges[id]), 1.0);
    m.rows.push_back(std::move(out_of_start));
    LinearRow into_goal{"deg_T", {}, RowSense::kEq, 1.0};
    for (EdgeId id : in.in_edges(in.goal)) into_goal.terms.emplace_back(x_var(in.edges[id]), 1.0);
    m.rows.push_back(std::move(into_goal));
    for (NodeId i = 0; i < in.node_count(); ++i) {
      if (i == in.start || i == in.goal) continue;
      LinearRow balance{"deg_" + std::to_string(i), {}, RowSense::kEq, 0.0};
      for (EdgeId id : in.out_edges(i)) balance.terms.emplace_back(x_var(in.edges[id]), 1.0);
      for (EdgeId id : in.in_edges(i)) balance.terms.emplace_back(x_var(in.edges[id]), -1.0);
      if (!balance.terms.empty()) m.rows.push_back(std::move(balance));
    }
  }
  if (form == StartupForm::kCorrected) {
    // at most one entry per node (none into the start): rules out figure-eight walks
    for (NodeId i = 0; i < in.node_count(); ++i) {
      LinearRow indeg{"indeg_" + std::to_string(i), {}, RowSense::kLe, i == in.start ? 0.0 : 1.0};
      for (EdgeId id : in.in_edges(i)) indeg.terms.emplace_back(x_var(in.edges[id]), 1.0);
      if (!indeg.terms.empty()) m.rows.push_back(std::move(indeg));
    }
  }

  for (const Edge& e : in.edges) {
    const std::string x = x_var(e), g = g_var(e), w = w_var(e);
    const std::string bu = b_var(e.from), bv = b_var(e.to);
    const std::string qu = q_var(e.from), qv = q_var(e.to);
    const double c = static_cast<double>(e.drain.value);
    const double z = static_cast<double>(e.recharge.value);
    const std::string sfx = edge_suffix(e);

    // generator on the edges entering the tail, excluding the reverse edge
    std::vector<std::string> incoming_gen;
    for (EdgeId id : in.in_edges(e.from)) {
      if (in.edges[id].from != e.to) incoming_gen.push_back(g_var(in.edges[id]));
    }

    if (form == StartupForm::kCorrected) {
      // b_v <= b_u - C + Z g - V w + M (1 - x)
      m.rows.push_back({"batt_le_" + sfx, {{bv, 1.0}, {bu, -1.0}, {g, -z}, {w, v}, {x, big_m_battery}},
                        RowSense::kLe, big_m_battery - c});
      // b_u - C - V w >= Bmin - M (1 - x): the drained balance before recharge
      m.rows.push_back({"batt_pre_" + sfx, {{bu, 1.0}, {w, -v}, {x, -big_m_battery}}, RowSense::kGe,
                        bmin + c - big_m_battery});
      // w >= g - sum_k g_ku
      LinearRow startup{"startup_" + sfx, {{w, 1.0}, {g, -1.0}}, RowSense::kGe, 0.0};
      for (const auto& gk : incoming_gen) startup.terms.emplace_back(gk, 1.0);
      m.rows.push_back(std::move(startup));
    } else {
      // b_v <= b_u - C + Z g - V (1 - sum_k g_ku) + M (1 - x)
      LinearRow le{"batt_le_" + sfx, {{bv, 1.0}, {bu, -1.0}, {g, -z}, {x, big_m_battery}}, RowSense::kLe,
                   big_m_battery - c - v};
      LinearRow ge{"batt_ge_" + sfx, {{bv, 1.0}, {bu, -1.0}, {g, -z}, {x, -big_m_battery}}, RowSense::kGe,
                   -big_m_battery - c - v};
      for (const auto& gk : incoming_gen) {
        le.terms.emplace_back(gk, -v);
        ge.terms.emplace_back(gk, -v);
      }
      m.rows.push_back(std::move(le));
      m.rows.push_back(std::move(ge));
    }
    // q_v <= q_u - Z g + M (1 - x)
    m.rows.push_back({"fuel_le_" + sfx, {{qv, 1.0}, {qu, -1.0}, {g, z}, {x, big_m_fuel}}, RowSense::kLe, big_m_fuel});
    m.rows.push_back({"gx_" + sfx, {{g, 1.0}, {x, -1.0}}, RowSense::kLe, 0.0});

    if (!e.gen_allowed) m.bounds[g] = {0.0, 0.0};
    m.binaries.push_back(x);
    m.binaries.push_back(g);
  }

  for (NodeId i = 0; i < in.node_count(); ++i) {
    if (i == in.start) {
      const double b0 = static_cast<double>(in.b0.value);
      m.bounds[b_var(i)] = {b0, b0};
      m.bounds[q_var(i)] = {q0, q0};
    } else {
      m.bounds[b_var(i)] = {bmin, bmax};
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// LP text

namespace {

std::string fmt(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_terms(std::ostringstream& out, const std::vector<std::pair<std::string, double>>& terms) {
  int on_line = 0;
  bool first = true;
  for (const auto& [name, coef] : terms) {
    if (coef == 0.0) continue;
    if (on_line == 8) {
      out << "\n  ";
      on_line = 0;
    }
    if (first) {
      out << (coef < 0 ? "- " : "") << fmt(std::abs(coef)) << ' ' << name;
      first = false;
    } else {
      out << (coef < 0 ? " - " : " + ") << fmt(std::abs(coef)) << ' ' << name;
    }
    ++on_line;
  }
  if (first) out << "0 " << (terms.empty() ? std::string("x_empty") : terms.front().first);
}

const char* sense_text(RowSense s) {
  switch (s) {
    case RowSense::kLe: return "<=";
    case RowSense::kGe: return ">=";
    case RowSense::kEq: return "=";
  }
  return "=";
}

}  // namespace

std::string to_lp_text(const MilpModel& m, std::string_view comment) {
  std::ostringstream out;
  if (!comment.empty()) out << "\\ " << comment << "\n";
  out << "Minimize\n obj: ";
  write_terms(out, m.objective);
  out << "\nSubject To\n";
  for (const LinearRow& row : m.rows) {
    out << ' ' << row.name << ": ";
    write_terms(out, row.terms);
    out << ' ' << sense_text(row.sense) << ' ' << fmt(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& [name, b] : m.bounds) {
    if (b.lower == b.upper) {
      out << ' ' << name << " = " << fmt(b.lower) << '\n';
    } else if (std::isinf(b.upper)) {
      out << ' ' << name << " >= " << fmt(b.lower) << '\n';
    } else {
      out << ' ' << fmt(b.lower) << " <= " << name << " <= " << fmt(b.upper) << '\n';
    }
  }
  out << "Binaries\n";
  for (const auto& name : m.binaries) out << ' ' << name << '\n';
  out << "End\n";
  return out.str();
}

namespace {

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

bool is_number(const std::string& tok) {
  if (tok.empty()) return false;
  char* end = nullptr;
  std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

double to_number(const std::string& tok, std::size_t line) {
  if (!is_number(tok)) throw LpParseError("line " + std::to_string(line) + ": expected a number, got '" + tok + "'");
  return std::strtod(tok.c_str(), nullptr);
}

bool is_sense(const std::string& tok) { return tok == "<=" || tok == ">=" || tok == "=" || tok == "<" || tok == ">" || tok == "=<" || tok == "=>"; }

RowSense to_sense(const std::string& tok) {
  if (tok == "<=" || tok == "<" || tok == "=<") return RowSense::kLe;
  if (tok == ">=" || tok == ">" || tok == "=>") return RowSense::kGe;
  return RowSense::kEq;
}

struct Token {
  std::string text;
  std::size_t line;
};

// Whitespace-separated tokens with "\n" markers; backslash starts a comment.
// The writer always separates signs, coefficients, names and operators.
std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    if (auto cut = raw.find('\\'); cut != std::string::npos) raw.resize(cut);
    std::istringstream ls(raw);
    std::string tok;
    while (ls >> tok) out.push_back({tok, line});
    out.push_back({"\n", line});
    ++line;
  }
  return out;
}

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinaries, kGenerals, kEnd };

// Parses "[+|-] [coef] name ..." until a comparison operator or end.
std::vector<std::pair<std::string, double>> parse_terms(const std::vector<Token>& toks, std::size_t& i,
                                                         std::size_t end) {
  std::vector<std::pair<std::string, double>> terms;
  double sign = 1.0;
  std::optional<double> coef;
  for (; i < end; ++i) {
    const std::string& t = toks[i].text;
    if (t == "\n") continue;
    if (is_sense(t)) break;
    if (t == "+") {
      sign = 1.0;
    } else if (t == "-") {
      sign = -sign;
    } else if (is_number(t)) {
      coef = std::strtod(t.c_str(), nullptr);
    } else {
      terms.emplace_back(t, sign * coef.value_or(1.0));
      sign = 1.0;
      coef.reset();
    }
  }
  return terms;
}

}  // namespace

MilpModel parse_lp_text(std::string_view text) {
  const auto toks = tokenize(text);
  MilpModel m;
  Section section = Section::kNone;

  auto header = [&](std::size_t& i) -> std::optional<Section> {
    const std::string t = lower(toks[i].text);
    if (t == "minimize" || t == "minimum" || t == "min") return Section::kObjective;
    if (t == "subject" && i + 1 < toks.size() && lower(toks[i + 1].text) == "to") {
      ++i;
      return Section::kConstraints;
    }
    if (t == "st" || t == "s.t.") return Section::kConstraints;
    if (t == "bounds") return Section::kBounds;
    if (t == "binaries" || t == "binary" || t == "bin") return Section::kBinaries;
    if (t == "generals" || t == "general") return Section::kGenerals;
    if (t == "end") return Section::kEnd;
    return std::nullopt;
  };

  // group tokens into logical statements: a statement ends at a newline unless
  // the next line continues it (constraints) or starts a new label/header
  std::size_t i = 0;
  while (i < toks.size() && section != Section::kEnd) {
    if (toks[i].text == "\n") {
      ++i;
      continue;
    }
    if (auto s = header(i)) {
      section = *s;
      ++i;
      continue;
    }
    switch (section) {
      case Section::kNone:
        throw LpParseError("line " + std::to_string(toks[i].line) + ": content before Minimize");
      case Section::kObjective: {
        if (toks[i].text.back() == ':') ++i;
        std::size_t end = i;
        while (end < toks.size() && !(toks[end].text != "\n" && [&] {
                 std::size_t k = end;
                 return header(k).has_value();
               }()))
          ++end;
        m.objective = parse_terms(toks, i, end);
        i = end;
        break;
      }
      case Section::kConstraints: {
        LinearRow row;
        const std::size_t line = toks[i].line;
        if (toks[i].text.back() == ':') {
          row.name = toks[i].text.substr(0, toks[i].text.size() - 1);
          ++i;
        } else {
          row.name = "r" + std::to_string(m.rows.size());
        }
        row.terms = parse_terms(toks, i, toks.size());
        if (i >= toks.size()) throw LpParseError("line " + std::to_string(line) + ": row without comparison");
        row.sense = to_sense(toks[i].text);
        ++i;
        std::string rhs = toks.at(i).text;
        if ((rhs == "-" || rhs == "+") && i + 1 < toks.size()) {
          rhs = (rhs == "-" ? "-" : "") + toks[++i].text;
        }
        row.rhs = to_number(rhs, toks[i].line);
        ++i;
        m.rows.push_back(std::move(row));
        break;
      }
      case Section::kBounds: {
        // gather tokens up to the end of the line
        std::vector<std::string> parts;
        const std::size_t line = toks[i].line;
        while (i < toks.size() && toks[i].text != "\n") parts.push_back(toks[i++].text);
        auto num = [&](const std::string& s) {
          const std::string l = lower(s);
          if (l == "inf" || l == "+inf" || l == "infinity") return std::numeric_limits<double>::infinity();
          if (l == "-inf" || l == "-infinity") return -std::numeric_limits<double>::infinity();
          return to_number(s, line);
        };
        if (parts.size() == 5 && is_sense(parts[1]) && is_sense(parts[3])) {
          m.bounds[parts[2]] = {num(parts[0]), num(parts[4])};
        } else if (parts.size() == 3 && is_sense(parts[1])) {
          auto& b = m.bounds[parts[0]];
          const double val = num(parts[2]);
          switch (to_sense(parts[1])) {
            case RowSense::kEq: b = {val, val}; break;
            case RowSense::kGe: b.lower = val; break;
            case RowSense::kLe: b.upper = val; break;
          }
        } else if (parts.size() == 2 && lower(parts[1]) == "free") {
          m.bounds[parts[0]] = {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        } else {
          throw LpParseError("line " + std::to_string(line) + ": unsupported bound");
        }
        break;
      }
      case Section::kBinaries:
      case Section::kGenerals:
        if (section == Section::kBinaries) m.binaries.push_back(toks[i].text);
        ++i;
        break;
      case Section::kEnd:
        break;
    }
  }
  if (section != Section::kEnd) throw LpParseError("missing End");
  return m;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

double lookup(const Assignment& a, const std::string& name) {
  auto it = a.find(name);
  return it == a.end() ? 0.0 : it->second;
}

}  // namespace

double objective_value(const MilpModel& m, const Assignment& values) {
  double total = 0.0;
  for (const auto& [name, coef] : m.objective) total += coef * lookup(values, name);
  return total;
}

std::vector<RowViolation> check_assignment(const MilpModel& m, const Assignment& values, double tol) {
  std::vector<RowViolation> out;
  for (const LinearRow& row : m.rows) {
    double lhs = 0.0;
    for (const auto& [name, coef] : row.terms) lhs += coef * lookup(values, name);
    double excess = 0.0;
    switch (row.sense) {
      case RowSense::kLe: excess = lhs - row.rhs; break;
      case RowSense::kGe: excess = row.rhs - lhs; break;
      case RowSense::kEq: excess = std::abs(lhs - row.rhs); break;
    }
    if (excess > tol * std::max(1.0, std::abs(row.rhs))) out.push_back({row.name, excess});
  }

  std::set<std::string> names;
  for (const auto& [name, coef] : m.objective) names.insert(name);
  for (const LinearRow& row : m.rows) {
    for (const auto& [name, coef] : row.terms) names.insert(name);
  }
  for (const auto& name : names) {
    const double val = lookup(values, name);
    VariableBounds b;
    if (auto it = m.bounds.find(name); it != m.bounds.end()) b = it->second;
    if (val < b.lower - tol) out.push_back({"bound:" + name, b.lower - val});
    if (val > b.upper + tol) out.push_back({"bound:" + name, val - b.upper});
  }
  for (const auto& name : m.binaries) {
    const double val = lookup(values, name);
    const double dist = std::min(std::abs(val), std::abs(val - 1.0));
    if (dist > tol) out.push_back({"binary:" + name, dist});
  }
  return out;
}

Assignment to_assignment(const Instance& in, const Solution& sol) {
  Assignment a;
  for (const Edge& e : in.edges) {
    a[x_var(e)] = 0.0;
    a[g_var(e)] = 0.0;
    a[w_var(e)] = 0.0;
  }
  for (NodeId i = 0; i < in.node_count(); ++i) {
    a[b_var(i)] = static_cast<double>(in.bmin.value);
    a[q_var(i)] = 0.0;
  }
  bool prev_on = false;
  for (std::size_t k = 0; k < sol.path.size(); ++k) {
    a[b_var(sol.path[k])] = static_cast<double>(sol.battery.at(k).value);
    a[q_var(sol.path[k])] = static_cast<double>(sol.fuel.at(k).value);
    if (k + 1 == sol.path.size()) break;
    const auto id = in.find_edge(sol.path[k], sol.path[k + 1]);
    if (!id) throw std::invalid_argument("solution uses a missing edge");
    const Edge& e = in.edges[*id];
    const bool on = sol.gen.at(k);
    a[x_var(e)] = 1.0;
    a[g_var(e)] = on ? 1.0 : 0.0;
    a[w_var(e)] = (on && !prev_on) ? 1.0 : 0.0;
    prev_on = on;
  }
  return a;
}

Assignment parse_assignment(std::string_view text) {
  Assignment a;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string name, value;
    if (!(ls >> name) || name[0] == '#') continue;
    if (!(ls >> value) || !is_number(value)) {
      throw ImportError("line " + std::to_string(lineno) + ": expected 'name value'");
    }
    a[name] = std::strtod(value.c_str(), nullptr);
  }
  return a;
}

Solution import_milp_solution(const Instance& in, std::string_view solver_output) {
  const Assignment values = parse_assignment(solver_output);
  constexpr double kIntTol = 1e-6;

  auto binary = [&](const std::string& name) {
    const double v = lookup(values, name);
    if (std::abs(v) <= kIntTol) return false;
    if (std::abs(v - 1.0) <= kIntTol) return true;
    throw ImportError("fractional value " + std::to_string(v) + " for " + name);
  };

  std::vector<bool> used(in.edge_count());
  std::size_t support = 0;
  for (EdgeId e = 0; e < in.edge_count(); ++e) {
    used[e] = binary(x_var(in.edges[e]));
    support += used[e];
  }

  Solution sol;
  std::vector<bool> visited(in.node_count(), false);
  NodeId here = in.start;
  sol.path.push_back(here);
  visited[here] = true;
  while (here != in.goal) {
    EdgeId next = kNoEdge;
    for (EdgeId e : in.out_edges(here)) {
      if (!used[e]) continue;
      if (next != kNoEdge) throw ImportError("path branches at node " + std::to_string(here));
      next = e;
    }
    if (next == kNoEdge) {
      if (here == in.start) throw ImportError("no outgoing start edge");
      throw ImportError("path broken at node " + std::to_string(here));
    }
    const Edge& edge = in.edges[next];
    if (visited[edge.to]) throw ImportError("path revisits node " + std::to_string(edge.to));
    visited[edge.to] = true;
    sol.gen.push_back(binary(g_var(edge)));
    sol.path.push_back(edge.to);
    here = edge.to;
  }
  if (support != sol.path.size() - 1) throw ImportError("subtour detected: x-support exceeds the start-goal path");

  // replay battery and fuel
  std::int64_t battery = in.b0.value;
  std::int64_t fuel = in.q0.value;
  bool prev_on = false;
  sol.battery.emplace_back(battery);
  sol.fuel.emplace_back(fuel);
  for (std::size_t k = 0; k + 1 < sol.path.size(); ++k) {
    const Edge& e = in.edges[*in.find_edge(sol.path[k], sol.path[k + 1])];
    const bool on = sol.gen[k];
    battery -= e.drain.value + ((on && !prev_on) ? in.startup_drain.value : 0);
    if (on) {
      battery += e.recharge.value;
      fuel -= e.recharge.value;
    }
    battery = std::min(battery, in.bmax.value);
    prev_on = on;
    sol.cost += e.cost;
    sol.battery.emplace_back(battery);
    sol.fuel.emplace_back(fuel);
  }
  if (auto violation = check_solution(in, sol)) throw ImportError("imported plan is infeasible: " + violation->message);
  return sol;
}

}  // namespace hfsp
