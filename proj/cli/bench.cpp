#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "commands.hpp"
#include "hfsp/heuristics.hpp"
#include "hfsp/instance_io.hpp"
#include "hfsp/verify.hpp"

namespace hfsp::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::size_t meta_size(const Instance& in, const char* key) {
  auto it = in.meta.find(key);
  if (it == in.meta.end()) return 0;
  try {
    return static_cast<std::size_t>(std::stoull(it->second));
  } catch (const std::exception&) {
    return 0;
  }
}

struct LoadedInstance {
  std::string id;
  Instance instance;
};

LoadedInstance load_checked(const fs::path& file) {
  LoadResult r = load_instance(read_file(file.string()));
  if (!r.violations.empty()) throw std::runtime_error(file.string() + ": invalid instance: " + r.violations.front().message);
  auto it = r.instance.meta.find("id");
  return {it != r.instance.meta.end() ? it->second : file.stem().string(), std::move(r.instance)};
}

// Quartiles by linear interpolation between order statistics.
double quantile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string csv_header() {
  return "instance_id,family,dim,n_nodes,n_edges,k_neighbors,noise_fraction,selection,heuristic,status,cost,"
         "sup_lower_bound,wall_time,heuristic_time,labels_created,labels_treated,labels_pruned,labels_infeasible,"
         "peak_open,error";
}

std::vector<std::string> deterministic_columns() {
  return {"instance_id", "family",         "dim",           "n_nodes",        "n_edges",        "k_neighbors",
          "noise_fraction", "selection",  "heuristic",     "status",         "cost",           "sup_lower_bound",
          "labels_created", "labels_treated", "labels_pruned", "labels_infeasible", "peak_open", "error"};
}

std::string csv_row(const BenchRecord& r) {
  std::ostringstream out;
  out << quoted(r.instance_id) << ',' << r.family << ',' << r.dim << ',' << r.n_nodes << ',' << r.n_edges << ','
      << r.k_neighbors << ',' << num(r.noise_fraction) << ',' << r.selection << ',' << r.heuristic << ','
      << r.status << ',' << (r.cost ? num(*r.cost) : std::string()) << ',' << num(r.sup_lower_bound) << ','
      << num(r.wall_time) << ',' << num(r.heuristic_time) << ',' << r.stats.labels_created << ','
      << r.stats.labels_treated << ',' << r.stats.labels_pruned << ',' << r.stats.labels_infeasible << ','
      << r.stats.peak_open << ',' << quoted(r.error);
  return out.str();
}

BenchRecord run_one(const Instance& in, const std::string& id, const SolverConfig& config) {
  return make_record(in, id, config, solve(in, config));
}

BenchRecord make_record(const Instance& in, const std::string& id, const SolverConfig& config, const SolveResult& res) {
  BenchRecord r;
  r.instance_id = id;
  r.family = in.meta.count("family") ? in.meta.at("family") : std::string("custom");
  r.dim = in.is_3d() ? 3 : 2;
  r.n_nodes = in.node_count();
  r.n_edges = in.edge_count();
  r.k_neighbors = meta_size(in, "k_neighbors");
  r.noise_fraction = noise_fraction(in);
  r.selection = to_string(config.selection);
  r.heuristic = to_string(config.heuristic);
  r.sup_lower_bound = sup_table(in)[in.start];

  r.status = to_string(res.status);
  r.stats = res.stats;
  r.wall_time = res.stats.wall_time;
  r.heuristic_time = res.stats.heuristic_time;
  if (res.solution) {
    r.cost = res.solution->cost;
    if (auto v = check_solution(in, *res.solution)) {
      r.status = "error";
      r.error = "solution fails check: " + v->message;
    }
  }
  return r;
}

std::vector<BenchRecord> cmd_bench(const fs::path& suite_dir, const BenchOptions& options) {
  const std::vector<fs::path> files = instance_files(suite_dir);
  struct Job {
    std::size_t file;
    Selection selection;
    HeuristicKind heuristic;
  };
  std::vector<Job> jobs;
  for (std::size_t f = 0; f < files.size(); ++f) {
    for (Selection s : options.selections) {
      for (HeuristicKind h : options.heuristics) jobs.push_back({f, s, h});
    }
  }

  std::vector<BenchRecord> rows(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t j) {
    const Job& job = jobs[j];
    SolverConfig config;
    config.selection = job.selection;
    config.heuristic = job.heuristic;
    config.max_labels = options.max_labels;
    config.max_seconds = options.max_seconds;
    config.elementary = options.elementary;
    try {
      const LoadedInstance li = load_checked(files[job.file]);
      rows[j] = run_one(li.instance, li.id, config);
    } catch (const std::exception& e) {
      BenchRecord r;
      r.instance_id = files[job.file].stem().string();
      r.selection = to_string(job.selection);
      r.heuristic = to_string(job.heuristic);
      r.status = "error";
      r.error = e.what();
      rows[j] = std::move(r);
    }
  });

  std::stable_sort(rows.begin(), rows.end(), [](const BenchRecord& a, const BenchRecord& b) {
    return std::tie(a.family, a.n_nodes, a.selection, a.heuristic, a.instance_id) <
           std::tie(b.family, b.n_nodes, b.selection, b.heuristic, b.instance_id);
  });
  return rows;
}

std::string bench_csv(const std::vector<BenchRecord>& rows) {
  std::string out = csv_header() + "\n";
  for (const BenchRecord& r : rows) out += csv_row(r) + "\n";
  return out;
}

std::string plot_data_csv(const std::vector<BenchRecord>& rows) {
  using Key = std::tuple<std::string, int, std::size_t, std::size_t, std::string, std::string>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> cells;
  for (const BenchRecord& r : rows) {
    if (r.status != "optimal" && r.status != "infeasible") continue;
    auto& [times, treated] = cells[{r.family, r.dim, r.n_nodes, r.k_neighbors, r.selection, r.heuristic}];
    times.push_back(r.wall_time);
    treated.push_back(static_cast<double>(r.stats.labels_treated));
  }
  std::string out =
      "family,dim,n_nodes,k_neighbors,selection,heuristic,count,wall_time_q1,wall_time_median,wall_time_q3,"
      "labels_treated_q1,labels_treated_median,labels_treated_q3\n";
  for (const auto& [key, values] : cells) {
    const auto& [family, dim, n, k, selection, heuristic] = key;
    const auto& [times, treated] = values;
    out += family + ',' + std::to_string(dim) + ',' + std::to_string(n) + ',' + std::to_string(k) + ',' + selection +
           ',' + heuristic + ',' + std::to_string(times.size()) + ',' + num(quantile(times, 0.25)) + ',' +
           num(quantile(times, 0.5)) + ',' + num(quantile(times, 0.75)) + ',' + num(quantile(treated, 0.25)) + ',' +
           num(quantile(treated, 0.5)) + ',' + num(quantile(treated, 0.75)) + '\n';
  }
  return out;
}

std::vector<VerifyLine> cmd_verify(const std::vector<fs::path>& inputs, const VerifyOptions& options) {
  std::vector<fs::path> files;
  for (const fs::path& p : inputs) {
    for (fs::path& f : instance_files(p)) files.push_back(std::move(f));
  }
  if (options.export_milp_dir) fs::create_directories(*options.export_milp_dir);

  std::vector<VerifyLine> lines(files.size());
  parallel_for(files.size(), options.jobs, [&](std::size_t i) {
    VerifyLine& line = lines[i];
    line.id = files[i].stem().string();
    try {
      const LoadedInstance li = load_checked(files[i]);
      line.id = li.id;
      const Instance& in = li.instance;
      OracleResult oracle;
      try {
        oracle = oracle_solve(in);
      } catch (const BudgetExceeded& e) {
        line.skipped = true;
        line.text = std::string("skipped: ") + e.what();
        return;
      }
      const std::string expected = oracle.feasible ? num(oracle.optimal_cost) : std::string("infeasible");
      std::ostringstream text;
      text << "oracle " << expected;

      std::optional<Solution> witness;
      for (Selection s : {Selection::kLabel, Selection::kNode}) {
        for (HeuristicKind h : {HeuristicKind::kSup, HeuristicKind::kSld}) {
          SolverConfig config;
          config.selection = s;
          config.heuristic = h;
          config.elementary = options.elementary;
          const SolveResult r = solve(in, config);
          const std::string got = r.solution ? num(r.solution->cost) : to_string(r.status);
          bool ok = got == expected;
          if (r.solution && check_solution(in, *r.solution)) ok = false;
          if (!ok) line.match = false;
          text << "; " << to_string(s) << '+' << to_string(h) << ' ' << got << (ok ? "" : " MISMATCH");
          if (r.solution && !witness) witness = r.solution;
        }
      }

      if (options.export_milp_dir) {
        const std::string lp = export_milp(in);
        write_file((*options.export_milp_dir / (line.id + ".lp")).string(), lp);
        if (witness) {
          const MilpModel model = parse_lp_text(lp);
          const auto violations = check_assignment(model, to_assignment(in, *witness));
          if (violations.empty()) {
            text << "; milp substitution ok";
          } else {
            line.match = false;
            text << "; milp substitution FAILED at " << violations.front().row;
          }
        } else {
          text << "; milp exported";
        }
      }
      line.text = text.str();
    } catch (const std::exception& e) {
      line.match = false;
      line.text = std::string("error: ") + e.what();
    }
  });
  return lines;
}

}  // namespace hfsp::cli
