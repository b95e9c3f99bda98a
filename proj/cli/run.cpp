#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hfsp/instance_io.hpp"
#include "hfsp/verify.hpp"

namespace hfsp::cli {

namespace {

std::vector<Selection> parse_selections(const std::vector<std::string>& names) {
  std::vector<Selection> out;
  for (const auto& n : names) out.push_back(parse_selection(n));
  return out;
}

std::vector<HeuristicKind> parse_heuristics(const std::vector<std::string>& names) {
  std::vector<HeuristicKind> out;
  for (const auto& n : names) out.push_back(parse_heuristic(n));
  return out;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Exact solver and benchmark harness for noise-restricted hybrid-fuel shortest paths"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::optional<std::uint64_t> max_labels;
  std::optional<double> max_seconds;
  unsigned jobs = 1;
  bool elementary = false;

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a suite of instances from a manifest");
  std::string gen_manifest;
  std::string gen_out;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("manifest", gen_manifest, "Suite manifest (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("-o,--out", gen_out, "Output directory (default: $HFSP_OUT_DIR or ./suite)");
  gen->add_option("--seed", gen_seed, "Replace every cell's base seed");
  gen->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  // solve
  auto* sol = app.add_subcommand("solve", "Solve one instance");
  std::string sol_instance;
  std::string sol_out;
  std::string selection = "label";
  std::string heuristic = "sup";
  sol->add_option("instance", sol_instance, "Instance file")->required()->check(CLI::ExistingFile);
  sol->add_option("-o,--out", sol_out, "Solution file (default: $HFSP_OUT_DIR/<stem>.solution.json, or none)");
  sol->add_option("--selection", selection, "label or node")->check(CLI::IsMember({"label", "node"}));
  sol->add_option("--heuristic", heuristic, "sld, sup or zero")->check(CLI::IsMember({"sld", "sup", "zero"}));
  sol->add_option("--max-labels", max_labels, "Stop after creating this many labels");
  sol->add_option("--max-seconds", max_seconds, "Stop after this many seconds of search");
  sol->add_flag("--elementary", elementary, "Dominance only between labels with nested visited sets");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a configuration matrix over a suite and write CSV");
  std::string bench_suite;
  std::string bench_out;
  std::string plot_out;
  std::vector<std::string> selections{"label", "node"};
  std::vector<std::string> heuristics{"sup", "sld"};
  bench->add_option("suite", bench_suite, "Suite directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("-o,--out", bench_out, "CSV output (default: $HFSP_OUT_DIR/bench.csv, or stdout)");
  bench->add_option("--plot-data", plot_out, "Also write per-cell median and quartiles to this CSV");
  bench->add_option("--selection", selections, "Selection methods")->delimiter(',')->check(CLI::IsMember({"label", "node"}));
  bench->add_option("--heuristic", heuristics, "Heuristics")->delimiter(',')->check(CLI::IsMember({"sld", "sup", "zero"}));
  bench->add_option("--max-labels", max_labels, "Per-run label limit");
  bench->add_option("--max-seconds", max_seconds, "Per-run time limit");
  bench->add_option("--jobs", jobs, "Instances solved in parallel")->check(CLI::PositiveNumber);
  bench->add_flag("--elementary", elementary, "Dominance only between labels with nested visited sets");

  // verify
  auto* ver = app.add_subcommand("verify", "Compare solver and exhaustive oracle on small instances");
  std::vector<std::string> ver_inputs;
  std::string ver_milp;
  ver->add_option("inputs", ver_inputs, "Suite directories or instance files")->required()->check(CLI::ExistingPath);
  auto* export_flag = ver->add_option("--export-milp", ver_milp, "Write LP files here and check solver solutions against them");
  export_flag->expected(0, 1)->default_str("");
  ver->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  ver->add_flag("--elementary", elementary, "Dominance only between labels with nested visited sets");

  // export-milp
  auto* exp = app.add_subcommand("export-milp", "Write the MILP model of an instance in LP format");
  std::string exp_instance;
  std::string exp_out;
  bool literal = false;
  exp->add_option("instance", exp_instance, "Instance file")->required()->check(CLI::ExistingFile);
  exp->add_option("-o,--out", exp_out, "LP output (default: stdout)");
  exp->add_flag("--literal-milp", literal, "Emit the startup terms exactly as originally stated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) {
      const fs::path out = gen_out.empty() ? default_out_dir("suite") : fs::path(gen_out);
      GenerateOptions options;
      options.seed = gen_seed;
      options.jobs = jobs;
      const std::size_t n = cmd_generate(gen_manifest, out, options);
      std::cerr << "wrote " << n << " instances to " << out.string() << "\n";
      return kExitSolved;
    }

    if (*sol) {
      LoadResult loaded = load_instance(read_file(sol_instance));
      if (!loaded.violations.empty()) {
        for (const auto& v : loaded.violations) std::cerr << "invalid instance: " << v.message << "\n";
        return kExitError;
      }
      if (loaded.max_rounding_error > 0.0) {
        std::cerr << "warning: resource values rounded to units (max error " << loaded.max_rounding_error << ")\n";
      }
      SolverConfig config;
      config.selection = parse_selection(selection);
      config.heuristic = parse_heuristic(heuristic);
      config.max_labels = max_labels;
      config.max_seconds = max_seconds;
      config.elementary = elementary;
      const Instance& in = loaded.instance;
      auto id_it = in.meta.find("id");
      const std::string id = id_it != in.meta.end() ? id_it->second : fs::path(sol_instance).stem().string();

      const SolveResult res = solve(in, config);
      const BenchRecord row = make_record(in, id, config, res);
      std::cout << csv_header() << "\n" << csv_row(row) << "\n";

      if (res.status == SolveStatus::kInfeasible) {
        std::cerr << "no feasible path\n";
        return kExitInfeasible;
      }
      if (res.status == SolveStatus::kLimitReached) {
        std::cerr << "limit reached; lower bound " << res.bound << "\n";
        return kExitLimit;
      }
      fs::path out = sol_out;
      if (out.empty() && std::getenv("HFSP_OUT_DIR")) {
        out = default_out_dir(".") / (fs::path(sol_instance).stem().string() + ".solution.json");
      }
      if (!out.empty()) {
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        write_file(out.string(), save_solution(*res.solution, in));
      }
      return kExitSolved;
    }

    if (*bench) {
      BenchOptions options;
      options.selections = parse_selections(selections);
      options.heuristics = parse_heuristics(heuristics);
      options.max_labels = max_labels;
      options.max_seconds = max_seconds;
      options.elementary = elementary;
      options.jobs = jobs;
      const auto rows = cmd_bench(bench_suite, options);
      std::string out = bench_out;
      if (out.empty() && std::getenv("HFSP_OUT_DIR")) out = (default_out_dir(".") / "bench.csv").string();
      if (!out.empty() && fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
      write_or_print(out, bench_csv(rows));
      if (!plot_out.empty()) write_file(plot_out, plot_data_csv(rows));
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.status == "error";
      if (failed) std::cerr << failed << " runs failed; see the error column\n";
      return kExitSolved;
    }

    if (*ver) {
      VerifyOptions options;
      if (export_flag->count() > 0) {
        options.export_milp_dir = ver_milp.empty() ? default_out_dir(".") / "milp" : fs::path(ver_milp);
      }
      options.elementary = elementary;
      options.jobs = jobs;
      std::vector<fs::path> inputs(ver_inputs.begin(), ver_inputs.end());
      const auto lines = cmd_verify(inputs, options);
      std::size_t checked = 0, matched = 0, skipped = 0;
      for (const auto& l : lines) {
        std::cout << l.id << ": " << l.text << "\n";
        if (l.skipped) {
          ++skipped;
          continue;
        }
        ++checked;
        matched += l.match;
      }
      std::cout << matched << "/" << checked << " match";
      if (skipped) std::cout << " (" << skipped << " skipped: over oracle budget)";
      std::cout << "\n";
      return matched == checked ? kExitSolved : kExitError;
    }

    if (*exp) {
      LoadResult loaded = load_instance(read_file(exp_instance));
      if (!loaded.violations.empty()) {
        for (const auto& v : loaded.violations) std::cerr << "invalid instance: " << v.message << "\n";
        return kExitError;
      }
      const StartupForm form = literal ? StartupForm::kLiteral : StartupForm::kCorrected;
      const std::string comment = literal ? "literal startup terms; not equivalent to the solver model"
                                          : "corrected startup linearization";
      write_or_print(exp_out, to_lp_text(build_milp(loaded.instance, form), comment));
      return kExitSolved;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace hfsp::cli
