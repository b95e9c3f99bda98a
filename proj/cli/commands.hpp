#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hfsp/generators.hpp"
#include "hfsp/labeling.hpp"

namespace hfsp::cli {

namespace fs = std::filesystem;

// Exit codes of the `solve` subcommand.
inline constexpr int kExitSolved = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitLimit = 3;

/// One generated instance as listed in a suite manifest.
struct SuiteEntry {
  std::string id;
  std::string file;  // relative to the suite directory
  GenSpec spec;
  /// Shared by the entries of one connectivity sweep (same points and zones).
  std::string placement;
};

/// A suite manifest: named cells of GenSpec parameters, expanded into entries.
struct Manifest {
  std::string name;
  std::vector<SuiteEntry> entries;
};

std::string spec_to_json(const GenSpec& spec);
GenSpec spec_from_json(const std::string& text);

/// Parses a suite manifest. Cells take GenSpec keys plus `sizes` (n_nodes
/// list), `boxes` (lattice box list), `instances` (count per size, seeds
/// seed..seed+count-1) and `k_sweep` (connectivity sweep over one placement).
/// `base_seed` replaces every cell's seed.
Manifest parse_manifest(const std::string& text, std::optional<std::uint64_t> base_seed = {});

/// Generated-suite manifest (the form written by cmd_generate).
std::string write_suite_manifest(const Manifest& manifest);
Manifest read_suite_manifest(const std::string& text);

struct GenerateOptions {
  std::optional<std::uint64_t> seed;  // replaces every cell's base seed
  unsigned jobs = 1;
};

/// Writes every instance of the manifest plus `manifest.json` into `out_dir`.
/// Returns the number of instances written.
std::size_t cmd_generate(const fs::path& manifest_path, const fs::path& out_dir, const GenerateOptions& options = {});

struct BenchRecord {
  std::string instance_id;
  std::string family;
  int dim = 2;
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;  // directed
  std::size_t k_neighbors = 0;
  double noise_fraction = 0.0;
  std::string selection;
  std::string heuristic;
  std::string status;  // optimal, infeasible, limit, error
  std::optional<double> cost;
  double sup_lower_bound = 0.0;
  double wall_time = 0.0;
  double heuristic_time = 0.0;
  SolveStats stats;
  std::string error;
};

std::string csv_header();
std::string csv_row(const BenchRecord& r);
/// Columns whose values do not depend on timing.
std::vector<std::string> deterministic_columns();

struct BenchOptions {
  std::vector<Selection> selections{Selection::kLabel, Selection::kNode};
  std::vector<HeuristicKind> heuristics{HeuristicKind::kSup, HeuristicKind::kSld};
  std::optional<std::uint64_t> max_labels;
  std::optional<double> max_seconds;
  bool elementary = false;
  unsigned jobs = 1;
};

BenchRecord run_one(const Instance& instance, const std::string& id, const SolverConfig& config);
BenchRecord make_record(const Instance& instance, const std::string& id, const SolverConfig& config,
                        const SolveResult& result);

/// Runs every (instance, selection, heuristic) combination of the suite in
/// `suite_dir`. Rows are sorted by family, n_nodes, selection, heuristic, id.
std::vector<BenchRecord> cmd_bench(const fs::path& suite_dir, const BenchOptions& options);

std::string bench_csv(const std::vector<BenchRecord>& rows);

/// Median and quartiles of wall_time and labels_treated per
/// (family, dim, n_nodes, k, selection, heuristic) cell.
std::string plot_data_csv(const std::vector<BenchRecord>& rows);

struct VerifyOptions {
  std::optional<fs::path> export_milp_dir;
  bool elementary = false;
  unsigned jobs = 1;
};

struct VerifyLine {
  std::string id;
  bool skipped = false;
  bool match = true;
  std::string text;
};

/// Oracle vs solver (LABEL/NODE x SUP/SLD) on every instance in `inputs`
/// (suite directories or instance files); optional MILP export with a
/// substitution check of each solver solution.
std::vector<VerifyLine> cmd_verify(const std::vector<fs::path>& inputs, const VerifyOptions& options);

/// Instance files of a suite directory (from manifest.json when present,
/// otherwise every *.json file in name order) or a single file.
std::vector<fs::path> instance_files(const fs::path& input);

/// Directory named by HFSP_OUT_DIR, or `fallback`.
fs::path default_out_dir(const fs::path& fallback);

/// Runs `work(i)` for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by `work` is rethrown after all threads finish.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& work) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        work(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), count));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

int run(int argc, char** argv);

}  // namespace hfsp::cli
