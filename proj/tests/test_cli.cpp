#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "hfsp/instance_io.hpp"
#include "support.hpp"

using namespace hfsp;
using namespace hfsp::cli;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("hfsp_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "hfsp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

const char* kSmallManifest = R"({
  "name": "tiny",
  "cells": [
    {"family": "euclidean", "dim": 2, "sizes": [8, 10], "k_neighbors": 3, "instances": 2, "seed": 5,
     "require_feasible": false},
    {"family": "lattice", "dim": 3, "boxes": [[2, 2, 2]], "instances": 1, "seed": 9, "v_frac": 0.05,
     "require_feasible": false}
  ]
})";

fs::path write_manifest(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "manifest.in.json";
  write_file(p.string(), text);
  return p;
}

}  // namespace

TEST_CASE("manifest expansion") {
  const Manifest m = parse_manifest(kSmallManifest);
  CHECK(m.name == "tiny");
  REQUIRE(m.entries.size() == 5);
  CHECK(m.entries[0].id == "euclidean2d_n8_k3_s5");
  CHECK(m.entries[1].id == "euclidean2d_n8_k3_s6");
  CHECK(m.entries[2].id == "euclidean2d_n10_k3_s5");
  CHECK(m.entries[4].id == "lattice3d_n2x2x2_s9");
  CHECK(m.entries[4].spec.n_nodes == 8);
  CHECK(m.entries[4].spec.v_frac == 0.05);

  const Manifest reseeded = parse_manifest(kSmallManifest, 100);
  CHECK(reseeded.entries[1].spec.seed == 101);

  const Manifest sweep = parse_manifest(R"({"cells": [{"n_nodes": 50, "k_sweep": [4, 8], "instances": 2}]})");
  REQUIRE(sweep.entries.size() == 4);
  CHECK(sweep.entries[0].placement == sweep.entries[1].placement);
  CHECK(sweep.entries[0].placement != sweep.entries[2].placement);
  CHECK(sweep.entries[1].spec.k_neighbors == 8);

  CHECK_THROWS_WITH(parse_manifest(R"({"cells": [{"colour": 1}]})"), doctest::Contains("unknown key"));
  CHECK_THROWS(parse_manifest(R"({"cells": [{"n_nodes": "many"}]})"));
  CHECK_THROWS(parse_manifest("[1, 2]"));
  CHECK_THROWS(parse_manifest(R"({"cells": [{"family": "lattice", "k_sweep": [4]}]})"));

  const Manifest written = read_suite_manifest(write_suite_manifest(m));
  REQUIRE(written.entries.size() == m.entries.size());
  CHECK(written.entries[4].spec.lattice_dims == m.entries[4].spec.lattice_dims);
  CHECK(spec_from_json(spec_to_json(m.entries[2].spec)).n_nodes == 10);
}

TEST_CASE("generate is reproducible") {
  TempDir dir("generate");
  const fs::path manifest = write_manifest(dir.path, kSmallManifest);
  CHECK(cmd_generate(manifest, dir.path / "a") == 5);
  GenerateOptions parallel;
  parallel.jobs = 3;
  CHECK(cmd_generate(manifest, dir.path / "b", parallel) == 5);
  for (const auto& entry : fs::directory_iterator(dir.path / "a")) {
    const fs::path twin = dir.path / "b" / entry.path().filename();
    CHECK(read_file(entry.path().string()) == read_file(twin.string()));
  }
  const auto files = instance_files(dir.path / "a");
  REQUIRE(files.size() == 5);
  CHECK(files[0].filename() == "euclidean2d_n8_k3_s5.json");
  const LoadResult r = load_instance(read_file(files[0].string()));
  CHECK(r.violations.empty());
  CHECK(r.instance.meta.at("id") == "euclidean2d_n8_k3_s5");
}

TEST_CASE("connectivity sweep shares one placement") {
  TempDir dir("sweep");
  const fs::path manifest = write_manifest(dir.path, R"({"cells": [{"n_nodes": 60, "k_sweep": [4, 8], "seed": 3}]})");
  cmd_generate(manifest, dir.path / "s");
  const Instance a = load_instance(read_file((dir.path / "s" / "euclidean2d_n60_k4_s3.json").string())).instance;
  const Instance b = load_instance(read_file((dir.path / "s" / "euclidean2d_n60_k8_s3.json").string())).instance;
  CHECK(a.node_count() == b.node_count());
  CHECK(a.nodes[7].x == b.nodes[7].x);
  CHECK(a.edge_count() < b.edge_count());
}

TEST_CASE("bench rows are sorted and deterministic") {
  TempDir dir("bench");
  cmd_generate(write_manifest(dir.path, kSmallManifest), dir.path / "suite");
  BenchOptions options;
  const auto rows = cmd_bench(dir.path / "suite", options);
  REQUIRE(rows.size() == 20);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::tie(rows[i - 1].family, rows[i - 1].n_nodes, rows[i - 1].selection) <=
          std::tie(rows[i].family, rows[i].n_nodes, rows[i].selection));
  }
  options.jobs = 4;
  const auto again = cmd_bench(dir.path / "suite", options);
  REQUIRE(again.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].instance_id == again[i].instance_id);
    CHECK(rows[i].status == again[i].status);
    CHECK(rows[i].cost == again[i].cost);
    CHECK(rows[i].stats.labels_created == again[i].stats.labels_created);
    CHECK(rows[i].stats.labels_treated == again[i].stats.labels_treated);
    CHECK(rows[i].status != "error");
  }
  const std::string csv = bench_csv(rows);
  CHECK(csv.rfind(csv_header() + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);

  const std::string plot = plot_data_csv(rows);
  CHECK(plot.find("euclidean,2,8,3,label,sup,2,") != std::string::npos);
}

TEST_CASE("bench records errors instead of stopping") {
  TempDir dir("bench_bad");
  write_file((dir.path / "broken.json").string(), "{\"nodes\": []}");
  BenchOptions options;
  options.selections = {Selection::kLabel};
  options.heuristics = {HeuristicKind::kSup};
  const auto rows = cmd_bench(dir.path, options);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "error");
  CHECK_FALSE(rows[0].error.empty());
}

TEST_CASE("verify on fixtures") {
  VerifyOptions options;
  const auto lines = cmd_verify({hfsp::testing::data_path("fixture5.json"), hfsp::testing::data_path("infeasible.json")},
                                options);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].match);
  CHECK(lines[0].text.rfind("oracle 4;", 0) == 0);
  CHECK(lines[1].match);
  CHECK(lines[1].text.find("oracle infeasible") != std::string::npos);

  TempDir dir("verify");
  options.export_milp_dir = dir.path;
  const auto exported = cmd_verify({hfsp::testing::data_path("fixture5.json")}, options);
  CHECK(exported[0].text.find("milp substitution ok") != std::string::npos);
  CHECK(fs::exists(dir.path / "fixture5.lp"));

  // the path-blind rule loses the optimum here; elementary mode keeps it
  const auto trap = cmd_verify({hfsp::testing::data_path("dominance_trap.json")}, {});
  CHECK_FALSE(trap[0].match);
  VerifyOptions elementary;
  elementary.elementary = true;
  CHECK(cmd_verify({hfsp::testing::data_path("dominance_trap.json")}, elementary)[0].match);
}

TEST_CASE("solve exit codes") {
  TempDir dir("solve");
  const std::string out = (dir.path / "sol.json").string();
  CHECK(run_args({"solve", hfsp::testing::data_path("fixture5.json"), "-o", out}) == kExitSolved);
  CHECK(fs::exists(out));
  const Instance in = hfsp::testing::load_fixture("fixture5.json");
  const Solution s = load_solution(read_file(out), in);
  CHECK(s.cost == 4.0);
  CHECK_FALSE(check_solution(in, s));

  CHECK(run_args({"solve", hfsp::testing::data_path("infeasible.json"), "-o", out}) == kExitInfeasible);
  CHECK(run_args({"solve", hfsp::testing::data_path("fixture5.json"), "--max-labels", "2", "-o", out}) == kExitLimit);
  CHECK(run_args({"solve", hfsp::testing::data_path("fixture5.json"), "--selection", "edge"}) != kExitSolved);

  const std::string bad = (dir.path / "bad.json").string();
  write_file(bad, R"({"nodes": [[0,0],[1,0]], "edges": [], "start": 0, "goal": 0, "b0": 1, "bmin": 0, "bmax": 1, "q0": 0, "v": 0})");
  CHECK(run_args({"solve", bad}) == kExitError);
}

TEST_CASE("export-milp writes both forms") {
  TempDir dir("export");
  const std::string corrected = (dir.path / "c.lp").string();
  const std::string literal = (dir.path / "l.lp").string();
  CHECK(run_args({"export-milp", hfsp::testing::data_path("fixture5.json"), "-o", corrected}) == 0);
  CHECK(run_args({"export-milp", hfsp::testing::data_path("fixture5.json"), "--literal-milp", "-o", literal}) == 0);
  CHECK(read_file(corrected).find("startup_0_2") != std::string::npos);
  CHECK(read_file(literal).find("batt_ge_0_2") != std::string::npos);
}
