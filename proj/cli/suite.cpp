#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "commands.hpp"
#include "hfsp/instance_io.hpp"

namespace hfsp::cli {

using json = nlohmann::json;

namespace {

const std::set<std::string> kSpecKeys = {
    "family",        "dim",           "n_nodes",      "lattice_dims", "k_neighbors",    "noise_target",
    "noise_window",  "zone_side_min", "zone_side_max", "alpha",       "beta",           "uphill_factor",
    "glide_z_factor", "b_frac",       "q_frac",       "v_frac",       "quantization",   "seed",
    "max_attempts",  "require_feasible"};

const std::set<std::string> kCellKeys = {"sizes", "boxes", "instances", "k_sweep", "label"};

json spec_json(const GenSpec& s) {
  json j = {{"family", to_string(s.family)},
            {"dim", s.dim},
            {"n_nodes", s.n_nodes},
            {"k_neighbors", s.k_neighbors},
            {"noise_target", s.noise_target},
            {"noise_window", s.noise_window},
            {"zone_side_min", s.zone_side_min},
            {"zone_side_max", s.zone_side_max},
            {"alpha", s.alpha},
            {"beta", s.beta},
            {"uphill_factor", s.uphill_factor},
            {"glide_z_factor", s.glide_z_factor},
            {"b_frac", s.b_frac},
            {"q_frac", s.q_frac},
            {"v_frac", s.v_frac},
            {"quantization", s.quantization},
            {"seed", s.seed},
            {"max_attempts", s.max_attempts},
            {"require_feasible", s.require_feasible}};
  if (s.lattice_dims) j["lattice_dims"] = *s.lattice_dims;
  return j;
}

// Applies the GenSpec keys present in `j` on top of `s`.
void apply_spec(const json& j, GenSpec& s, const std::string& where) {
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const json::exception&) {
      throw std::invalid_argument(where + "." + key + ": wrong type");
    }
  };
  if (j.contains("family")) {
    if (!j["family"].is_string()) throw std::invalid_argument(where + ".family: expected a string");
    s.family = parse_family(j["family"].get<std::string>());
  }
  get("dim", s.dim);
  get("n_nodes", s.n_nodes);
  if (j.contains("lattice_dims")) {
    std::array<std::size_t, 3> d{1, 1, 1};
    const json& v = j["lattice_dims"];
    if (!v.is_array() || v.size() < 2 || v.size() > 3) {
      throw std::invalid_argument(where + ".lattice_dims: expected [nx, ny] or [nx, ny, nz]");
    }
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = v[i].get<std::size_t>();
    s.lattice_dims = d;
  }
  get("k_neighbors", s.k_neighbors);
  get("noise_target", s.noise_target);
  get("noise_window", s.noise_window);
  get("zone_side_min", s.zone_side_min);
  get("zone_side_max", s.zone_side_max);
  get("alpha", s.alpha);
  get("beta", s.beta);
  get("uphill_factor", s.uphill_factor);
  get("glide_z_factor", s.glide_z_factor);
  get("b_frac", s.b_frac);
  get("q_frac", s.q_frac);
  get("v_frac", s.v_frac);
  get("quantization", s.quantization);
  get("seed", s.seed);
  get("max_attempts", s.max_attempts);
  get("require_feasible", s.require_feasible);
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(what + ": " + e.what());
  }
}

std::string entry_id(const GenSpec& s, std::size_t k) {
  std::string id = to_string(s.family) + std::to_string(s.dim) + "d_n";
  if (s.family == GraphFamily::kLattice && s.lattice_dims) {
    const auto& d = *s.lattice_dims;
    id += std::to_string(d[0]) + "x" + std::to_string(d[1]);
    if (s.dim == 3) id += "x" + std::to_string(d[2]);
  } else {
    id += std::to_string(s.n_nodes);
  }
  if (s.family == GraphFamily::kEuclidean) id += "_k" + std::to_string(k);
  return id + "_s" + std::to_string(s.seed);
}

}  // namespace

std::string spec_to_json(const GenSpec& spec) { return spec_json(spec).dump(); }

GenSpec spec_from_json(const std::string& text) {
  const json j = parse_json(text, "spec");
  GenSpec s;
  apply_spec(j, s, "spec");
  check_spec(s);
  return s;
}

Manifest parse_manifest(const std::string& text, std::optional<std::uint64_t> base_seed) {
  const json doc = parse_json(text, "manifest");
  if (!doc.is_object() || !doc.contains("cells") || !doc["cells"].is_array()) {
    throw std::invalid_argument("manifest: expected an object with a \"cells\" array");
  }
  Manifest m;
  m.name = doc.value("name", std::string("suite"));
  std::set<std::string> seen;
  for (std::size_t c = 0; c < doc["cells"].size(); ++c) {
    const json& cell = doc["cells"][c];
    const std::string where = "cells[" + std::to_string(c) + "]";
    if (!cell.is_object()) throw std::invalid_argument(where + ": expected an object");
    for (const auto& [key, value] : cell.items()) {
      if (!kSpecKeys.count(key) && !kCellKeys.count(key)) throw std::invalid_argument(where + ": unknown key \"" + key + "\"");
    }
    GenSpec base;
    apply_spec(cell, base, where);
    if (base_seed) base.seed = *base_seed;
    const std::size_t count = cell.value("instances", std::size_t{1});

    std::vector<GenSpec> shapes;
    if (cell.contains("boxes")) {
      for (const json& box : cell["boxes"]) {
        GenSpec s = base;
        std::array<std::size_t, 3> d{1, 1, 1};
        for (std::size_t i = 0; i < box.size() && i < 3; ++i) d[i] = box[i].get<std::size_t>();
        s.lattice_dims = d;
        s.n_nodes = d[0] * d[1] * (s.dim == 3 ? d[2] : 1);
        shapes.push_back(s);
      }
    } else if (cell.contains("sizes")) {
      for (const json& n : cell["sizes"]) {
        GenSpec s = base;
        s.n_nodes = n.get<std::size_t>();
        shapes.push_back(s);
      }
    } else {
      shapes.push_back(base);
    }

    std::vector<std::size_t> ks;
    if (cell.contains("k_sweep")) {
      if (base.family != GraphFamily::kEuclidean) throw std::invalid_argument(where + ": k_sweep needs family euclidean");
      ks = cell["k_sweep"].get<std::vector<std::size_t>>();
      if (ks.empty()) throw std::invalid_argument(where + ".k_sweep: empty");
    }

    for (const GenSpec& shape : shapes) {
      for (std::size_t i = 0; i < count; ++i) {
        GenSpec s = shape;
        s.seed = shape.seed + i;
        check_spec(s);
        for (std::size_t k : ks.empty() ? std::vector<std::size_t>{s.k_neighbors} : ks) {
          GenSpec sk = s;
          sk.k_neighbors = k;
          SuiteEntry e{entry_id(sk, k), "", sk, ""};
          if (!ks.empty()) e.placement = "cell" + std::to_string(c) + "_n" + std::to_string(s.n_nodes) + "_s" + std::to_string(s.seed);
          if (!seen.insert(e.id).second) throw std::invalid_argument(where + ": duplicate instance id " + e.id);
          e.file = e.id + ".json";
          m.entries.push_back(std::move(e));
        }
      }
    }
  }
  return m;
}

std::string write_suite_manifest(const Manifest& m) {
  std::string out = "{\n  \"name\": " + json(m.name).dump() + ",\n  \"instances\": [";
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const SuiteEntry& e = m.entries[i];
    json j = {{"id", e.id}, {"file", e.file}, {"spec", spec_json(e.spec)}};
    if (!e.placement.empty()) j["placement"] = e.placement;
    out += (i == 0 ? "\n    " : ",\n    ") + j.dump();
  }
  out += m.entries.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

Manifest read_suite_manifest(const std::string& text) {
  const json doc = parse_json(text, "suite manifest");
  if (!doc.is_object() || !doc.contains("instances")) throw std::invalid_argument("suite manifest: missing \"instances\"");
  Manifest m;
  m.name = doc.value("name", std::string("suite"));
  for (const json& j : doc["instances"]) {
    SuiteEntry e;
    e.id = j.at("id").get<std::string>();
    e.file = j.at("file").get<std::string>();
    if (j.contains("spec")) apply_spec(j["spec"], e.spec, e.id);
    e.placement = j.value("placement", std::string());
    m.entries.push_back(std::move(e));
  }
  return m;
}

std::size_t cmd_generate(const fs::path& manifest_path, const fs::path& out_dir, const GenerateOptions& options) {
  const Manifest m = parse_manifest(read_file(manifest_path.string()), options.seed);
  fs::create_directories(out_dir);

  // entries of one connectivity sweep are generated together
  struct Group {
    std::vector<std::size_t> entries;
    std::vector<std::size_t> ks;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> by_placement;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const SuiteEntry& e = m.entries[i];
    std::size_t g;
    if (e.placement.empty() || !by_placement.count(e.placement)) {
      g = groups.size();
      groups.push_back({});
      if (!e.placement.empty()) by_placement[e.placement] = g;
    } else {
      g = by_placement[e.placement];
    }
    groups[g].entries.push_back(i);
    groups[g].ks.push_back(e.spec.k_neighbors);
  }

  parallel_for(groups.size(), options.jobs, [&](std::size_t gi) {
    const Group& g = groups[gi];
    const GenSpec& first = m.entries[g.entries.front()].spec;
    const bool sweep = !m.entries[g.entries.front()].placement.empty();
    std::vector<Instance> made = sweep ? gen_euclidean_connectivity(first, g.ks) : std::vector<Instance>{generate(first)};
    for (std::size_t j = 0; j < made.size(); ++j) {
      const SuiteEntry& e = m.entries[g.entries[j]];
      made[j].meta["id"] = e.id;
      write_file((out_dir / e.file).string(), save_instance(made[j]));
    }
  });
  write_file((out_dir / "manifest.json").string(), write_suite_manifest(m));
  return m.entries.size();
}

std::vector<fs::path> instance_files(const fs::path& input) {
  if (!fs::is_directory(input)) {
    if (!fs::exists(input)) throw std::runtime_error("no such file: " + input.string());
    return {input};
  }
  std::vector<fs::path> files;
  const fs::path manifest = input / "manifest.json";
  if (fs::exists(manifest)) {
    for (const SuiteEntry& e : read_suite_manifest(read_file(manifest.string())).entries) files.push_back(input / e.file);
    return files;
  }
  for (const auto& entry : fs::directory_iterator(input)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

fs::path default_out_dir(const fs::path& fallback) {
  const char* env = std::getenv("HFSP_OUT_DIR");
  return env && *env ? fs::path(env) : fallback;
}

}  // namespace hfsp::cli
