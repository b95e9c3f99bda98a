#include "hfsp/instance_io.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hfsp {

using nlohmann::json;

ResourceUnits quantize(double value, std::int64_t quantization) {
  const double scaled = value * static_cast<double>(quantization);
  // nearbyint honours the current rounding mode, which defaults to to-nearest-even.
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double rounded = std::nearbyint(scaled);
  std::fesetround(saved);
  return ResourceUnits{static_cast<std::int64_t>(rounded)};
}

double nominal(ResourceUnits units, std::int64_t quantization) {
  return static_cast<double>(units.value) / static_cast<double>(quantization);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

namespace {

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto pos = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
    throw ParseError("line " + std::to_string(line) + ": " + e.what());
  }
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError("missing field \"" + key + "\"" + (where.empty() ? "" : " in " + where));
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(where + ": not finite");
  return d;
}

NodeId node_id(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ParseError(where + ": expected a node id");
  return static_cast<NodeId>(v.get<std::int64_t>());
}

bool boolean(const json& obj, const std::string& key, bool fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw ParseError(where + "." + key + ": expected a boolean");
  return it->get<bool>();
}

class Quantizer {
 public:
  explicit Quantizer(std::int64_t q) : q_(q) {}
  ResourceUnits operator()(const json& v, const std::string& where) {
    const double value = number(v, where);
    const ResourceUnits units = quantize(value, q_);
    max_error_ = std::max(max_error_, std::abs(value - nominal(units, q_)));
    return units;
  }
  double max_error() const { return max_error_; }

 private:
  std::int64_t q_;
  double max_error_ = 0.0;
};

// Shortest round-trip representation, as nlohmann prints it.
std::string num(double v) { return json(v).dump(); }

}  // namespace

LoadResult load_instance(std::string_view text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) throw ParseError("line 1: top level must be an object");

  LoadResult result;
  Instance& in = result.instance;

  in.quantization = 1000;
  if (doc.contains("quantization")) {
    const json& q = doc["quantization"];
    if (!q.is_number_integer() || q.get<std::int64_t>() <= 0) {
      throw ParseError("quantization: expected a positive integer");
    }
    in.quantization = q.get<std::int64_t>();
  }
  Quantizer quant(in.quantization);

  const json& nodes = field(doc, "nodes", "");
  if (!nodes.is_array()) throw ParseError("nodes: expected an array");
  in.nodes.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const json& p = nodes[i];
    if (!p.is_array() || (p.size() != 2 && p.size() != 3)) throw ParseError(where + ": expected [x,y] or [x,y,z]");
    NodeCoord c{number(p[0], where + "[0]"), number(p[1], where + "[1]"), std::nullopt};
    if (p.size() == 3) c.z = number(p[2], where + "[2]");
    in.nodes.push_back(c);
  }

  const json& edges = field(doc, "edges", "");
  if (!edges.is_array()) throw ParseError("edges: expected an array");
  in.edges.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    Edge edge;
    edge.from = node_id(field(e, "u", where), where + ".u");
    edge.to = node_id(field(e, "v", where), where + ".v");
    edge.cost = number(field(e, "d", where), where + ".d");
    edge.drain = quant(field(e, "c", where), where + ".c");
    edge.recharge = quant(field(e, "z", where), where + ".z");
    edge.gen_allowed = boolean(e, "gen_allowed", true, where);
    edge.gliding = boolean(e, "gliding", false, where);
    in.edges.push_back(edge);
    if (boolean(e, "undirected", false, where)) {
      std::swap(edge.from, edge.to);
      in.edges.push_back(edge);
    }
  }

  in.start = node_id(field(doc, "start", ""), "start");
  in.goal = node_id(field(doc, "goal", ""), "goal");
  in.b0 = quant(field(doc, "b0", ""), "b0");
  in.bmin = quant(field(doc, "bmin", ""), "bmin");
  in.bmax = quant(field(doc, "bmax", ""), "bmax");
  in.q0 = quant(field(doc, "q0", ""), "q0");
  in.startup_drain = quant(field(doc, "v", ""), "v");

  if (doc.contains("meta")) {
    const json& meta = doc["meta"];
    if (!meta.is_object()) throw ParseError("meta: expected an object");
    for (const auto& [k, v] : meta.items()) {
      if (!v.is_string()) throw ParseError("meta." + k + ": expected a string");
      in.meta[k] = v.get<std::string>();
    }
  }

  in.finalize();
  result.max_rounding_error = quant.max_error();
  result.violations = validate(in);
  return result;
}

std::string save_instance(const Instance& in) {
  const auto q = in.quantization;
  std::string out = "{\n";
  out += "  \"b0\": " + num(nominal(in.b0, q)) + ",\n";
  out += "  \"bmax\": " + num(nominal(in.bmax, q)) + ",\n";
  out += "  \"bmin\": " + num(nominal(in.bmin, q)) + ",\n";

  out += "  \"edges\": [";
  for (std::size_t i = 0; i < in.edges.size(); ++i) {
    const Edge& e = in.edges[i];
    json obj = {{"u", e.from},
                {"v", e.to},
                {"d", e.cost},
                {"c", nominal(e.drain, q)},
                {"z", nominal(e.recharge, q)},
                {"gen_allowed", e.gen_allowed},
                {"gliding", e.gliding}};
    out += (i == 0 ? "\n    " : ",\n    ") + obj.dump();
  }
  out += in.edges.empty() ? "],\n" : "\n  ],\n";

  out += "  \"goal\": " + std::to_string(in.goal) + ",\n";
  if (!in.meta.empty()) out += "  \"meta\": " + json(in.meta).dump() + ",\n";

  out += "  \"nodes\": [";
  for (std::size_t i = 0; i < in.nodes.size(); ++i) {
    const NodeCoord& c = in.nodes[i];
    json p = json::array({c.x, c.y});
    if (c.z) p.push_back(*c.z);
    out += (i == 0 ? "\n    " : ",\n    ") + p.dump();
  }
  out += in.nodes.empty() ? "],\n" : "\n  ],\n";

  out += "  \"q0\": " + num(nominal(in.q0, q)) + ",\n";
  out += "  \"quantization\": " + std::to_string(q) + ",\n";
  out += "  \"start\": " + std::to_string(in.start) + ",\n";
  out += "  \"v\": " + num(nominal(in.startup_drain, q)) + "\n";
  out += "}\n";
  return out;
}

Solution load_solution(std::string_view text, const Instance& in) {
  const json doc = parse_document(text);
  Solution sol;
  const json& path = field(doc, "path", "");
  const json& gen = field(doc, "gen", "");
  const json& battery = field(doc, "battery", "");
  const json& fuel = field(doc, "fuel", "");
  if (!path.is_array() || !gen.is_array() || !battery.is_array() || !fuel.is_array()) {
    throw ParseError("path, gen, battery and fuel must be arrays");
  }
  for (std::size_t i = 0; i < path.size(); ++i) sol.path.push_back(node_id(path[i], "path[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < gen.size(); ++i) {
    if (!gen[i].is_boolean()) throw ParseError("gen[" + std::to_string(i) + "]: expected a boolean");
    sol.gen.push_back(gen[i].get<bool>());
  }
  Quantizer quant(in.quantization);
  for (std::size_t i = 0; i < battery.size(); ++i) sol.battery.push_back(quant(battery[i], "battery[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < fuel.size(); ++i) sol.fuel.push_back(quant(fuel[i], "fuel[" + std::to_string(i) + "]"));
  sol.cost = number(field(doc, "cost", ""), "cost");
  return sol;
}

std::string save_solution(const Solution& sol, const Instance& in) {
  json doc;
  doc["path"] = sol.path;
  doc["gen"] = json::array();
  for (bool g : sol.gen) doc["gen"].push_back(g);
  doc["cost"] = sol.cost;
  doc["battery"] = json::array();
  doc["fuel"] = json::array();
  for (auto b : sol.battery) doc["battery"].push_back(nominal(b, in.quantization));
  for (auto f : sol.fuel) doc["fuel"].push_back(nominal(f, in.quantization));
  return doc.dump(2) + "\n";
}

}  // namespace hfsp
