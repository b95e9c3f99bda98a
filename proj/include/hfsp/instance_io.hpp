#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hfsp/instance.hpp"

namespace hfsp {

/// Malformed instance or solution document. `what()` names the line or the
/// offending field path (e.g. `edges[3].d`).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadResult {
  Instance instance;
  /// Largest |value - units / quantization| over all resource fields, in nominal units.
  double max_rounding_error = 0.0;
  std::vector<Violation> violations;
};

/// Parses an instance document. Real-valued resources are rounded half-to-even
/// to the document's quantization. The instance is finalized and validated;
/// violations are returned, not thrown.
LoadResult load_instance(std::string_view text);

/// Canonical serialization: sorted keys, one line per node and per edge.
/// Edges are always written directed.
std::string save_instance(const Instance& instance);

Solution load_solution(std::string_view text, const Instance& instance);
std::string save_solution(const Solution& solution, const Instance& instance);

/// Half-to-even rounding of `nominal * quantization`.
ResourceUnits quantize(double nominal, std::int64_t quantization);
double nominal(ResourceUnits units, std::int64_t quantization);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace hfsp
