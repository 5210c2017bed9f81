#pragma once

#include "json.hpp"
#include <utility>
#include <vector>

#include "core/complex.hpp"

namespace presto {

struct PersistenceDiagram {
  int max_h = 0;
  // finite intervals per homology dimension, sorted by (birth, death);
  // zero-length intervals are dropped
  std::vector<std::vector<std::pair<double, double>>> intervals;
  // births of classes that never die; only their count is serialized
  std::vector<std::vector<double>> essential_births;

  long essential_count(int h) const {
    return h <= max_h ? static_cast<long>(essential_births[static_cast<size_t>(h)].size()) : 0;
  }
};

// boundary matrix reduction over Z/2 with the clearing optimization
PersistenceDiagram persistence(const FilteredComplex& fc, int max_h);

nlohmann::json diagram_to_json(const PersistenceDiagram& d);
PersistenceDiagram diagram_from_json(const nlohmann::json& j);

}  // namespace presto
