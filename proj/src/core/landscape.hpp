#pragma once

#include <cstdint>
#include "json.hpp"
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/persistence.hpp"

namespace presto {

// one landscape layer: piecewise linear, (t, value) knots with strictly
// increasing t; value is 0 at both ends and nonnegative between
using Layer = std::vector<std::pair<double, double>>;

struct LandscapeProvenance {
  std::string source_id;
  bool normalized = false;
  std::string projector = "none";
  int k = 0;
  int n_projections = 1;
  uint64_t seed = 0;
  int h_max = 2;
  std::string complex = "alpha";
  double rips_threshold = -1.0;  // requested cutoff; -1 for auto or alpha builds
  bool cap_essential = false;
  double grid_step = 0.0;  // 0 means exact

  bool operator==(const LandscapeProvenance&) const = default;
  // everything except the identity of the source must agree for comparisons
  bool compatible(const LandscapeProvenance& o) const {
    return normalized == o.normalized && projector == o.projector && k == o.k &&
           n_projections == o.n_projections && seed == o.seed && h_max == o.h_max &&
           complex == o.complex && rips_threshold == o.rips_threshold &&
           cap_essential == o.cap_essential && grid_step == o.grid_step;
  }
};

struct Landscape {
  int max_h = 0;
  std::vector<std::vector<Layer>> layers;  // [h][layer]
  // source diagram before any grid rounding; empty for averaged landscapes
  std::vector<std::vector<std::pair<double, double>>> intervals;
  LandscapeProvenance provenance;

  const std::vector<Layer>& at(int h) const;
};

// exact landscape; grid_step > 0 rounds diagram endpoints to multiples of the
// step first and drops intervals that collapse
Landscape landscape_from_diagram(const PersistenceDiagram& d, double grid_step = 0.0);

// rebuild from the recorded source diagram with endpoints snapped to the grid
Landscape landscape_grid_round(const Landscape& l, double step);

double evaluate_layer(const Layer& l, double t);

// p is 1, 2 or infinity
double layer_norm(const Layer& l, double p);
double layer_distance(const Layer& a, const Layer& b, double p);

// combined over layers: sum for p=1, root of summed squares for p=2, max for p=inf
double landscape_norm(const Landscape& l, int h, double p);
double landscape_distance(const Landscape& a, const Landscape& b, int h, double p);

Landscape landscape_average(const std::vector<Landscape>& ls);

nlohmann::json landscape_to_json(const Landscape& l);
Landscape landscape_from_json(const nlohmann::json& j);

}  // namespace presto
