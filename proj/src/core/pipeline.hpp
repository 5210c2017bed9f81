#pragma once

#include <string>
#include <vector>

#include "core/embedding.hpp"
#include "core/io.hpp"
#include "core/landscape.hpp"
#include "core/presto_ops.hpp"
#include "json.hpp"

namespace presto {

struct PipelineConfig {
  std::string projector = "none";  // none | pca | gauss | mmds
  int k = 2;
  int n_projections = 1;  // gauss averages this many draws
  uint64_t seed = 42;
  int h_max = 2;
  double p = 2.0;  // 1, 2, or infinity
  bool normalize = false;
  bool cap_essential = false;  // close never-dying classes at the top of the filtration
  bool use_rips = false;
  double rips_threshold = -1.0;  // < 0: largest pairwise distance
  double grid_step = 0.0;        // > 0: snap diagram endpoints to this grid
  int jobs = 1;
};

nlohmann::json pipeline_config_to_json(const PipelineConfig& cfg);

struct StageTimes {
  double load_ms = 0;
  double preprocess_ms = 0;
  double project_ms = 0;
  double persistence_ms = 0;
  double landscape_ms = 0;
  double distance_ms = 0;
};
nlohmann::json stage_times_to_json(const StageTimes& t);

// normalize -> project -> filtered complex -> persistence -> landscape
Landscape embedding_to_landscape(const Embedding& e, const PipelineConfig& cfg,
                                 StageTimes* times = nullptr);

// One landscape per universe, manifest order. Duplicate embedding paths are
// computed once; cfg.jobs bounds worker threads.
std::vector<Landscape> manifest_landscapes(const Manifest& m, const PipelineConfig& cfg,
                                           StageTimes* times = nullptr);

Mms build_mms(const Manifest& m, const PipelineConfig& cfg, StageTimes* times = nullptr);
Mms mms_from_landscapes(const std::vector<std::string>& ids,
                        const std::vector<Landscape>& ls, const PipelineConfig& cfg,
                        StageTimes* times = nullptr);

}  // namespace presto
