#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/embedding.hpp"
#include "core/io.hpp"
#include "core/landscape.hpp"
#include "json.hpp"

namespace presto {

// Symmetric matrix of pairwise topological distances over a set of universes.
struct Mms {
  std::vector<std::string> ids;
  Matrix dist;
  nlohmann::json config = nlohmann::json::object();

  size_t size() const { return ids.size(); }
};

// symmetry to 1e-12, zero diagonal, nonnegative entries, triangle inequality to 1e-9
void validate_mms(const Mms& m);
Mms mms_from_matrix(std::vector<std::string> ids, Matrix dist,
                    nlohmann::json config = nlohmann::json::object());

nlohmann::json mms_to_json(const Mms& m);
Mms mms_from_json(const nlohmann::json& j);
void mms_save_csv(const Mms& m, const std::string& path);
Mms mms_load_csv(const std::string& path);

// Sum over homology dimensions 0..h_max of the L^p landscape distance.
// The gated variant refuses landscapes built with different settings.
double presto_distance(const Landscape& a, const Landscape& b, int h_max, double p);
double presto_distance_raw(const Landscape& a, const Landscape& b, int h_max, double p);

// Matching norm aggregate: sum of per-dimension landscape norms.
double presto_norm(const Landscape& l, int h_max, double p);

// Per-dimension population variance of landscape norms, summed over
// dimensions and divided by the set size.
double presto_variance(const std::vector<Landscape>& ls, int h_max, double p);

// Sensitivity of the multiverse to one parameter dimension. Universes are
// grouped into classes that agree on every other parameter; landscapes run
// parallel to m.universes.
double sensitivity_individual(const Manifest& m, const std::vector<Landscape>& landscapes,
                              const std::string& dim_name, const nlohmann::json& class_key,
                              int h_max, double p);
double sensitivity_local(const Manifest& m, const std::vector<Landscape>& landscapes,
                         const std::string& dim_name, int h_max, double p);
double sensitivity_global(const Manifest& m, const std::vector<Landscape>& landscapes,
                          int h_max, double p);

struct SensitivityReport {
  std::vector<std::pair<std::string, double>> per_dimension;
  double global = 0;
};
SensitivityReport sensitivity_report(const Manifest& m, const std::vector<Landscape>& landscapes,
                                     int h_max, double p);
nlohmann::json sensitivity_report_to_json(const SensitivityReport& r);

struct TopologicalLossReport {
  std::vector<double> per_universe_loss;
  double loss = 0;
};
TopologicalLossReport topological_loss(const std::vector<Landscape>& originals,
                                       const std::vector<Landscape>& projecteds,
                                       int h_max, double p);

struct MetricPreservationReport {
  bool pass = true;
  double worst_excess = 0;  // max over pairs of pmms - (mms + 2*loss); <= tol when passing
  double tolerance = 1e-9;
  std::vector<std::array<double, 4>> violations;  // i, j, value, bound
};
MetricPreservationReport check_metric_preservation(const Mms& mms, const Mms& pmms,
                                                   double loss);
nlohmann::json metric_preservation_to_json(const MetricPreservationReport& r);

struct VarianceBoundReport {
  double pv_orig = 0, pv_proj = 0, loss = 0;
  double aggregate_delta = 0;
  double aggregate_bound = 0;  // absolute-deviation reading of the spread term
  bool aggregate_pass = true;
  std::vector<double> sandwich_slack;  // loss - |orig_norm - proj_norm| per universe
  bool sandwich_pass = true;
  double tolerance = 1e-9;
};
VarianceBoundReport check_variance_bound(double pv_orig, double pv_proj, double loss,
                                         const std::vector<double>& orig_norms,
                                         const std::vector<double>& proj_norms);
nlohmann::json variance_bound_to_json(const VarianceBoundReport& r);

}  // namespace presto
