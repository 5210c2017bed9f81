#pragma once

#include <string>
#include <vector>

#include "core/landscape.hpp"
#include "core/presto_ops.hpp"
#include "json.hpp"

namespace presto {

struct OutlierReport {
  std::vector<std::string> ids;
  std::vector<double> scores;  // summed per-dimension landscape norms
  std::vector<std::string> flagged;
  std::string method;  // zscore | iqr
  double threshold = 0;
};
OutlierReport detect_outliers(const std::vector<std::string>& ids,
                              const std::vector<Landscape>& ls, const std::string& method,
                              double threshold, int h_max, double p);
OutlierReport detect_outliers_from_scores(const std::vector<std::string>& ids,
                                          const std::vector<double>& scores,
                                          const std::string& method, double threshold);
nlohmann::json outlier_report_to_json(const OutlierReport& r);

// Complete-linkage agglomerative clustering cut at epsilon. Labels are dense,
// numbered by each cluster's smallest member index.
std::vector<int> cluster_universes(const Mms& m, double epsilon);

struct CompressionResult {
  std::vector<std::string> representatives;
  std::vector<std::string> assignment;  // per universe, its representative id
  double epsilon = 0;
  double quantile = -1;  // < 0 when epsilon was given directly
  std::string method = "greedy_set_cover";
};
CompressionResult compress_search_space(const Mms& m, double epsilon);
CompressionResult compress_search_space_quantile(const Mms& m, double q);
nlohmann::json compression_to_json(const CompressionResult& r);

// linear-interpolation quantile of the upper-triangle distance distribution
double mms_quantile_epsilon(const Mms& m, double q);

// smallest cover size, exhaustive; m.size() must be <= 20
int optimal_cover_size(const Mms& m, double epsilon);
double harmonic_number(int m);

struct MantelResult {
  double r = 0;
  double p_value = 1;
  int permutations = 0;
  double corrected_p = -1;  // < 0 when no correction requested
};
MantelResult mantel_test(const Matrix& d1, const Matrix& d2, int permutations, uint64_t seed,
                         int n_comparisons = 0, int jobs = 1);
nlohmann::json mantel_to_json(const MantelResult& r);

// Rips persistence of each distance matrix (dimensions 0 and 1), compared by
// the chosen diagram distance summed over both dimensions.
double compare_mms(const Mms& a, const Mms& b, const std::string& metric, double p);

}  // namespace presto
