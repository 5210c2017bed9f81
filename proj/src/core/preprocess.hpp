#pragma once

#include <cstdint>
#include <vector>

#include "core/embedding.hpp"

namespace presto {

// exact O(n^2) scan up to exact_threshold points, multi-start double sweep above
DiameterResult approx_diameter(const Embedding& e, long exact_threshold = 2048, int restarts = 8);

// divides every coordinate by the given diameter; not repeatable
Embedding normalize(const Embedding& e, double diameter);
// convenience form that measures the diameter itself
Embedding normalize(const Embedding& e, long exact_threshold = 2048, int restarts = 8);

struct PcaResult {
  Embedding projected;
  std::vector<double> explained_variance;  // all min(n, d) covariance eigenvalues, descending
};

PcaResult project_pca(const Embedding& e, long k);

// n_projections independent draws; entry (r, c) of draw j depends only on (seed, j, r, c)
std::vector<Embedding> project_gaussian(const Embedding& e, long k, int n_projections,
                                        uint64_t seed);

Embedding project_mmds(const Embedding& e, long k);
Matrix mmds_from_distances(const Matrix& dist, long k);

Matrix pairwise_distances(const Matrix& points);

}  // namespace presto
