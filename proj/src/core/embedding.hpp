#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace presto {

using Matrix = Eigen::MatrixXd;

// A point cloud: n samples (rows) in d dimensions (columns).
struct Embedding {
  Matrix points;  // n x d, row major semantics
  std::string source_id;
  bool normalized = false;
  double diameter_used = 0.0;  // diameter the normalization divided by, 0 if none

  long n() const { return points.rows(); }
  long d() const { return points.cols(); }
};

struct DiameterResult {
  double value = 0.0;
  bool exact = true;
  int restarts_used = 0;
};

struct ExplainedVariance {
  std::vector<double> eigenvalues;  // all min(n, d) covariance eigenvalues, descending
};

}  // namespace presto
