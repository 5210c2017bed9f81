#include "core/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace presto {

namespace {

double dist_rows(const Matrix& x, long a, long b) { return (x.row(a) - x.row(b)).norm(); }

long farthest_from(const Matrix& x, long a) {
  long best = a;
  double bestd = -1.0;
  for (long i = 0; i < x.rows(); ++i) {
    double d = (x.row(i) - x.row(a)).squaredNorm();
    if (d > bestd) {
      bestd = d;
      best = i;
    }
  }
  return best;
}

// flip so the entry of largest magnitude is positive; first such entry wins
void canonical_sign(Eigen::VectorXd& v) {
  long arg = 0;
  double best = std::abs(v[0]);
  for (long i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0) v = -v;
}

}  // namespace

Matrix pairwise_distances(const Matrix& points) {
  long n = points.rows();
  Matrix d(n, n);
  for (long i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (long j = i + 1; j < n; ++j) {
      double v = (points.row(i) - points.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

DiameterResult approx_diameter(const Embedding& e, long exact_threshold, int restarts) {
  long n = e.n();
  if (n < 2) throw DomainError("diameter needs at least 2 points, got " + std::to_string(n));
  DiameterResult r;
  if (n <= exact_threshold) {
    double best = 0.0;
    for (long i = 0; i < n; ++i)
      for (long j = i + 1; j < n; ++j) best = std::max(best, dist_rows(e.points, i, j));
    if (best <= 0.0) throw DegenerateError("zero diameter: all points coincide");
    r.value = best;
    r.exact = true;
    return r;
  }
  double best = 0.0;
  for (int s = 0; s < restarts; ++s) {
    long seed = static_cast<long>((static_cast<long long>(s) * n) / restarts);
    long a = farthest_from(e.points, seed);
    long b = farthest_from(e.points, a);
    best = std::max(best, dist_rows(e.points, a, b));
  }
  if (best <= 0.0) throw DegenerateError("zero diameter: all points coincide");
  r.value = best;
  r.exact = false;
  r.restarts_used = restarts;
  return r;
}

Embedding normalize(const Embedding& e, double diameter) {
  if (e.normalized) throw StateError("embedding is already normalized");
  if (!(diameter > 0.0)) throw DomainError("diameter must be positive");
  Embedding out;
  out.points = e.points / diameter;
  out.source_id = e.source_id;
  out.normalized = true;
  out.diameter_used = diameter;
  return out;
}

Embedding normalize(const Embedding& e, long exact_threshold, int restarts) {
  if (e.normalized) throw StateError("embedding is already normalized");
  DiameterResult d = approx_diameter(e, exact_threshold, restarts);
  if (d.value <= 0.0) throw DegenerateError("zero diameter: all points coincide");
  return normalize(e, d.value);
}

PcaResult project_pca(const Embedding& e, long k) {
  long n = e.n(), d = e.d();
  if (k < 1 || k > std::min(n, d))
    throw DomainError("pca k=" + std::to_string(k) + " out of range [1, " +
                      std::to_string(std::min(n, d)) + "]");
  Matrix centered = e.points.rowwise() - e.points.colwise().mean();
  double divisor = static_cast<double>(std::max<long>(n - 1, 1));
  long r = std::min(n, d);

  std::vector<double> eigenvalues;
  Matrix components(d, k);

  if (d <= 1024) {
    Matrix cov = (centered.transpose() * centered) / divisor;
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    if (es.info() != Eigen::Success) throw DomainError("pca eigendecomposition failed");
    // Eigen sorts ascending
    for (long i = 0; i < r; ++i)
      eigenvalues.push_back(std::max(0.0, es.eigenvalues()[d - 1 - i]));
    for (long i = 0; i < k; ++i) {
      Eigen::VectorXd v = es.eigenvectors().col(d - 1 - i);
      canonical_sign(v);
      components.col(i) = v;
    }
  } else {
    // gram trick: eigenvectors of X X^T give the component directions via X^T u
    Matrix gram = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    if (es.info() != Eigen::Success) throw DomainError("pca eigendecomposition failed");
    for (long i = 0; i < r; ++i)
      eigenvalues.push_back(std::max(0.0, es.eigenvalues()[n - 1 - i]) / divisor);
    for (long i = 0; i < k; ++i) {
      double lam = std::max(0.0, es.eigenvalues()[n - 1 - i]);
      Eigen::VectorXd u = es.eigenvectors().col(n - 1 - i);
      Eigen::VectorXd v = centered.transpose() * u;
      double norm = v.norm();
      if (lam <= 0.0 || norm == 0.0)
        throw DegenerateError("pca rank below k=" + std::to_string(k));
      v /= norm;
      canonical_sign(v);
      components.col(i) = v;
    }
  }

  PcaResult out;
  out.projected.points = centered * components;
  out.projected.source_id = e.source_id;
  out.projected.normalized = e.normalized;
  out.projected.diameter_used = e.diameter_used;
  out.explained_variance = std::move(eigenvalues);
  return out;
}

std::vector<Embedding> project_gaussian(const Embedding& e, long k, int n_projections,
                                        uint64_t seed) {
  long d = e.d();
  if (k < 1) throw DomainError("gaussian projection k must be >= 1, got " + std::to_string(k));
  if (n_projections < 1)
    throw DomainError("n_projections must be >= 1, got " + std::to_string(n_projections));
  std::vector<Embedding> out;
  double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (int j = 0; j < n_projections; ++j) {
    CounterRng rng(seed, static_cast<uint64_t>(j));
    Matrix r(d, k);
    for (long row = 0; row < d; ++row)
      for (long col = 0; col < k; ++col)
        r(row, col) = rng.normal(static_cast<uint64_t>(row) * k + col) * scale;
    Embedding p;
    p.points = e.points * r;
    p.source_id = e.source_id;
    p.normalized = e.normalized;
    p.diameter_used = e.diameter_used;
    out.push_back(std::move(p));
  }
  return out;
}

Matrix mmds_from_distances(const Matrix& dist, long k) {
  long n = dist.rows();
  if (dist.cols() != n) throw DomainError("mmds needs a square distance matrix");
  if (k < 1 || k > n)
    throw DomainError("mmds k=" + std::to_string(k) + " out of range [1, " + std::to_string(n) + "]");
  Matrix sq = dist.array().square();
  Matrix centering = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  Matrix b = -0.5 * centering * sq * centering;
  b = 0.5 * (b + b.transpose());  // symmetrize away round-off
  Eigen::SelfAdjointEigenSolver<Matrix> es(b);
  if (es.info() != Eigen::Success) throw DomainError("mmds eigendecomposition failed");

  double lam_max = std::max(0.0, es.eigenvalues()[n - 1]);
  double tol = lam_max * 1e-12;
  long positive = 0;
  for (long i = 0; i < n; ++i)
    if (es.eigenvalues()[i] > tol) ++positive;
  if (positive < k)
    throw DomainError("mmds: distance matrix has rank " + std::to_string(positive) +
                      ", cannot embed into k=" + std::to_string(k) + " dimensions");

  Matrix coords(n, k);
  for (long i = 0; i < k; ++i) {
    double lam = es.eigenvalues()[n - 1 - i];
    Eigen::VectorXd u = es.eigenvectors().col(n - 1 - i);
    canonical_sign(u);
    coords.col(i) = u * std::sqrt(lam);
  }
  return coords;
}

Embedding project_mmds(const Embedding& e, long k) {
  if (k > e.d())
    throw DomainError("mmds k=" + std::to_string(k) + " exceeds input dimension " +
                      std::to_string(e.d()));
  Embedding out;
  out.points = mmds_from_distances(pairwise_distances(e.points), k);
  out.source_id = e.source_id;
  out.normalized = e.normalized;
  out.diameter_used = e.diameter_used;
  return out;
}

}  // namespace presto
