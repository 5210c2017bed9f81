#include "core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "core/complex.hpp"
#include "core/diagram_metrics.hpp"
#include "core/error.hpp"
#include "core/persistence.hpp"
#include "core/rng.hpp"

namespace presto {

namespace {

double interpolated_quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  double h = q * static_cast<double>(xs.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= xs.size()) return xs.back();
  double frac = h - static_cast<double>(lo);
  return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

}  // namespace

OutlierReport detect_outliers_from_scores(const std::vector<std::string>& ids,
                                          const std::vector<double>& scores,
                                          const std::string& method, double threshold) {
  if (ids.size() != scores.size()) throw DomainError("ids and scores differ in length");
  for (double s : scores)
    if (!std::isfinite(s)) throw DataError("non-finite landscape norm");
  size_t n = scores.size();
  OutlierReport r;
  r.ids = ids;
  r.scores = scores;
  r.method = method;
  r.threshold = threshold;

  if (method == "zscore") {
    if (n < 3) throw DomainError("zscore outlier detection needs at least 3 landscapes");
    double mu = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double s : scores) var += (s - mu) * (s - mu);
    double sigma = std::sqrt(var / static_cast<double>(n));
    if (sigma == 0.0) return r;
    for (size_t i = 0; i < n; ++i)
      if (std::abs(scores[i] - mu) / sigma > threshold) r.flagged.push_back(ids[i]);
    return r;
  }
  if (method == "iqr") {
    if (n < 4) throw DomainError("iqr outlier detection needs at least 4 landscapes");
    double q1 = interpolated_quantile(scores, 0.25);
    double q3 = interpolated_quantile(scores, 0.75);
    double iqr = q3 - q1;
    double lo = q1 - threshold * iqr;
    double hi = q3 + threshold * iqr;
    for (size_t i = 0; i < n; ++i)
      if (scores[i] < lo || scores[i] > hi) r.flagged.push_back(ids[i]);
    return r;
  }
  throw DomainError("unknown outlier method '" + method + "' (zscore or iqr)");
}

OutlierReport detect_outliers(const std::vector<std::string>& ids,
                              const std::vector<Landscape>& ls, const std::string& method,
                              double threshold, int h_max, double p) {
  if (ids.size() != ls.size()) throw DomainError("ids and landscapes differ in length");
  std::vector<double> scores;
  scores.reserve(ls.size());
  for (const auto& l : ls) scores.push_back(presto_norm(l, h_max, p));
  return detect_outliers_from_scores(ids, scores, method, threshold);
}

nlohmann::json outlier_report_to_json(const OutlierReport& r) {
  nlohmann::json j;
  nlohmann::json scores = nlohmann::json::object();
  for (size_t i = 0; i < r.ids.size(); ++i) scores[r.ids[i]] = r.scores[i];
  j["scores"] = std::move(scores);
  j["flagged"] = r.flagged;
  j["method"] = r.method;
  j["threshold"] = r.threshold;
  return j;
}

std::vector<int> cluster_universes(const Mms& m, double epsilon) {
  int n = static_cast<int>(m.size());
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});

  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i < clusters.size(); ++i)
      for (size_t j = i + 1; j < clusters.size(); ++j) {
        double link = 0.0;
        for (int a : clusters[i])
          for (int b : clusters[j]) link = std::max(link, m.dist(a, b));
        // ties resolved by the smallest pair of cluster minima
        if (link < best) {
          best = link;
          bi = i;
          bj = j;
        }
      }
    if (best > epsilon) break;
    auto& dst = clusters[bi];
    dst.insert(dst.end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(dst.begin(), dst.end());
    clusters.erase(clusters.begin() + static_cast<long>(bj));
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });
  std::vector<int> labels(static_cast<size_t>(n), -1);
  for (size_t c = 0; c < clusters.size(); ++c)
    for (int i : clusters[c]) labels[static_cast<size_t>(i)] = static_cast<int>(c);
  return labels;
}

namespace {

CompressionResult greedy_cover(const Mms& m, double epsilon) {
  int n = static_cast<int>(m.size());
  std::vector<std::vector<int>> cover(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.dist(i, j) <= epsilon) cover[static_cast<size_t>(i)].push_back(j);

  std::vector<bool> covered(static_cast<size_t>(n), false);
  std::vector<int> reps;
  int n_covered = 0;
  while (n_covered < n) {
    int best = -1, best_gain = -1;
    for (int i = 0; i < n; ++i) {
      int gain = 0;
      for (int j : cover[static_cast<size_t>(i)])
        if (!covered[static_cast<size_t>(j)]) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    reps.push_back(best);
    for (int j : cover[static_cast<size_t>(best)])
      if (!covered[static_cast<size_t>(j)]) {
        covered[static_cast<size_t>(j)] = true;
        ++n_covered;
      }
  }
  std::sort(reps.begin(), reps.end());

  CompressionResult r;
  r.epsilon = epsilon;
  for (int i : reps) r.representatives.push_back(m.ids[static_cast<size_t>(i)]);
  r.assignment.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    int chosen = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i : reps) {
      if (i == j) {
        chosen = i;
        break;
      }
      if (m.dist(i, j) < best_d) {
        best_d = m.dist(i, j);
        chosen = i;
      }
    }
    r.assignment[static_cast<size_t>(j)] = m.ids[static_cast<size_t>(chosen)];
  }
  return r;
}

}  // namespace

CompressionResult compress_search_space(const Mms& m, double epsilon) {
  if (m.size() == 0) throw DomainError("cannot compress an empty multiverse");
  if (epsilon <= 0) throw DomainError("epsilon must be positive");
  return greedy_cover(m, epsilon);
}

CompressionResult compress_search_space_quantile(const Mms& m, double q) {
  if (q <= 0 || q >= 1) throw DomainError("quantile must lie strictly between 0 and 1");
  double eps = mms_quantile_epsilon(m, q);
  if (eps <= 0)
    throw DegenerateError("quantile " + std::to_string(q) +
                          " of the distance distribution is 0; give --epsilon instead");
  CompressionResult r = greedy_cover(m, eps);
  r.quantile = q;
  return r;
}

nlohmann::json compression_to_json(const CompressionResult& r) {
  nlohmann::json j;
  j["representatives"] = r.representatives;
  j["assignment"] = r.assignment;
  j["epsilon"] = r.epsilon;
  if (r.quantile >= 0)
    j["quantile"] = r.quantile;
  else
    j["quantile"] = nullptr;
  j["method"] = r.method;
  return j;
}

double mms_quantile_epsilon(const Mms& m, double q) {
  if (q < 0 || q > 1) throw DomainError("quantile must lie in [0, 1]");
  long n = static_cast<long>(m.size());
  std::vector<double> ds;
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) ds.push_back(m.dist(i, j));
  if (ds.empty()) throw DomainError("quantile needs at least two universes");
  return interpolated_quantile(std::move(ds), q);
}

int optimal_cover_size(const Mms& m, double epsilon) {
  int n = static_cast<int>(m.size());
  if (n == 0) throw DomainError("cannot cover an empty multiverse");
  if (n > 20) throw DomainError("exhaustive cover search is limited to 20 universes");
  std::vector<uint32_t> mask(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.dist(i, j) <= epsilon) mask[static_cast<size_t>(i)] |= 1u << j;
  uint32_t all = (1u << n) - 1;
  int best = n;
  for (uint32_t s = 1; s < (1u << n); ++s) {
    int size = __builtin_popcount(s);
    if (size >= best) continue;
    uint32_t u = 0;
    for (int i = 0; i < n; ++i)
      if (s & (1u << i)) u |= mask[static_cast<size_t>(i)];
    if (u == all) best = size;
  }
  return best;
}

double harmonic_number(int m) {
  double h = 0.0;
  for (int i = 1; i <= m; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

namespace {

struct TriPair {
  std::vector<double> u;
  double mean = 0, ssd = 0;
};

TriPair upper_triangle(const Matrix& d) {
  TriPair t;
  long n = d.rows();
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) t.u.push_back(d(i, j));
  for (double v : t.u) t.mean += v;
  t.mean /= static_cast<double>(t.u.size());
  for (double v : t.u) t.ssd += (v - t.mean) * (v - t.mean);
  return t;
}

double pearson_permuted(const Matrix& d1, const Matrix& d2, const std::vector<int>& perm,
                        double mean1, double ssd1) {
  long n = d1.rows();
  double mean2 = 0, ssd2 = 0, cross = 0;
  std::vector<double> v;
  v.reserve(static_cast<size_t>(n * (n - 1) / 2));
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      v.push_back(d2(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]));
  for (double x : v) mean2 += x;
  mean2 /= static_cast<double>(v.size());
  size_t idx = 0;
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      double a = d1(i, j) - mean1;
      double b = v[idx++] - mean2;
      ssd2 += b * b;
      cross += a * b;
    }
  return cross / std::sqrt(ssd1 * ssd2);
}

}  // namespace

MantelResult mantel_test(const Matrix& d1, const Matrix& d2, int permutations, uint64_t seed,
                         int n_comparisons, int jobs) {
  long n = d1.rows();
  if (d1.cols() != n || d2.rows() != n || d2.cols() != n)
    throw DomainError("matrices must be square and of equal size");
  if (n < 3) throw DomainError("mantel test needs at least 3 universes");
  if (permutations < 99) throw DomainError("at least 99 permutations required");

  TriPair t1 = upper_triangle(d1);
  TriPair t2 = upper_triangle(d2);
  if (t1.ssd == 0.0 || t2.ssd == 0.0)
    throw DegenerateError("constant distance matrix has no correlation");

  std::vector<int> identity(static_cast<size_t>(n));
  std::iota(identity.begin(), identity.end(), 0);
  double r = pearson_permuted(d1, d2, identity, t1.mean, t1.ssd);

  auto count_range = [&](int lo, int hi) {
    long c = 0;
    for (int t = lo; t < hi; ++t) {
      CounterRng rng(seed, static_cast<uint64_t>(t) + 1);
      std::vector<int> perm = identity;
      uint64_t ctr = 0;
      for (long i = n - 1; i > 0; --i) {
        uint64_t j = rng.bits(ctr++) % static_cast<uint64_t>(i + 1);
        std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
      }
      if (pearson_permuted(d1, d2, perm, t1.mean, t1.ssd) >= r) ++c;
    }
    return c;
  };

  long count = 0;
  if (jobs <= 1) {
    count = count_range(0, permutations);
  } else {
    int workers = std::min(jobs, permutations);
    std::vector<long> partial(static_cast<size_t>(workers), 0);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w]() {
        int lo = permutations * w / workers;
        int hi = permutations * (w + 1) / workers;
        partial[static_cast<size_t>(w)] = count_range(lo, hi);
      });
    for (auto& th : pool) th.join();
    for (long c : partial) count += c;
  }

  MantelResult res;
  res.r = r;
  res.permutations = permutations;
  res.p_value = (1.0 + static_cast<double>(count)) / (static_cast<double>(permutations) + 1.0);
  if (n_comparisons > 0)
    res.corrected_p = std::min(1.0, res.p_value * static_cast<double>(n_comparisons));
  return res;
}

nlohmann::json mantel_to_json(const MantelResult& r) {
  nlohmann::json j;
  j["r"] = r.r;
  j["p_value"] = r.p_value;
  j["permutations"] = r.permutations;
  if (r.corrected_p >= 0)
    j["corrected_p"] = r.corrected_p;
  else
    j["corrected_p"] = nullptr;
  return j;
}

double compare_mms(const Mms& a, const Mms& b, const std::string& metric, double p) {
  if (a.size() < 2 || b.size() < 2)
    throw DomainError("mms comparison needs at least 2 universes on each side");
  PersistenceDiagram da = persistence(rips_complex(a.dist, 1), 1);
  PersistenceDiagram db = persistence(rips_complex(b.dist, 1), 1);
  double total = 0.0;
  for (int h = 0; h <= 1; ++h) {
    const auto& ia = da.intervals[static_cast<size_t>(h)];
    const auto& ib = db.intervals[static_cast<size_t>(h)];
    if (metric == "bottleneck")
      total += bottleneck_distance(ia, ib);
    else if (metric == "wasserstein")
      total += wasserstein_distance(ia, ib, p).value;
    else
      throw DomainError("unknown metric '" + metric + "' (bottleneck or wasserstein)");
  }
  return total;
}

}  // namespace presto
