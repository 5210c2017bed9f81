#include "core/diagram_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace presto {

namespace {

double dist_inf(const Interval& x, const Interval& y) {
  return std::max(std::abs(x.first - y.first), std::abs(x.second - y.second));
}

double diag_cost(const Interval& x) { return (x.second - x.first) / 2.0; }

// Bipartite feasibility at radius r. Left side: the points of a, then one
// diagonal slot per point of b. Right side: the points of b, then one diagonal
// slot per point of a. Diagonal-diagonal pairings are always allowed.
struct Matcher {
  const std::vector<Interval>& a;
  const std::vector<Interval>& b;
  double r;
  int n1, n2, n;
  std::vector<int> match_left, match_right;
  std::vector<char> visited;

  Matcher(const std::vector<Interval>& a_, const std::vector<Interval>& b_, double r_)
      : a(a_), b(b_), r(r_), n1(static_cast<int>(a.size())), n2(static_cast<int>(b.size())),
        n(n1 + n2), match_left(n, -1), match_right(n, -1), visited(n, 0) {}

  bool allowed(int l, int rt) const {
    bool l_real = l < n1, r_real = rt < n2;
    if (l_real && r_real) return dist_inf(a[static_cast<size_t>(l)], b[static_cast<size_t>(rt)]) <= r;
    if (l_real && !r_real) return diag_cost(a[static_cast<size_t>(l)]) <= r;
    if (!l_real && r_real) return diag_cost(b[static_cast<size_t>(rt)]) <= r;
    return true;
  }

  bool try_augment(int l) {
    for (int rt = 0; rt < n; ++rt) {
      if (visited[static_cast<size_t>(rt)] || !allowed(l, rt)) continue;
      visited[static_cast<size_t>(rt)] = 1;
      if (match_right[static_cast<size_t>(rt)] < 0 || try_augment(match_right[static_cast<size_t>(rt)])) {
        match_right[static_cast<size_t>(rt)] = l;
        match_left[static_cast<size_t>(l)] = rt;
        return true;
      }
    }
    return false;
  }

  bool perfect() {
    for (int l = 0; l < n; ++l) {
      std::fill(visited.begin(), visited.end(), 0);
      if (!try_augment(l)) return false;
    }
    return true;
  }
};

bool feasible(const std::vector<Interval>& a, const std::vector<Interval>& b, double r) {
  Matcher m(a, b, r);
  return m.perfect();
}

}  // namespace

double bottleneck_distance(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<double> cand{0.0};
  for (const auto& x : a) cand.push_back(diag_cost(x));
  for (const auto& y : b) cand.push_back(diag_cost(y));
  for (const auto& x : a)
    for (const auto& y : b) cand.push_back(dist_inf(x, y));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  size_t lo = 0, hi = cand.size() - 1;
  if (feasible(a, b, cand[lo])) return cand[lo];
  // invariant: infeasible at lo, feasible at hi
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (feasible(a, b, cand[mid])) hi = mid;
    else lo = mid;
  }
  return cand[hi];
}

namespace {

// exact square assignment via shortest augmenting paths with potentials
double hungarian(const std::vector<std::vector<double>>& cost, std::vector<int>& row_of_col) {
  int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      int i0 = p[static_cast<size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        double cur = cost[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                     u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<size_t>(j0)] != 0);
    do {
      int j1 = way[static_cast<size_t>(j0)];
      p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  row_of_col.assign(static_cast<size_t>(n), -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    row_of_col[static_cast<size_t>(j - 1)] = p[static_cast<size_t>(j)] - 1;
    total += cost[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)][static_cast<size_t>(j - 1)];
  }
  return total;
}

}  // namespace

WassersteinResult wasserstein_distance(const std::vector<Interval>& a,
                                       const std::vector<Interval>& b, double p) {
  if (!(p >= 1.0))
    throw DomainError("wasserstein: p must be >= 1");
  WassersteinResult res;
  int n1 = static_cast<int>(a.size()), n2 = static_cast<int>(b.size());
  res.matching_size = n1 + n2;
  if (n1 + n2 == 0) return res;

  if (std::isinf(p)) {
    res.value = bottleneck_distance(a, b);
    res.max_pair_cost = res.value;
    return res;
  }

  int n = n1 + n2;
  // rows: points of a then diagonal slots; columns: points of b then diagonal slots
  std::vector<std::vector<double>> raw(static_cast<size_t>(n),
                                       std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double c;
      if (i < n1 && j < n2) c = dist_inf(a[static_cast<size_t>(i)], b[static_cast<size_t>(j)]);
      else if (i < n1) c = diag_cost(a[static_cast<size_t>(i)]);
      else if (j < n2) c = diag_cost(b[static_cast<size_t>(j)]);
      else c = 0.0;
      raw[static_cast<size_t>(i)][static_cast<size_t>(j)] = c;
    }
  }
  std::vector<std::vector<double>> cost = raw;
  for (auto& row : cost)
    for (auto& c : row) c = std::pow(c, p);

  std::vector<int> row_of_col;
  double total = hungarian(cost, row_of_col);
  double maxc = 0.0;
  for (int j = 0; j < n; ++j)
    maxc = std::max(maxc, raw[static_cast<size_t>(row_of_col[static_cast<size_t>(j)])][static_cast<size_t>(j)]);
  res.value = std::pow(std::max(total, 0.0), 1.0 / p);
  res.max_pair_cost = maxc;
  return res;
}

}  // namespace presto
