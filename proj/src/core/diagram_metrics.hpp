#pragma once

#include <utility>
#include <vector>

namespace presto {

using Interval = std::pair<double, double>;

// exact bottleneck distance with diagonal matching allowed
double bottleneck_distance(const std::vector<Interval>& a, const std::vector<Interval>& b);

struct WassersteinResult {
  double value = 0.0;          // (sum of matched costs^p)^(1/p)
  double max_pair_cost = 0.0;  // largest single matched cost, before the power
  long matching_size = 0;      // always |a| + |b| (diagonal slots included)
};

// p-Wasserstein with the sup ground metric, computed by an exact assignment
WassersteinResult wasserstein_distance(const std::vector<Interval>& a,
                                       const std::vector<Interval>& b, double p);

}  // namespace presto
