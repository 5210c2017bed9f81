#pragma once

#include <cmath>
#include <cstdint>

namespace presto {

// Counter-based generator: every draw is a pure function of (key, counter),
// so parallel consumers can pull from disjoint streams without shared state.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream)
      : key_(splitmix64(seed ^ splitmix64(stream * 0xd1342543de82ef95ULL + 1))) {}

  uint64_t bits(uint64_t counter) const { return splitmix64(key_ ^ counter * 0x2545f4914f6cdd1dULL); }

  // uniform in (0, 1); never returns 0 so log() below stays finite
  double uniform(uint64_t counter) const {
    uint64_t u = bits(counter) >> 11;
    return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
  }

  // standard normal via Box-Muller, one value per counter
  double normal(uint64_t counter) const {
    double u1 = uniform(2 * counter);
    double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  uint64_t key_;
};

}  // namespace presto
