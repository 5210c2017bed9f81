#include "core/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "core/error.hpp"

namespace presto {

namespace {

struct TupleHash {
  size_t operator()(const std::array<int, 4>& a) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (int x : a) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
      h *= 0x100000001b3ULL;
    }
    return static_cast<size_t>(h);
  }
};

// xor-merge of two sorted index lists
void add_column(std::vector<int>& target, const std::vector<int>& other) {
  std::vector<int> out;
  out.reserve(target.size() + other.size());
  size_t a = 0, b = 0;
  while (a < target.size() && b < other.size()) {
    if (target[a] < other[b]) out.push_back(target[a++]);
    else if (other[b] < target[a]) out.push_back(other[b++]);
    else { ++a; ++b; }
  }
  while (a < target.size()) out.push_back(target[a++]);
  while (b < other.size()) out.push_back(other[b++]);
  target.swap(out);
}

}  // namespace

PersistenceDiagram persistence(const FilteredComplex& fc, int max_h) {
  if (max_h < 0) throw DomainError("persistence: max_h must be >= 0");
  int n = static_cast<int>(fc.simplices.size());

  std::unordered_map<std::array<int, 4>, int, TupleHash> position;
  position.reserve(static_cast<size_t>(n) * 2);
  for (int i = 0; i < n; ++i) position.emplace(fc.simplices[static_cast<size_t>(i)].v, i);

  int top = std::min(fc.max_dim, max_h + 1);
  std::vector<char> killed(static_cast<size_t>(n), 0);
  std::vector<char> positive(static_cast<size_t>(n), 0);
  std::vector<int> lowinv(static_cast<size_t>(n), -1);
  std::vector<std::pair<int, int>> pairs;  // (birth position, death position)

  std::vector<std::vector<int>> cols(static_cast<size_t>(n));
  for (int q = top; q >= 1; --q) {
    for (int i = 0; i < n; ++i) {
      const Simplex& s = fc.simplices[static_cast<size_t>(i)];
      if (s.dim != q) continue;
      if (killed[static_cast<size_t>(i)]) {
        positive[static_cast<size_t>(i)] = 1;
        continue;
      }
      std::vector<int> col;
      col.reserve(static_cast<size_t>(q) + 1);
      for (int drop = 0; drop <= q; ++drop) {
        std::array<int, 4> fkey{-1, -1, -1, -1};
        int w = 0;
        for (int v = 0; v <= q; ++v)
          if (v != drop) fkey[static_cast<size_t>(w++)] = s.v[static_cast<size_t>(v)];
        auto it = position.find(fkey);
        if (it == position.end()) throw DomainError("persistence: complex is not closed under faces");
        col.push_back(it->second);
      }
      std::sort(col.begin(), col.end());
      while (!col.empty()) {
        int low = col.back();
        int other = lowinv[static_cast<size_t>(low)];
        if (other < 0) break;
        add_column(col, cols[static_cast<size_t>(other)]);
      }
      if (col.empty()) {
        positive[static_cast<size_t>(i)] = 1;
      } else {
        int low = col.back();
        lowinv[static_cast<size_t>(low)] = i;
        cols[static_cast<size_t>(i)] = std::move(col);
        killed[static_cast<size_t>(low)] = 1;
        pairs.emplace_back(low, i);
      }
    }
  }

  PersistenceDiagram d;
  d.max_h = max_h;
  d.intervals.resize(static_cast<size_t>(max_h) + 1);
  d.essential_births.resize(static_cast<size_t>(max_h) + 1);

  for (auto [b, death] : pairs) {
    const Simplex& sb = fc.simplices[static_cast<size_t>(b)];
    const Simplex& sd = fc.simplices[static_cast<size_t>(death)];
    if (sb.dim > max_h) continue;
    if (sb.filt == sd.filt) continue;
    d.intervals[static_cast<size_t>(sb.dim)].emplace_back(sb.filt, sd.filt);
  }
  for (int i = 0; i < n; ++i) {
    const Simplex& s = fc.simplices[static_cast<size_t>(i)];
    if (s.dim > max_h || killed[static_cast<size_t>(i)]) continue;
    bool pos = s.dim == 0 || positive[static_cast<size_t>(i)];
    if (pos) d.essential_births[static_cast<size_t>(s.dim)].push_back(s.filt);
  }
  for (auto& v : d.intervals) std::sort(v.begin(), v.end());
  for (auto& v : d.essential_births) std::sort(v.begin(), v.end());
  return d;
}

nlohmann::json diagram_to_json(const PersistenceDiagram& d) {
  nlohmann::json j = nlohmann::json::object();
  for (int h = 0; h <= d.max_h; ++h) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto [b, e] : d.intervals[static_cast<size_t>(h)]) arr.push_back({b, e});
    j["h" + std::to_string(h)] = std::move(arr);
  }
  nlohmann::json ess = nlohmann::json::object();
  nlohmann::json essb = nlohmann::json::object();
  for (int h = 0; h <= d.max_h; ++h) {
    ess[std::to_string(h)] = d.essential_count(h);
    essb[std::to_string(h)] = d.essential_births[static_cast<size_t>(h)];
  }
  j["essential"] = std::move(ess);
  j["essential_births"] = std::move(essb);
  return j;
}

PersistenceDiagram diagram_from_json(const nlohmann::json& j) {
  PersistenceDiagram d;
  int max_h = -1;
  while (j.contains("h" + std::to_string(max_h + 1))) ++max_h;
  if (max_h < 0) throw FormatError("diagram json has no h0 key");
  d.max_h = max_h;
  d.intervals.resize(static_cast<size_t>(max_h) + 1);
  d.essential_births.resize(static_cast<size_t>(max_h) + 1);
  for (int h = 0; h <= max_h; ++h) {
    for (const auto& iv : j["h" + std::to_string(h)]) {
      if (!iv.is_array() || iv.size() != 2) throw FormatError("diagram interval must be [birth, death]");
      d.intervals[static_cast<size_t>(h)].emplace_back(iv[0].get<double>(), iv[1].get<double>());
    }
  }
  if (j.contains("essential_births")) {
    for (int h = 0; h <= max_h; ++h) {
      const auto& key = std::to_string(h);
      if (j["essential_births"].contains(key))
        for (const auto& b : j["essential_births"][key])
          d.essential_births[static_cast<size_t>(h)].push_back(b.get<double>());
    }
  } else if (j.contains("essential")) {
    for (int h = 0; h <= max_h; ++h) {
      const auto& key = std::to_string(h);
      long c = j["essential"].contains(key) ? j["essential"][key].get<long>() : 0;
      d.essential_births[static_cast<size_t>(h)].assign(static_cast<size_t>(c), 0.0);
    }
  }
  return d;
}

}  // namespace presto
