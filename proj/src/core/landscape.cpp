#include "core/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>

#include "core/error.hpp"

namespace presto {

namespace {

const std::vector<Layer> kNoLayers;

void push_knot(Layer& l, double t, double v) {
  if (!l.empty() && l.back().first == t) {
    // duplicate abscissa: keep a single knot (values agree by construction)
    l.back().second = v;
    return;
  }
  l.emplace_back(t, v);
}

// peel the upper envelopes of the interval tents, strongest layer first
std::vector<Layer> build_layers(std::vector<std::pair<double, double>> intervals) {
  std::vector<Layer> layers;
  if (intervals.empty()) return layers;

  std::sort(intervals.begin(), intervals.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  });

  bool same_birth = true;
  for (const auto& iv : intervals)
    if (iv.first != intervals.front().first) {
      same_birth = false;
      break;
    }
  if (same_birth) {
    // sorted tents never interleave, each interval is its own layer
    for (const auto& [b, d] : intervals) {
      Layer l;
      push_knot(l, b, 0.0);
      push_knot(l, (b + d) / 2.0, (d - b) / 2.0);
      push_knot(l, d, 0.0);
      layers.push_back(std::move(l));
    }
    return layers;
  }

  std::list<std::pair<double, double>> pool(intervals.begin(), intervals.end());
  while (!pool.empty()) {
    Layer l;
    auto it = pool.begin();
    double b = it->first, d = it->second;
    it = pool.erase(it);
    push_knot(l, b, 0.0);
    push_knot(l, (b + d) / 2.0, (d - b) / 2.0);
    while (true) {
      while (it != pool.end() && it->second <= d) ++it;
      if (it == pool.end()) {
        push_knot(l, d, 0.0);
        break;
      }
      double b2 = it->first, d2 = it->second;
      it = pool.erase(it);
      if (b2 > d) {
        push_knot(l, d, 0.0);
        push_knot(l, b2, 0.0);
      } else if (b2 == d) {
        push_knot(l, d, 0.0);
      } else {
        push_knot(l, (b2 + d) / 2.0, (d - b2) / 2.0);
        // the overlapped chunk feeds the next layer down
        auto ins = it;
        while (ins != pool.end() &&
               (ins->first < b2 || (ins->first == b2 && ins->second > d)))
          ++ins;
        pool.insert(ins, {b2, d});
      }
      push_knot(l, (b2 + d2) / 2.0, (d2 - b2) / 2.0);
      d = d2;
    }
    layers.push_back(std::move(l));
  }
  return layers;
}

double segment_l1(double x0, double y0, double x1, double y1) {
  double w = x1 - x0;
  if (w <= 0) return 0.0;
  if ((y0 < 0 && y1 > 0) || (y0 > 0 && y1 < 0)) {
    double xc = x0 + w * y0 / (y0 - y1);
    return std::abs(y0) * (xc - x0) / 2.0 + std::abs(y1) * (x1 - xc) / 2.0;
  }
  return std::abs(y0 + y1) * w / 2.0;
}

double segment_l2sq(double x0, double y0, double x1, double y1) {
  double w = x1 - x0;
  if (w <= 0) return 0.0;
  if ((y0 < 0 && y1 > 0) || (y0 > 0 && y1 < 0)) {
    double xc = x0 + w * y0 / (y0 - y1);
    return segment_l2sq(x0, y0, xc, 0.0) + segment_l2sq(xc, 0.0, x1, y1);
  }
  return w * (y0 * y0 + y0 * y1 + y1 * y1) / 3.0;
}

}  // namespace

const std::vector<Layer>& Landscape::at(int h) const {
  if (h < 0 || h > max_h) return kNoLayers;
  return layers[static_cast<size_t>(h)];
}

namespace {

Landscape build_landscape(std::vector<std::vector<std::pair<double, double>>> source,
                          int max_h, double grid_step) {
  Landscape out;
  out.max_h = max_h;
  out.layers.resize(static_cast<size_t>(max_h) + 1);
  for (int h = 0; h <= max_h; ++h) {
    std::vector<std::pair<double, double>> ivs = source[static_cast<size_t>(h)];
    if (grid_step > 0) {
      std::vector<std::pair<double, double>> snapped;
      for (auto [b, e] : ivs) {
        double rb = std::round(b / grid_step) * grid_step;
        double re = std::round(e / grid_step) * grid_step;
        if (re > rb) snapped.emplace_back(rb, re);
      }
      ivs = std::move(snapped);
    }
    out.layers[static_cast<size_t>(h)] = build_layers(std::move(ivs));
  }
  out.intervals = std::move(source);
  out.provenance.h_max = max_h;
  out.provenance.grid_step = grid_step;
  return out;
}

}  // namespace

Landscape landscape_from_diagram(const PersistenceDiagram& d, double grid_step) {
  if (grid_step < 0) throw DomainError("landscape: grid step must be positive");
  return build_landscape(d.intervals, d.max_h, grid_step);
}

Landscape landscape_grid_round(const Landscape& l, double step) {
  if (step <= 0) throw DomainError("grid step must be positive");
  if (l.intervals.size() != static_cast<size_t>(l.max_h) + 1)
    throw StateError("landscape carries no source diagram, cannot re-round");
  Landscape out = build_landscape(l.intervals, l.max_h, step);
  LandscapeProvenance prov = l.provenance;
  prov.grid_step = step;
  out.provenance = prov;
  return out;
}

double evaluate_layer(const Layer& l, double t) {
  if (l.empty() || t <= l.front().first || t >= l.back().first) return 0.0;
  auto it = std::upper_bound(l.begin(), l.end(), t,
                             [](double x, const std::pair<double, double>& k) { return x < k.first; });
  // it points at the first knot beyond t; it-1 exists because t > front
  auto [x1, y1] = *it;
  auto [x0, y0] = *(it - 1);
  if (x1 == x0) return y0;
  return y0 + (y1 - y0) * (t - x0) / (x1 - x0);
}

double layer_norm(const Layer& l, double p) {
  if (l.size() < 2) return 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& [t, v] : l) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < l.size(); ++i)
      s += segment_l1(l[i].first, l[i].second, l[i + 1].first, l[i + 1].second);
    return s;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < l.size(); ++i)
      s += segment_l2sq(l[i].first, l[i].second, l[i + 1].first, l[i + 1].second);
    return std::sqrt(std::max(s, 0.0));
  }
  throw DomainError("layer norm: p must be 1, 2 or infinity");
}

double layer_distance(const Layer& a, const Layer& b, double p) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<double> ts;
  ts.reserve(a.size() + b.size());
  for (const auto& [t, v] : a) ts.push_back(t);
  for (const auto& [t, v] : b) ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<std::pair<double, double>> diff;
  diff.reserve(ts.size());
  for (double t : ts) diff.emplace_back(t, evaluate_layer(a, t) - evaluate_layer(b, t));

  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& [t, v] : diff) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < diff.size(); ++i)
      s += segment_l1(diff[i].first, diff[i].second, diff[i + 1].first, diff[i + 1].second);
    return s;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < diff.size(); ++i)
      s += segment_l2sq(diff[i].first, diff[i].second, diff[i + 1].first, diff[i + 1].second);
    return std::sqrt(std::max(s, 0.0));
  }
  throw DomainError("layer distance: p must be 1, 2 or infinity");
}

namespace {

double combine_layerwise(const std::vector<double>& vals, double p) {
  double acc = 0.0;
  if (std::isinf(p)) {
    for (double v : vals) acc = std::max(acc, v);
    return acc;
  }
  if (p == 1.0) {
    for (double v : vals) acc += v;
    return acc;
  }
  for (double v : vals) acc += v * v;
  return std::sqrt(std::max(acc, 0.0));
}

}  // namespace

double landscape_norm(const Landscape& l, int h, double p) {
  const auto& layers = l.at(h);
  std::vector<double> vals;
  vals.reserve(layers.size());
  for (const auto& layer : layers) vals.push_back(layer_norm(layer, p));
  return combine_layerwise(vals, p);
}

double landscape_distance(const Landscape& a, const Landscape& b, int h, double p) {
  const auto& la = a.at(h);
  const auto& lb = b.at(h);
  size_t n = std::max(la.size(), lb.size());
  static const Layer empty;
  std::vector<double> vals;
  vals.reserve(n);
  for (size_t j = 0; j < n; ++j) {
    const Layer& x = j < la.size() ? la[j] : empty;
    const Layer& y = j < lb.size() ? lb[j] : empty;
    vals.push_back(layer_distance(x, y, p));
  }
  return combine_layerwise(vals, p);
}

Landscape landscape_average(const std::vector<Landscape>& ls) {
  if (ls.empty()) throw DomainError("landscape average of an empty set");
  Landscape out;
  out.provenance = ls.front().provenance;
  int max_h = 0;
  for (const auto& l : ls) max_h = std::max(max_h, l.max_h);
  out.max_h = max_h;
  out.layers.resize(static_cast<size_t>(max_h) + 1);
  double inv = 1.0 / static_cast<double>(ls.size());
  static const Layer empty;

  for (int h = 0; h <= max_h; ++h) {
    size_t n_layers = 0;
    for (const auto& l : ls) n_layers = std::max(n_layers, l.at(h).size());
    for (size_t j = 0; j < n_layers; ++j) {
      std::vector<double> ts;
      for (const auto& l : ls) {
        const auto& layers = l.at(h);
        const Layer& lay = j < layers.size() ? layers[j] : empty;
        for (const auto& [t, v] : lay) ts.push_back(t);
      }
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
      Layer mean;
      mean.reserve(ts.size());
      for (double t : ts) {
        double s = 0.0;
        for (const auto& l : ls) {
          const auto& layers = l.at(h);
          const Layer& lay = j < layers.size() ? layers[j] : empty;
          s += evaluate_layer(lay, t);
        }
        mean.emplace_back(t, s * inv);
      }
      if (!mean.empty()) out.layers[static_cast<size_t>(h)].push_back(std::move(mean));
    }
  }
  return out;
}

nlohmann::json landscape_to_json(const Landscape& l) {
  nlohmann::json j;
  nlohmann::json hs = nlohmann::json::object();
  for (int h = 0; h <= l.max_h; ++h) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : l.at(h)) {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& [t, v] : layer) pts.push_back({t, v});
      layers.push_back(std::move(pts));
    }
    hs[std::to_string(h)] = std::move(layers);
  }
  j["h"] = std::move(hs);
  if (l.provenance.grid_step > 0)
    j["grid"] = {{"origin", 0.0}, {"step", l.provenance.grid_step}};
  else
    j["grid"] = nullptr;
  if (l.intervals.size() == static_cast<size_t>(l.max_h) + 1) {
    nlohmann::json diag = nlohmann::json::object();
    for (int h = 0; h <= l.max_h; ++h) {
      nlohmann::json ivs = nlohmann::json::array();
      for (const auto& [b, d] : l.intervals[static_cast<size_t>(h)]) ivs.push_back({b, d});
      diag[std::to_string(h)] = std::move(ivs);
    }
    j["diagram"] = std::move(diag);
  }
  const auto& p = l.provenance;
  j["provenance"] = {{"source_id", p.source_id},   {"normalized", p.normalized},
                     {"projector", p.projector},   {"k", p.k},
                     {"n_projections", p.n_projections}, {"seed", p.seed},
                     {"h_max", p.h_max},           {"complex", p.complex},
                     {"rips_threshold", p.rips_threshold},
                     {"cap_essential", p.cap_essential},
                     {"grid_step", p.grid_step}};
  return j;
}

Landscape landscape_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("h") || !j["h"].is_object())
    throw FormatError("landscape json must contain an 'h' object");
  Landscape l;
  int max_h = -1;
  while (j["h"].contains(std::to_string(max_h + 1))) ++max_h;
  if (max_h < 0) throw FormatError("landscape json has no dimension 0");
  l.max_h = max_h;
  l.layers.resize(static_cast<size_t>(max_h) + 1);
  for (int h = 0; h <= max_h; ++h) {
    for (const auto& lay : j["h"][std::to_string(h)]) {
      Layer layer;
      for (const auto& pt : lay) {
        if (!pt.is_array() || pt.size() != 2)
          throw FormatError("landscape knots must be [t, value] pairs");
        layer.emplace_back(pt[0].get<double>(), pt[1].get<double>());
      }
      l.layers[static_cast<size_t>(h)].push_back(std::move(layer));
    }
  }
  if (j.contains("diagram") && j["diagram"].is_object()) {
    l.intervals.resize(static_cast<size_t>(max_h) + 1);
    for (int h = 0; h <= max_h; ++h) {
      std::string key = std::to_string(h);
      if (!j["diagram"].contains(key)) continue;
      for (const auto& iv : j["diagram"][key]) {
        if (!iv.is_array() || iv.size() != 2)
          throw FormatError("diagram intervals must be [birth, death] pairs");
        l.intervals[static_cast<size_t>(h)].emplace_back(iv[0].get<double>(),
                                                         iv[1].get<double>());
      }
    }
  }
  if (j.contains("provenance") && j["provenance"].is_object()) {
    const auto& p = j["provenance"];
    auto& out = l.provenance;
    if (p.contains("source_id")) out.source_id = p["source_id"].get<std::string>();
    if (p.contains("normalized")) out.normalized = p["normalized"].get<bool>();
    if (p.contains("projector")) out.projector = p["projector"].get<std::string>();
    if (p.contains("k")) out.k = p["k"].get<int>();
    if (p.contains("n_projections")) out.n_projections = p["n_projections"].get<int>();
    if (p.contains("seed")) out.seed = p["seed"].get<uint64_t>();
    if (p.contains("h_max")) out.h_max = p["h_max"].get<int>();
    if (p.contains("complex")) out.complex = p["complex"].get<std::string>();
    if (p.contains("rips_threshold"))
      out.rips_threshold = p["rips_threshold"].get<double>();
    if (p.contains("cap_essential")) out.cap_essential = p["cap_essential"].get<bool>();
    if (p.contains("grid_step")) out.grid_step = p["grid_step"].get<double>();
  }
  return l;
}

}  // namespace presto
