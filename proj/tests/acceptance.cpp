// Acceptance checks: ten end-to-end guarantees the toolkit must keep, one
// printed line per check. Exit code is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/complex.hpp"
#include "core/diagram_metrics.hpp"
#include "core/landscape.hpp"
#include "core/persistence.hpp"
#include "core/pipeline.hpp"
#include "core/preprocess.hpp"
#include "core/presto_ops.hpp"

namespace {

using namespace presto;

constexpr double kInf = std::numeric_limits<double>::infinity();

// splitmix64 uniforms so data generation is identical on every platform
struct Rand {
  uint64_t s;
  explicit Rand(uint64_t seed) : s(seed) {}
  uint64_t next() {
    s += 0x9e3779b97f4a7c15ULL;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int range(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
  }
};

Matrix cloud(Rand& r, long n, long d) {
  Matrix m(n, d);
  for (long i = 0; i < n; ++i)
    for (long c = 0; c < d; ++c) m(i, c) = r.uniform();
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- independent textbook column reduction for check 2 ----

std::vector<int> verts(const Simplex& s) {
  std::vector<int> v;
  for (int i = 0; i <= s.dim; ++i) v.push_back(s.v[static_cast<size_t>(i)]);
  return v;
}

struct NaiveDiagram {
  std::vector<std::vector<std::pair<double, double>>> intervals;
  std::vector<std::vector<double>> essential;
};

NaiveDiagram naive_reduction(const FilteredComplex& fc, int max_h) {
  size_t m = fc.simplices.size();
  std::map<std::vector<int>, size_t> index;
  for (size_t i = 0; i < m; ++i) index[verts(fc.simplices[i])] = i;

  std::vector<std::set<size_t>> cols(m);
  for (size_t i = 0; i < m; ++i) {
    auto vs = verts(fc.simplices[i]);
    if (vs.size() == 1) continue;
    for (size_t drop = 0; drop < vs.size(); ++drop) {
      std::vector<int> face;
      for (size_t k = 0; k < vs.size(); ++k)
        if (k != drop) face.push_back(vs[k]);
      cols[i].insert(index.at(face));
    }
  }

  std::vector<long> low_owner(m, -1);
  std::vector<char> negative(m, 0);
  NaiveDiagram out;
  out.intervals.resize(static_cast<size_t>(max_h) + 1);
  out.essential.resize(static_cast<size_t>(max_h) + 1);

  for (size_t j = 0; j < m; ++j) {
    while (!cols[j].empty()) {
      size_t low = *cols[j].rbegin();
      long other = low_owner[low];
      if (other < 0) break;
      for (size_t r : cols[static_cast<size_t>(other)]) {
        auto it = cols[j].find(r);
        if (it != cols[j].end())
          cols[j].erase(it);
        else
          cols[j].insert(r);
      }
    }
    if (!cols[j].empty()) {
      size_t low = *cols[j].rbegin();
      low_owner[low] = static_cast<long>(j);
      negative[j] = 1;
      int dim = fc.simplices[low].dim;
      double b = fc.simplices[low].filt, d = fc.simplices[j].filt;
      if (dim <= max_h && d > b) out.intervals[static_cast<size_t>(dim)].push_back({b, d});
    }
  }
  for (size_t j = 0; j < m; ++j) {
    if (negative[j]) continue;
    if (low_owner[j] >= 0) continue;
    int dim = fc.simplices[j].dim;
    if (dim <= max_h) out.essential[static_cast<size_t>(dim)].push_back(fc.simplices[j].filt);
  }
  for (auto& v : out.intervals) std::sort(v.begin(), v.end());
  for (auto& v : out.essential) std::sort(v.begin(), v.end());
  return out;
}

bool diagrams_match(const FilteredComplex& fc, int max_h) {
  PersistenceDiagram got = persistence(fc, max_h);
  NaiveDiagram want = naive_reduction(fc, max_h);
  if (got.max_h != max_h) return false;
  for (int h = 0; h <= max_h; ++h) {
    auto gi = got.intervals[static_cast<size_t>(h)];
    std::sort(gi.begin(), gi.end());
    if (gi != want.intervals[static_cast<size_t>(h)]) return false;
    auto ge = got.essential_births[static_cast<size_t>(h)];
    std::sort(ge.begin(), ge.end());
    if (ge != want.essential[static_cast<size_t>(h)]) return false;
  }
  return true;
}

// ---- shared helpers ----

PersistenceDiagram diagram_h0(const std::vector<std::pair<double, double>>& bars) {
  PersistenceDiagram d;
  d.max_h = 0;
  d.intervals = {bars};
  d.essential_births = {{}};
  return d;
}

std::vector<std::pair<double, double>> random_bars(Rand& r, int count) {
  std::vector<std::pair<double, double>> bars;
  for (int i = 0; i < count; ++i) {
    double b = r.uniform(0.0, 2.0);
    bars.push_back({b, b + r.uniform(0.05, 1.5)});
  }
  return bars;
}

// sum of layer spans; an upper bound for the support measure
double landscape_span(const Landscape& l) {
  double s = 0;
  for (const auto& layer : l.at(0))
    if (layer.size() >= 2) s += layer.back().first - layer.front().first;
  return s;
}

// ---- the ten checks ----

bool check_unit_square(std::string& detail) {
  Matrix pts(4, 2);
  pts << 0, 0, 1, 0, 0, 1, 1, 1;
  PersistenceDiagram d = persistence(alpha_complex(pts), 1);
  std::vector<std::pair<double, double>> h0 = d.intervals[0];
  std::sort(h0.begin(), h0.end());
  bool ok = h0 == std::vector<std::pair<double, double>>{{0, 0.25}, {0, 0.25}, {0, 0.25}} &&
            d.essential_count(0) == 1 &&
            d.intervals[1] == std::vector<std::pair<double, double>>{{0.25, 0.5}};
  Landscape l = landscape_from_diagram(d);
  double peak = ok ? evaluate_layer(l.at(1)[0], 0.375) : -1;
  double norm = landscape_norm(l, 1, 2.0);
  ok = ok && std::abs(peak - 0.125) <= 1e-12 && std::abs(norm - 0.0360844) <= 1e-6;
  std::ostringstream ss;
  ss << "h1 norm " << norm;
  detail = ss.str();
  return ok;
}

bool check_reduction_oracle(std::string& detail) {
  Rand r(101);
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    Matrix pts = cloud(r, r.range(4, 8), 2);
    if (!diagrams_match(alpha_complex(pts), 2)) ++bad;
  }
  for (int t = 0; t < 100; ++t) {
    Matrix pts = cloud(r, r.range(4, 8), 3);
    if (!diagrams_match(rips_complex(pairwise_distances(pts), 2), 2)) ++bad;
  }
  detail = std::to_string(200 - bad) + "/200 complexes equal";
  return bad == 0;
}

bool check_diagram_bounds(std::string& detail) {
  Rand r(202);
  const double tol = 1e-9;
  int violations = 0;
  for (int t = 0; t < 500; ++t) {
    auto a = random_bars(r, r.range(0, 10));
    auto b = random_bars(r, r.range(0, 10));
    double db = bottleneck_distance(a, b);
    WassersteinResult w1 = wasserstein_distance(a, b, 1.0);
    WassersteinResult w2 = wasserstein_distance(a, b, 2.0);
    WassersteinResult winf = wasserstein_distance(a, b, kInf);
    double n = static_cast<double>(a.size() + b.size());
    if (db > w1.value + tol) ++violations;
    if (db > w2.value + tol) ++violations;
    if (winf.max_pair_cost > db + tol) ++violations;
    if (w1.value > db * n + tol) ++violations;
    if (w2.value > db * std::sqrt(n) + tol) ++violations;

    Landscape l = landscape_from_diagram(diagram_h0(a));
    double span = landscape_span(l);
    if (span > 0) {
      std::vector<std::pair<double, double>> scaled;
      for (auto [bb, dd] : a) scaled.push_back({bb / span, dd / span});
      Landscape u = landscape_from_diagram(diagram_h0(scaled));
      double n1 = landscape_norm(u, 0, 1.0);
      double n2 = landscape_norm(u, 0, 2.0);
      double ni = landscape_norm(u, 0, kInf);
      if (n1 > n2 + tol) ++violations;
      if (n2 > ni + tol) ++violations;
    }
  }
  detail = std::to_string(violations) + " violations over 500 pairs";
  return violations == 0;
}

bool check_projection_bounds(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  Rand r(303);
  PipelineConfig orig_cfg;
  orig_cfg.use_rips = true;
  orig_cfg.h_max = 1;
  PipelineConfig proj_cfg = orig_cfg;
  proj_cfg.projector = "pca";
  proj_cfg.k = 2;

  int violations = 0;
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    long n = r.range(16, 48);
    long d = r.range(4, 8);
    std::vector<Landscape> originals, projecteds;
    std::vector<double> orig_norms, proj_norms;
    for (int u = 0; u < 5; ++u) {
      Embedding e;
      e.points = cloud(r, n, d);
      e.source_id = "u" + std::to_string(u);
      originals.push_back(embedding_to_landscape(e, orig_cfg));
      projecteds.push_back(embedding_to_landscape(e, proj_cfg));
      orig_norms.push_back(presto_norm(originals.back(), 1, 2.0));
      proj_norms.push_back(presto_norm(projecteds.back(), 1, 2.0));
    }
    TopologicalLossReport loss = topological_loss(originals, projecteds, 1, 2.0);

    Matrix mo(5, 5), mp(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        mo(i, j) = i == j ? 0 : presto_distance(originals[i], originals[j], 1, 2.0);
        mp(i, j) = i == j ? 0 : presto_distance(projecteds[i], projecteds[j], 1, 2.0);
      }
    std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
    Mms mms = mms_from_matrix(ids, mo);
    Mms pmms = mms_from_matrix(ids, mp);

    MetricPreservationReport mr = check_metric_preservation(mms, pmms, loss.loss);
    VarianceBoundReport vr =
        check_variance_bound(presto_variance(originals, 1, 2.0),
                             presto_variance(projecteds, 1, 2.0), loss.loss, orig_norms,
                             proj_norms);
    if (!mr.pass) ++violations;
    if (!vr.aggregate_pass || !vr.sandwich_pass) ++violations;
    worst = std::max(worst, mr.worst_excess);
  }
  double elapsed = seconds_since(t0);
  std::ostringstream ss;
  ss << violations << " violations, worst excess " << worst << ", " << elapsed << " s";
  detail = ss.str();
  return violations == 0 && elapsed < 300.0;
}

bool check_jl_distortion(std::string& detail) {
  const long n = 256, d = 64;
  const double eps = 0.5;
  const long k = static_cast<long>(std::ceil(8.0 * std::log(static_cast<double>(n)) /
                                             (eps * eps)));
  Rand r(404);
  Embedding e;
  e.points = cloud(r, n, d);
  Matrix orig = pairwise_distances(e.points);

  double worst_fraction = 1.0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Embedding proj = project_gaussian(e, k, 1, seed)[0];
    Matrix got = pairwise_distances(proj.points);
    long within = 0, total = 0;
    for (long i = 0; i < n; ++i)
      for (long j = i + 1; j < n; ++j) {
        double ratio = (got(i, j) * got(i, j)) / (orig(i, j) * orig(i, j));
        ++total;
        if (ratio >= 1.0 - eps && ratio <= 1.0 + eps) ++within;
      }
    worst_fraction = std::min(worst_fraction,
                              static_cast<double>(within) / static_cast<double>(total));
  }
  std::ostringstream ss;
  ss << "k=" << k << ", worst seed keeps " << worst_fraction * 100 << "% of pairs";
  detail = ss.str();
  return worst_fraction >= 0.95;
}

bool check_compression(std::string& detail) {
  Rand r(505);
  int bad = 0;
  double worst_ratio = 0;
  for (int t = 0; t < 100; ++t) {
    int m = r.range(4, 12);
    std::vector<std::string> ids;
    for (int i = 0; i < m; ++i) ids.push_back("u" + std::to_string(i));
    Mms mm = mms_from_matrix(ids, pairwise_distances(cloud(r, m, 3)));
    double eps = mms_quantile_epsilon(mm, r.uniform(0.2, 0.8));

    CompressionResult c = compress_search_space(mm, eps);
    std::map<std::string, long> index;
    for (int i = 0; i < m; ++i) index[ids[static_cast<size_t>(i)]] = i;
    for (int i = 0; i < m; ++i)
      if (mm.dist(i, index.at(c.assignment[static_cast<size_t>(i)])) > eps) ++bad;

    int optimum = optimal_cover_size(mm, eps);
    double bound = harmonic_number(m) * optimum;
    double reps = static_cast<double>(c.representatives.size());
    if (reps > bound + 1e-12) ++bad;
    if (optimum > 0) worst_ratio = std::max(worst_ratio, reps / optimum);
  }
  std::ostringstream ss;
  ss << bad << " violations, worst greedy/optimal ratio " << worst_ratio;
  detail = ss.str();
  return bad == 0;
}

bool check_scale_invariance(std::string& detail) {
  Rand r(606);
  std::vector<Matrix> base;
  for (int u = 0; u < 4; ++u) base.push_back(cloud(r, 20, 3));

  PipelineConfig cfg;
  cfg.normalize = true;
  cfg.h_max = 2;

  auto mms_at_scale = [&](double c) {
    Manifest m;
    for (int u = 0; u < 4; ++u) {
      Universe uni;
      uni.id = "u" + std::to_string(u);
      uni.inline_data = base[static_cast<size_t>(u)] * c;
      m.universes.push_back(std::move(uni));
    }
    return build_mms(m, cfg);
  };

  Mms ref = mms_at_scale(1.0);
  double worst = 0;
  for (double c : {0.01, 100.0}) {
    Mms got = mms_at_scale(c);
    for (long i = 0; i < 4; ++i)
      for (long j = 0; j < 4; ++j)
        worst = std::max(worst, std::abs(got.dist(i, j) - ref.dist(i, j)));
  }
  std::ostringstream ss;
  ss << "max entry drift " << worst;
  detail = ss.str();
  return worst <= 1e-9;
}

bool check_runtime_shape(std::string& detail) {
  PipelineConfig cfg;
  cfg.projector = "pca";
  cfg.k = 2;
  cfg.h_max = 1;

  auto pair_seconds = [&](long s, uint64_t seed) {
    Rand r(seed);
    Embedding a, b;
    a.points = cloud(r, s, 128);
    b.points = cloud(r, s, 128);
    auto t0 = std::chrono::steady_clock::now();
    Landscape la = embedding_to_landscape(a, cfg);
    Landscape lb = embedding_to_landscape(b, cfg);
    (void)presto_distance(la, lb, 1, 2.0);
    return seconds_since(t0);
  };

  double t12 = std::min(pair_seconds(1 << 12, 71), pair_seconds(1 << 12, 72));
  double t14 = std::min(pair_seconds(1 << 14, 73), pair_seconds(1 << 14, 74));
  std::ostringstream ss;
  ss << "s=4096: " << t12 << " s, s=16384: " << t14 << " s";
  detail = ss.str();
  return t12 <= 5.0 && t14 <= 8.0 * t12;
}

bool check_mantel(std::string& detail) {
  Rand r(808);
  Matrix d = pairwise_distances(cloud(r, 10, 3));
  MantelResult identity = mantel_test(d, d, 999, 4242);
  bool ok = std::abs(identity.r - 1.0) <= 1e-12 &&
            std::abs(identity.p_value - 1.0 / 1000.0) <= 1e-15;

  int calm = 0;
  for (int t = 0; t < 50; ++t) {
    Matrix d1 = pairwise_distances(cloud(r, 10, 3));
    Matrix d2 = pairwise_distances(cloud(r, 10, 3));
    MantelResult res = mantel_test(d1, d2, 999, 9000 + static_cast<uint64_t>(t));
    if (res.p_value > 0.05) ++calm;
  }
  std::ostringstream ss;
  ss << "identity p=" << identity.p_value << ", " << calm << "/50 independent trials quiet";
  detail = ss.str();
  return ok && calm >= 45;
}

bool check_grid_stability(std::string& detail) {
  Rand r(909);
  double worst_excess = -1;
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    Landscape l = landscape_from_diagram(diagram_h0(random_bars(r, r.range(3, 8))));
    double step = r.uniform(0.02, 0.6);
    Landscape g = landscape_grid_round(l, step);
    double dist = landscape_distance(l, g, 0, kInf);
    double excess = dist - (step / 2 + 1e-12);
    worst_excess = std::max(worst_excess, excess);
    if (excess > 0) ++bad;
  }
  std::ostringstream ss;
  ss << bad << " violations, worst margin " << -worst_excess;
  detail = ss.str();
  return bad == 0;
}

}  // namespace

int main() {
  struct Check {
    const char* name;
    bool (*run)(std::string&);
  };
  const std::vector<Check> checks = {
      {"unit-square pipeline oracle", check_unit_square},
      {"reduction equals naive oracle", check_reduction_oracle},
      {"diagram and norm bound suite", check_diagram_bounds},
      {"projection distance and variance bounds", check_projection_bounds},
      {"random projection distortion", check_jl_distortion},
      {"compression coverage and harmonic bound", check_compression},
      {"normalized scale invariance", check_scale_invariance},
      {"runtime envelope", check_runtime_shape},
      {"mantel calibration", check_mantel},
      {"grid rounding stability", check_grid_stability},
  };

  int failures = 0;
  for (size_t i = 0; i < checks.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = checks[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("[%s] %zu. %s (%s)\n", ok ? "PASS" : "FAIL", i + 1, checks[i].name,
                detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/10 passed\n", 10 - failures);
  return failures;
}
