#include "core/presto_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "core/error.hpp"

namespace presto {

void validate_mms(const Mms& m) {
  long n = static_cast<long>(m.ids.size());
  if (m.dist.rows() != n || m.dist.cols() != n)
    throw DataError("distance matrix is " + std::to_string(m.dist.rows()) + "x" +
                    std::to_string(m.dist.cols()) + " but there are " + std::to_string(n) +
                    " ids");
  for (long i = 0; i < n; ++i) {
    if (std::abs(m.dist(i, i)) > 1e-12)
      throw DataError("nonzero diagonal at " + m.ids[static_cast<size_t>(i)]);
    for (long j = 0; j < n; ++j) {
      double v = m.dist(i, j);
      if (!std::isfinite(v) || v < 0)
        throw DataError("distance (" + m.ids[static_cast<size_t>(i)] + ", " +
                        m.ids[static_cast<size_t>(j)] + ") is not a finite nonnegative value");
      if (std::abs(v - m.dist(j, i)) > 1e-12)
        throw DataError("asymmetry between " + m.ids[static_cast<size_t>(i)] + " and " +
                        m.ids[static_cast<size_t>(j)]);
    }
  }
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j)
      for (long k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (m.dist(i, j) > m.dist(i, k) + m.dist(k, j) + 1e-9)
          throw DataError("triangle inequality fails on (" + m.ids[static_cast<size_t>(i)] +
                          ", " + m.ids[static_cast<size_t>(j)] + ", " +
                          m.ids[static_cast<size_t>(k)] + ")");
      }
}

Mms mms_from_matrix(std::vector<std::string> ids, Matrix dist, nlohmann::json config) {
  Mms m;
  m.ids = std::move(ids);
  m.dist = std::move(dist);
  m.config = std::move(config);
  validate_mms(m);
  return m;
}

nlohmann::json mms_to_json(const Mms& m) {
  nlohmann::json j;
  j["ids"] = m.ids;
  nlohmann::json rows = nlohmann::json::array();
  for (long i = 0; i < m.dist.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (long c = 0; c < m.dist.cols(); ++c) row.push_back(m.dist(i, c));
    rows.push_back(std::move(row));
  }
  j["dist"] = std::move(rows);
  j["config"] = m.config;
  return j;
}

Mms mms_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("ids") || !j.contains("dist"))
    throw FormatError("mms json needs 'ids' and 'dist'");
  Mms m;
  for (const auto& id : j["ids"]) m.ids.push_back(id.get<std::string>());
  long n = static_cast<long>(m.ids.size());
  const auto& rows = j["dist"];
  if (!rows.is_array() || static_cast<long>(rows.size()) != n)
    throw FormatError("mms 'dist' must have one row per id");
  m.dist.resize(n, n);
  for (long i = 0; i < n; ++i) {
    if (static_cast<long>(rows[static_cast<size_t>(i)].size()) != n)
      throw FormatError("mms 'dist' row " + std::to_string(i) + " has wrong length");
    for (long c = 0; c < n; ++c)
      m.dist(i, c) = rows[static_cast<size_t>(i)][static_cast<size_t>(c)].get<double>();
  }
  if (j.contains("config")) m.config = j["config"];
  validate_mms(m);
  return m;
}

void mms_save_csv(const Mms& m, const std::string& path) {
  save_matrix_csv(m.ids, m.dist, path);
}

Mms mms_load_csv(const std::string& path) {
  Mms m;
  auto [ids, dist] = load_matrix_csv(path);
  m.ids = std::move(ids);
  m.dist = std::move(dist);
  validate_mms(m);
  return m;
}

double presto_distance_raw(const Landscape& a, const Landscape& b, int h_max, double p) {
  if (h_max < 0) throw DomainError("h_max must be nonnegative");
  double s = 0.0;
  for (int x = 0; x <= h_max; ++x) s += landscape_distance(a, b, x, p);
  return s;
}

double presto_distance(const Landscape& a, const Landscape& b, int h_max, double p) {
  if (!a.provenance.compatible(b.provenance)) {
    std::ostringstream msg;
    msg << "landscapes were built with different settings (";
    const auto& pa = a.provenance;
    const auto& pb = b.provenance;
    bool first = true;
    auto add = [&](const std::string& what) {
      if (!first) msg << ", ";
      msg << what;
      first = false;
    };
    if (pa.normalized != pb.normalized) add("normalized");
    if (pa.projector != pb.projector) add("projector");
    if (pa.k != pb.k) add("k");
    if (pa.n_projections != pb.n_projections) add("n_projections");
    if (pa.seed != pb.seed) add("seed");
    if (pa.h_max != pb.h_max) add("h_max");
    if (pa.complex != pb.complex) add("complex");
    if (pa.rips_threshold != pb.rips_threshold) add("rips_threshold");
    if (pa.cap_essential != pb.cap_essential) add("cap_essential");
    if (pa.grid_step != pb.grid_step) add("grid_step");
    msg << ")";
    throw ProvenanceError(msg.str());
  }
  return presto_distance_raw(a, b, h_max, p);
}

double presto_norm(const Landscape& l, int h_max, double p) {
  if (h_max < 0) throw DomainError("h_max must be nonnegative");
  double s = 0.0;
  for (int x = 0; x <= h_max; ++x) s += landscape_norm(l, x, p);
  return s;
}

double presto_variance(const std::vector<Landscape>& ls, int h_max, double p) {
  if (ls.empty()) throw DomainError("variance of an empty landscape set");
  for (size_t i = 1; i < ls.size(); ++i)
    if (!ls[i].provenance.compatible(ls.front().provenance))
      throw ProvenanceError("landscape set mixes build settings");
  double n = static_cast<double>(ls.size());
  double total = 0.0;
  for (int x = 0; x <= h_max; ++x) {
    std::vector<double> norms;
    norms.reserve(ls.size());
    double mu = 0.0;
    for (const auto& l : ls) {
      norms.push_back(landscape_norm(l, x, p));
      mu += norms.back();
    }
    mu /= n;
    for (double v : norms) total += (v - mu) * (v - mu);
  }
  return total / n;
}

namespace {

// universes grouped by the values of every parameter except dim_name
std::map<std::string, std::vector<size_t>> classes_for_dimension(const Manifest& m,
                                                                 const std::string& dim_name) {
  bool known = false;
  for (const auto& name : m.param_names)
    if (name == dim_name) known = true;
  if (!known) throw DomainError("manifest has no parameter dimension '" + dim_name + "'");

  std::map<std::string, std::vector<size_t>> classes;
  for (size_t i = 0; i < m.universes.size(); ++i) {
    nlohmann::json key = nlohmann::json::object();
    for (const auto& [name, value] : m.universes[i].params)
      if (name != dim_name) key[name] = value;
    classes[key.dump()].push_back(i);
  }
  return classes;
}

double class_variance(const std::vector<Landscape>& landscapes,
                      const std::vector<size_t>& members, int h_max, double p) {
  std::vector<Landscape> subset;
  subset.reserve(members.size());
  for (size_t i : members) subset.push_back(landscapes[i]);
  return presto_variance(subset, h_max, p);
}

double mean_class_variance(const Manifest& m, const std::vector<Landscape>& landscapes,
                           const std::string& dim_name, int h_max, double p) {
  auto classes = classes_for_dimension(m, dim_name);
  double total = 0.0;
  for (const auto& [key, members] : classes)
    total += class_variance(landscapes, members, h_max, p);
  return total / static_cast<double>(classes.size());
}

void check_parallel(const Manifest& m, const std::vector<Landscape>& landscapes) {
  if (landscapes.size() != m.universes.size())
    throw DomainError("expected one landscape per universe (" +
                      std::to_string(m.universes.size()) + "), got " +
                      std::to_string(landscapes.size()));
}

}  // namespace

double sensitivity_individual(const Manifest& m, const std::vector<Landscape>& landscapes,
                              const std::string& dim_name, const nlohmann::json& class_key,
                              int h_max, double p) {
  check_parallel(m, landscapes);
  bool known = false;
  for (const auto& name : m.param_names)
    if (name == dim_name) known = true;
  if (!known) throw DomainError("manifest has no parameter dimension '" + dim_name + "'");
  for (const auto& name : m.param_names) {
    if (name == dim_name) continue;
    if (!class_key.contains(name))
      throw DomainError("class key is missing parameter '" + name + "'");
  }

  std::vector<size_t> members;
  for (size_t i = 0; i < m.universes.size(); ++i) {
    bool match = true;
    for (const auto& [name, value] : m.universes[i].params) {
      if (name == dim_name) continue;
      if (class_key[name] != value) {
        match = false;
        break;
      }
    }
    if (match) members.push_back(i);
  }
  if (members.empty()) throw DomainError("no universe matches the class key");
  return std::sqrt(class_variance(landscapes, members, h_max, p));
}

double sensitivity_local(const Manifest& m, const std::vector<Landscape>& landscapes,
                         const std::string& dim_name, int h_max, double p) {
  check_parallel(m, landscapes);
  return std::sqrt(mean_class_variance(m, landscapes, dim_name, h_max, p));
}

double sensitivity_global(const Manifest& m, const std::vector<Landscape>& landscapes,
                          int h_max, double p) {
  check_parallel(m, landscapes);
  if (m.param_names.empty()) throw DomainError("manifest has no parameter dimensions");
  double total = 0.0;
  for (const auto& name : m.param_names)
    total += mean_class_variance(m, landscapes, name, h_max, p);
  return std::sqrt(total / static_cast<double>(m.param_names.size()));
}

SensitivityReport sensitivity_report(const Manifest& m, const std::vector<Landscape>& landscapes,
                                     int h_max, double p) {
  check_parallel(m, landscapes);
  SensitivityReport r;
  double total = 0.0;
  for (const auto& name : m.param_names) {
    double mv = mean_class_variance(m, landscapes, name, h_max, p);
    r.per_dimension.emplace_back(name, std::sqrt(mv));
    total += mv;
  }
  if (!m.param_names.empty())
    r.global = std::sqrt(total / static_cast<double>(m.param_names.size()));
  return r;
}

nlohmann::json sensitivity_report_to_json(const SensitivityReport& r) {
  nlohmann::json j;
  nlohmann::json dims = nlohmann::json::object();
  for (const auto& [name, value] : r.per_dimension) dims[name] = value;
  j["per_dimension"] = std::move(dims);
  j["global"] = r.global;
  return j;
}

TopologicalLossReport topological_loss(const std::vector<Landscape>& originals,
                                       const std::vector<Landscape>& projecteds,
                                       int h_max, double p) {
  if (originals.size() != projecteds.size())
    throw DomainError("original and projected landscape lists differ in length");
  TopologicalLossReport r;
  r.per_universe_loss.reserve(originals.size());
  for (size_t i = 0; i < originals.size(); ++i) {
    double d = presto_distance_raw(originals[i], projecteds[i], h_max, p);
    r.per_universe_loss.push_back(d);
    r.loss = std::max(r.loss, d);
  }
  return r;
}

MetricPreservationReport check_metric_preservation(const Mms& mms, const Mms& pmms,
                                                   double loss) {
  if (mms.ids != pmms.ids) throw DomainError("projected matrix ids do not match originals");
  MetricPreservationReport r;
  r.worst_excess = -std::numeric_limits<double>::infinity();
  long n = static_cast<long>(mms.ids.size());
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      double bound = mms.dist(i, j) + 2.0 * loss;
      double excess = pmms.dist(i, j) - bound;
      r.worst_excess = std::max(r.worst_excess, excess);
      if (excess > r.tolerance) {
        r.pass = false;
        r.violations.push_back({static_cast<double>(i), static_cast<double>(j),
                                pmms.dist(i, j), bound});
      }
    }
  if (n < 2) r.worst_excess = 0;
  return r;
}

nlohmann::json metric_preservation_to_json(const MetricPreservationReport& r) {
  nlohmann::json j;
  j["pass"] = r.pass;
  j["worst_excess"] = r.worst_excess;
  j["tolerance"] = r.tolerance;
  nlohmann::json v = nlohmann::json::array();
  for (const auto& e : r.violations)
    v.push_back({{"i", static_cast<long>(e[0])},
                 {"j", static_cast<long>(e[1])},
                 {"value", e[2]},
                 {"bound", e[3]}});
  j["violations"] = std::move(v);
  return j;
}

VarianceBoundReport check_variance_bound(double pv_orig, double pv_proj, double loss,
                                         const std::vector<double>& orig_norms,
                                         const std::vector<double>& proj_norms) {
  if (orig_norms.empty()) throw DomainError("variance bound needs at least one norm");
  if (orig_norms.size() != proj_norms.size())
    throw DomainError("norm lists differ in length");
  VarianceBoundReport r;
  r.pv_orig = pv_orig;
  r.pv_proj = pv_proj;
  r.loss = loss;
  double n = static_cast<double>(orig_norms.size());
  double mu = 0.0;
  for (double v : orig_norms) mu += v;
  mu /= n;
  double sigma_abs = 0.0;
  for (double v : orig_norms) sigma_abs += std::abs(v - mu);
  r.aggregate_delta = std::abs(pv_orig - pv_proj);
  r.aggregate_bound = (4.0 * loss / n) * sigma_abs + (2.0 * loss) * (2.0 * loss) / n;
  r.aggregate_pass = r.aggregate_delta <= r.aggregate_bound + r.tolerance;
  r.sandwich_slack.reserve(orig_norms.size());
  for (size_t i = 0; i < orig_norms.size(); ++i) {
    double slack = loss - std::abs(orig_norms[i] - proj_norms[i]);
    r.sandwich_slack.push_back(slack);
    if (slack < -r.tolerance) r.sandwich_pass = false;
  }
  return r;
}

nlohmann::json variance_bound_to_json(const VarianceBoundReport& r) {
  nlohmann::json j;
  j["pv_orig"] = r.pv_orig;
  j["pv_proj"] = r.pv_proj;
  j["loss"] = r.loss;
  j["aggregate"] = {{"delta", r.aggregate_delta},
                    {"bound", r.aggregate_bound},
                    {"pass", r.aggregate_pass},
                    {"sigma_reading", "absolute-deviation"}};
  j["sandwich"] = {{"pass", r.sandwich_pass}, {"slack", r.sandwich_slack}};
  j["tolerance"] = r.tolerance;
  return j;
}

}  // namespace presto
