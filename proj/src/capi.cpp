#include "presto/presto.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/error.hpp"
#include "core/io.hpp"
#include "core/landscape.hpp"
#include "core/pipeline.hpp"
#include "core/presto_ops.hpp"

struct presto_embedding {
  presto::Embedding v;
};
struct presto_manifest {
  presto::Manifest v;
};
struct presto_landscape {
  presto::Landscape v;
};
struct presto_landscape_set {
  std::vector<presto::Landscape> v;
};
struct presto_mms {
  presto::Mms v;
};

namespace {

thread_local std::string g_last_error;

presto_status status_from(presto::ErrorCode c) {
  switch (c) {
    case presto::ErrorCode::Io:
      return PRESTO_ERR_IO;
    case presto::ErrorCode::Format:
      return PRESTO_ERR_FORMAT;
    case presto::ErrorCode::Data:
      return PRESTO_ERR_DATA;
    case presto::ErrorCode::Manifest:
      return PRESTO_ERR_MANIFEST;
    case presto::ErrorCode::Domain:
      return PRESTO_ERR_DOMAIN;
    case presto::ErrorCode::Degenerate:
      return PRESTO_ERR_DEGENERATE;
    case presto::ErrorCode::State:
      return PRESTO_ERR_STATE;
    case presto::ErrorCode::Provenance:
      return PRESTO_ERR_PROVENANCE;
    case presto::ErrorCode::UnsupportedDimension:
      return PRESTO_ERR_UNSUPPORTED_DIMENSION;
  }
  return PRESTO_ERR_DATA;
}

template <typename Fn>
presto_status guarded(Fn&& fn) {
  try {
    fn();
    return PRESTO_OK;
  } catch (const presto::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PRESTO_ERR_DATA;
  }
}

presto_status invalid(const char* msg) {
  g_last_error = msg;
  return PRESTO_ERR_INVALID;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

presto::PipelineConfig to_config(const presto_pipeline_config* cfg) {
  presto::PipelineConfig c;
  c.projector = cfg->projector ? cfg->projector : "none";
  c.k = cfg->k;
  c.n_projections = cfg->n_projections;
  c.seed = cfg->seed;
  c.h_max = cfg->h_max;
  c.p = cfg->p;
  c.normalize = cfg->normalize != 0;
  c.cap_essential = cfg->cap_essential != 0;
  c.use_rips = cfg->use_rips != 0;
  c.rips_threshold = cfg->rips_threshold;
  c.grid_step = cfg->grid_step;
  c.jobs = cfg->jobs;
  return c;
}

presto::StageTimes* times_ptr(presto_stage_times* t, presto::StageTimes& storage) {
  return t ? &storage : nullptr;
}

void times_out(presto_stage_times* t, const presto::StageTimes& storage) {
  if (!t) return;
  t->load_ms = storage.load_ms;
  t->preprocess_ms = storage.preprocess_ms;
  t->project_ms = storage.project_ms;
  t->persistence_ms = storage.persistence_ms;
  t->landscape_ms = storage.landscape_ms;
  t->distance_ms = storage.distance_ms;
}

}  // namespace

extern "C" {

const char* presto_version(void) { return "0.1.0"; }

const char* presto_last_error(void) { return g_last_error.c_str(); }

void presto_string_free(char* s) { std::free(s); }

void presto_pipeline_config_init(presto_pipeline_config* cfg) {
  if (!cfg) return;
  cfg->projector = "none";
  cfg->k = 2;
  cfg->n_projections = 1;
  cfg->seed = 42;
  cfg->h_max = 2;
  cfg->p = 2.0;
  cfg->normalize = 0;
  cfg->cap_essential = 0;
  cfg->use_rips = 0;
  cfg->rips_threshold = -1.0;
  cfg->grid_step = 0.0;
  cfg->jobs = 1;
}

presto_status presto_embedding_load(const char* path, const char* format,
                                    presto_embedding** out) {
  if (!path || !out) return invalid("path and out must not be null");
  return guarded([&]() {
    auto* h = new presto_embedding{presto::load_embedding(path, format ? format : "auto")};
    *out = h;
  });
}

presto_status presto_embedding_from_data(const double* data, int64_t n, int64_t d,
                                         presto_embedding** out) {
  if (!data || !out) return invalid("data and out must not be null");
  if (n < 1 || d < 1) return invalid("n and d must be positive");
  return guarded([&]() {
    presto::Embedding e;
    e.points.resize(n, d);
    for (int64_t r = 0; r < n; ++r)
      for (int64_t c = 0; c < d; ++c) e.points(r, c) = data[r * d + c];
    for (int64_t r = 0; r < n; ++r)
      for (int64_t c = 0; c < d; ++c)
        if (!std::isfinite(e.points(r, c)))
          throw presto::DataError("non-finite value at row " + std::to_string(r));
    *out = new presto_embedding{std::move(e)};
  });
}

void presto_embedding_free(presto_embedding* e) { delete e; }

presto_status presto_embedding_dims(const presto_embedding* e, int64_t* n, int64_t* d) {
  if (!e || !n || !d) return invalid("null argument");
  *n = e->v.n();
  *d = e->v.d();
  return PRESTO_OK;
}

presto_status presto_embedding_save_csv(const presto_embedding* e, const char* path) {
  if (!e || !path) return invalid("null argument");
  return guarded([&]() { presto::save_embedding_csv(e->v, path); });
}

presto_status presto_manifest_load(const char* path, presto_manifest** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&]() { *out = new presto_manifest{presto::load_manifest(path)}; });
}

void presto_manifest_free(presto_manifest* m) { delete m; }

presto_status presto_manifest_size(const presto_manifest* m, size_t* out) {
  if (!m || !out) return invalid("null argument");
  *out = m->v.universes.size();
  return PRESTO_OK;
}

presto_status presto_manifest_universe_id(const presto_manifest* m, size_t index,
                                          char** out) {
  if (!m || !out) return invalid("null argument");
  if (index >= m->v.universes.size()) return invalid("universe index out of range");
  *out = dup_string(m->v.universes[index].id);
  return PRESTO_OK;
}

presto_status presto_embedding_landscape(const presto_embedding* e,
                                         const presto_pipeline_config* cfg,
                                         presto_stage_times* times, presto_landscape** out) {
  if (!e || !cfg || !out) return invalid("null argument");
  return guarded([&]() {
    presto::StageTimes st;
    auto l = presto::embedding_to_landscape(e->v, to_config(cfg), times_ptr(times, st));
    times_out(times, st);
    *out = new presto_landscape{std::move(l)};
  });
}

presto_status presto_manifest_landscapes(const presto_manifest* m,
                                         const presto_pipeline_config* cfg,
                                         presto_stage_times* times,
                                         presto_landscape_set** out) {
  if (!m || !cfg || !out) return invalid("null argument");
  return guarded([&]() {
    presto::StageTimes st;
    auto ls = presto::manifest_landscapes(m->v, to_config(cfg), times_ptr(times, st));
    times_out(times, st);
    *out = new presto_landscape_set{std::move(ls)};
  });
}

presto_status presto_build_mms(const presto_manifest* m, const presto_pipeline_config* cfg,
                               presto_stage_times* times, presto_mms** out) {
  if (!m || !cfg || !out) return invalid("null argument");
  return guarded([&]() {
    presto::StageTimes st;
    auto mms = presto::build_mms(m->v, to_config(cfg), times_ptr(times, st));
    times_out(times, st);
    *out = new presto_mms{std::move(mms)};
  });
}

void presto_landscape_free(presto_landscape* l) { delete l; }

presto_status presto_landscape_to_json(const presto_landscape* l, char** out) {
  if (!l || !out) return invalid("null argument");
  return guarded([&]() { *out = dup_string(presto::landscape_to_json(l->v).dump(2)); });
}

presto_status presto_landscape_from_json(const char* json, presto_landscape** out) {
  if (!json || !out) return invalid("null argument");
  return guarded([&]() {
    nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
    if (j.is_discarded()) throw presto::FormatError("landscape json does not parse");
    *out = new presto_landscape{presto::landscape_from_json(j)};
  });
}

presto_status presto_landscape_max_h(const presto_landscape* l, int32_t* out) {
  if (!l || !out) return invalid("null argument");
  *out = l->v.max_h;
  return PRESTO_OK;
}

presto_status presto_landscape_layer_count(const presto_landscape* l, int32_t h,
                                           size_t* out) {
  if (!l || !out) return invalid("null argument");
  *out = l->v.at(h).size();
  return PRESTO_OK;
}

presto_status presto_landscape_evaluate(const presto_landscape* l, int32_t h, size_t layer,
                                        double t, double* out) {
  if (!l || !out) return invalid("null argument");
  const auto& layers = l->v.at(h);
  if (layer >= layers.size()) {
    *out = 0.0;
    return PRESTO_OK;
  }
  *out = presto::evaluate_layer(layers[layer], t);
  return PRESTO_OK;
}

presto_status presto_landscape_norm(const presto_landscape* l, int32_t h, double p,
                                    double* out) {
  if (!l || !out) return invalid("null argument");
  return guarded([&]() { *out = presto::landscape_norm(l->v, h, p); });
}

presto_status presto_landscape_distance(const presto_landscape* a, const presto_landscape* b,
                                        int32_t h, double p, double* out) {
  if (!a || !b || !out) return invalid("null argument");
  return guarded([&]() { *out = presto::landscape_distance(a->v, b->v, h, p); });
}

presto_status presto_landscape_total_norm(const presto_landscape* l, int32_t h_max, double p,
                                          double* out) {
  if (!l || !out) return invalid("null argument");
  return guarded([&]() { *out = presto::presto_norm(l->v, h_max, p); });
}

presto_status presto_landscape_grid_round(const presto_landscape* l, double step,
                                          presto_landscape** out) {
  if (!l || !out) return invalid("null argument");
  return guarded([&]() { *out = new presto_landscape{presto::landscape_grid_round(l->v, step)}; });
}

presto_status presto_presto_distance(const presto_landscape* a, const presto_landscape* b,
                                     int32_t h_max, double p, double* out) {
  if (!a || !b || !out) return invalid("null argument");
  return guarded([&]() { *out = presto::presto_distance(a->v, b->v, h_max, p); });
}

presto_status presto_landscape_set_new(presto_landscape_set** out) {
  if (!out) return invalid("null argument");
  *out = new presto_landscape_set{};
  return PRESTO_OK;
}

presto_status presto_landscape_set_push(presto_landscape_set* s, const presto_landscape* l) {
  if (!s || !l) return invalid("null argument");
  s->v.push_back(l->v);
  return PRESTO_OK;
}

void presto_landscape_set_free(presto_landscape_set* s) { delete s; }

presto_status presto_landscape_set_size(const presto_landscape_set* s, size_t* out) {
  if (!s || !out) return invalid("null argument");
  *out = s->v.size();
  return PRESTO_OK;
}

presto_status presto_landscape_set_get(const presto_landscape_set* s, size_t index,
                                       presto_landscape** out) {
  if (!s || !out) return invalid("null argument");
  if (index >= s->v.size()) return invalid("landscape index out of range");
  *out = new presto_landscape{s->v[index]};
  return PRESTO_OK;
}

presto_status presto_landscape_set_average(const presto_landscape_set* s,
                                           presto_landscape** out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&]() { *out = new presto_landscape{presto::landscape_average(s->v)}; });
}

presto_status presto_variance(const presto_landscape_set* s, int32_t h_max, double p,
                              double* out) {
  if (!s || !out) return invalid("null argument");
  return guarded([&]() { *out = presto::presto_variance(s->v, h_max, p); });
}

presto_status presto_sensitivity_local(const presto_manifest* m, const presto_landscape_set* s,
                                       const char* dim_name, int32_t h_max, double p,
                                       double* out) {
  if (!m || !s || !dim_name || !out) return invalid("null argument");
  return guarded([&]() { *out = presto::sensitivity_local(m->v, s->v, dim_name, h_max, p); });
}

presto_status presto_sensitivity_global(const presto_manifest* m,
                                        const presto_landscape_set* s, int32_t h_max,
                                        double p, double* out) {
  if (!m || !s || !out) return invalid("null argument");
  return guarded([&]() { *out = presto::sensitivity_global(m->v, s->v, h_max, p); });
}

presto_status presto_sensitivity_report_json(const presto_manifest* m,
                                             const presto_landscape_set* s, int32_t h_max,
                                             double p, char** out) {
  if (!m || !s || !out) return invalid("null argument");
  return guarded([&]() {
    auto r = presto::sensitivity_report(m->v, s->v, h_max, p);
    *out = dup_string(presto::sensitivity_report_to_json(r).dump(2));
  });
}

void presto_mms_free(presto_mms* m) { delete m; }

presto_status presto_mms_size(const presto_mms* m, size_t* out) {
  if (!m || !out) return invalid("null argument");
  *out = m->v.size();
  return PRESTO_OK;
}

presto_status presto_mms_entry(const presto_mms* m, size_t i, size_t j, double* out) {
  if (!m || !out) return invalid("null argument");
  if (i >= m->v.size() || j >= m->v.size()) return invalid("matrix index out of range");
  *out = m->v.dist(static_cast<long>(i), static_cast<long>(j));
  return PRESTO_OK;
}

presto_status presto_mms_id(const presto_mms* m, size_t i, char** out) {
  if (!m || !out) return invalid("null argument");
  if (i >= m->v.size()) return invalid("matrix index out of range");
  *out = dup_string(m->v.ids[i]);
  return PRESTO_OK;
}

presto_status presto_mms_to_json(const presto_mms* m, char** out) {
  if (!m || !out) return invalid("null argument");
  return guarded([&]() { *out = dup_string(presto::mms_to_json(m->v).dump(2)); });
}

presto_status presto_mms_from_json(const char* json, presto_mms** out) {
  if (!json || !out) return invalid("null argument");
  return guarded([&]() {
    nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
    if (j.is_discarded()) throw presto::FormatError("mms json does not parse");
    *out = new presto_mms{presto::mms_from_json(j)};
  });
}

presto_status presto_mms_save_csv(const presto_mms* m, const char* path) {
  if (!m || !path) return invalid("null argument");
  return guarded([&]() { presto::mms_save_csv(m->v, path); });
}

presto_status presto_mms_load_csv(const char* path, presto_mms** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&]() { *out = new presto_mms{presto::mms_load_csv(path)}; });
}

presto_status presto_mms_from_matrix(const char* const* ids, size_t n,
                                     const double* dist_row_major, presto_mms** out) {
  if (!ids || !dist_row_major || !out) return invalid("null argument");
  return guarded([&]() {
    std::vector<std::string> idv;
    idv.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      if (!ids[i]) throw presto::DataError("null id at index " + std::to_string(i));
      idv.emplace_back(ids[i]);
    }
    presto::Matrix d(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        d(static_cast<long>(i), static_cast<long>(j)) = dist_row_major[i * n + j];
    *out = new presto_mms{presto::mms_from_matrix(std::move(idv), std::move(d))};
  });
}

presto_status presto_mms_quantile_epsilon(const presto_mms* m, double q, double* out) {
  if (!m || !out) return invalid("null argument");
  return guarded([&]() { *out = presto::mms_quantile_epsilon(m->v, q); });
}

presto_status presto_outliers_json(const presto_landscape_set* s, const char* const* ids,
                                   const char* method, double threshold, int32_t h_max,
                                   double p, char** out) {
  if (!s || !method || !out) return invalid("null argument");
  return guarded([&]() {
    std::vector<std::string> idv;
    idv.reserve(s->v.size());
    for (size_t i = 0; i < s->v.size(); ++i) {
      if (ids && ids[i])
        idv.emplace_back(ids[i]);
      else
        idv.push_back(s->v[i].provenance.source_id.empty() ? std::to_string(i)
                                                           : s->v[i].provenance.source_id);
    }
    auto r = presto::detect_outliers(idv, s->v, method, threshold, h_max, p);
    *out = dup_string(presto::outlier_report_to_json(r).dump(2));
  });
}

presto_status presto_cluster(const presto_mms* m, double epsilon, int32_t* labels_out) {
  if (!m || !labels_out) return invalid("null argument");
  return guarded([&]() {
    auto labels = presto::cluster_universes(m->v, epsilon);
    for (size_t i = 0; i < labels.size(); ++i) labels_out[i] = labels[i];
  });
}

presto_status presto_compress_json(const presto_mms* m, double epsilon, double quantile,
                                   char** out) {
  if (!m || !out) return invalid("null argument");
  return guarded([&]() {
    presto::CompressionResult r = quantile >= 0
                                      ? presto::compress_search_space_quantile(m->v, quantile)
                                      : presto::compress_search_space(m->v, epsilon);
    *out = dup_string(presto::compression_to_json(r).dump(2));
  });
}

presto_status presto_mantel(const presto_mms* a, const presto_mms* b, int32_t permutations,
                            uint64_t seed, int32_t n_comparisons, double* r_out,
                            double* p_value_out, double* corrected_p_out) {
  if (!a || !b || !r_out || !p_value_out) return invalid("null argument");
  return guarded([&]() {
    auto res = presto::mantel_test(a->v.dist, b->v.dist, permutations, seed, n_comparisons);
    *r_out = res.r;
    *p_value_out = res.p_value;
    if (corrected_p_out) *corrected_p_out = res.corrected_p;
  });
}

presto_status presto_compare_mms(const presto_mms* a, const presto_mms* b, const char* metric,
                                 double p, double* out) {
  if (!a || !b || !metric || !out) return invalid("null argument");
  return guarded([&]() { *out = presto::compare_mms(a->v, b->v, metric, p); });
}

}  // extern "C"
