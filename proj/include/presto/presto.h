/* Topological comparison of embedding collections: persistence landscapes,
 * distances, variance and sensitivity analysis behind a C interface.
 *
 * All functions return PRESTO_OK on success; on failure presto_last_error()
 * describes the problem for the calling thread. Strings returned through
 * char** are heap-allocated and must be released with presto_string_free.
 */
#ifndef PRESTO_H
#define PRESTO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef PRESTO_API
#define PRESTO_API __attribute__((visibility("default")))
#endif

typedef enum presto_status {
  PRESTO_OK = 0,
  PRESTO_ERR_IO = 1,
  PRESTO_ERR_FORMAT = 2,
  PRESTO_ERR_DATA = 3,
  PRESTO_ERR_MANIFEST = 4,
  PRESTO_ERR_DOMAIN = 5,
  PRESTO_ERR_DEGENERATE = 6,
  PRESTO_ERR_STATE = 7,
  PRESTO_ERR_PROVENANCE = 8,
  PRESTO_ERR_UNSUPPORTED_DIMENSION = 9,
  PRESTO_ERR_INVALID = 10
} presto_status;

typedef struct presto_embedding presto_embedding;
typedef struct presto_manifest presto_manifest;
typedef struct presto_landscape presto_landscape;
typedef struct presto_landscape_set presto_landscape_set;
typedef struct presto_mms presto_mms;

typedef struct presto_pipeline_config {
  const char* projector; /* "none", "pca", "gauss" or "mmds" */
  int32_t k;
  int32_t n_projections; /* gauss: number of averaged random projections */
  uint64_t seed;
  int32_t h_max; /* 0, 1 or 2 */
  double p;      /* 1, 2 or INFINITY */
  int32_t normalize;
  int32_t cap_essential;
  int32_t use_rips;
  double rips_threshold; /* < 0: largest pairwise distance */
  double grid_step;      /* > 0: snap diagram endpoints to this grid */
  int32_t jobs;
} presto_pipeline_config;

typedef struct presto_stage_times {
  double load_ms;
  double preprocess_ms;
  double project_ms;
  double persistence_ms;
  double landscape_ms;
  double distance_ms;
} presto_stage_times;

PRESTO_API const char* presto_version(void);
PRESTO_API const char* presto_last_error(void);
PRESTO_API void presto_string_free(char* s);
PRESTO_API void presto_pipeline_config_init(presto_pipeline_config* cfg);

/* ---- embeddings ---- */

/* format: "auto" (by extension), "csv" or "npy"; NULL means "auto" */
PRESTO_API presto_status presto_embedding_load(const char* path, const char* format,
                                               presto_embedding** out);
/* row-major n x d block */
PRESTO_API presto_status presto_embedding_from_data(const double* data, int64_t n, int64_t d,
                                                    presto_embedding** out);
PRESTO_API void presto_embedding_free(presto_embedding* e);
PRESTO_API presto_status presto_embedding_dims(const presto_embedding* e, int64_t* n,
                                               int64_t* d);
PRESTO_API presto_status presto_embedding_save_csv(const presto_embedding* e,
                                                   const char* path);

/* ---- manifests ---- */

PRESTO_API presto_status presto_manifest_load(const char* path, presto_manifest** out);
PRESTO_API void presto_manifest_free(presto_manifest* m);
PRESTO_API presto_status presto_manifest_size(const presto_manifest* m, size_t* out);
PRESTO_API presto_status presto_manifest_universe_id(const presto_manifest* m, size_t index,
                                                     char** out);

/* ---- pipeline ---- */

PRESTO_API presto_status presto_embedding_landscape(const presto_embedding* e,
                                                    const presto_pipeline_config* cfg,
                                                    presto_stage_times* times,
                                                    presto_landscape** out);
PRESTO_API presto_status presto_manifest_landscapes(const presto_manifest* m,
                                                    const presto_pipeline_config* cfg,
                                                    presto_stage_times* times,
                                                    presto_landscape_set** out);
PRESTO_API presto_status presto_build_mms(const presto_manifest* m,
                                          const presto_pipeline_config* cfg,
                                          presto_stage_times* times, presto_mms** out);

/* ---- landscapes ---- */

PRESTO_API void presto_landscape_free(presto_landscape* l);
PRESTO_API presto_status presto_landscape_to_json(const presto_landscape* l, char** out);
PRESTO_API presto_status presto_landscape_from_json(const char* json, presto_landscape** out);
PRESTO_API presto_status presto_landscape_max_h(const presto_landscape* l, int32_t* out);
PRESTO_API presto_status presto_landscape_layer_count(const presto_landscape* l, int32_t h,
                                                      size_t* out);
PRESTO_API presto_status presto_landscape_evaluate(const presto_landscape* l, int32_t h,
                                                   size_t layer, double t, double* out);
/* L^p norm / distance at one homology dimension */
PRESTO_API presto_status presto_landscape_norm(const presto_landscape* l, int32_t h, double p,
                                               double* out);
PRESTO_API presto_status presto_landscape_distance(const presto_landscape* a,
                                                   const presto_landscape* b, int32_t h,
                                                   double p, double* out);
/* norms summed over dimensions 0..h_max */
PRESTO_API presto_status presto_landscape_total_norm(const presto_landscape* l, int32_t h_max,
                                                     double p, double* out);
PRESTO_API presto_status presto_landscape_grid_round(const presto_landscape* l, double step,
                                                     presto_landscape** out);
/* landscape distances summed over dimensions 0..h_max; refuses mismatched
 * build settings */
PRESTO_API presto_status presto_presto_distance(const presto_landscape* a,
                                                const presto_landscape* b, int32_t h_max,
                                                double p, double* out);

/* ---- landscape sets ---- */

PRESTO_API presto_status presto_landscape_set_new(presto_landscape_set** out);
PRESTO_API presto_status presto_landscape_set_push(presto_landscape_set* s,
                                                   const presto_landscape* l);
PRESTO_API void presto_landscape_set_free(presto_landscape_set* s);
PRESTO_API presto_status presto_landscape_set_size(const presto_landscape_set* s, size_t* out);
PRESTO_API presto_status presto_landscape_set_get(const presto_landscape_set* s, size_t index,
                                                  presto_landscape** out);
PRESTO_API presto_status presto_landscape_set_average(const presto_landscape_set* s,
                                                      presto_landscape** out);
PRESTO_API presto_status presto_variance(const presto_landscape_set* s, int32_t h_max,
                                         double p, double* out);

/* ---- sensitivity ---- */

PRESTO_API presto_status presto_sensitivity_local(const presto_manifest* m,
                                                  const presto_landscape_set* s,
                                                  const char* dim_name, int32_t h_max,
                                                  double p, double* out);
PRESTO_API presto_status presto_sensitivity_global(const presto_manifest* m,
                                                   const presto_landscape_set* s,
                                                   int32_t h_max, double p, double* out);
PRESTO_API presto_status presto_sensitivity_report_json(const presto_manifest* m,
                                                        const presto_landscape_set* s,
                                                        int32_t h_max, double p, char** out);

/* ---- distance matrices ---- */

PRESTO_API void presto_mms_free(presto_mms* m);
PRESTO_API presto_status presto_mms_size(const presto_mms* m, size_t* out);
PRESTO_API presto_status presto_mms_entry(const presto_mms* m, size_t i, size_t j,
                                          double* out);
PRESTO_API presto_status presto_mms_id(const presto_mms* m, size_t i, char** out);
PRESTO_API presto_status presto_mms_to_json(const presto_mms* m, char** out);
PRESTO_API presto_status presto_mms_from_json(const char* json, presto_mms** out);
PRESTO_API presto_status presto_mms_save_csv(const presto_mms* m, const char* path);
PRESTO_API presto_status presto_mms_load_csv(const char* path, presto_mms** out);
PRESTO_API presto_status presto_mms_from_matrix(const char* const* ids, size_t n,
                                                const double* dist_row_major,
                                                presto_mms** out);
PRESTO_API presto_status presto_mms_quantile_epsilon(const presto_mms* m, double q,
                                                     double* out);

/* ---- analysis ---- */

/* method: "zscore" or "iqr"; ids (one per landscape) may be NULL to use the
 * landscapes' recorded source ids */
PRESTO_API presto_status presto_outliers_json(const presto_landscape_set* s,
                                              const char* const* ids, const char* method,
                                              double threshold, int32_t h_max, double p,
                                              char** out);
/* labels_out must hold presto_mms_size entries */
PRESTO_API presto_status presto_cluster(const presto_mms* m, double epsilon,
                                        int32_t* labels_out);
/* quantile in (0,1) wins over epsilon when >= 0 */
PRESTO_API presto_status presto_compress_json(const presto_mms* m, double epsilon,
                                              double quantile, char** out);
PRESTO_API presto_status presto_mantel(const presto_mms* a, const presto_mms* b,
                                       int32_t permutations, uint64_t seed,
                                       int32_t n_comparisons, double* r_out,
                                       double* p_value_out, double* corrected_p_out);
/* metric: "bottleneck" or "wasserstein" */
PRESTO_API presto_status presto_compare_mms(const presto_mms* a, const presto_mms* b,
                                            const char* metric, double p, double* out);

#ifdef __cplusplus
}
#endif

#endif /* PRESTO_H */
