// Command-line front end over the shared library: one subcommand per
// analysis, JSON artifacts with run provenance attached.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "presto/presto.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{2, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError{2, "cannot write " + path};
  out << content;
  if (!out.good()) throw CliError{2, "short write to " + path};
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void check(presto_status st) {
  if (st == PRESTO_OK) return;
  std::string msg = presto_last_error();
  if (st == PRESTO_ERR_UNSUPPORTED_DIMENSION)
    msg += " (pass --rips to build a Rips filtration instead)";
  throw CliError{2, msg};
}

double parse_p(const std::string& s) {
  if (s == "inf") return INFINITY;
  return std::stod(s);
}

std::string render_p(double p) { return std::isinf(p) ? "inf" : (p == 1.0 ? "1" : "2"); }

// shared pipeline flags for the commands that run embeddings end to end
struct PipelineFlags {
  std::string projector = "none";
  int k = 2;
  int n_projections = 1;
  uint64_t seed = 42;
  int h_max = 2;
  std::string p = "2";
  bool normalize = false;
  bool cap_essential = false;
  bool rips = false;
  double rips_threshold = -1.0;
  double grid_step = 0.0;
  int jobs = 0;  // 0: take PRESTO_JOBS, else 1

  void add_to(CLI::App* cmd, bool with_jobs) {
    cmd->add_option("--projector", projector, "Projection method")
        ->check(CLI::IsMember({"none", "pca", "gauss", "mmds"}));
    cmd->add_option("--k", k, "Target dimension of the projection");
    cmd->add_option("--n-projections", n_projections,
                    "Random projections to average (gauss)");
    cmd->add_option("--seed", seed, "Random seed (gauss)");
    cmd->add_option("--h", h_max, "Largest homology dimension")->check(CLI::Range(0, 2));
    cmd->add_option("--p", p, "Norm exponent")->check(CLI::IsMember({"1", "2", "inf"}));
    cmd->add_flag("--normalize", normalize, "Rescale each embedding by its diameter");
    cmd->add_flag("--cap-essential", cap_essential,
                  "Close never-dying classes at the top of the filtration");
    cmd->add_flag("--rips", rips, "Build a Rips filtration instead of the alpha complex");
    cmd->add_option("--rips-threshold", rips_threshold,
                    "Rips scale cutoff (default: largest pairwise distance)");
    cmd->add_option("--grid-step", grid_step, "Snap diagram endpoints to this grid");
    if (with_jobs) cmd->add_option("--jobs", jobs, "Worker threads (env PRESTO_JOBS)");
  }

  int resolved_jobs() const {
    if (jobs > 0) return jobs;
    if (const char* env = std::getenv("PRESTO_JOBS")) {
      int j = std::atoi(env);
      if (j > 0) return j;
    }
    return 1;
  }

  presto_pipeline_config to_config() const {
    presto_pipeline_config cfg;
    presto_pipeline_config_init(&cfg);
    cfg.projector = projector.c_str();
    cfg.k = k;
    cfg.n_projections = n_projections;
    cfg.seed = seed;
    cfg.h_max = h_max;
    cfg.p = parse_p(p);
    cfg.normalize = normalize ? 1 : 0;
    cfg.cap_essential = cap_essential ? 1 : 0;
    cfg.use_rips = rips ? 1 : 0;
    cfg.rips_threshold = rips_threshold;
    cfg.grid_step = grid_step;
    cfg.jobs = resolved_jobs();
    return cfg;
  }

  json to_json(bool with_jobs) const {
    json j;
    j["projector"] = projector;
    j["k"] = k;
    j["n_projections"] = n_projections;
    j["seed"] = seed;
    j["h"] = h_max;
    j["p"] = p;
    j["normalize"] = normalize;
    j["cap_essential"] = cap_essential;
    j["complex"] = rips ? "rips" : "alpha";
    j["rips_threshold"] = rips_threshold;
    j["grid_step"] = grid_step;
    if (with_jobs) j["jobs"] = resolved_jobs();
    return j;
  }
};

json stage_times_json(const presto_stage_times& t, double total_ms) {
  json j;
  j["load_ms"] = t.load_ms;
  j["preprocess_ms"] = t.preprocess_ms;
  j["project_ms"] = t.project_ms;
  j["persistence_ms"] = t.persistence_ms;
  j["landscape_ms"] = t.landscape_ms;
  j["distance_ms"] = t.distance_ms;
  j["total_ms"] = total_ms;
  return j;
}

json run_provenance(const std::string& command, const json& config,
                    const std::vector<std::string>& input_paths, const json& timings) {
  json prov;
  prov["tool_version"] = presto_version();
  json cfg = config;
  cfg["command"] = command;
  prov["config"] = std::move(cfg);
  json inputs = json::object();
  for (const auto& path : input_paths) inputs[path] = hex64(fnv1a64(read_file(path)));
  prov["inputs"] = std::move(inputs);
  prov["timings_ms"] = timings;
  return prov;
}

void emit(const std::string& out_path, json artifact, const json& provenance) {
  artifact["run_provenance"] = provenance;
  if (!out_path.empty()) write_file(out_path, artifact.dump(2) + "\n");
}

// RAII owners for C API handles
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  ~Handle() { Free(ptr); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  T** slot() { return &ptr; }
  T* get() const { return ptr; }
};
using EmbeddingH = Handle<presto_embedding, presto_embedding_free>;
using ManifestH = Handle<presto_manifest, presto_manifest_free>;
using LandscapeH = Handle<presto_landscape, presto_landscape_free>;
using SetH = Handle<presto_landscape_set, presto_landscape_set_free>;
using MmsH = Handle<presto_mms, presto_mms_free>;

std::string owned_string(char* s) {
  std::string out = s ? s : "";
  presto_string_free(s);
  return out;
}

void load_mms(const std::string& path, MmsH& out) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
    check(presto_mms_load_csv(path.c_str(), out.slot()));
  } else {
    check(presto_mms_from_json(read_file(path).c_str(), out.slot()));
  }
}

std::vector<std::string> landscape_files(const std::string& dir) {
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  }
  if (ec) throw CliError{2, "cannot read directory " + dir};
  if (files.empty()) throw CliError{2, "no landscape .json files in " + dir};
  std::sort(files.begin(), files.end());
  return files;
}

void load_landscape_dir(const std::string& dir, SetH& set, std::vector<std::string>& ids,
                        std::vector<std::string>& files) {
  files = landscape_files(dir);
  check(presto_landscape_set_new(set.slot()));
  for (const auto& f : files) {
    LandscapeH l;
    check(presto_landscape_from_json(read_file(f).c_str(), l.slot()));
    check(presto_landscape_set_push(set.get(), l.get()));
    ids.push_back(fs::path(f).stem().string());
  }
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// ---- subcommands ----

int cmd_landscape(const std::string& input, const std::string& format,
                  const PipelineFlags& flags, const std::string& out) {
  Timer timer;
  EmbeddingH e;
  check(presto_embedding_load(input.c_str(), format.c_str(), e.slot()));
  presto_pipeline_config cfg = flags.to_config();
  presto_stage_times times{};
  LandscapeH l;
  check(presto_embedding_landscape(e.get(), &cfg, &times, l.slot()));
  char* js = nullptr;
  check(presto_landscape_to_json(l.get(), &js));
  json artifact = json::parse(owned_string(js));
  int32_t max_h = 0;
  check(presto_landscape_max_h(l.get(), &max_h));
  json prov = run_provenance("landscape", flags.to_json(false), {input},
                             stage_times_json(times, timer.ms()));
  emit(out, artifact, prov);
  std::ostringstream layers;
  for (int32_t h = 0; h <= max_h; ++h) {
    size_t count = 0;
    check(presto_landscape_layer_count(l.get(), h, &count));
    layers << (h ? "," : "") << count;
  }
  std::cout << "landscape " << (out.empty() ? "(not written)" : out) << ": max_h=" << max_h
            << " layers=[" << layers.str() << "]\n";
  return 0;
}

int cmd_distance(const std::string& a_path, const std::string& b_path, const std::string& p,
                 const std::string& out) {
  Timer timer;
  LandscapeH a, b;
  check(presto_landscape_from_json(read_file(a_path).c_str(), a.slot()));
  check(presto_landscape_from_json(read_file(b_path).c_str(), b.slot()));
  int32_t h_max = 0;
  check(presto_landscape_max_h(a.get(), &h_max));
  double value = 0;
  check(presto_presto_distance(a.get(), b.get(), h_max, parse_p(p), &value));
  json config = {{"p", p}, {"h", h_max}};
  json prov = run_provenance("distance", config, {a_path, b_path},
                             {{"total_ms", timer.ms()}});
  emit(out, json{{"value", value}}, prov);
  std::cout << "distance = " << value << "\n";
  return 0;
}

int cmd_variance(const std::string& dir, const std::string& p, const std::string& out) {
  Timer timer;
  SetH set;
  std::vector<std::string> ids, files;
  load_landscape_dir(dir, set, ids, files);
  LandscapeH first;
  check(presto_landscape_set_get(set.get(), 0, first.slot()));
  int32_t h_max = 0;
  check(presto_landscape_max_h(first.get(), &h_max));
  double value = 0;
  check(presto_variance(set.get(), h_max, parse_p(p), &value));
  json config = {{"p", p}, {"h", h_max}};
  json prov = run_provenance("variance", config, files, {{"total_ms", timer.ms()}});
  emit(out, json{{"value", value}, {"n", ids.size()}}, prov);
  std::cout << "variance = " << value << " (n=" << ids.size() << ")\n";
  return 0;
}

int cmd_sensitivity(const std::string& manifest_path, const std::string& dimension,
                    bool global_only, const PipelineFlags& flags, const std::string& out) {
  Timer timer;
  ManifestH m;
  check(presto_manifest_load(manifest_path.c_str(), m.slot()));
  presto_pipeline_config cfg = flags.to_config();
  presto_stage_times times{};
  SetH set;
  check(presto_manifest_landscapes(m.get(), &cfg, &times, set.slot()));
  double p = parse_p(flags.p);

  char* js = nullptr;
  check(presto_sensitivity_report_json(m.get(), set.get(), flags.h_max, p, &js));
  json artifact = json::parse(owned_string(js));

  double value = 0;
  std::string label;
  if (global_only) {
    check(presto_sensitivity_global(m.get(), set.get(), flags.h_max, p, &value));
    label = "global";
  } else {
    check(presto_sensitivity_local(m.get(), set.get(), dimension.c_str(), flags.h_max, p,
                                   &value));
    label = dimension;
  }
  json config = flags.to_json(false);
  config["dimension"] = global_only ? json(nullptr) : json(dimension);
  json prov = run_provenance("sensitivity", config, {manifest_path},
                             stage_times_json(times, timer.ms()));
  emit(out, artifact, prov);
  std::cout << "sensitivity[" << label << "] = " << value << "\n";
  return 0;
}

int cmd_outliers(const std::string& dir, const std::string& method, double threshold,
                 const std::string& p, int h_flag, const std::string& out) {
  Timer timer;
  SetH set;
  std::vector<std::string> ids, files;
  load_landscape_dir(dir, set, ids, files);
  int32_t h_max = h_flag;
  if (h_max < 0) {
    LandscapeH first;
    check(presto_landscape_set_get(set.get(), 0, first.slot()));
    check(presto_landscape_max_h(first.get(), &h_max));
  }
  std::vector<const char*> id_ptrs;
  for (const auto& id : ids) id_ptrs.push_back(id.c_str());
  char* js = nullptr;
  check(presto_outliers_json(set.get(), id_ptrs.data(), method.c_str(), threshold, h_max,
                             parse_p(p), &js));
  json artifact = json::parse(owned_string(js));
  json config = {{"method", method}, {"threshold", threshold}, {"p", p}, {"h", h_max}};
  json prov = run_provenance("outliers", config, files, {{"total_ms", timer.ms()}});
  size_t flagged = artifact["flagged"].size();
  emit(out, artifact, prov);
  std::cout << "outliers: " << flagged << " flagged of " << ids.size() << "\n";
  return 0;
}

double resolve_epsilon(const MmsH& m, double epsilon, double quantile) {
  if (quantile >= 0) {
    double eps = 0;
    check(presto_mms_quantile_epsilon(m.get(), quantile, &eps));
    return eps;
  }
  return epsilon;
}

int cmd_cluster(const std::string& mms_path, double epsilon, double quantile,
                const std::string& out, const std::string& csv) {
  Timer timer;
  MmsH m;
  load_mms(mms_path, m);
  double eps = resolve_epsilon(m, epsilon, quantile);
  size_t n = 0;
  check(presto_mms_size(m.get(), &n));
  std::vector<int32_t> labels(n);
  check(presto_cluster(m.get(), eps, labels.data()));

  json label_map = json::object();
  std::ostringstream csv_body;
  csv_body << "id,label\n";
  int n_clusters = 0;
  for (size_t i = 0; i < n; ++i) {
    char* id = nullptr;
    check(presto_mms_id(m.get(), i, &id));
    std::string ids = owned_string(id);
    label_map[ids] = labels[i];
    csv_body << ids << "," << labels[i] << "\n";
    n_clusters = std::max(n_clusters, labels[i] + 1);
  }
  if (!csv.empty()) write_file(csv, csv_body.str());

  json config = {{"epsilon", eps}};
  if (quantile >= 0) config["quantile"] = quantile;
  json prov = run_provenance("cluster", config, {mms_path}, {{"total_ms", timer.ms()}});
  emit(out, json{{"labels", label_map}, {"epsilon", eps}}, prov);
  std::cout << "clusters: " << n_clusters << " at epsilon=" << eps << "\n";
  return 0;
}

int cmd_compress(const std::string& mms_path, double epsilon, double quantile,
                 const std::string& method, const std::string& out, const std::string& csv) {
  Timer timer;
  MmsH m;
  load_mms(mms_path, m);
  size_t n = 0;
  check(presto_mms_size(m.get(), &n));

  json artifact;
  double eps = 0;
  if (method == "greedy_set_cover") {
    char* js = nullptr;
    check(presto_compress_json(m.get(), epsilon, quantile, &js));
    artifact = json::parse(owned_string(js));
    eps = artifact["epsilon"].get<double>();
  } else {
    eps = resolve_epsilon(m, epsilon, quantile);
    if (eps <= 0) throw CliError{2, "epsilon must be positive"};
    std::vector<int32_t> labels(n);
    check(presto_cluster(m.get(), eps, labels.data()));
    std::vector<std::string> ids(n);
    for (size_t i = 0; i < n; ++i) {
      char* id = nullptr;
      check(presto_mms_id(m.get(), i, &id));
      ids[i] = owned_string(id);
    }
    // lowest-index member of each cluster serves as its representative
    std::map<int32_t, size_t> rep_of;
    for (size_t i = 0; i < n; ++i)
      if (!rep_of.count(labels[i])) rep_of[labels[i]] = i;
    json reps = json::array();
    for (const auto& [label, idx] : rep_of) reps.push_back(ids[idx]);
    json assignment = json::array();
    for (size_t i = 0; i < n; ++i) assignment.push_back(ids[rep_of[labels[i]]]);
    artifact = {{"representatives", reps},
                {"assignment", assignment},
                {"epsilon", eps},
                {"quantile", quantile >= 0 ? json(quantile) : json(nullptr)},
                {"method", "complete_linkage"}};
  }

  // re-check the coverage promise before anything is written
  std::map<std::string, size_t> index_of;
  for (size_t i = 0; i < n; ++i) {
    char* id = nullptr;
    check(presto_mms_id(m.get(), i, &id));
    index_of[owned_string(id)] = i;
  }
  for (size_t i = 0; i < n; ++i) {
    std::string rep = artifact["assignment"][i].get<std::string>();
    double d = 0;
    check(presto_mms_entry(m.get(), i, index_of.at(rep), &d));
    if (d > eps)
      throw CliError{2, "coverage check failed: universe " + std::to_string(i) +
                            " is " + std::to_string(d) + " from its representative"};
  }

  std::ostringstream csv_body;
  csv_body << "id,representative\n";
  for (size_t i = 0; i < n; ++i) {
    char* id = nullptr;
    check(presto_mms_id(m.get(), i, &id));
    csv_body << owned_string(id) << "," << artifact["assignment"][i].get<std::string>()
             << "\n";
  }
  if (!csv.empty()) write_file(csv, csv_body.str());

  json config = {{"epsilon", eps}, {"method", method}};
  if (quantile >= 0) config["quantile"] = quantile;
  json prov = run_provenance("compress", config, {mms_path}, {{"total_ms", timer.ms()}});
  size_t n_reps = artifact["representatives"].size();
  emit(out, artifact, prov);
  std::cout << "representatives: " << n_reps << " of " << n << " at epsilon=" << eps << "\n";
  return 0;
}

int cmd_mantel(const std::string& a_path, const std::string& b_path, int permutations,
               uint64_t seed, int comparisons, const std::string& out) {
  Timer timer;
  MmsH a, b;
  load_mms(a_path, a);
  load_mms(b_path, b);
  double r = 0, p_value = 0, corrected = -1;
  check(presto_mantel(a.get(), b.get(), permutations, seed, comparisons, &r, &p_value,
                      &corrected));
  json artifact = {{"r", r},
                   {"p_value", p_value},
                   {"permutations", permutations},
                   {"corrected_p", corrected >= 0 ? json(corrected) : json(nullptr)}};
  json config = {{"permutations", permutations},
                 {"seed", seed},
                 {"n_comparisons", comparisons}};
  json prov = run_provenance("mantel", config, {a_path, b_path}, {{"total_ms", timer.ms()}});
  emit(out, artifact, prov);
  std::cout << "mantel r=" << r << " p=" << p_value << "\n";
  return 0;
}

int cmd_compare_mms(const std::string& a_path, const std::string& b_path,
                    const std::string& metric, const std::string& p, const std::string& out) {
  Timer timer;
  MmsH a, b;
  load_mms(a_path, a);
  load_mms(b_path, b);
  double value = 0;
  check(presto_compare_mms(a.get(), b.get(), metric.c_str(), parse_p(p), &value));
  json config = {{"metric", metric},
                 {"p", p},
                 {"construction", "rips persistence of each distance matrix, dimensions 0-1"}};
  json prov = run_provenance("compare-mms", config, {a_path, b_path},
                             {{"total_ms", timer.ms()}});
  emit(out, json{{"value", value}}, prov);
  std::cout << "compare-mms " << metric << " = " << value << "\n";
  return 0;
}

int cmd_build_mms(const std::string& manifest_path, const PipelineFlags& flags,
                  const std::string& out, const std::string& csv) {
  Timer timer;
  ManifestH m;
  check(presto_manifest_load(manifest_path.c_str(), m.slot()));
  presto_pipeline_config cfg = flags.to_config();
  presto_stage_times times{};
  MmsH mms;
  check(presto_build_mms(m.get(), &cfg, &times, mms.slot()));
  size_t n = 0;
  check(presto_mms_size(mms.get(), &n));
  char* js = nullptr;
  check(presto_mms_to_json(mms.get(), &js));
  json artifact = json::parse(owned_string(js));
  if (!csv.empty()) check(presto_mms_save_csv(mms.get(), csv.c_str()));
  json prov = run_provenance("build-mms", flags.to_json(true), {manifest_path},
                             stage_times_json(times, timer.ms()));
  emit(out, artifact, prov);
  std::cout << "mms " << n << "x" << n << (out.empty() ? "" : " written to " + out) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological comparison of embedding collections"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  int rc = 0;
  std::function<void()> action;
  auto sub = [&](const std::string& name, const std::string& desc) {
    auto* c = app.add_subcommand(name, desc);
    c->set_help_flag("--help", "print help and exit");
    return c;
  };

  // landscape
  auto* c_land = sub("landscape", "Embedding to persistence landscape");
  std::string land_input, land_format = "auto", land_out;
  PipelineFlags land_flags;
  c_land->add_option("--input", land_input, "Embedding file")->required();
  c_land->add_option("--format", land_format, "Input format")
      ->check(CLI::IsMember({"auto", "csv", "npy"}));
  land_flags.add_to(c_land, false);
  c_land->add_option("--out", land_out, "Output landscape JSON")->required();
  c_land->callback([&]() {
    action = [&]() { rc = cmd_landscape(land_input, land_format, land_flags, land_out); };
  });

  // distance
  auto* c_dist = sub("distance", "Distance between two landscapes");
  std::string dist_a, dist_b, dist_p = "2", dist_out;
  c_dist->add_option("--a", dist_a, "First landscape JSON")->required();
  c_dist->add_option("--b", dist_b, "Second landscape JSON")->required();
  c_dist->add_option("--p", dist_p, "Norm exponent")->check(CLI::IsMember({"1", "2", "inf"}));
  c_dist->add_option("--out", dist_out, "Output JSON");
  c_dist->callback([&]() {
    action = [&]() { rc = cmd_distance(dist_a, dist_b, dist_p, dist_out); };
  });

  // variance
  auto* c_var = sub("variance", "Variance of landscape norms");
  std::string var_dir, var_p = "2", var_out;
  c_var->add_option("--landscapes", var_dir, "Directory of landscape JSON files")->required();
  c_var->add_option("--p", var_p, "Norm exponent")->check(CLI::IsMember({"1", "2", "inf"}));
  c_var->add_option("--out", var_out, "Output JSON");
  c_var->callback([&]() {
    action = [&]() { rc = cmd_variance(var_dir, var_p, var_out); };
  });

  // sensitivity
  auto* c_sens = sub("sensitivity", "Per-parameter sensitivity");
  std::string sens_manifest, sens_dim, sens_out;
  bool sens_global = false;
  PipelineFlags sens_flags;
  c_sens->add_option("--manifest", sens_manifest, "Multiverse manifest JSON")->required();
  auto* dim_opt = c_sens->add_option("--dimension", sens_dim, "Parameter dimension");
  auto* glob_opt = c_sens->add_flag("--global", sens_global, "Aggregate over all dimensions");
  dim_opt->excludes(glob_opt);
  sens_flags.add_to(c_sens, true);
  c_sens->add_option("--out", sens_out, "Output JSON");
  c_sens->callback([&]() {
    if (sens_dim.empty() && !sens_global)
      throw CLI::ValidationError("sensitivity", "give --dimension NAME or --global");
    action = [&]() {
      rc = cmd_sensitivity(sens_manifest, sens_dim, sens_global, sens_flags, sens_out);
    };
  });

  // outliers
  auto* c_out = sub("outliers", "Landscapes with anomalous norms");
  std::string outl_dir, outl_method = "zscore", outl_p = "2", outl_out;
  double outl_threshold = -1;
  int outl_h = -1;
  c_out->add_option("--landscapes", outl_dir, "Directory of landscape JSON files")->required();
  c_out->add_option("--method", outl_method, "Detection method")
      ->check(CLI::IsMember({"zscore", "iqr"}));
  c_out->add_option("--threshold", outl_threshold,
                    "zscore cutoff (default 3) or iqr multiplier (default 1.5)");
  c_out->add_option("--p", outl_p, "Norm exponent")->check(CLI::IsMember({"1", "2", "inf"}));
  c_out->add_option("--h", outl_h, "Largest homology dimension (default: from landscapes)");
  c_out->add_option("--out", outl_out, "Output JSON");
  c_out->callback([&]() {
    action = [&]() {
      double thr = outl_threshold >= 0 ? outl_threshold : (outl_method == "iqr" ? 1.5 : 3.0);
      rc = cmd_outliers(outl_dir, outl_method, thr, outl_p, outl_h, outl_out);
    };
  });

  // cluster
  auto* c_clu = sub("cluster", "Complete-linkage clustering of an MMS");
  std::string clu_mms, clu_out, clu_csv;
  double clu_eps = -1, clu_q = -1;
  c_clu->add_option("--mms", clu_mms, "Distance matrix (CSV or JSON)")->required();
  auto* clu_e = c_clu->add_option("--epsilon", clu_eps, "Dendrogram cut height");
  auto* clu_qo = c_clu->add_option("--quantile", clu_q, "Cut at this distance quantile");
  clu_e->excludes(clu_qo);
  c_clu->add_option("--out", clu_out, "Output JSON");
  c_clu->add_option("--csv", clu_csv, "Also write id,label CSV");
  c_clu->callback([&]() {
    if (clu_eps < 0 && clu_q < 0)
      throw CLI::ValidationError("cluster", "give --epsilon or --quantile");
    action = [&]() { rc = cmd_cluster(clu_mms, clu_eps, clu_q, clu_out, clu_csv); };
  });

  // compress
  auto* c_cmp = sub("compress", "Pick representative universes");
  std::string cmp_mms, cmp_method = "greedy_set_cover", cmp_out, cmp_csv;
  double cmp_eps = -1, cmp_q = -1;
  c_cmp->add_option("--mms", cmp_mms, "Distance matrix (CSV or JSON)")->required();
  auto* cmp_e = c_cmp->add_option("--epsilon", cmp_eps, "Coverage radius");
  auto* cmp_qo = c_cmp->add_option("--quantile", cmp_q, "Radius from distance quantile");
  cmp_e->excludes(cmp_qo);
  c_cmp->add_option("--method", cmp_method, "Selection method")
      ->check(CLI::IsMember({"greedy_set_cover", "complete_linkage"}));
  c_cmp->add_option("--out", cmp_out, "Output JSON");
  c_cmp->add_option("--csv", cmp_csv, "Also write id,representative CSV");
  c_cmp->callback([&]() {
    if (cmp_eps < 0 && cmp_q < 0)
      throw CLI::ValidationError("compress", "give --epsilon or --quantile");
    action = [&]() {
      rc = cmd_compress(cmp_mms, cmp_eps, cmp_q, cmp_method, cmp_out, cmp_csv);
    };
  });

  // mantel
  auto* c_man = sub("mantel", "Permutation correlation of two matrices");
  std::string man_a, man_b, man_out;
  int man_perms = 999, man_comp = 0;
  uint64_t man_seed = 42;
  c_man->add_option("--a", man_a, "First matrix (CSV or JSON)")->required();
  c_man->add_option("--b", man_b, "Second matrix (CSV or JSON)")->required();
  c_man->add_option("--permutations", man_perms, "Number of permutations");
  c_man->add_option("--seed", man_seed, "Permutation seed");
  c_man->add_option("--comparisons", man_comp, "Bonferroni correction count");
  c_man->add_option("--out", man_out, "Output JSON");
  c_man->callback([&]() {
    action = [&]() { rc = cmd_mantel(man_a, man_b, man_perms, man_seed, man_comp, man_out); };
  });

  // compare-mms
  auto* c_cmm = sub("compare-mms", "Topological distance between two matrices");
  std::string cmm_a, cmm_b, cmm_metric = "bottleneck", cmm_p = "2", cmm_out;
  c_cmm->add_option("--a", cmm_a, "First matrix (CSV or JSON)")->required();
  c_cmm->add_option("--b", cmm_b, "Second matrix (CSV or JSON)")->required();
  c_cmm->add_option("--metric", cmm_metric, "Diagram metric")
      ->check(CLI::IsMember({"bottleneck", "wasserstein"}));
  c_cmm->add_option("--p", cmm_p, "Wasserstein exponent")
      ->check(CLI::IsMember({"1", "2", "inf"}));
  c_cmm->add_option("--out", cmm_out, "Output JSON");
  c_cmm->callback([&]() {
    action = [&]() { rc = cmd_compare_mms(cmm_a, cmm_b, cmm_metric, cmm_p, cmm_out); };
  });

  // build-mms
  auto* c_bld = sub("build-mms", "Pairwise distances over a manifest");
  std::string bld_manifest, bld_out, bld_csv;
  PipelineFlags bld_flags;
  c_bld->add_option("--manifest", bld_manifest, "Multiverse manifest JSON")->required();
  bld_flags.add_to(c_bld, true);
  c_bld->add_option("--out", bld_out, "Output JSON");
  c_bld->add_option("--csv", bld_csv, "Also write the matrix as CSV");
  c_bld->callback([&]() {
    action = [&]() { rc = cmd_build_mms(bld_manifest, bld_flags, bld_out, bld_csv); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (action) action();
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  }
  return rc;
}
