#include "core/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "core/complex.hpp"
#include "core/error.hpp"
#include "core/persistence.hpp"
#include "core/preprocess.hpp"

namespace presto {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void validate_config(const PipelineConfig& cfg) {
  if (cfg.projector != "none" && cfg.projector != "pca" && cfg.projector != "gauss" &&
      cfg.projector != "mmds")
    throw DomainError("unknown projector '" + cfg.projector + "' (none, pca, gauss, mmds)");
  if (cfg.projector != "none" && cfg.k < 1) throw DomainError("k must be at least 1");
  if (cfg.h_max < 0 || cfg.h_max > 2) throw DomainError("h_max must be 0, 1 or 2");
  if (!(cfg.p == 1.0 || cfg.p == 2.0 || std::isinf(cfg.p)))
    throw DomainError("p must be 1, 2 or infinity");
  if (cfg.projector == "gauss" && cfg.n_projections < 1)
    throw DomainError("n_projections must be at least 1");
  if (cfg.grid_step < 0) throw DomainError("grid step must be positive");
}

PersistenceDiagram cap_essentials(PersistenceDiagram d, double max_filtration) {
  for (int h = 0; h <= d.max_h; ++h) {
    auto& ivs = d.intervals[static_cast<size_t>(h)];
    for (double b : d.essential_births[static_cast<size_t>(h)])
      if (max_filtration > b) ivs.emplace_back(b, max_filtration);
    std::sort(ivs.begin(), ivs.end());
  }
  return d;
}

}  // namespace

nlohmann::json pipeline_config_to_json(const PipelineConfig& cfg) {
  nlohmann::json j;
  j["projector"] = cfg.projector;
  j["k"] = cfg.projector == "none" ? 0 : cfg.k;
  j["n_projections"] = cfg.projector == "gauss" ? cfg.n_projections : 1;
  if (cfg.projector == "gauss") j["seed"] = cfg.seed;
  j["h_max"] = cfg.h_max;
  j["p"] = std::isinf(cfg.p) ? nlohmann::json("inf") : nlohmann::json(cfg.p);
  j["normalize"] = cfg.normalize;
  j["cap_essential"] = cfg.cap_essential;
  j["complex"] = cfg.use_rips ? "rips" : "alpha";
  if (cfg.use_rips) j["rips_threshold"] = cfg.rips_threshold;
  j["grid_step"] = cfg.grid_step;
  return j;
}

nlohmann::json stage_times_to_json(const StageTimes& t) {
  return {{"load_ms", t.load_ms},
          {"preprocess_ms", t.preprocess_ms},
          {"project_ms", t.project_ms},
          {"persistence_ms", t.persistence_ms},
          {"landscape_ms", t.landscape_ms},
          {"distance_ms", t.distance_ms}};
}

Landscape embedding_to_landscape(const Embedding& e, const PipelineConfig& cfg,
                                 StageTimes* times) {
  validate_config(cfg);

  auto t0 = Clock::now();
  Embedding work = e;
  if (cfg.normalize && !work.normalized) work = normalize(work);
  if (times) times->preprocess_ms += ms_since(t0);

  t0 = Clock::now();
  std::vector<Embedding> projected;
  if (cfg.projector == "none")
    projected.push_back(std::move(work));
  else if (cfg.projector == "pca")
    projected.push_back(project_pca(work, cfg.k).projected);
  else if (cfg.projector == "mmds")
    projected.push_back(project_mmds(work, cfg.k));
  else
    projected = project_gaussian(work, cfg.k, cfg.n_projections, cfg.seed);
  if (times) times->project_ms += ms_since(t0);

  LandscapeProvenance prov;
  prov.source_id = e.source_id;
  prov.normalized = cfg.normalize || e.normalized;
  prov.projector = cfg.projector;
  prov.k = cfg.projector == "none" ? 0 : cfg.k;
  prov.n_projections = cfg.projector == "gauss" ? cfg.n_projections : 1;
  prov.seed = cfg.projector == "gauss" ? cfg.seed : 0;
  prov.h_max = cfg.h_max;
  prov.complex = cfg.use_rips ? "rips" : "alpha";
  prov.rips_threshold = cfg.use_rips ? cfg.rips_threshold : -1.0;
  prov.cap_essential = cfg.cap_essential;
  prov.grid_step = cfg.grid_step;

  std::vector<Landscape> pieces;
  pieces.reserve(projected.size());
  for (const auto& pe : projected) {
    t0 = Clock::now();
    FilteredComplex fc = cfg.use_rips
                             ? rips_complex(pairwise_distances(pe.points), cfg.h_max,
                                            cfg.rips_threshold)
                             : alpha_complex(pe.points);
    PersistenceDiagram d = persistence(fc, cfg.h_max);
    if (cfg.cap_essential) d = cap_essentials(std::move(d), fc.max_filtration);
    if (times) times->persistence_ms += ms_since(t0);

    t0 = Clock::now();
    Landscape l = landscape_from_diagram(d, cfg.grid_step);
    l.provenance = prov;
    pieces.push_back(std::move(l));
    if (times) times->landscape_ms += ms_since(t0);
  }
  if (pieces.size() == 1) return std::move(pieces.front());
  t0 = Clock::now();
  Landscape avg = landscape_average(pieces);
  avg.provenance = prov;
  if (times) times->landscape_ms += ms_since(t0);
  return avg;
}

namespace {

struct TaskError {
  ErrorCode code;
  std::string message;
};

template <typename Fn>
void run_tasks(size_t n_tasks, int jobs, Fn&& fn) {
  int workers = std::max(1, jobs);
  workers = static_cast<int>(std::min<size_t>(static_cast<size_t>(workers), n_tasks));
  if (workers <= 1) {
    for (size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= n_tasks) break;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<Landscape> manifest_landscapes(const Manifest& m, const PipelineConfig& cfg,
                                           StageTimes* times) {
  validate_config(cfg);
  size_t n = m.universes.size();
  std::vector<Landscape> out(n);

  // identical embedding files resolve to one computation
  std::map<std::string, size_t> first_with_path;
  std::vector<size_t> owner(n);
  std::vector<size_t> tasks;
  for (size_t i = 0; i < n; ++i) {
    const auto& u = m.universes[i];
    if (!u.embedding_path.empty()) {
      auto [it, inserted] = first_with_path.emplace(u.embedding_path, i);
      owner[i] = it->second;
      if (inserted) tasks.push_back(i);
    } else {
      owner[i] = i;
      tasks.push_back(i);
    }
  }

  std::mutex mu;
  std::vector<std::unique_ptr<TaskError>> errors(tasks.size());
  run_tasks(tasks.size(), cfg.jobs, [&](size_t t) {
    size_t i = tasks[t];
    try {
      StageTimes local;
      auto t0 = Clock::now();
      Embedding e = load_universe_embedding(m.universes[i]);
      local.load_ms += ms_since(t0);
      e.source_id = m.universes[i].id;
      out[i] = embedding_to_landscape(e, cfg, &local);
      if (times) {
        std::lock_guard<std::mutex> lock(mu);
        times->load_ms += local.load_ms;
        times->preprocess_ms += local.preprocess_ms;
        times->project_ms += local.project_ms;
        times->persistence_ms += local.persistence_ms;
        times->landscape_ms += local.landscape_ms;
      }
    } catch (const Error& err) {
      errors[t] = std::make_unique<TaskError>(
          TaskError{err.code(), "universe " + m.universes[i].id + ": " + err.what()});
    } catch (const std::exception& err) {
      errors[t] = std::make_unique<TaskError>(
          TaskError{ErrorCode::Data, "universe " + m.universes[i].id + ": " + err.what()});
    }
  });
  for (const auto& err : errors)
    if (err) throw Error(err->code, err->message);

  for (size_t i = 0; i < n; ++i)
    if (owner[i] != i) {
      out[i] = out[owner[i]];
      out[i].provenance.source_id = m.universes[i].id;
    }
  return out;
}

Mms mms_from_landscapes(const std::vector<std::string>& ids,
                        const std::vector<Landscape>& ls, const PipelineConfig& cfg,
                        StageTimes* times) {
  if (ids.size() != ls.size()) throw DomainError("ids and landscapes differ in length");
  long n = static_cast<long>(ids.size());
  Mms mms;
  mms.ids = ids;
  mms.dist = Matrix::Zero(n, n);
  mms.config = pipeline_config_to_json(cfg);

  std::vector<std::pair<long, long>> pairs;
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  auto t0 = Clock::now();
  std::mutex mu;
  std::unique_ptr<TaskError> first_error;
  run_tasks(pairs.size(), cfg.jobs, [&](size_t t) {
    auto [i, j] = pairs[t];
    try {
      double d = presto_distance(ls[static_cast<size_t>(i)], ls[static_cast<size_t>(j)],
                                 cfg.h_max, cfg.p);
      mms.dist(i, j) = d;
      mms.dist(j, i) = d;
    } catch (const Error& err) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first_error)
        first_error = std::make_unique<TaskError>(TaskError{
            err.code(), "pair (" + ids[static_cast<size_t>(i)] + ", " +
                            ids[static_cast<size_t>(j)] + "): " + err.what()});
    }
  });
  if (first_error) throw Error(first_error->code, first_error->message);
  if (times) times->distance_ms += ms_since(t0);

  validate_mms(mms);
  return mms;
}

Mms build_mms(const Manifest& m, const PipelineConfig& cfg, StageTimes* times) {
  std::vector<Landscape> ls = manifest_landscapes(m, cfg, times);
  std::vector<std::string> ids;
  ids.reserve(m.universes.size());
  for (const auto& u : m.universes) ids.push_back(u.id);
  return mms_from_landscapes(ids, ls, cfg, times);
}

}  // namespace presto
