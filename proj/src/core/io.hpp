#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "core/embedding.hpp"

namespace presto {

struct Universe {
  std::string id;
  // canonical order: sorted by name; values keep their JSON type (string or number)
  std::vector<std::pair<std::string, nlohmann::json>> params;
  std::string embedding_path;           // resolved against the manifest directory
  std::optional<Matrix> inline_data;
};

struct Manifest {
  std::vector<Universe> universes;
  std::vector<std::string> param_names;  // sorted, shared by all universes
  nlohmann::json metadata;
};

Embedding load_embedding_csv(const std::string& path);
Embedding load_embedding_npy(const std::string& path);
// format: "csv", "npy" or "auto" (by file extension, default csv)
Embedding load_embedding(const std::string& path, const std::string& format = "auto");
void save_embedding_csv(const Embedding& e, const std::string& path);

Manifest load_manifest(const std::string& path);
Embedding load_universe_embedding(const Universe& u);

// symmetric matrix with an id header row and id column
void save_matrix_csv(const std::vector<std::string>& ids, const Matrix& m,
                     const std::string& path);
std::pair<std::vector<std::string>, Matrix> load_matrix_csv(const std::string& path);

// shortest decimal form that parses back to the same bits
std::string render_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
uint64_t fnv1a64(const std::string& bytes);

}  // namespace presto
