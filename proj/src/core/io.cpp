#include "core/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace presto {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() && cur.back() == '\r') cur.pop_back();
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (*first == '+') ++first;  // from_chars rejects a leading plus
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string render_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Embedding load_embedding_csv(const std::string& path) {
  std::string text = read_file(path);
  std::vector<std::string> lines = split_lines(text);
  std::vector<std::string> rows;
  for (auto& l : lines)
    if (!trim(l).empty()) rows.push_back(l);
  if (rows.empty()) throw FormatError("empty csv: " + path);

  size_t start = 0;
  {
    auto toks = split_csv_row(rows[0]);
    double tmp;
    if (!parse_double(toks[0], tmp)) start = 1;  // header row
  }
  if (start >= rows.size()) throw FormatError("csv has a header but no data rows: " + path);

  std::vector<std::vector<double>> data;
  size_t width = 0;
  for (size_t r = start; r < rows.size(); ++r) {
    auto toks = split_csv_row(rows[r]);
    if (width == 0) width = toks.size();
    if (toks.size() != width)
      throw FormatError("ragged csv row " + std::to_string(r + 1) + " in " + path + ": expected " +
                        std::to_string(width) + " fields, got " + std::to_string(toks.size()));
    std::vector<double> vals(toks.size());
    for (size_t c = 0; c < toks.size(); ++c) {
      double v;
      if (!parse_double(toks[c], v))
        throw FormatError("unparseable number at row " + std::to_string(r + 1) + " col " +
                          std::to_string(c + 1) + " in " + path + ": '" + toks[c] + "'");
      if (!std::isfinite(v))
        throw DataError("non-finite value at row " + std::to_string(r + 1) + " col " +
                        std::to_string(c + 1) + " in " + path);
      vals[c] = v;
    }
    data.push_back(std::move(vals));
  }

  Embedding e;
  e.points.resize(static_cast<long>(data.size()), static_cast<long>(width));
  for (size_t r = 0; r < data.size(); ++r)
    for (size_t c = 0; c < width; ++c) e.points(static_cast<long>(r), static_cast<long>(c)) = data[r][c];
  e.source_id = path;
  return e;
}

void save_embedding_csv(const Embedding& e, const std::string& path) {
  std::string out;
  for (long r = 0; r < e.n(); ++r) {
    for (long c = 0; c < e.d(); ++c) {
      if (c) out.push_back(',');
      out += render_double(e.points(r, c));
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

namespace {

// minimal parser for the python dict literal in an npy v1.0 header
std::string header_field(const std::string& header, const std::string& key) {
  size_t pos = header.find("'" + key + "'");
  if (pos == std::string::npos) throw FormatError("npy header missing field '" + key + "'");
  pos = header.find(':', pos);
  if (pos == std::string::npos) throw FormatError("npy header malformed near '" + key + "'");
  ++pos;
  while (pos < header.size() && header[pos] == ' ') ++pos;
  size_t end;
  if (header[pos] == '(') {
    end = header.find(')', pos);
    if (end == std::string::npos) throw FormatError("npy header malformed shape");
    ++end;
  } else if (header[pos] == '\'') {
    end = header.find('\'', pos + 1);
    if (end == std::string::npos) throw FormatError("npy header malformed string");
    ++end;
  } else {
    end = header.find_first_of(",}", pos);
    if (end == std::string::npos) throw FormatError("npy header malformed value");
  }
  return trim(header.substr(pos, end - pos));
}

}  // namespace

Embedding load_embedding_npy(const std::string& path) {
  std::string raw = read_file(path);
  if (raw.size() < 10 || std::memcmp(raw.data(), "\x93NUMPY", 6) != 0)
    throw FormatError("not an npy file: " + path);
  unsigned major = static_cast<unsigned char>(raw[6]);
  unsigned minor = static_cast<unsigned char>(raw[7]);
  if (major != 1 || minor != 0)
    throw FormatError("unsupported npy version " + std::to_string(major) + "." +
                      std::to_string(minor) + " (only 1.0): " + path);
  unsigned hlen = static_cast<unsigned char>(raw[8]) | (static_cast<unsigned char>(raw[9]) << 8);
  if (raw.size() < 10 + hlen) throw FormatError("truncated npy header: " + path);
  std::string header = raw.substr(10, hlen);

  std::string descr = header_field(header, "descr");
  std::string order = header_field(header, "fortran_order");
  std::string shape = header_field(header, "shape");

  if (order != "False")
    throw FormatError("npy fortran_order=" + order + " not supported (C order required): " + path);
  size_t item = 0;
  if (descr == "'<f8'") item = 8;
  else if (descr == "'<f4'") item = 4;
  else throw FormatError("npy descr " + descr + " not supported (need '<f4' or '<f8'): " + path);

  // shape like (n, d)
  std::vector<long> dims;
  {
    std::string inner = shape.substr(1, shape.size() - 2);
    for (auto& tok : split_csv_row(inner)) {
      if (tok.empty()) continue;
      long v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size())
        throw FormatError("npy shape malformed: " + shape);
      dims.push_back(v);
    }
  }
  if (dims.size() != 2)
    throw FormatError("npy shape " + shape + " not supported (2-D required): " + path);
  long n = dims[0], d = dims[1];
  if (n < 1 || d < 1) throw FormatError("npy shape " + shape + " has an empty axis: " + path);

  size_t expect = static_cast<size_t>(n) * static_cast<size_t>(d) * item;
  if (raw.size() - 10 - hlen != expect)
    throw FormatError("npy payload size mismatch (expected " + std::to_string(expect) +
                      " bytes): " + path);
  const char* payload = raw.data() + 10 + hlen;

  Embedding e;
  e.points.resize(n, d);
  for (long r = 0; r < n; ++r) {
    for (long c = 0; c < d; ++c) {
      size_t off = (static_cast<size_t>(r) * d + c) * item;
      double v;
      if (item == 8) {
        std::memcpy(&v, payload + off, 8);
      } else {
        float f;
        std::memcpy(&f, payload + off, 4);
        v = static_cast<double>(f);
      }
      if (!std::isfinite(v))
        throw DataError("non-finite value at row " + std::to_string(r + 1) + " col " +
                        std::to_string(c + 1) + " in " + path);
      e.points(r, c) = v;
    }
  }
  e.source_id = path;
  return e;
}

Embedding load_embedding(const std::string& path, const std::string& format) {
  std::string fmt = format;
  if (fmt == "auto" || fmt.empty()) {
    auto ext = std::filesystem::path(path).extension().string();
    fmt = (ext == ".npy") ? "npy" : "csv";
  }
  if (fmt == "csv") return load_embedding_csv(path);
  if (fmt == "npy") return load_embedding_npy(path);
  throw FormatError("unknown embedding format '" + format + "'");
}

namespace {

Matrix parse_inline_data(const nlohmann::json& arr, const std::string& uid) {
  if (!arr.is_array() || arr.empty())
    throw ManifestError("universe '" + uid + "': inline data must be a non-empty array of rows");
  size_t width = 0;
  std::vector<std::vector<double>> rows;
  for (const auto& row : arr) {
    if (!row.is_array() || row.empty())
      throw ManifestError("universe '" + uid + "': inline data rows must be non-empty arrays");
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ManifestError("universe '" + uid + "': ragged inline data");
    std::vector<double> vals;
    for (const auto& v : row) {
      if (!v.is_number())
        throw ManifestError("universe '" + uid + "': inline data must be numeric");
      double x = v.get<double>();
      if (!std::isfinite(x))
        throw ManifestError("universe '" + uid + "': non-finite inline value");
      vals.push_back(x);
    }
    rows.push_back(std::move(vals));
  }
  Matrix m(static_cast<long>(rows.size()), static_cast<long>(width));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < width; ++c) m(static_cast<long>(r), static_cast<long>(c)) = rows[r][c];
  return m;
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("manifest json parse error in " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("universes") || !j["universes"].is_array())
    throw ManifestError("manifest must be an object with a 'universes' array: " + path);
  const auto& arr = j["universes"];
  if (arr.empty()) throw ManifestError("manifest has no universes: " + path);

  std::filesystem::path base = std::filesystem::path(path).parent_path();

  Manifest m;
  if (j.contains("metadata")) m.metadata = j["metadata"];
  std::vector<std::string> seen_ids;
  for (const auto& uj : arr) {
    if (!uj.is_object()) throw ManifestError("universe entries must be objects: " + path);
    Universe u;
    if (!uj.contains("id") || !uj["id"].is_string())
      throw ManifestError("universe missing string 'id': " + path);
    u.id = uj["id"].get<std::string>();
    if (std::find(seen_ids.begin(), seen_ids.end(), u.id) != seen_ids.end())
      throw ManifestError("duplicate universe id '" + u.id + "' in " + path);
    seen_ids.push_back(u.id);

    if (uj.contains("params")) {
      if (!uj["params"].is_object())
        throw ManifestError("universe '" + u.id + "': params must be an object");
      for (auto it = uj["params"].begin(); it != uj["params"].end(); ++it) {
        if (!it.value().is_string() && !it.value().is_number())
          throw ManifestError("universe '" + u.id + "': param '" + it.key() +
                              "' must be a string or number");
        u.params.emplace_back(it.key(), it.value());
      }
      std::sort(u.params.begin(), u.params.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    bool has_path = uj.contains("embedding") && uj["embedding"].is_string();
    bool has_data = uj.contains("data");
    if (has_path) u.embedding_path = (base / uj["embedding"].get<std::string>()).string();
    if (has_data) u.inline_data = parse_inline_data(uj["data"], u.id);
    if (!has_path && !has_data)
      throw ManifestError("universe '" + u.id + "' needs 'embedding' (path) or 'data' (inline)");

    m.universes.push_back(std::move(u));
  }

  // every universe must expose the identical parameter name set
  for (const auto& p : m.universes[0].params) m.param_names.push_back(p.first);
  for (const auto& u : m.universes) {
    std::vector<std::string> names;
    for (const auto& p : u.params) names.push_back(p.first);
    if (names != m.param_names)
      throw ManifestError("universe '" + u.id + "' has a different parameter set in " + path);
  }
  return m;
}

Embedding load_universe_embedding(const Universe& u) {
  if (u.inline_data) {
    Embedding e;
    e.points = *u.inline_data;
    e.source_id = u.id;
    return e;
  }
  Embedding e = load_embedding(u.embedding_path);
  e.source_id = u.id;
  return e;
}

void save_matrix_csv(const std::vector<std::string>& ids, const Matrix& m,
                     const std::string& path) {
  if (static_cast<long>(ids.size()) != m.rows() || m.rows() != m.cols())
    throw DomainError("matrix csv: ids and matrix shape disagree");
  std::string out = "id";
  for (const auto& id : ids) out += "," + id;
  out.push_back('\n');
  for (long r = 0; r < m.rows(); ++r) {
    out += ids[static_cast<size_t>(r)];
    for (long c = 0; c < m.cols(); ++c) out += "," + render_double(m(r, c));
    out.push_back('\n');
  }
  write_file(path, out);
}

std::pair<std::vector<std::string>, Matrix> load_matrix_csv(const std::string& path) {
  std::string text = read_file(path);
  auto lines = split_lines(text);
  std::vector<std::string> rows;
  for (auto& l : lines)
    if (!trim(l).empty()) rows.push_back(l);
  if (rows.size() < 2) throw FormatError("matrix csv too short: " + path);
  auto head = split_csv_row(rows[0]);
  if (head.size() < 2 || head[0] != "id")
    throw FormatError("matrix csv must start with an 'id' header row: " + path);
  std::vector<std::string> ids(head.begin() + 1, head.end());
  long n = static_cast<long>(ids.size());
  if (static_cast<long>(rows.size()) - 1 != n)
    throw FormatError("matrix csv row count does not match header: " + path);
  Matrix m(n, n);
  for (long r = 0; r < n; ++r) {
    auto toks = split_csv_row(rows[static_cast<size_t>(r) + 1]);
    if (static_cast<long>(toks.size()) != n + 1)
      throw FormatError("matrix csv ragged row " + std::to_string(r + 2) + ": " + path);
    if (toks[0] != ids[static_cast<size_t>(r)])
      throw FormatError("matrix csv row id '" + toks[0] + "' does not match header order: " + path);
    for (long c = 0; c < n; ++c) {
      double v;
      if (!parse_double(toks[static_cast<size_t>(c) + 1], v))
        throw FormatError("matrix csv bad number at row " + std::to_string(r + 2) + " col " +
                          std::to_string(c + 2) + ": " + path);
      m(r, c) = v;
    }
  }
  return {ids, m};
}

}  // namespace presto
