#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/landscape.hpp"
#include "doctest.h"

using namespace presto;
namespace fs = std::filesystem;

namespace {

fs::path tmpdir() {
  static fs::path p = [] {
    fs::path d = fs::temp_directory_path() / "presto_test_io";
    fs::create_directories(d);
    return d;
  }();
  return p;
}

std::string write_tmp(const std::string& name, const std::string& content) {
  fs::path p = tmpdir() / name;
  std::ofstream f(p, std::ios::binary);
  f << content;
  return p.string();
}

// minimal NPY v1.0 writer used as an independent fixture generator
std::string write_npy(const std::string& name, const std::string& descr, long rows, long cols,
                      const void* data, size_t bytes) {
  std::string header = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': (" +
                       std::to_string(rows) + ", " + std::to_string(cols) + "), }";
  size_t unpadded = 10 + header.size() + 1;
  size_t pad = (64 - unpadded % 64) % 64;
  header += std::string(pad, ' ');
  header += '\n';
  std::string buf = "\x93NUMPY";
  buf += '\x01';
  buf += '\x00';
  uint16_t hlen = static_cast<uint16_t>(header.size());
  buf += static_cast<char>(hlen & 0xff);
  buf += static_cast<char>(hlen >> 8);
  buf += header;
  buf.append(static_cast<const char*>(data), bytes);
  return write_tmp(name, buf);
}

}  // namespace

TEST_CASE("csv literal parse") {
  auto p = write_tmp("lit.csv", "0,0\n1,0\n0,1\n1,1\n");
  Embedding e = load_embedding(p);
  CHECK(e.n() == 4);
  CHECK(e.d() == 2);
  CHECK(e.points(1, 0) == 1.0);
  CHECK(e.points(3, 1) == 1.0);
  CHECK_FALSE(e.normalized);
}

TEST_CASE("csv header skipped") {
  auto p = write_tmp("hdr.csv", "a,b\n1,2\n");
  Embedding e = load_embedding(p);
  CHECK(e.n() == 1);
  CHECK(e.d() == 2);
  CHECK(e.points(0, 0) == 1.0);
  CHECK(e.points(0, 1) == 2.0);
}

TEST_CASE("csv without trailing newline and with CRLF") {
  auto p = write_tmp("crlf.csv", "1,2\r\n3,4");
  Embedding e = load_embedding(p);
  CHECK(e.n() == 2);
  CHECK(e.points(1, 1) == 4.0);
}

TEST_CASE("csv ragged rows rejected") {
  auto p = write_tmp("ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(load_embedding(p), FormatError);
}

TEST_CASE("csv nan entry names row and col") {
  auto p = write_tmp("nan.csv", "1,2\n3,nan\n");
  try {
    load_embedding(p);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    std::string m = e.what();
    CHECK(m.find("row 2") != std::string::npos);
    CHECK(m.find("col 2") != std::string::npos);
  }
}

TEST_CASE("missing file is an io error") {
  CHECK_THROWS_AS(load_embedding((tmpdir() / "nope.csv").string()), IoError);
}

TEST_CASE("npy float64 parse") {
  double data[6] = {0, 0, 3, 4, 6, 8};
  auto p = write_npy("f64.npy", "<f8", 3, 2, data, sizeof(data));
  Embedding e = load_embedding(p);
  CHECK(e.n() == 3);
  CHECK(e.d() == 2);
  CHECK(e.points(1, 0) == 3.0);
  CHECK(e.points(2, 1) == 8.0);
}

TEST_CASE("npy float32 widens") {
  float data[4] = {1.5f, 2.5f, 3.5f, 4.5f};
  auto p = write_npy("f32.npy", "<f4", 2, 2, data, sizeof(data));
  Embedding e = load_embedding(p);
  CHECK(e.points(0, 0) == doctest::Approx(1.5));
  CHECK(e.points(1, 1) == doctest::Approx(4.5));
}

TEST_CASE("npy unsupported dtype rejected") {
  int64_t data[2] = {1, 2};
  auto p = write_npy("i8.npy", "<i8", 1, 2, data, sizeof(data));
  CHECK_THROWS_AS(load_embedding(p), FormatError);
}

TEST_CASE("npy fortran order rejected") {
  double data[4] = {1, 2, 3, 4};
  std::string header = "{'descr': '<f8', 'fortran_order': True, 'shape': (2, 2), }";
  size_t pad = (64 - (10 + header.size() + 1) % 64) % 64;
  header += std::string(pad, ' ') + "\n";
  std::string buf = "\x93NUMPY";
  buf += '\x01';
  buf += '\x00';
  uint16_t hlen = static_cast<uint16_t>(header.size());
  buf += static_cast<char>(hlen & 0xff);
  buf += static_cast<char>(hlen >> 8);
  buf += header;
  buf.append(reinterpret_cast<const char*>(data), sizeof(data));
  auto p = write_tmp("fortran.npy", buf);
  CHECK_THROWS_AS(load_embedding(p), FormatError);
}

TEST_CASE("format auto-detect by extension and magic") {
  double data[2] = {7, 9};
  auto pn = write_npy("auto.npy", "<f8", 1, 2, data, sizeof(data));
  CHECK(load_embedding(pn).points(0, 1) == 9.0);
  auto pc = write_tmp("auto.csv", "7,9\n");
  CHECK(load_embedding(pc).points(0, 1) == 9.0);
}

TEST_CASE("embedding csv round trip is exact") {
  Embedding e;
  e.points = Matrix(2, 3);
  e.points << 0.1, -1.0 / 3.0, 1e-17, 12345.6789, 2.0 / 7.0, -0.0;
  auto p = (tmpdir() / "rt.csv").string();
  save_embedding_csv(e, p);
  Embedding back = load_embedding(p);
  REQUIRE(back.n() == 2);
  REQUIRE(back.d() == 3);
  for (long i = 0; i < 2; ++i)
    for (long j = 0; j < 3; ++j) CHECK(back.points(i, j) == e.points(i, j));
}

TEST_CASE("render_double shortest round trip") {
  std::vector<double> vals = {0.0, 1.0, 0.1, -0.1, 1e300, 1e-300, 2.0 / 3.0, 3.141592653589793};
  for (double v : vals) {
    CHECK(std::stod(render_double(v)) == v);
  }
  CHECK(render_double(0.5) == "0.5");
  CHECK(render_double(2) == "2");
}

TEST_CASE("matrix csv round trip with ids") {
  std::vector<std::string> ids = {"u1", "u2"};
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  auto p = (tmpdir() / "mat.csv").string();
  save_matrix_csv(ids, m, p);
  std::string text = read_file(p);
  CHECK(text.find("u1") != std::string::npos);
  CHECK(text.find("u2") != std::string::npos);
  auto [rids, rm] = load_matrix_csv(p);
  CHECK(rids == ids);
  CHECK(rm(0, 1) == 1.0);
  CHECK(rm(1, 0) == 1.0);
  CHECK(rm(0, 0) == 0.0);
}

TEST_CASE("manifest literal parse") {
  std::string mj = R"({"universes": [
    {"id": "a", "params": {"beta": 1}, "embedding": "a.csv"},
    {"id": "b", "params": {"beta": 4}, "embedding": "b.csv"}
  ]})";
  write_tmp("a.csv", "0,0\n1,1\n");
  write_tmp("b.csv", "0,0\n2,2\n");
  auto p = write_tmp("man.json", mj);
  Manifest m = load_manifest(p);
  REQUIRE(m.universes.size() == 2);
  CHECK(m.param_names == std::vector<std::string>{"beta"});
  CHECK(m.universes[0].id == "a");
  CHECK(m.universes[1].params[0].second == nlohmann::json(4));
  // embedding paths resolve relative to the manifest file
  Embedding e = load_universe_embedding(m.universes[1]);
  CHECK(e.points(1, 0) == 2.0);
  CHECK(e.source_id == "b");
}

TEST_CASE("manifest heterogeneous params rejected") {
  std::string mj = R"({"universes": [
    {"id": "a", "params": {"beta": 1}, "embedding": "a.csv"},
    {"id": "b", "params": {"gamma": 1}, "embedding": "b.csv"}
  ]})";
  auto p = write_tmp("het.json", mj);
  try {
    load_manifest(p);
    FAIL("expected ManifestError");
  } catch (const ManifestError& e) {
    CHECK(std::string(e.what()).find("b") != std::string::npos);
  }
}

TEST_CASE("manifest duplicate id rejected") {
  std::string mj = R"({"universes": [
    {"id": "a", "params": {"beta": 1}, "embedding": "a.csv"},
    {"id": "a", "params": {"beta": 2}, "embedding": "b.csv"}
  ]})";
  CHECK_THROWS_AS(load_manifest(write_tmp("dup.json", mj)), ManifestError);
}

TEST_CASE("manifest empty universe list rejected") {
  CHECK_THROWS_AS(load_manifest(write_tmp("empty.json", R"({"universes": []})")), ManifestError);
}

TEST_CASE("manifest inline data") {
  std::string mj = R"({"universes": [
    {"id": "a", "params": {"beta": 1}, "data": [[0,0],[1,0],[0,1]]}
  ]})";
  Manifest m = load_manifest(write_tmp("inline.json", mj));
  REQUIRE(m.universes[0].inline_data.has_value());
  Embedding e = load_universe_embedding(m.universes[0]);
  CHECK(e.n() == 3);
  CHECK(e.points(1, 0) == 1.0);
}

TEST_CASE("diagram json round trip") {
  PersistenceDiagram d;
  d.max_h = 1;
  d.intervals = {{{0.0, 0.25}, {0.0, 0.25}}, {{0.25, 0.5}}};
  d.essential_births = {{0.0}, {}};
  auto j = diagram_to_json(d);
  CHECK(j["h1"][0][0] == 0.25);
  CHECK(j["essential"]["0"] == 1);
  PersistenceDiagram back = diagram_from_json(j);
  CHECK(back.max_h == 1);
  CHECK(back.intervals == d.intervals);
  CHECK(back.essential_count(0) == 1);
}

TEST_CASE("fnv1a64 reference values") {
  // reference digests of the 64-bit FNV-1a specification
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}
