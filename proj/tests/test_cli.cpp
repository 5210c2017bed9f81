#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace {

std::string g_cli;
std::filesystem::path g_dir;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream f(p);
  f << body;
}

RunResult run(const std::string& args) {
  auto out_p = g_dir / "stdout.txt";
  auto err_p = g_dir / "stderr.txt";
  std::string cmd = g_cli + " " + args + " >" + out_p.string() + " 2>" + err_p.string();
  int st = std::system(cmd.c_str());
  RunResult r;
  r.code = (st >= 0 && WIFEXITED(st)) ? WEXITSTATUS(st) : -1;
  r.out = slurp(out_p);
  r.err = slurp(err_p);
  return r;
}

nlohmann::json load_json(const std::filesystem::path& p) {
  return nlohmann::json::parse(slurp(p));
}

std::string path(const char* name) { return (g_dir / name).string(); }

// artifacts minus the wall-clock part of their run provenance
std::string stable_dump(const std::filesystem::path& p) {
  auto j = load_json(p);
  if (j.contains("run_provenance")) j["run_provenance"].erase("timings_ms");
  return j.dump();
}

void write_fixtures() {
  write_text(g_dir / "sq.csv", "0,0\n1,0\n0,1\n1,1\n");
  write_text(g_dir / "sq2.csv", "0,0\n2,0\n0,2\n2,2\n");
  std::ostringstream wide;
  for (int i = 0; i < 8; ++i) {
    for (int c = 0; c < 5; ++c) wide << (c ? "," : "") << 0.1 * (i + 1) * (c + 1) + i * i;
    wide << "\n";
  }
  write_text(g_dir / "wide.csv", wide.str());
  std::ostringstream cloud;
  unsigned state = 12;
  auto next = [&]() {
    state = state * 1103515245u + 12345u;
    return (state >> 8) % 1000 / 1000.0;
  };
  for (int i = 0; i < 14; ++i)
    cloud << next() << "," << next() << "," << next() << "\n";
  write_text(g_dir / "cloud3d.csv", cloud.str());

  nlohmann::json man;
  man["universes"] = {
      {{"id", "u1"}, {"params", {{"lr", 0.1}, {"dim", 2}}}, {"embedding", "sq.csv"}},
      {{"id", "u2"}, {"params", {{"lr", 0.2}, {"dim", 2}}}, {"embedding", "sq.csv"}},
      {{"id", "u3"}, {"params", {{"lr", 0.1}, {"dim", 3}}}, {"embedding", "sq2.csv"}},
      {{"id", "u4"}, {"params", {{"lr", 0.2}, {"dim", 3}}}, {"embedding", "sq2.csv"}},
  };
  write_text(g_dir / "manifest.json", man.dump(2));

  nlohmann::json one = {{"ids", {"x", "y"}}, {"dist", {{0, 1}, {1, 0}}}};
  nlohmann::json three = {{"ids", {"x", "y"}}, {"dist", {{0, 3}, {3, 0}}}};
  write_text(g_dir / "one.json", one.dump());
  write_text(g_dir / "three.json", three.dump());

  double pts[8][2] = {{0.0, 0.1}, {1.0, 0.3}, {0.2, 1.1}, {0.8, 0.9},
                      {1.4, 0.4}, {0.5, 1.9}, {0.7, 0.05}, {1.2, 1.6}};
  nlohmann::json euclid;
  for (int i = 0; i < 8; ++i) euclid["ids"].push_back("m" + std::to_string(i));
  for (int i = 0; i < 8; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 8; ++j) {
      double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1];
      row.push_back(std::sqrt(dx * dx + dy * dy));
    }
    euclid["dist"].push_back(row);
  }
  write_text(g_dir / "euclid.json", euclid.dump());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli [doctest options] <presto_cli binary>\n");
    return 1;
  }
  g_cli = argv[argc - 1];
  g_dir = std::filesystem::temp_directory_path() / "presto_test_cli";
  std::filesystem::remove_all(g_dir);
  std::filesystem::create_directories(g_dir);
  write_fixtures();
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv);
  return ctx.run();
}

TEST_CASE("help exits cleanly, parse errors exit 64") {
  auto help = run("--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("landscape") != std::string::npos);
  CHECK(help.out.find("build-mms") != std::string::npos);
  auto sub_help = run("landscape --help");
  CHECK(sub_help.code == 0);
  CHECK(sub_help.out.find("--projector") != std::string::npos);

  CHECK(run("").code == 64);
  CHECK(run("frobnicate").code == 64);
  CHECK(run("landscape --out x.json").code == 64);
  CHECK(run("landscape --input " + path("sq.csv") + " --out " + path("x.json") + " --h 5")
            .code == 64);
  CHECK(run("distance --a a --b b --p 3").code == 64);
  CHECK(run("cluster --mms m.json --epsilon 1 --quantile 0.5").code == 64);
  CHECK(run("sensitivity --manifest " + path("manifest.json")).code == 64);
  CHECK(run("sensitivity --manifest " + path("manifest.json") +
            " --dimension lr --global").code == 64);
}

TEST_CASE("landscape writes a deterministic artifact") {
  auto r = run("landscape --input " + path("sq.csv") + " --h 1 --out " + path("l1.json"));
  CHECK(r.code == 0);
  CHECK(r.out.find("max_h=1") != std::string::npos);
  CHECK(r.out.find("layers=[3,1]") != std::string::npos);

  auto j = load_json(g_dir / "l1.json");
  CHECK(j.contains("h"));
  CHECK(j.contains("provenance"));
  REQUIRE(j.contains("run_provenance"));
  const auto& prov = j["run_provenance"];
  CHECK(prov["config"]["command"] == "landscape");
  CHECK(prov["config"]["h"] == 1);
  CHECK(prov["config"]["complex"] == "alpha");
  CHECK(prov["inputs"].size() == 1);
  for (const auto& [key, hash] : prov["inputs"].items()) {
    CHECK(key.find("sq.csv") != std::string::npos);
    CHECK(hash.get<std::string>().size() == 16);
  }
  CHECK(prov["timings_ms"]["total_ms"].get<double>() >= 0.0);

  auto again = run("landscape --input " + path("sq.csv") + " --h 1 --out " + path("l1b.json"));
  CHECK(again.code == 0);
  CHECK(stable_dump(g_dir / "l1.json") == stable_dump(g_dir / "l1b.json"));
}

TEST_CASE("high-dimensional input points at the rips fallback") {
  auto r = run("landscape --input " + path("wide.csv") + " --out " + path("w.json"));
  CHECK(r.code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.err.find("--rips") != std::string::npos);

  auto ok = run("landscape --input " + path("wide.csv") + " --rips --h 1 --out " +
                path("w.json"));
  CHECK(ok.code == 0);
  auto j = load_json(g_dir / "w.json");
  CHECK(j["run_provenance"]["config"]["complex"] == "rips");
}

TEST_CASE("distance between identical landscapes is zero") {
  run("landscape --input " + path("sq.csv") + " --h 1 --out " + path("da.json"));
  auto r = run("distance --a " + path("da.json") + " --b " + path("da.json") + " --out " +
               path("d.json"));
  CHECK(r.code == 0);
  CHECK(r.out.find("distance = 0") != std::string::npos);
  auto j = load_json(g_dir / "d.json");
  CHECK(j["value"] == 0.0);
  CHECK(j["run_provenance"]["inputs"].size() == 1);  // both inputs are the same file

  CHECK(run("distance --a " + path("da.json") + " --b " + path("missing.json")).code == 2);

  // different build settings refuse to compare
  run("landscape --input " + path("sq.csv") + " --h 1 --rips --out " + path("dr.json"));
  auto mixed = run("distance --a " + path("da.json") + " --b " + path("dr.json"));
  CHECK(mixed.code == 2);
  CHECK(mixed.err.find("different settings") != std::string::npos);
}

TEST_CASE("seeded gauss projections reproduce bit for bit") {
  std::string base = "landscape --input " + path("cloud3d.csv") +
                     " --projector gauss --k 2 --seed 7 --h 1 --out ";
  CHECK(run(base + path("g1.json")).code == 0);
  CHECK(run(base + path("g2.json")).code == 0);
  CHECK(stable_dump(g_dir / "g1.json") == stable_dump(g_dir / "g2.json"));
  auto j = load_json(g_dir / "g1.json");
  CHECK(j["provenance"]["projector"] == "gauss");
  CHECK(j["provenance"]["seed"] == 7);
}

TEST_CASE("variance and outliers run over a landscape directory") {
  auto dir = g_dir / "land";
  std::filesystem::create_directories(dir);
  std::string flags = " --h 1 --out ";
  CHECK(run("landscape --input " + path("sq.csv") + flags + (dir / "a.json").string()).code ==
        0);
  CHECK(run("landscape --input " + path("sq.csv") + flags + (dir / "b.json").string()).code ==
        0);

  auto v2 = run("variance --landscapes " + dir.string() + " --out " + path("v.json"));
  CHECK(v2.code == 0);
  CHECK(v2.out.find("variance = 0 (n=2)") != std::string::npos);

  CHECK(run("landscape --input " + path("sq2.csv") + flags + (dir / "c.json").string()).code ==
        0);
  auto v3 = run("variance --landscapes " + dir.string() + " --out " + path("v.json"));
  CHECK(v3.code == 0);
  CHECK(load_json(g_dir / "v.json")["value"].get<double>() > 0.0);
  CHECK(load_json(g_dir / "v.json")["n"] == 3);

  auto o = run("outliers --landscapes " + dir.string() + " --out " + path("o.json"));
  CHECK(o.code == 0);
  CHECK(o.out.find("0 flagged of 3") != std::string::npos);
  auto oj = load_json(g_dir / "o.json");
  CHECK(oj["scores"].size() == 3);
  CHECK(oj["scores"].contains("a"));
  CHECK(oj["scores"].contains("c"));

  // the odd one out crosses a z-score of sqrt(2)
  auto tight = run("outliers --landscapes " + dir.string() + " --threshold 1 --out " +
                   path("o.json"));
  CHECK(tight.code == 0);
  CHECK(tight.out.find("1 flagged of 3") != std::string::npos);
  auto flagged = load_json(g_dir / "o.json")["flagged"];
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0] == "c");

  auto empty = g_dir / "empty";
  std::filesystem::create_directories(empty);
  CHECK(run("variance --landscapes " + empty.string()).code == 2);
}

TEST_CASE("build-mms feeds cluster and compress") {
  auto r = run("build-mms --manifest " + path("manifest.json") + " --h 1 --out " +
               path("mms.json") + " --csv " + path("mms.csv"));
  CHECK(r.code == 0);
  CHECK(r.out.find("mms 4x4") != std::string::npos);

  auto j = load_json(g_dir / "mms.json");
  REQUIRE(j["ids"].size() == 4);
  CHECK(j["ids"][0] == "u1");
  CHECK(j.contains("config"));
  double d12 = j["dist"][0][1].get<double>();
  double d13 = j["dist"][0][2].get<double>();
  CHECK(d12 == 0.0);  // identical embeddings
  CHECK(d13 > 0.0);
  CHECK(j["dist"][2][0].get<double>() == d13);

  std::ostringstream half;
  half << (d13 / 2);
  auto cl = run("cluster --mms " + path("mms.json") + " --epsilon " + half.str() +
                " --out " + path("cl.json") + " --csv " + path("cl.csv"));
  CHECK(cl.code == 0);
  CHECK(cl.out.find("clusters: 2") != std::string::npos);
  auto clj = load_json(g_dir / "cl.json");
  CHECK(clj["labels"]["u1"] == 0);
  CHECK(clj["labels"]["u2"] == 0);
  CHECK(clj["labels"]["u3"] == 1);
  CHECK(clj["labels"]["u4"] == 1);
  CHECK(slurp(g_dir / "cl.csv").rfind("id,label\n", 0) == 0);

  auto clq = run("cluster --mms " + path("mms.json") + " --quantile 0.5");
  CHECK(clq.code == 0);
  CHECK(clq.out.find("clusters: 1") != std::string::npos);

  auto cp = run("compress --mms " + path("mms.csv") + " --epsilon " + half.str() +
                " --out " + path("cp.json") + " --csv " + path("cp.csv"));
  CHECK(cp.code == 0);
  CHECK(cp.out.find("representatives: 2 of 4") != std::string::npos);
  auto cpj = load_json(g_dir / "cp.json");
  REQUIRE(cpj["representatives"].size() == 2);
  CHECK(cpj["representatives"][0] == "u1");
  CHECK(cpj["representatives"][1] == "u3");
  CHECK(cpj["assignment"][1] == "u1");
  CHECK(cpj["quantile"].is_null());
  CHECK(slurp(g_dir / "cp.csv").rfind("id,representative\n", 0) == 0);

  auto cpq = run("compress --mms " + path("mms.json") + " --quantile 0.5 --out " +
                 path("cpq.json"));
  CHECK(cpq.code == 0);
  CHECK(load_json(g_dir / "cpq.json")["quantile"] == 0.5);

  auto link = run("compress --mms " + path("mms.json") + " --epsilon " + half.str() +
                  " --method complete_linkage --out " + path("cpl.json"));
  CHECK(link.code == 0);
  auto lj = load_json(g_dir / "cpl.json");
  CHECK(lj["method"] == "complete_linkage");
  REQUIRE(lj["representatives"].size() == 2);
  CHECK(lj["representatives"][0] == "u1");
}

TEST_CASE("mantel correlates a matrix with itself") {
  auto r = run("mantel --a " + path("euclid.json") + " --b " + path("euclid.json") +
               " --permutations 99 --seed 12345 --out " + path("man.json"));
  CHECK(r.code == 0);
  CHECK(r.out.find("mantel r=1") != std::string::npos);
  auto j = load_json(g_dir / "man.json");
  CHECK(j["r"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j["p_value"].get<double>() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(j["permutations"] == 99);
  CHECK(j["corrected_p"].is_null());

  auto c = run("mantel --a " + path("euclid.json") + " --b " + path("euclid.json") +
               " --permutations 99 --seed 12345 --comparisons 5 --out " + path("man.json"));
  CHECK(c.code == 0);
  CHECK(load_json(g_dir / "man.json")["corrected_p"].get<double>() ==
        doctest::Approx(0.05).epsilon(1e-12));

  CHECK(run("mantel --a " + path("euclid.json") + " --b " + path("euclid.json") +
            " --permutations 12").code == 2);
}

TEST_CASE("compare-mms prints the diagram distance") {
  auto r = run("compare-mms --a " + path("one.json") + " --b " + path("three.json") +
               " --out " + path("cm.json"));
  CHECK(r.code == 0);
  CHECK(r.out.find("compare-mms bottleneck = 1.5") != std::string::npos);
  CHECK(load_json(g_dir / "cm.json")["value"].get<double>() ==
        doctest::Approx(1.5).epsilon(1e-12));

  auto w = run("compare-mms --a " + path("one.json") + " --b " + path("three.json") +
               " --metric wasserstein --p 1 --out " + path("cm.json"));
  CHECK(w.code == 0);
  CHECK(load_json(g_dir / "cm.json")["value"].get<double>() ==
        doctest::Approx(2.0).epsilon(1e-12));

  CHECK(run("compare-mms --a " + path("one.json") + " --b " + path("three.json") +
            " --metric hausdorff").code == 64);
}

TEST_CASE("sensitivity reports local and global values") {
  std::string base = "sensitivity --manifest " + path("manifest.json") + " --h 1 ";
  auto r = run(base + "--dimension dim --out " + path("s.json"));
  CHECK(r.code == 0);
  CHECK(r.out.find("sensitivity[dim] = ") != std::string::npos);
  auto j = load_json(g_dir / "s.json");
  CHECK(j["per_dimension"].contains("dim"));
  CHECK(j["per_dimension"].contains("lr"));
  CHECK(j["per_dimension"]["dim"].get<double>() > 0.0);
  CHECK(j["per_dimension"]["lr"].get<double>() ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(j.contains("global"));
  CHECK(j["run_provenance"]["config"]["dimension"] == "dim");

  auto g = run(base + "--global --out " + path("sg.json"));
  CHECK(g.code == 0);
  CHECK(g.out.find("sensitivity[global] = ") != std::string::npos);
  CHECK(load_json(g_dir / "sg.json")["run_provenance"]["config"]["dimension"].is_null());

  CHECK(run(base + "--dimension bogus").code == 2);
}
