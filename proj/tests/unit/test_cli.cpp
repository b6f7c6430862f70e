#include "cli.hpp"
#include "doctest.h"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = rmt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("rmt_cli_test_" + std::to_string(::getpid()));
  Scratch() {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
  std::string config(const json& overrides) const {
    json j = {{"schema", "rmt-experiment/1"},
              {"ensemble", {{"kind", "gue"}}},
              {"N_grid", {8}},
              {"samples_per_N", 2},
              {"seed", 1},
              {"outputs", (dir / "out").string()}};
    j.merge_patch(overrides);
    return write("config.json", j.dump());
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("sample writes one row per eigenvalue") {
  Scratch s;
  const auto r = run({"sample", "--config", s.config(json::object())});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(s.dir / "out" / "spectra_N8.csv");
  CHECK(csv.rfind("N,sample,index,eigenvalue\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 16);
  CHECK(fs::exists(s.dir / "out" / "metadata.json"));
  CHECK_FALSE(fs::exists(s.dir / "out" / ".rmt.lock"));
  const json meta = json::parse(slurp(s.dir / "out" / "metadata.json"));
  CHECK(meta.at("seed") == 1);
  CHECK(meta.at("spec_hash").get<std::string>().size() == 16);

  // Rerun: identical bytes.
  REQUIRE(run({"sample", "--config", s.config(json::object())}).code == 0);
  CHECK(slurp(s.dir / "out" / "spectra_N8.csv") == csv);
  // A different seed changes the spectra.
  REQUIRE(run({"sample", "--config", s.config(json::object()), "--seed", "2"}).code == 0);
  CHECK(slurp(s.dir / "out" / "spectra_N8.csv") != csv);
}

TEST_CASE("validation errors exit 2 and name the field") {
  Scratch s;
  auto r = run({"sample", "--config", s.config({{"ensemble", {{"kind", "goe"}}}})});
  CHECK(r.code == 2);
  CHECK(r.err.find("ensemble.kind") != std::string::npos);

  r = run({"moments", "--config", s.config({{"N_grid", json::array()}})});
  CHECK(r.code == 2);
  CHECK(r.err.find("N_grid") != std::string::npos);

  r = run({"sample", "--config", s.write("bad.json", "{\n  \"schema\": \n")});
  CHECK(r.code == 2);
  CHECK(r.err.find("line") != std::string::npos);

  CHECK(run({"sample", "--config", (s.dir / "missing.json").string()}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("moments rows") {
  Scratch s;
  const auto r = run({"moments", "--config", s.config({{"moment_orders", {1, 2, 3}}})});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(s.dir / "out" / "moments.csv");
  CHECK(csv.rfind("N,k,mean,stderr,gap\n", 0) == 0);
  CHECK(count_lines(csv) == 4);
}

TEST_CASE("rg-flow prints exact resolvent coefficients") {
  Scratch s;
  const std::string out = (s.dir / "flow").string();
  auto r = run({"rg-flow", "--order", "7", "--sigma", "1", "--out", out});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("1, 0, 1, 0, 2, 0, 5\n", 0) == 0);
  r = run({"rg-flow", "--order", "5", "--sigma", "1/2", "--out", out});
  CHECK(r.out.rfind("1, 0, 1/4, 0, 1/8\n", 0) == 0);
  r = run({"rg-flow", "--order", "3", "--out", out});
  CHECK(r.out.rfind("1, 0, 1\n", 0) == 0);
  CHECK(run({"rg-flow", "--order", "20", "--out", out}).code == 3);
  CHECK(run({"rg-flow", "--order", "0", "--out", out}).code == 2);
  CHECK(run({"rg-flow", "--sigma", "x", "--out", out}).code == 2);
  const json flow = json::parse(slurp(fs::path(out) / "flow.json"));
  CHECK(flow.at("schema") == "rmt-flow/1");
}

TEST_CASE("rg-flow with perturbations and a bound violation") {
  Scratch s;
  const std::string out = (s.dir / "flow").string();
  const std::string good = s.write("good.json", R"([{"graph": "v=2;e=0->1,0->1", "value": "1/10"}])");
  auto r = run({"rg-flow", "--order", "5", "--perturbations", good, "--out", out});
  CHECK(r.code == 0);
  // Common-factor cumulant on two disjoint 2-cycles: Eulerian with exponent 0,
  // so an O(1) value breaks the vanishing requirement.
  const std::string bad = s.write("bad.json", R"([{"graph": "v=4;e=0->1,1->0,2->3,3->2", "value": "1/4"}])");
  r = run({"rg-flow", "--order", "5", "--max-edges", "8", "--perturbations", bad, "--out", out});
  CHECK(r.code == 4);
}

TEST_CASE("cumulant-scan csv") {
  Scratch s;
  const auto r = run({"cumulant-scan", "--config",
                      s.config({{"N_grid", {4, 8, 12}},
                                {"samples_per_N", 20},
                                {"graphs_to_scan", {"v=2;e=0->1,1->0"}}})});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(s.dir / "out" / "cumulant_scan.csv");
  CHECK(csv.rfind("N,graph,scaled_estimate,stderr,verdict\n", 0) == 0);
  CHECK(count_lines(csv) == 4);
  CHECK(csv.find("\"v=2;e=0->1,1->0\"") != std::string::npos);
  CHECK(run({"cumulant-scan", "--config", s.config({{"graphs_to_scan", {"v=2;e=0-1"}}})}).code == 2);
}

TEST_CASE("plot") {
  Scratch s;
  const std::string cfg = s.config({{"N_grid", {16}}});
  REQUIRE(run({"sample", "--config", cfg}).code == 0);
  REQUIRE(run({"plot", "--config", cfg}).code == 0);
  const std::string svg = slurp(s.dir / "out" / "spectrum_N16.svg");
  CHECK(svg.find("<svg") == 0);
  REQUIRE(run({"plot", "--config", cfg}).code == 0);
  CHECK(slurp(s.dir / "out" / "spectrum_N16.svg") == svg);

  const std::string empty = s.write("empty.csv", "N,sample,index,eigenvalue\n");
  CHECK(run({"plot", "--input", empty, "--out", (s.dir / "p").string()}).code == 2);
  CHECK(run({"plot", "--input", (s.dir / "none.csv").string(), "--out", (s.dir / "p").string()}).code == 2);
}

TEST_CASE("locked output directory") {
  Scratch s;
  fs::create_directories(s.dir / "out");
  std::ofstream(s.dir / "out" / ".rmt.lock") << "";
  const auto r = run({"sample", "--config", s.config(json::object())});
  CHECK(r.code == 2);
  CHECK(r.err.find("locked") != std::string::npos);
}

TEST_CASE("verify") {
  Scratch s;
  CHECK(run({"verify", "--config", s.config(json::object())}).code == 0);
  const auto r = run({"verify", "--suite", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("criterion 7: PASS") == 0);
  CHECK(run({"verify", "--suite", "nope"}).code == 2);
}
