#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// Golden-run tests of the systole-lab binary: exit codes, schema round-trips,
// verdict semantics, determinism.  Paths come from the environment (set by
// CTest): SYSTOLE_LAB_BIN, SYSTOLE_LAB_SCENES, SYSTOLE_LAB_SCRATCH.

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string env_or_fail(const char* name) {
  const char* v = std::getenv(name);
  REQUIRE_MESSAGE(v != nullptr, name);
  return v;
}

const std::string& bin() {
  static std::string b = env_or_fail("SYSTOLE_LAB_BIN");
  return b;
}
const std::string& scenes() {
  static std::string s = env_or_fail("SYSTOLE_LAB_SCENES");
  return s;
}
std::string scratch(const std::string& sub) {
  static std::string s = env_or_fail("SYSTOLE_LAB_SCRATCH");
  fs::create_directories(s + "/" + sub);
  return s + "/" + sub;
}

int run(const std::string& args) {
  const int status = std::system((bin() + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), path);
  json j;
  in >> j;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

} // namespace

TEST_CASE("spectrum: refinement table, extrapolation, OFF export") {
  const std::string out = scratch("spectrum");
  CHECK(run("spectrum --scene " + scenes() + "/disc_unit.json --refinements 3 --out " + out +
            " --export-off " + out + "/disc.off") == 0);
  const json j = read_json(out + "/spectrum.json");
  CHECK(j["schema"] == 1);
  CHECK(j["rows"].size() == 3);
  const double extra = j["extrapolated"]["value"].get<double>();
  CHECK(extra == doctest::Approx(5.78319).epsilon(0.01));
  // Raw values decrease toward the limit (conforming elements from above).
  double prev = 1e300;
  for (const auto& r : j["rows"]) {
    CHECK(r["lambda0"].get<double>() < prev);
    prev = r["lambda0"].get<double>();
  }
  // CSV written with one row per refinement plus the extrapolation row.
  std::istringstream csv(slurp(out + "/spectrum.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 5);
  // OFF export with the edge-length table.
  CHECK(slurp(out + "/disc.off").substr(0, 3) == "OFF");
  CHECK(!slurp(out + "/disc.off.lengths").empty());
}

TEST_CASE("spectrum: closed scenes report lambda0 = 0") {
  const std::string out = scratch("spectrum_closed");
  CHECK(run("spectrum --scene " + scenes() + "/torus_unit.json --refinements 1 --out " + out) == 0);
  const json j = read_json(out + "/spectrum.json");
  CHECK(j["rows"][0]["lambda0"].get<double>() == 0.0);
}

TEST_CASE("spectrum modes on a closed torus match the dual lattice") {
  const std::string out = scratch("modes");
  CHECK(run("spectrum --scene " + scenes() + "/torus_unit.json --refinements 1 --modes 4 --out " +
            out) == 0);
  const json j = read_json(out + "/spectrum.json");
  REQUIRE(j["modes"].size() == 5);
  CHECK(std::abs(j["modes"][0].get<double>()) < 1e-6);
  const double l1 = 4 * 3.14159265358979 * 3.14159265358979;
  for (int i = 1; i <= 4; ++i)
    CHECK(j["modes"][i].get<double>() == doctest::Approx(l1).epsilon(0.015));
}

TEST_CASE("cusp warp scenes build and solve") {
  const std::string out = scratch("cusp");
  write(out + "/cusp.json", R"({"schema":1, "model":"warped_cylinder",
    "warp":{"kind":"funnel_ode","mode":"cusp","kappa_infinity":-1.0},
    "x_range":[0.0,6.0], "circumference":1.0, "resolution":12})");
  CHECK(run("spectrum --scene " + out + "/cusp.json --refinements 1 --out " + out) == 0);
  const json j = read_json(out + "/spectrum.json");
  // Dirichlet value of a finite cusp piece sits above the 1/4 comparison bound.
  CHECK(j["rows"][0]["lambda0"].get<double>() > 0.25);
}

TEST_CASE("missing and corrupted inputs exit 2") {
  const std::string out = scratch("errors");
  CHECK(run("spectrum --scene " + scenes() + "/does_not_exist.json --out " + out) == 2);
  write(out + "/bad.json", "{ this is not json");
  CHECK(run("spectrum --scene " + out + "/bad.json --out " + out) == 2);
  write(out + "/bad_model.json", "{\"schema\":1,\"model\":\"nonsense\",\"resolution\":8}");
  CHECK(run("spectrum --scene " + out + "/bad_model.json --out " + out) == 2);
  write(out + "/bad_schema.json", "{\"schema\":2,\"model\":\"flat_torus\",\"resolution\":8}");
  CHECK(run("systole --scene " + out + "/bad_schema.json --out " + out) == 2);
  CHECK(run("verify --manifest " + out + "/nothing.json --out " + out) == 2);
  CHECK(run("plot --results " + out + "/nothing.json --out " + out) == 2);
}

TEST_CASE("systole report carries the certificate and oracle gap") {
  const std::string out = scratch("systole");
  CHECK(run("systole --scene " + scenes() + "/torus_slanted.json --out " + out) == 0);
  const json j = read_json(out + "/systole.json");
  CHECK(j["length"].get<double>() == doctest::Approx(1.0).epsilon(0.03));
  CHECK(j["certificate"] == "HomologyNontrivial");
  CHECK(j["oracle_systole"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(j["relative_gap"].get<double>()) <= 0.03);
  int ones = 0;
  for (const auto& bit : j["h1_class"]) ones += bit.get<int>();
  CHECK(ones > 0);
}

TEST_CASE("lambda bundles candidates with the lower bound") {
  const std::string out = scratch("lambda");
  CHECK(run("lambda --scene " + scenes() + "/torus_unit.json --out " + out) == 0);
  const json j = read_json(out + "/lambda.json");
  CHECK(j["lambda_upper"].get<double>() >= j["lower_bound"].get<double>());
  CHECK(j["systole_certified"].get<bool>());
  CHECK(j["candidates"].size() > 5);
  for (const auto& c : j["candidates"]) {
    const std::string cls = c["class"];
    CHECK((cls == "Disc" || cls == "Annulus" || cls == "CrossCap"));
  }
}

TEST_CASE("verify: tolerance zero with an error bar yields inconclusive, exit 0") {
  const std::string out = scratch("tolzero");
  write(out + "/m.json", R"({"schema":1, "seed":3,
    "scenes": {"torus": {"schema":1, "model":"flat_torus",
                          "basis_a":[1.0,0.0], "basis_b":[0.0,1.0], "resolution":32}},
    "experiments": [{"op":"cover", "scene":"torus", "ks":[2,4],
                     "tolerance":0.0, "error_bar":1e-3}]})");
  CHECK(run("verify --manifest " + out + "/m.json --out " + out) == 0);
  const json j = read_json(out + "/report.json");
  CHECK(j["summary"]["violated"].get<int>() == 0);
  CHECK(j["summary"]["inconclusive"].get<int>() >= 4); // the per-k equality pairs
}

TEST_CASE("verify: a genuinely false assertion exits 4") {
  const std::string out = scratch("violated");
  write(out + "/m.json", R"({"schema":1, "seed":3,
    "scenes": {"funnel": {"schema":1, "model":"warped_cylinder", "warp":{"kind":"cosh"},
                           "x_range":[0.0,14.0], "circumference":1.0, "resolution":10}},
    "experiments": [{"op":"ess_spectrum", "scene":"funnel",
                     "radii":[1.0,2.0,3.0,4.0], "expect": 0.9, "tolerance": 0.05}]})");
  CHECK(run("verify --manifest " + out + "/m.json --out " + out) == 4);
}

TEST_CASE("report bundle re-parses and is deterministic") {
  const std::string out1 = scratch("det_a"), out2 = scratch("det_b");
  CHECK(run("verify --manifest " + scenes() + "/determinism.json --out " + out1) == 0);
  CHECK(run("verify --manifest " + scenes() + "/determinism.json --out " + out2) == 0);
  const json j = read_json(out1 + "/report.json");
  CHECK(j["schema"] == 1);
  for (const auto& r : j["reports"]) {
    CHECK(r.contains("name"));
    CHECK(r.contains("lhs"));
    CHECK(r.contains("rhs"));
    CHECK(r.contains("verdict"));
  }
  CHECK(slurp(out1 + "/report.json") == slurp(out2 + "/report.json"));
  CHECK(slurp(out1 + "/report.csv") == slurp(out2 + "/report.csv"));
  // CSV has a header plus one row per report.
  std::istringstream csv(slurp(out1 + "/report.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++lines;
  CHECK(lines == static_cast<int>(j["reports"].size()) + 1);
}

TEST_CASE("plot renders svg from bundles and standalone results") {
  const std::string out = scratch("plots");
  CHECK(run("verify --manifest " + scenes() + "/determinism.json --out " + out) == 0);
  CHECK(run("plot --results " + out + "/report.json --out " + out + "/svg") == 0);
  const std::string sandwich = slurp(out + "/svg/sandwich.svg");
  CHECK(sandwich.find("<svg") == 0);
  CHECK(sandwich.find("lambda_up") != std::string::npos);
  CHECK(!slurp(out + "/svg/cover_torus.svg").empty());
  CHECK(!slurp(out + "/svg/candidates.svg").empty());

  CHECK(run("cover --scene " + scenes() + "/torus_unit.json --ks 2,4 --out " + out) == 0);
  CHECK(run("plot --results " + out + "/cover.json --out " + out + "/svg2") == 0);
  CHECK(!slurp(out + "/svg2/cover.svg").empty());

  write(out + "/empty.json", "{}");
  CHECK(run("plot --results " + out + "/empty.json --out " + out + "/svg3") == 2);
}

TEST_CASE("jobs env var overrides the flag without changing results") {
  const std::string out1 = scratch("jobs1"), out2 = scratch("jobs2");
  CHECK(run("lambda --scene " + scenes() + "/torus_unit.json --jobs 1 --out " + out1) == 0);
  const int status = std::system(("SYSTOLE_LAB_JOBS=4 " + bin() + " lambda --scene " + scenes() +
                                  "/torus_unit.json --jobs 1 --out " + out2 + " >/dev/null 2>&1")
                                     .c_str());
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(slurp(out1 + "/lambda.json") == slurp(out2 + "/lambda.json"));
}
