#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "qsd/cli/config.hpp"
#include "qsd/cli/csv.hpp"
#include "qsd/cli/experiments.hpp"
#include "qsd/cli/report.hpp"
#include "qsd/errors.hpp"

using namespace qsd;
using namespace qsd::cli;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(QSD_SOURCE_DIR) + "/configs/";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qsd_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

int tool(const std::string& args) {
  const std::string cmd = std::string("\"") + QSD_TOOL + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// Small interval-Brownian config touching every experiment.
Json small_config() {
  return Json::parse(R"({
    "schema": 1,
    "experiment": "validate",
    "model": {"process": {"type": "overdamped"}, "domain": {"box": [[0.0, 3.141592653589793]]}, "grid": {"cells": [80]}},
    "solver": {"tol": 1e-10, "survival_horizon": 8.0, "twist": [{"type": "sine", "amplitude": 0.5}]},
    "simulation": {"dt": 0.01, "T": 1.0, "n_paths": 3000, "x0": [1.5707963267948966], "bins": [10], "records": 5,
                   "potentials": [{"tag": "zero", "terms": []}], "extrapolation_ratio": 4.0,
                   "fv_particles": 200, "fv_burn_in": 0.5},
    "ldp": {"betas": [{"tag": "qed", "kind": "qed"}, {"tag": "mix", "kind": "mixture", "weight": 0.5}],
            "max_iterations": 500, "gateaux_pairs": 2},
    "rng": {"master_seed": 99},
    "checks": [{"name": "lambda", "metric": "spectral.lambda", "kind": "abs", "expected": -0.5, "tolerance": 1e-3}]
  })");
}

}  // namespace

TEST_CASE("config round trip") {
  for (const char* name : {"interval_brownian.json", "reversible_quartic.json"}) {
    const auto c = load_config(kConfigs + name);
    const auto again = parse_config(to_json(c));
    CHECK(again == c);
    CHECK(to_json(again) == to_json(c));
  }
  const auto c = parse_config(small_config());
  CHECK(parse_config(to_json(c)) == c);
  CHECK(c.master_seed == 99);
}

TEST_CASE("config validation") {
  SUBCASE("unknown keys") {
    auto j = small_config();
    j["model"]["grid"]["cellz"] = 3;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = small_config();
    j["extra"] = true;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SUBCASE("stability index outside (0, 2)") {
    CHECK_THROWS_AS(load_config(kConfigs + "invalid_alpha.json"), ConfigError);
    CHECK(tool("spectral --config \"" + kConfigs + "invalid_alpha.json\" --out " + scratch("alpha").string()) == 2);
    CHECK_FALSE(fs::exists(scratch("alpha")));
  }
  SUBCASE("schema and types") {
    auto j = small_config();
    j["schema"] = 2;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = small_config();
    j["model"]["grid"]["cells"] = "80";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
    j = small_config();
    j["experiment"] = "plot";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SUBCASE("overrides are validated") {
    const auto c = parse_config(small_config());
    Overrides o;
    o.threads = 0;
    CHECK_THROWS_AS(apply_overrides(c, o), ConfigError);
    o.threads = 4;
    o.seed = 7;
    const auto d = apply_overrides(c, o);
    CHECK(d.threads == 4);
    CHECK(d.master_seed == 7);
    CHECK(inputs_hash(d) != inputs_hash(c));
    o.seed.reset();
    CHECK(inputs_hash(apply_overrides(c, o)) == inputs_hash(c));
  }
}

TEST_CASE("CSV quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");

  const auto rows = parse_csv("x,\"a,b\",\"q\"\"t\"\r\n1,\"l1\r\nl2\",\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"x", "a,b", "q\"t"});
  CHECK(rows[1] == std::vector<std::string>{"1", "l1\r\nl2", ""});

  const auto path = scratch("csv.csv");
  {
    CsvWriter w(path.string(), {"name", "value"});
    w << "odd, \"name\"" << 0.1;
    w.end_row();
  }
  const auto back = parse_csv(slurp(path));
  REQUIRE(back.size() == 2);
  CHECK(back[1][0] == "odd, \"name\"");
  CHECK(std::stod(back[1][1]) == 0.1);
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("check evaluation") {
  MetricMap m{{"a", {1.0, 0.1}}, {"b", {1.15, 0.1}}};
  auto check = [&](const std::string& kind, double expected, double tol, const std::string& ref = "") {
    CheckConfig c;
    c.name = kind;
    c.metric = "a";
    c.kind = kind;
    c.expected = expected;
    c.tolerance = tol;
    c.reference = ref;
    return evaluate_checks({c}, m)[0];
  };
  CHECK(check("abs", 1.05, 0.1).pass);
  CHECK_FALSE(check("abs", 1.2, 0.1).pass);
  CHECK(check("rel", 2.0, 0.5).pass);
  CHECK(check("max", 0.95, 0.05).pass);
  CHECK_FALSE(check("max", 0.9, 0.05).pass);
  CHECK(check("min", 1.0, 0.0).pass);
  CHECK(check("within_ci", 0.0, 0.0, "b").pass);
  CHECK_FALSE(check("within_ci", 0.0, 0.0, "b").note.size());
  CheckConfig missing;
  missing.metric = "nope";
  const auto r = evaluate_checks({missing}, m)[0];
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("compare") {
  ExperimentReport a;
  a.experiment = "spectral";
  a.metrics = {{"x", {1.0, 0.1}}, {"y", {2.0, 0.0}}};
  CHECK(compare(a, a).empty());

  auto b = a;
  b.metrics["x"] = {1.05, 0.1};
  b.metrics["y"] = {2.5, 0.0};
  b.metrics["z"] = {0.0, 0.0};
  const auto rows = compare(a, b);
  REQUIRE(rows.size() == 3);
  CHECK_FALSE(rows[0].flagged);
  CHECK(rows[0].delta == doctest::Approx(0.05));
  CHECK(rows[1].flagged);
  CHECK(rows[2].flagged);

  b.experiment = "simulate";
  CHECK_THROWS_AS(compare(a, b), MismatchedExperiments);

  // Survives the summary.json round trip.
  a.inputs_hash = "0123456789abcdef";
  a.seed = 5;
  const auto back = parse_summary(summary_json(a));
  CHECK(back.metrics == a.metrics);
  CHECK(back.seed == 5);
  CHECK(compare(a, back).empty());
}

TEST_CASE("refinement deltas follow second order") {
  auto j = small_config();
  j["experiment"] = "spectral";
  j["solver"]["survival_horizon"] = 0.0;
  j["checks"] = Json::array();
  std::vector<ExperimentReport> reports;
  for (int cells : {50, 100, 200}) {
    j["model"]["grid"]["cells"] = {cells};
    j["output_dir"] = scratch("refine" + std::to_string(cells)).string();
    reports.push_back(run(parse_config(j)));
  }
  auto delta = [](const ExperimentReport& a, const ExperimentReport& b, const std::string& key) {
    for (const auto& r : compare(a, b)) {
      if (r.metric == key) return r.delta;
    }
    return 0.0;
  };
  for (const char* key : {"spectral.lambda", "spectral.lambda.twist"}) {
    const double d1 = delta(reports[0], reports[1], key);
    const double d2 = delta(reports[1], reports[2], key);
    REQUIRE(d2 != 0.0);
    const double order = std::log2(d1 / d2);
    MESSAGE(std::string(key) << " observed order " << order);
    CHECK(order == doctest::Approx(2.0).epsilon(0.2));
  }
}

TEST_CASE("artifacts are byte-identical across runs and thread counts") {
  auto c = parse_config(small_config());
  const auto dir1 = scratch("det1");
  const auto dir3 = scratch("det3");
  c.output_dir = dir1.string();
  c.threads = 1;
  const auto r1 = run(c);
  c.output_dir = dir3.string();
  c.threads = 3;
  const auto r3 = run(c);
  CHECK(r1.pass);
  CHECK(r3.threads == 3);

  int files = 0;
  for (const auto& e : fs::directory_iterator(dir1)) {
    const auto name = e.path().filename();
    if (name == "timing.txt") continue;
    ++files;
    INFO(name.string());
    REQUIRE(fs::exists(dir3 / name));
    CHECK(slurp(e.path()) == slurp(dir3 / name));
  }
  for (const char* f : {"summary.json", "eigentriple.csv", "ensemble.csv", "survival.csv", "fk.csv", "fv.csv",
                        "qed.csv", "rate.csv"}) {
    CHECK_MESSAGE(fs::exists(dir1 / f), f);
  }
  CHECK(files >= 8);

  // Every emitted metric has a finite tolerance.
  for (const auto& [name, m] : r1.metrics) {
    INFO(name);
    CHECK(std::isfinite(m.tolerance));
    CHECK(m.tolerance >= 0.0);
  }
}

TEST_CASE("exit status reflects the checks") {
  auto j = small_config();
  j["experiment"] = "spectral";
  j["simulation"]["n_paths"] = 0;
  const auto dir = scratch("exit");
  fs::create_directories(dir);
  const auto pass_cfg = dir / "pass.json";
  std::ofstream(pass_cfg) << j.dump(2);
  j["checks"][0]["expected"] = -0.6;
  const auto fail_cfg = dir / "fail.json";
  std::ofstream(fail_cfg) << j.dump(2);

  CHECK(tool("spectral --config " + pass_cfg.string() + " --out " + (dir / "a").string()) == 0);
  CHECK(tool("spectral --config " + fail_cfg.string() + " --out " + (dir / "b").string()) == 1);
  CHECK(tool("spectral --config " + pass_cfg.string() + " --out " + (dir / "c").string() + " --threads 2") == 0);
  CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "c" / "summary.json"));

  const std::string a = (dir / "a" / "summary.json").string();
  const std::string b = (dir / "b" / "summary.json").string();
  CHECK(tool("compare " + a + " " + a) == 0);
  CHECK(tool("compare " + a + " " + b) == 0);  // same model, only the check differs
  CHECK(tool("no-such-subcommand") != 0);
}
