#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lplab/cli.hpp"
#include "lplab/models.hpp"

using namespace lplab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir =
      fs::temp_directory_path() / ("lplab_cli_" + tag + "_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json summary_of(const cli::RunResult& r) { return json::parse(slurp(r.json_path)); }

const fs::path kSourceDir = LPLAB_SOURCE_DIR;

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(cli::parse_config(json::parse(R"({"a": 1})")), std::invalid_argument);
  CHECK_THROWS_AS(
      cli::parse_config(json::parse(R"({"command":"estimate","prior":{"kind":"nope"}})")),
      std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config(json::parse(
                      R"({"command":"estimate","y_grid":{"min":0,"max":1,"count":1}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_config(json::parse(
                      R"({"command":"estimate","tolerances":{"residual":-1}})")),
                  std::invalid_argument);
  const auto cfg = cli::parse_config(json::parse(
      R"({"command":"check-median-linearity","prior":{"kind":"matched_gaussian","a":0.5},"a":0.5})"));
  CHECK(cfg.command == "check-median-linearity");
  CHECK(cfg.prior.has_value());
}

TEST_CASE("median linearity command: pass and fail statuses") {
  cli::RunOptions opts;
  opts.out_dir = fresh_dir("median");

  auto cfg = cli::parse_config(json::parse(R"({
    "command": "check-median-linearity",
    "prior": {"kind": "matched_gaussian", "a": 0.5},
    "a": 0.5, "y_grid": {"min": -4, "max": 4, "count": 41}})"));
  const auto r = cli::run_experiment(cfg, opts);
  CHECK(r.status == cli::kStatusOk);
  const json sum = summary_of(r);
  CHECK(sum["ok"] == true);
  CHECK(sum["schema"] == 1);
  CHECK(sum["linear"] == true);

  // CSV: header + one row per node
  const std::string csv = slurp(r.csv_path);
  CHECK(csv.rfind("y,residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 42);

  // a two-point prior is not median-linear: default expectation fails ...
  auto bad = cli::parse_config(json::parse(R"({
    "command": "check-median-linearity", "out": "tp",
    "prior": {"kind": "two_point", "x1": -1, "x2": 1, "weight": 0.5},
    "a": 0.5, "y_grid": {"min": -4, "max": 4, "count": 41}})"));
  const auto rbad = cli::run_experiment(bad, opts);
  CHECK(rbad.status == cli::kStatusFailed);
  const json sbad = summary_of(rbad);
  CHECK(sbad["ok"] == false);
  CHECK(sbad["failed_check"] == "median-linearity-verdict");

  // ... and flipping the expectation makes it pass
  auto flipped = cli::parse_config(json::parse(R"({
    "command": "check-median-linearity", "out": "tp_expected",
    "prior": {"kind": "two_point", "x1": -1, "x2": 1, "weight": 0.5},
    "a": 0.5, "expect_linear": false,
    "y_grid": {"min": -4, "max": 4, "count": 41}})"));
  CHECK(cli::run_experiment(flipped, opts).status == cli::kStatusOk);
}

TEST_CASE("poisson demo reproduces the tabulated medians") {
  cli::RunOptions opts;
  opts.out_dir = fresh_dir("poisson");
  json doc = json::parse(R"({
    "command": "poisson-demo", "alpha": 1, "beta": 1, "y_max": 20,
    "tolerances": {"median": 1e-6}})");
  doc["fixture"] = (kSourceDir / "fixtures" / "fig1_poisson_gamma.json").string();
  const auto r = cli::run_experiment(cli::parse_config(doc), opts);
  CHECK(r.status == cli::kStatusOk);
  const json sum = summary_of(r);
  CHECK(sum["ok"] == true);
  CHECK(sum["max_median_deviation"].get<double>() <= 1e-6);

  const std::string csv = slurp(r.csv_path);
  CHECK(csv.rfind("y,mean,median,difference\n", 0) == 0);
}

TEST_CASE("fp-roots command reports the sqrt(6) root") {
  cli::RunOptions opts;
  opts.out_dir = fresh_dir("fproots");
  const auto cfg = cli::parse_config(json::parse(R"({
    "command": "fp-roots", "p": 4, "w_max": 20,
    "expected_roots": [2.449489742783178]})"));
  const auto r = cli::run_experiment(cfg, opts);
  CHECK(r.status == cli::kStatusOk);
  const json sum = summary_of(r);
  REQUIRE(sum["roots"].size() == 1);
  CHECK(std::abs(sum["roots"][0].get<double>() - 2.449489742783178) <= 1e-8);
}

TEST_CASE("risk scan requires a seed for monte carlo") {
  cli::RunOptions opts;
  opts.out_dir = fresh_dir("riskseed");
  const auto cfg = cli::parse_config(json::parse(R"({
    "command": "risk-scan", "p": 1, "method": "monte-carlo", "samples": 1000,
    "prior": {"kind": "gaussian", "mean": 0, "variance": 1},
    "a_grid": {"min": 0, "max": 1, "count": 3}})"));
  CHECK_THROWS_AS(cli::run_experiment(cfg, opts), std::invalid_argument);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
  const json doc = json::parse(R"({
    "command": "risk-scan", "p": 1, "method": "both", "samples": 40000,
    "seed": 777,
    "prior": {"kind": "gaussian", "mean": 0, "variance": 1},
    "a_grid": {"min": -0.25, "max": 1.25, "count": 7}})");
  cli::RunOptions o1, o2;
  o1.out_dir = fresh_dir("det1");
  o2.out_dir = fresh_dir("det2");
  o2.jobs = 3;  // thread count must not leak into the artifacts
  const auto r1 = cli::run_experiment(cli::parse_config(doc), o1);
  const auto r2 = cli::run_experiment(cli::parse_config(doc), o2);
  CHECK(r1.status == cli::kStatusOk);
  CHECK(slurp(r1.csv_path) == slurp(r2.csv_path));
  CHECK(slurp(r1.json_path) == slurp(r2.json_path));
}

TEST_CASE("density CSV round-trips as a grid prior") {
  cli::RunOptions opts;
  opts.out_dir = fresh_dir("ce");
  json doc = json::parse(R"({"command": "counterexample-density", "nodes": 801})");
  doc["sets"] = json::array(
      {{{"a", 0.5}, {"rho", 1.0}, {"theta", 0.0}, {"omega", 1.7320508075688772}}});
  const auto r = cli::run_experiment(cli::parse_config(doc), opts);
  CHECK(r.status == cli::kStatusOk);

  // re-ingest the emitted table
  std::ifstream in(r.csv_path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "set,x,density");
  std::vector<double> xs, fs;
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    xs.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    fs.push_back(std::stod(line.substr(c2 + 1)));
  }
  const auto reborn = models::make_grid_density(xs, fs);
  const auto original = models::counterexample_prior({0.5, 1.0, 0.0, 1.7320508075688772}, 801);
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < reborn.x.size(); ++i) {
    const double h = reborn.x[i + 1] - reborn.x[i];
    tv += 0.25 * h *
          (std::abs(reborn.pdf[i] - original.pdf[i]) +
           std::abs(reborn.pdf[i + 1] - original.pdf[i + 1]));
  }
  CHECK(tv <= 1e-8);
}

TEST_CASE("symmetry check statuses for gaussian and two-point priors") {
  cli::RunOptions opts;
  opts.out_dir = fresh_dir("symm");
  const auto good = cli::parse_config(json::parse(R"({
    "command": "symmetry-check", "out": "sg",
    "prior": {"kind": "gaussian", "mean": 0, "variance": 1},
    "y_grid": {"min": -3, "max": 3, "count": 13}})"));
  CHECK(cli::run_experiment(good, opts).status == cli::kStatusOk);

  const auto asym = cli::parse_config(json::parse(R"({
    "command": "symmetry-check", "out": "stp", "expect_symmetric": false,
    "prior": {"kind": "two_point", "x1": -1, "x2": 1, "weight": 0.5},
    "y_grid": {"min": -3, "max": 3, "count": 13}})"));
  CHECK(cli::run_experiment(asym, opts).status == cli::kStatusOk);
}

TEST_CASE("environment variable supplies the output directory") {
  const fs::path dir = fresh_dir("envdir");
  setenv("LPLAB_OUT_DIR", dir.c_str(), 1);
  cli::RunOptions opts;
  opts.out_dir.clear();
  const auto cfg = cli::parse_config(json::parse(R"({
    "command": "dawson-check", "w_grid": {"min": 0.25, "max": 8, "count": 8}})"));
  const auto r = cli::run_experiment(cfg, opts);
  unsetenv("LPLAB_OUT_DIR");
  CHECK(r.status == cli::kStatusOk);
  CHECK(r.json_path.parent_path() == dir);
  CHECK(fs::exists(dir / "dawson-check.csv"));
}

TEST_CASE("run_from_file maps missing files to usage errors") {
  CHECK(cli::run_from_file("/nonexistent/nope.json", {}) == cli::kStatusUsage);
}
