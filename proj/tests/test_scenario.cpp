#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynquant/scenario.hpp"
#include "dynquant/verify.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dynquant;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "dynquant_test_out") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing basics") {
  CliOverrides none;
  auto cfg = load_scenario_config(R"({"name":"harmonic","hbar":0.5,"dim":12})", none);
  CHECK(cfg.name == "harmonic");
  CHECK(cfg.hbar == doctest::Approx(0.5));
  CHECK(cfg.dim == 12);
  CHECK(cfg.seed == 0xD15517A7ULL);

  CHECK_THROWS_WITH_AS(load_scenario_config(R"({"name":"harmonic","bogus":1})", none),
                       doctest::Contains("bogus"), ConfigError);
  CHECK_THROWS_WITH_AS(load_scenario_config(R"({"hbar":1})", none),
                       doctest::Contains("name"), ConfigError);
  CHECK_THROWS_WITH_AS(load_scenario_config(R"({"name":"nope"})", none),
                       doctest::Contains("nope"), ConfigError);
  CHECK_THROWS_WITH_AS(load_scenario_config(R"({"name":"fokker_planck"})", none),
                       doctest::Contains("system"), ConfigError);
  CHECK_THROWS_WITH_AS(load_scenario_config(R"({"name":"harmonic","hbar":-1})", none),
                       doctest::Contains("hbar"), ConfigError);
  CHECK_THROWS_WITH_AS(
      load_scenario_config(R"({"name":"harmonic","system":{"mass":1}})", none),
      doctest::Contains("mass"), ConfigError);
  CHECK_THROWS_WITH_AS(
      load_scenario_config(R"({"name":"harmonic","evolution":{"picture":"both"}})", none),
      doctest::Contains("picture"), ConfigError);
}

TEST_CASE("flag overrides win over file values") {
  CliOverrides ov;
  ov.scenario = "damped";
  ov.hbar = 2.0;
  ov.dim = 6;
  ov.dt = 0.25;
  ov.steps = 11;
  ov.out = "elsewhere";
  ov.seed = 99;
  auto cfg = load_scenario_config(
      R"({"name":"harmonic","hbar":1.0,"dim":30,"out":"here","seed":1,
          "evolution":{"dt":0.01,"steps":100}})",
      ov);
  CHECK(cfg.name == "damped");
  CHECK(cfg.hbar == doctest::Approx(2.0));
  CHECK(cfg.dim == 6);
  CHECK(cfg.evolution.dt == doctest::Approx(0.25));
  CHECK(cfg.evolution.steps == 11);
  CHECK(cfg.out == "elsewhere");
  CHECK(cfg.seed == 99);
}

TEST_CASE("a run manifest is accepted as config input") {
  CliOverrides none;
  auto cfg = load_scenario_config(
      R"({"config":{"name":"harmonic","hbar":0.7},"derived":{},"outputs":{}, "wall_time_s":1.0})",
      none);
  CHECK(cfg.name == "harmonic");
  CHECK(cfg.hbar == doctest::Approx(0.7));
}

TEST_CASE("canonical config JSON round trips") {
  CliOverrides none;
  auto cfg = load_scenario_config(
      R"({"name":"fokker_planck","hbar":0.9,"dim":10,
          "system":{"d_qq":0.1,"d_qp":0.0,"d_pp":0.2,"c_qq":-0.05,"c_qp":1.0,"c_pq":-1.0,"c_pp":-0.15},
          "initial":{"q0":0.4,"p0":-0.1},"evolution":{"dt":0.01,"steps":5}})",
      none);
  std::string text = scenario_config_json(cfg);
  auto cfg2 = load_scenario_config(text, none);
  CHECK(scenario_config_json(cfg2) == text);
  CHECK(cfg2.fp.d_pp == doctest::Approx(0.2));
  CHECK(cfg2.q0 == std::vector<double>{0.4});
}

TEST_CASE("custom operator literal round trips") {
  CliOverrides none;
  const std::string text = R"({"name":"custom","dim":6,
    "system":{"modes":1,"terms":[
      {"coeff":[{"q":[0],"p":[1],"c":1.0}],"deriv":{"q":[1],"p":[0]}},
      {"coeff":[{"q":[1],"p":[0],"c":-1.0}],"deriv":{"q":[0],"p":[1]}}]},
    "evolution":{"dt":0.01,"steps":3}})";
  auto cfg = load_scenario_config(text, none);
  REQUIRE(cfg.custom_op.has_value());
  auto cfg2 = load_scenario_config(scenario_config_json(cfg), none);
  REQUIRE(cfg2.custom_op.has_value());
  CHECK(scenario_config_json(cfg2) == scenario_config_json(cfg));

  CHECK_THROWS_WITH_AS(
      load_scenario_config(R"({"name":"custom","system":{"terms":[]}})", none),
      doctest::Contains("modes"), ConfigError);
}

TEST_CASE("harmonic run produces trajectory and manifest") {
  TempDir tmp;
  CliOverrides none;
  auto cfg = load_scenario_config(R"({"name":"harmonic","dim":8,
      "evolution":{"dt":0.05,"steps":20,"record_every":5}})", none);
  cfg.out = (tmp.path / "run").string();
  CHECK(run_scenario(cfg) == 0);
  CHECK(fs::exists(fs::path(cfg.out) / "trajectory.csv"));
  CHECK(fs::exists(fs::path(cfg.out) / "manifest.json"));

  auto manifest = nlohmann::json::parse(slurp(fs::path(cfg.out) / "manifest.json"));
  CHECK(manifest.contains("config"));
  CHECK(manifest.contains("outputs"));
  CHECK(manifest.contains("wall_time_s"));

  // re-running from the manifest reproduces the trajectory byte for byte
  auto cfg2 = load_scenario_config(manifest.dump(), none);
  cfg2.out = (tmp.path / "run2").string();
  CHECK(run_scenario(cfg2) == 0);
  CHECK(slurp(fs::path(cfg.out) / "trajectory.csv") ==
        slurp(fs::path(cfg2.out) / "trajectory.csv"));
}

TEST_CASE("classical-only runs") {
  TempDir tmp;
  CliOverrides ov;
  ov.classical_only = true;
  auto cfg = load_scenario_config(
      R"({"name":"lorenz","evolution":{"dt":0.01,"steps":50,"record_every":10}})", ov);
  cfg.out = (tmp.path / "cl").string();
  CHECK(run_scenario(cfg) == 0);
  std::string head = slurp(fs::path(cfg.out) / "trajectory.csv").substr(0, 20);
  CHECK(head.rfind("t,q1,q2,q3,p1", 0) == 0);

  // second-order generators have no classical characteristics
  auto cfg2 = load_scenario_config(
      R"({"name":"fokker_planck","classical_only":true,
          "system":{"d_qq":0.1,"d_qp":0,"d_pp":0.1,"c_qq":0,"c_qp":1,"c_pq":-1,"c_pp":-0.2}})",
      CliOverrides{});
  cfg2.out = (tmp.path / "cl2").string();
  CHECK_THROWS_AS(run_scenario(cfg2), ConfigError);
}

TEST_CASE("three-mode quantum runs are gated") {
  CliOverrides none;
  auto cfg = load_scenario_config(R"({"name":"lorenz","dim":4})", none);
  cfg.out = "unused";
  CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("allow"), ConfigError);
}

TEST_CASE("identity suite passes and a planted defect is caught by name") {
  QuantizationContext ctx(1.0, 8);
  auto report = verify_all(ctx, VerifyOptions{});
  CHECK(report.all_passed());
  for (const auto& e : report.entries) CHECK(e.pass);

  VerifyOptions bad;
  bad.corrupt_q = true;
  auto report2 = verify_all(ctx, bad);
  CHECK(!report2.all_passed());
  for (const auto& e : report2.entries) {
    if (e.name == "coordinate_superop_on_identity" ||
        e.name == "superop_basis_canonical_commutation_interior")
      CHECK(!e.pass);
  }
  size_t failed = 0;
  for (const auto& e : report2.entries) failed += !e.pass;
  CHECK(failed >= 2);
}
