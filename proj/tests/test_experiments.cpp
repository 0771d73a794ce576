#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rotlab/experiments.hpp"

using namespace rotlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rotlab_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("experiment list") {
  const auto& list = list_experiments();
  CHECK(list.size() == 8);
  CHECK(list.front().name == "thm11_correlations");
  CHECK(known_experiment("thm12_blowup"));
  CHECK_FALSE(known_experiment("nope"));
  CHECK_THROWS_AS(default_config("nope"), UnknownExperiment);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(R"({"schema_version": 1, "experiment": "walk_mixing", "d": [3, 4], "seed": 9})");
  CHECK(c.name == "walk_mixing");
  CHECK(c.d == std::vector<std::uint64_t>{3, 4});
  CHECK(c.seed == 9);
  CHECK(c.l == 30);
  CHECK(parse_config(R"({"schema_version": 1, "experiment": "thm13_residues", "alpha": "golden"})").alpha ==
        std::vector<std::string>{"golden"});
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "experiment": "walk_mixing", "colour": 1})"),
                  PreconditionError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "walk_mixing"})"), PreconditionError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 2, "experiment": "walk_mixing"})"), PreconditionError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "experiment": "nope"})"), UnknownExperiment);
  CHECK_THROWS_AS(parse_config("{"), PreconditionError);
  const auto round = parse_config(c.to_json());
  CHECK(round.to_json() == c.to_json());
}

TEST_CASE("thm13_residues") {
  auto c = default_config("thm13_residues");
  c.alpha = {"sqrt2"};
  c.out = scratch("residues").string();
  const auto r = run_experiment(c);
  CHECK(r.pass());
  CHECK(r.checks.size() == 6);
  const auto csv = slurp(std::filesystem::path(c.out) / "residues_sqrt2_1000000.csv");
  CHECK(csv.rfind("d,class,count,total,freq,dev\n2,0,", 0) == 0);
  const auto summary = nlohmann::json::parse(slurp(std::filesystem::path(c.out) / "summary.json"));
  CHECK(summary["pass"] == true);
  CHECK(summary["experiment"] == "thm13_residues");
  CHECK(summary["boundary"]["uncertain"] == 0);
}

TEST_CASE("walk_mixing") {
  auto c = default_config("walk_mixing");
  c.d = {2, 3, 7};
  c.out = scratch("walk").string();
  const auto r = run_experiment(c);
  CHECK(r.pass());
  const auto csv = slurp(std::filesystem::path(c.out) / "walk.csv");
  CHECK(csv.rfind("d,n,tv,oracle,bound\n2,0,0.5,", 0) == 0);
}

TEST_CASE("same config gives byte-identical artifacts across worker counts") {
  auto c = default_config("thm11_correlations");
  c.x = {60000};
  c.out = scratch("corr1").string();
  const auto a = run_experiment(c);
  auto c4 = c;
  c4.workers = 4;
  c4.out = scratch("corr4").string();
  const auto b = run_experiment(c4);
  CHECK(slurp(std::filesystem::path(c.out) / "correlations.csv") ==
        slurp(std::filesystem::path(c4.out) / "correlations.csv"));
  auto strip = [](std::string s) {
    auto j = nlohmann::json::parse(s);
    j.erase("wall_time_s");
    return j.dump();
  };
  CHECK(strip(slurp(std::filesystem::path(c.out) / "summary.json")) ==
        strip(slurp(std::filesystem::path(c4.out) / "summary.json")));
  CHECK(a.files == b.files);

  auto g = default_config("thm11_gaps");
  g.x = {30000};
  g.out = scratch("gaps").string();
  run_experiment(g);
  const auto first = slurp(std::filesystem::path(g.out) / "gaps_uniform_sqrt2_30000.csv");
  run_experiment(g);
  CHECK(slurp(std::filesystem::path(g.out) / "gaps_uniform_sqrt2_30000.csv") == first);
}

TEST_CASE("tuples, key lemma and sandwich experiments") {
  auto t = default_config("lemma31_tuples");
  t.out = scratch("tuples").string();
  CHECK(run_experiment(t).pass());
  CHECK(slurp(std::filesystem::path(t.out) / "tuples.csv").find("1000,5,6,199,198.800000,1.00100604\n") !=
        std::string::npos);

  auto k = default_config("keylemma_average");
  k.x = {200000};
  k.rho = 5e-3;
  k.k = {2};
  k.out = scratch("keylemma").string();
  const auto kr = run_experiment(k);
  REQUIRE(kr.checks.size() == 1);

  auto s = default_config("sandwich_check");
  s.out = scratch("sandwich").string();
  const auto sr = run_experiment(s);
  CHECK(sr.pass());
}
