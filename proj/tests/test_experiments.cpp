#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "zkw/experiments.hpp"

using namespace zkw;
using Catch::Approx;
using nlohmann::json;

TEST_CASE("experiment configs are validated strictly") {
  REQUIRE_THROWS_AS(parse_experiment_config(json{{"experiment", "nope"}}), ConfigInvalid);
  REQUIRE_THROWS_AS(parse_experiment_config(json{{"experiment", "solve"}, {"seed", 1}, {"zzz", 2}}),
                    ConfigInvalid);
  REQUIRE_THROWS_AS(
      parse_experiment_config(json{{"experiment", "solve"},
                                   {"seed", 1},
                                   {"params", json{{"unknown_knob", 3.0}}}}),
      ConfigInvalid);
  // randomized experiments must pin their seed
  REQUIRE_THROWS_AS(parse_experiment_config(json{{"experiment", "counting"}}), ConfigInvalid);
  REQUIRE_THROWS_AS(
      parse_experiment_config(json{{"experiment", "solve"}, {"seed", 1}, {"dt", -1.0}}),
      ConfigInvalid);

  const auto c = parse_experiment_config(json{{"experiment", "weighted-trilinear"}});
  REQUIRE(c.experiment == "weighted-trilinear");
  REQUIRE_FALSE(c.has_seed);
  REQUIRE(c.param("L", 0.5) == 0.5);
  const auto d = parse_experiment_config(
      json{{"experiment", "counting"}, {"seed", 9}, {"params", json{{"count", 50.0}}}});
  REQUIRE(d.seed == 9);
  REQUIRE(d.param("count", 0) == 50.0);
}

TEST_CASE("seed derivation is stable and collision-averse") {
  REQUIRE(derive_seed(1, 2) == derive_seed(1, 2));
  REQUIRE(derive_seed(1, 2) != derive_seed(1, 3));
  REQUIRE(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("weighted sharpness experiment lands in the factor-two window") {
  const auto cfg = parse_experiment_config(json{{"experiment", "weighted-trilinear"}});
  const auto res = run_experiment(cfg);
  REQUIRE(res.exit_code == 0);
  REQUIRE(res.metrics.at("rel_min") >= 0.5);
  REQUIRE(res.metrics.at("rel_max") <= 2.0);
  REQUIRE_FALSE(res.files.empty());
}

TEST_CASE("experiments are bit-reproducible across runs") {
  const auto cfg = parse_experiment_config(
      json{{"experiment", "counterexample"}, {"seed", 21}, {"params", json{{"step_div", 1.0}}}});
  const auto r1 = run_experiment(cfg);
  const auto r2 = run_experiment(cfg);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r1.metrics == r2.metrics);
  REQUIRE(r1.files.size() == r2.files.size());
  for (std::size_t i = 0; i < r1.files.size(); ++i) {
    REQUIRE(r1.files[i].first == r2.files[i].first);
    REQUIRE(r1.files[i].second == r2.files[i].second);  // byte identical
  }
  REQUIRE(r1.metrics.at("ratio_exponent") > 0.0);
  REQUIRE(r1.metrics.at("min_restricted_det") >= 0.5);
}

TEST_CASE("run_and_write leaves a digest-consistent manifest") {
  namespace fs = std::filesystem;
  const std::string dir = "zkw_exp_test_out";
  fs::remove_all(dir);
  const json cfg = {{"experiment", "counterexample"}, {"seed", 5},
                    {"params", json{{"step_div", 1.0}}}};
  REQUIRE(run_and_write(cfg, dir) == 0);
  const json manifest = json::parse(read_file(dir + "/manifest.json"));
  const auto m = ResultManifest::from_json(manifest);
  REQUIRE(m.experiment == "counterexample");
  REQUIRE(m.config_hash == hex16(fnv1a64(cfg.dump())));
  REQUIRE_FALSE(m.file_digests.empty());
  for (const auto& [name, digest] : m.file_digests)
    REQUIRE(digest == hex16(fnv1a64(read_file(dir + "/" + name))));
  REQUIRE_FALSE(m.metrics.empty());
  fs::remove_all(dir);
}

TEST_CASE("unknown experiment ids cannot reach the dispatcher") {
  ExperimentConfig cfg;
  cfg.experiment = "bogus";
  REQUIRE_THROWS_AS(run_experiment(cfg), ConfigInvalid);
}
