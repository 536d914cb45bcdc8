#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "excite/config.hpp"
#include "excite/runner.hpp"

namespace {

namespace fs = std::filesystem;

const char* kMinimal = R"({
  "name": "minimal",
  "seed": 5,
  "model": {"kind": "sis", "beta": 0.8, "gamma": 0.2},
  "estimators": [{"kind": "gw-rls"}]
})";

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  const auto config = excite::config_from_json(kMinimal);
  CHECK(config.name == "minimal");
  CHECK(config.seed == 5);
  CHECK(config.sim.h == doctest::Approx(0.1));
  CHECK(config.sim.steps == 1000);
  CHECK(config.sim.noise.process == excite::ProcessNoise::kNone);
  CHECK(config.output.dir == "out");

  REQUIRE(config.estimators.size() == 1);
  CHECK(config.estimators[0].label == "gw-rls");  // defaults to the kind
  CHECK(config.estimators[0].alpha == doctest::Approx(0.98));

  const auto& sis = std::get<excite::SisModelConfig>(config.model);
  REQUIRE(sis.schedule.size() == 1);
  CHECK(sis.schedule[0].beta == doctest::Approx(0.8));

  CHECK_NOTHROW(excite::validate_config(config));
}

TEST_CASE("resetting estimators default to a cp- label") {
  const auto config = excite::config_from_json(R"({
    "name": "labels",
    "model": {"kind": "sis", "beta": 0.5, "gamma": 0.1},
    "estimators": [
      {"kind": "gw-rls", "resetting": true, "detector": {"tau": 0.05}},
      {"kind": "ef-rls", "label": "custom"}
    ]
  })");
  CHECK(config.estimators[0].label == "cp-gw-rls");
  CHECK(config.estimators[1].label == "custom");
  REQUIRE(config.estimators[0].detector.has_value());
  CHECK(config.estimators[0].detector->tau == doctest::Approx(0.05));
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK_THROWS_WITH_AS(
      excite::config_from_json(R"({"name": "x", "bogus": 1,
        "model": {"kind": "sis", "beta": 0.5, "gamma": 0.1},
        "estimators": [{"kind": "gw-rls"}]})"),
      doctest::Contains("bogus"), excite::ConfigError);

  CHECK_THROWS_WITH_AS(
      excite::config_from_json(R"({"name": "x",
        "model": {"kind": "sis", "beta": 0.5, "gamma": 0.1},
        "sim": {"dt": 0.1},
        "estimators": [{"kind": "gw-rls"}]})"),
      doctest::Contains("sim"), excite::ConfigError);
}

TEST_CASE("SIS model requires constants or an explicit schedule, not both") {
  CHECK_THROWS_AS(excite::config_from_json(R"({"name": "x",
    "model": {"kind": "sis", "beta": 0.5, "gamma": 0.1,
              "schedule": [{"t": 0, "beta": 0.5, "gamma": 0.1}]},
    "estimators": [{"kind": "gw-rls"}]})"),
                  excite::ConfigError);
  CHECK_THROWS_AS(excite::config_from_json(R"({"name": "x",
    "model": {"kind": "sis"},
    "estimators": [{"kind": "gw-rls"}]})"),
                  excite::ConfigError);
}

TEST_CASE("SIR model requires a network or explicit parameters, not both") {
  const char* both = R"({"name": "x",
    "model": {"kind": "sir", "nodes": 2,
              "network": {"topology": "star"},
              "b": [[0.0, 0.1], [0.2, 0.0]], "gamma": [0.1, 0.1]},
    "estimators": [{"kind": "gw-rls"}]})";
  CHECK_THROWS_WITH_AS(excite::config_from_json(both), doctest::Contains("exactly one"),
                       excite::ConfigError);

  const char* neither = R"({"name": "x",
    "model": {"kind": "sir", "nodes": 2},
    "estimators": [{"kind": "gw-rls"}]})";
  CHECK_THROWS_AS(excite::config_from_json(neither), excite::ConfigError);
}

TEST_CASE("validation reports every violation at once") {
  auto config = excite::config_from_json(kMinimal);
  config.sim.h = -1.0;
  config.sim.steps = 0;
  config.estimators[0].alpha = 2.0;
  try {
    excite::validate_config(config);
    FAIL("expected a ConfigError");
  } catch (const excite::ConfigError& err) {
    const std::string what = err.what();
    CHECK(what.find("h") != std::string::npos);
    CHECK(what.find("steps") != std::string::npos);
    CHECK(what.find("alpha") != std::string::npos);
    CHECK(std::count(what.begin(), what.end(), '\n') >= 3);
  }
}

TEST_CASE("negative seeds are rejected") {
  CHECK_THROWS_AS(excite::config_from_json(R"({"name": "x", "seed": -1,
    "model": {"kind": "sis", "beta": 0.5, "gamma": 0.1},
    "estimators": [{"kind": "gw-rls"}]})"),
                  excite::ConfigError);
}

TEST_CASE("preset catalog") {
  const auto& catalog = excite::preset_catalog();
  REQUIRE(catalog.size() == 7);
  const std::vector<std::string> expected = {
      "sis-basic",       "sis-contour",    "sir-network-fc", "sir-network-star",
      "sir-network-er",  "sir-changepoint", "roc-sweep"};
  for (const auto& name : expected) {
    bool found = false;
    for (const auto& [key, description] : catalog) {
      if (key == name) {
        found = true;
        CHECK_FALSE(description.empty());
      }
    }
    CHECK_MESSAGE(found, "missing preset ", name);
    CHECK_NOTHROW(excite::preset(name));  // every preset passes validation
  }
  CHECK_THROWS_AS(excite::preset("no-such-preset"), excite::ConfigError);
}

TEST_CASE("preset details") {
  const auto changepoint = excite::preset("sir-changepoint");
  const auto& sir = std::get<excite::SirModelConfig>(changepoint.model);
  CHECK(sir.b_schedule.size() == 3);
  CHECK(changepoint.estimators.size() == 4);

  const auto roc = excite::preset("roc-sweep");
  REQUIRE(roc.metrics.roc.has_value());
  CHECK(roc.metrics.roc->etas == std::vector<double>{0.1, 0.3, 0.5, 1.0});
  CHECK(roc.metrics.roc->change_points.size() == 6);

  const auto contour = excite::preset("sis-contour");
  REQUIRE(contour.metrics.surface.has_value());
  CHECK(contour.metrics.surface->beta.count == 29);
}

TEST_CASE("serialization round trip is byte identical") {
  for (const auto& [name, description] : excite::preset_catalog()) {
    const auto config = excite::preset(name);
    const std::string first = excite::config_to_json(config);
    const std::string second = excite::config_to_json(excite::config_from_json(first));
    CHECK(first == second);
  }
}

TEST_CASE("config hash is stable and discriminating") {
  const auto a = excite::preset("sis-basic");
  const auto b = excite::preset("sis-contour");
  CHECK(excite::config_hash_hex(a) == excite::config_hash_hex(a));
  CHECK(excite::config_hash_hex(a) != excite::config_hash_hex(b));
  CHECK(excite::config_hash_hex(a).size() == 16);
}

TEST_CASE("load_config reads files and reports failures") {
  const fs::path path = fs::temp_directory_path() / "excite_test_config.json";
  {
    std::ofstream out(path);
    out << kMinimal;
  }
  const auto config = excite::load_config(path);
  CHECK(config.name == "minimal");
  fs::remove(path);

  CHECK_THROWS_AS(excite::load_config(path), excite::ConfigError);
}

TEST_CASE("output directory precedence") {
  auto config = excite::preset("sis-basic");
  config.output.dir = "from-config";

  unsetenv("EXCITE_ID_OUT");
  CHECK(excite::resolve_out_dir(config, {}) == fs::path("from-config"));

  setenv("EXCITE_ID_OUT", "from-env", 1);
  CHECK(excite::resolve_out_dir(config, {}) == fs::path("from-env"));
  CHECK(excite::resolve_out_dir(config, "explicit") == fs::path("explicit"));
  unsetenv("EXCITE_ID_OUT");
}
