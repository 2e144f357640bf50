#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "qod/config.hpp"
#include "qod/error.hpp"

using namespace qod;

namespace {

std::string error_of(const std::string& json, const std::string& base = ".") {
  try {
    parse_config(json, base).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kInline = R"({"experiment": "mz", "scene": "grid 16 16 box 4 4\nregion right 0 0 1 1"})";

}  // namespace

TEST_CASE("sweep values are inclusive and clean") {
  SweepSpec s{"c", 0.0, 1.0, 0.1};
  const auto v = s.values();
  REQUIRE(v.size() == 11u);
  CHECK(v[3] == 0.3);
  CHECK(v[10] == 1.0);
  CHECK(SweepSpec{"x", 2.0, 2.0, 0.0}.values() == std::vector<double>{2.0});
  CHECK(SweepSpec{"x", 0.0, 1.0, 0.4}.values().size() == 3u);
}

TEST_CASE("defaults and inline scenes") {
  const auto c = parse_config(kInline, ".");
  CHECK(c.experiment == "mz");
  CHECK(c.dt == 0.1);
  CHECK(c.steps == 0);
  CHECK(c.integrator == Integrator::Trotter);
  CHECK(c.out_dir == ".");
  CHECK(c.snapshot_every == 0);
  CHECK(c.threads == 1);
  CHECK(c.sweeps.empty());
  CHECK(c.scene_text.rfind("grid 16 16", 0) == 0);
  CHECK(c.scene_path.empty());
  CHECK(c.source_text == kInline);
}

TEST_CASE("full config with scene file, sweeps and options") {
  const auto dir = std::filesystem::temp_directory_path() / "qod_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "b.scene") << "grid 16 16 box 4 4\n";
  std::ofstream(dir / "run.json") << R"({
    "experiment": "chsh", "scene": "b.scene", "dt": 0.05, "steps": 12,
    "sweep": [{"name": "theta", "from": 0, "to": 0.5, "step": 0.25},
              {"name": "c", "from": 1}],
    "integrator": "rk4", "out_dir": "o", "snapshot_every": 4,
    "density_maps": true, "photon": {"sigma": 2}
  })";
  const auto c = load_config(dir / "run.json");
  CHECK(c.experiment == "chsh");
  CHECK(c.scene_text == "grid 16 16 box 4 4\n");
  CHECK(std::filesystem::path(c.scene_path).filename() == "b.scene");
  CHECK(c.dt == 0.05);
  CHECK(c.steps == 12);
  CHECK(c.integrator == Integrator::Rk4);
  CHECK(c.snapshot_every == 4);
  REQUIRE(c.sweeps.size() == 2u);
  REQUIRE(c.sweep("theta") != nullptr);
  CHECK(c.sweep("theta")->values().size() == 3u);
  CHECK(c.sweep("c")->values() == std::vector<double>{1.0});
  CHECK(c.sweep("dx") == nullptr);
  CHECK(c.options.at("density_maps") == true);
  CHECK(c.options.contains("photon"));
  CHECK_FALSE(c.options.contains("dt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("validation messages name the field") {
  CHECK(error_of(R"({"experiment": "mz", "scene": "grid 16 16 box 4 4", "dt": 0})").rfind("dt:", 0) == 0);
  CHECK(error_of(R"({"experiment": "mz", "scene": "grid 16 16 box 4 4", "dt": -1})").rfind("dt:", 0) == 0);
  CHECK(error_of(R"({"experiment": "mz", "scene": "grid 16 16 box 4 4", "dt": "x"})").rfind("dt:", 0) == 0);
  CHECK(error_of(R"({"experiment": "nope", "scene": "grid 16 16 box 4 4"})").rfind("experiment:", 0) == 0);
  CHECK(error_of(R"({"scene": "grid 16 16 box 4 4"})").rfind("experiment:", 0) == 0);
  CHECK(error_of(R"({"experiment": "mz"})").rfind("scene:", 0) == 0);
  CHECK(error_of(R"({"experiment": "mz", "scene": "grid 16 16 box 4 4", "steps": -3})").rfind("steps:", 0) == 0);
  CHECK(error_of(R"({"experiment": "mz", "scene": "grid 16 16 box 4 4", "integrator": "euler"})").rfind("integrator:", 0) == 0);
  CHECK(error_of(R"({"experiment": "mz", "scene": "grid 16 16 box 4 4",
                     "sweep": {"name": "layers", "from": 3, "to": 1}})").rfind("sweep.layers", 0) == 0);
  CHECK(error_of(R"({"experiment": "mz", "scene": "grid 16 16 box 4 4",
                     "sweep": {"name": "layers", "from": 0, "to": 4, "step": 0}})").rfind("sweep.layers", 0) == 0);
  CHECK(error_of(R"({"experiment": "mz", "scene": "grid 16 16 box 4 4", "snapshot_every": -1})").rfind("snapshot_every:", 0) == 0);
  CHECK(error_of("[1, 2]") != "");
  CHECK(error_of("{not json").rfind("config is not valid JSON", 0) == 0);
}

TEST_CASE("missing scene file names the path") {
  const auto msg = error_of(R"({"experiment": "mz", "scene": "nowhere/bench.scene"})", "/tmp");
  CHECK(msg.find("/tmp/nowhere/bench.scene") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/run.json"), ConfigError);
}
