#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qod/config.hpp"
#include "qod/error.hpp"
#include "qod/experiments.hpp"

using namespace qod;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("qod_exp_" + name);
  fs::remove_all(d);
  return d;
}

const char* kSmallStability = R"({
  "experiment": "stability",
  "scene": "grid 64 64 box 16 16\nmirror at 8 8 tilt 45 line 12 layers 2 D 0.5 omega 2.5\n",
  "dt": 0.1, "steps": 30, "photon": {"sigma": 1, "kx": 4, "ky": 0, "x": 3, "y": 8}
})";

}  // namespace

TEST_CASE("closed forms") {
  CHECK(hom_dip(0.0, 2.0) == 0.0);
  CHECK(hom_dip(2.0, 2.0) == doctest::Approx(0.5 * (1 - std::exp(-0.5))));
  CHECK(hom_dip(40.0, 2.0) == doctest::Approx(0.5));
  CHECK(chsh_ideal(std::numbers::pi / 8, 1.0) == doctest::Approx(2 * std::numbers::sqrt2));
  CHECK(chsh_ideal(std::numbers::pi / 8, 0.0) == doctest::Approx(std::numbers::sqrt2));
  CHECK(chsh_ideal(3 * std::numbers::pi / 8, 1.0) == doctest::Approx(-2 * std::numbers::sqrt2));
  for (double c : {0.0, 0.3, 1.0}) CHECK(chsh_ideal(0.0, c) == doctest::Approx(2.0));
  // violation threshold of the c family at pi/8 sits between 0.2 and 0.3
  CHECK(chsh_ideal(std::numbers::pi / 8, 0.2) < 2.0);
  CHECK(chsh_ideal(std::numbers::pi / 8, 0.3) > 2.0);
}

TEST_CASE("stability traces, manifest and determinism") {
  auto cfg = parse_config(kSmallStability, ".");
  const auto out = scratch("stab");
  cfg.out_dir = out.string();
  const auto rs = run_experiment(cfg);
  CHECK(rs.columns() == std::vector<std::string>{"integrator", "dt", "t", "norm", "energy"});
  CHECK(rs.size() == 2u * 31u);
  const auto integ = rs.column("integrator");
  const auto norm = rs.column("norm");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (integ[i] == 0.0) CHECK(std::abs(norm[i] - 1.0) < 1e-12);
  }
  CHECK(rs.meta.at("integrator_codes") == "0=trotter 1=rk4");

  const auto csv = write_run_outputs(cfg, parse_scene(cfg.scene_text), rs, 1.5);
  CHECK(fs::path(csv).filename() == "stability_results.csv");
  const auto manifest = slurp(out / "stability_manifest.txt");
  CHECK(manifest.find("scene_hash ") != std::string::npos);
  CHECK(manifest.find("grid 64 64 16 16\n") != std::string::npos);
  CHECK(manifest.find("dt 0.1\n") != std::string::npos);
  CHECK(manifest.find("wall_seconds 1.5\n") != std::string::npos);
  CHECK(manifest.find(std::string("--- config\n") + kSmallStability) != std::string::npos);
  CHECK(manifest.find("--- scene\n" + cfg.scene_text) != std::string::npos);

  // same config twice: byte-identical CSV, also with more threads
  const auto first = slurp(csv);
  cfg.threads = 2;
  write_run_outputs(cfg, parse_scene(cfg.scene_text), run_experiment(cfg), 0.0);
  CHECK(slurp(csv) == first);
  fs::remove_all(out);
}

TEST_CASE("snapshots follow the naming scheme") {
  auto cfg = parse_config(kSmallStability, ".");
  const auto out = scratch("snap");
  cfg.out_dir = out.string();
  cfg.steps = 10;
  cfg.snapshot_every = 5;
  cfg.options["integrators"] = {"trotter"};
  run_experiment(cfg);
  CHECK(fs::exists(out / "stability_trotter_0.1_0.qf"));
  CHECK(fs::exists(out / "stability_trotter_0.1_0.5.qf"));
  CHECK(fs::exists(out / "stability_trotter_0.1_1.qf"));
  fs::remove_all(out);
}

TEST_CASE("runaway RK4 is reported as a numerical error") {
  auto cfg = parse_config(kSmallStability, ".");
  cfg.out_dir = scratch("nan").string();
  cfg.scene_text = "grid 64 64 box 16 16\nmirror at 8 8 tilt 45 line 12 layers 2 D 5 omega 20\n";
  cfg.dt = 1.0;
  cfg.steps = 400;
  cfg.options["integrators"] = {"rk4"};
  CHECK_THROWS_AS(run_experiment(cfg), NumericalError);
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("scene requirements per experiment") {
  auto run = [](const std::string& exp, const std::string& scene) {
    auto cfg = parse_config(R"({"experiment": ")" + exp + R"(", "scene": "grid 64 64 box 16 16"})", ".");
    cfg.scene_text = scene;
    cfg.out_dir = (fs::temp_directory_path() / "qod_exp_req").string();
    run_experiment(cfg);
  };
  const std::string bare = "grid 64 64 box 16 16\n";
  CHECK_THROWS_AS(run("mz", bare), ConfigError);
  CHECK_THROWS_AS(run("mz", bare + "phaseshifter at 8 8 tilt 0 line 4 layers 0 D 0.5 omega 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(run("scatterer", bare), ConfigError);
  CHECK_THROWS_AS(run("hom", bare), ConfigError);
  CHECK_THROWS_AS(run("chsh", bare), ConfigError);
  CHECK_THROWS_AS(run("pol", bare), ConfigError);
  CHECK_THROWS_AS(run("stability", "grid 64 64 box 16 16\nlens at 1 1\n"), ConfigError);
  fs::remove_all(fs::temp_directory_path() / "qod_exp_req");
}

TEST_CASE("pol test on a small bench") {
  auto cfg = parse_config(R"({
    "experiment": "pol",
    "scene": "grid 128 64 box 32 16\nrotator at 8 8 line 24 layers 4 Ds 0.56 omega 1.2\nregion reflected 0 10 32 16\n",
    "steps": 40, "sweep": {"name": "theta_rot", "from": 0, "to": 1.5, "step": 0.5},
    "photon": {"sigma": 1, "kx": 8, "ky": 0, "x": 3, "y": 8}
  })", ".");
  const auto rs = run_experiment(cfg);
  CHECK(rs.size() == 4u);
  for (const auto& row : rs.rows()) {
    CHECK(row[1] >= 0.0);
    CHECK(row[1] <= 1.0);
    CHECK(row[2] >= 0.0);
    CHECK(row[2] <= 1.0 + 1e-12);
  }
  CHECK(rs.rows()[0][2] < 1e-20);
}
