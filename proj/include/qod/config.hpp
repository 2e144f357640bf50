#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qod {

enum class Integrator { Trotter, Rk4 };

std::string_view to_string(Integrator i);

struct SweepSpec {
  std::string name;
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;
  /// from, from + step, ... up to `to` (inclusive within 1e-9 of a step).
  std::vector<double> values() const;
};

/// Parsed run configuration. Keys: experiment, scene, dt, steps, sweep
/// (object or array of objects), integrator, out_dir, snapshot_every; any
/// other key is kept in `options` for the experiment runner.
struct ExperimentConfig {
  std::string experiment;
  std::string scene_text;
  std::string scene_path;  // empty for inline scenes
  double dt = 0.1;
  int steps = 0;           // 0 picks the experiment's default final time
  std::vector<SweepSpec> sweeps;
  Integrator integrator = Integrator::Trotter;
  std::string out_dir = ".";
  int snapshot_every = 0;
  int threads = 1;
  nlohmann::json options = nlohmann::json::object();
  std::string source_text;

  const SweepSpec* sweep(std::string_view name) const;
  /// Re-checks fields after command-line overrides.
  void validate() const;
};

inline const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> names{"mz", "scatterer", "hom", "chsh", "pol", "stability"};
  return names;
}

/// Relative scene paths resolve against base_dir. Throws ConfigError.
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace qod
