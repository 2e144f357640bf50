#include "qod/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qod/error.hpp"

namespace qod {

using nlohmann::json;

std::string_view to_string(Integrator i) { return i == Integrator::Trotter ? "trotter" : "rk4"; }

std::vector<double> SweepSpec::values() const {
  std::vector<double> out;
  if (from == to) return {from};
  const double n = std::floor((to - from) / step + 1e-9);
  for (long i = 0; i <= static_cast<long>(n); ++i) {
    // 12 significant digits drops the accumulated 0.30000000000000004 noise
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", from + static_cast<double>(i) * step);
    out.push_back(std::strtod(buf, nullptr));
  }
  return out;
}

const SweepSpec* ExperimentConfig::sweep(std::string_view name) const {
  for (const auto& s : sweeps) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void ExperimentConfig::validate() const {
  if (std::find(known_experiments().begin(), known_experiments().end(), experiment) ==
      known_experiments().end()) {
    throw ConfigError("experiment: unknown experiment '" + experiment + "'");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt: must be a positive number");
  if (steps < 0) throw ConfigError("steps: must not be negative");
  if (snapshot_every < 0) throw ConfigError("snapshot_every: must not be negative");
  if (threads < 1) throw ConfigError("threads: must be at least 1");
  for (const auto& s : sweeps) {
    if (s.name.empty()) throw ConfigError("sweep.name: must not be empty");
    if (!std::isfinite(s.from) || !std::isfinite(s.to)) throw ConfigError("sweep." + s.name + ": bounds must be finite");
    if (s.to < s.from) throw ConfigError("sweep." + s.name + ": 'to' lies below 'from'");
    if (s.to > s.from && !(s.step > 0.0)) throw ConfigError("sweep." + s.name + ".step: must be positive");
  }
}

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

SweepSpec parse_sweep(const json& j) {
  if (!j.is_object()) throw ConfigError("sweep: expected an object with name, from, to, step");
  SweepSpec s;
  s.name = field<std::string>(j, "name", "");
  if (!j.contains("from")) throw ConfigError("sweep.from: missing");
  s.from = field<double>(j, "from", 0.0);
  s.to = field<double>(j, "to", s.from);
  s.step = field<double>(j, "step", 1.0);
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig c;
  c.source_text = std::string(text);
  if (!j.contains("experiment")) throw ConfigError("experiment: missing");
  c.experiment = field<std::string>(j, "experiment", "");

  if (!j.contains("scene")) throw ConfigError("scene: missing");
  const auto scene = field<std::string>(j, "scene", "");
  if (scene.find('\n') != std::string::npos || scene.rfind("grid", 0) == 0) {
    c.scene_text = scene;
  } else {
    std::filesystem::path p(scene);
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) throw ConfigError("scene: file not found: " + p.string());
    c.scene_path = p.string();
    c.scene_text = read_text(p);
  }

  c.dt = field<double>(j, "dt", 0.1);
  c.steps = field<int>(j, "steps", 0);
  c.snapshot_every = field<int>(j, "snapshot_every", 0);
  c.out_dir = field<std::string>(j, "out_dir", ".");
  const auto integ = field<std::string>(j, "integrator", "trotter");
  if (integ == "trotter") {
    c.integrator = Integrator::Trotter;
  } else if (integ == "rk4") {
    c.integrator = Integrator::Rk4;
  } else {
    throw ConfigError("integrator: expected 'trotter' or 'rk4', got '" + integ + "'");
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (s.is_array()) {
      for (const auto& e : s) c.sweeps.push_back(parse_sweep(e));
    } else {
      c.sweeps.push_back(parse_sweep(s));
    }
  }
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"experiment", "scene", "dt", "steps", "sweep",
                                  "integrator", "out_dir", "snapshot_every"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known)) {
      c.options[key] = value;
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  auto c = parse_config(read_text(path), path.parent_path().empty() ? "." : path.parent_path());
  return c;
}

}  // namespace qod
