// qod command-line driver: run experiments, check scenes, calibrate phase
// shifters and compare the split-step integrator with the dense propagator.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qod/calibration.hpp"
#include "qod/config.hpp"
#include "qod/error.hpp"
#include "qod/evolution.hpp"
#include "qod/experiments.hpp"
#include "qod/format.hpp"
#include "qod/oracle.hpp"
#include "qod/version.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw qod::ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int threads_from_env() {
  if (const char* v = std::getenv("QOD_THREADS")) {
    try {
      const int n = std::stoi(v);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw qod::ConfigError(std::string("QOD_THREADS: expected a positive integer, got '") + v + "'");
  }
  return 1;
}

struct RunArgs {
  std::string config;
  std::string positional;
  std::optional<std::string> out;
  std::optional<double> dt;
  std::optional<std::string> integrator;
  std::optional<int> threads;
  std::optional<int> snapshot_every;
  bool quiet = false;
};

int cmd_run(const RunArgs& a) {
  const std::string path = !a.config.empty() ? a.config : a.positional;
  if (path.empty()) throw qod::ConfigError("run: no config given (use --config or a positional path)");
  auto cfg = qod::load_config(path);
  if (a.out) cfg.out_dir = *a.out;
  if (a.dt) cfg.dt = *a.dt;
  if (a.integrator) {
    if (*a.integrator == "trotter") {
      cfg.integrator = qod::Integrator::Trotter;
    } else if (*a.integrator == "rk4") {
      cfg.integrator = qod::Integrator::Rk4;
    } else {
      throw qod::ConfigError("--integrator: expected trotter or rk4");
    }
  }
  cfg.threads = a.threads ? *a.threads : threads_from_env();
  if (a.snapshot_every) cfg.snapshot_every = *a.snapshot_every;
  cfg.validate();

  if (!a.quiet) {
    qod::set_progress_log([](std::string_view m) { std::cerr << m << '\n'; });
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto series = qod::run_experiment(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto csv = qod::write_run_outputs(cfg, qod::parse_scene(cfg.scene_text), series, wall);
  std::cout << "wrote " << csv << " (" << series.size() << " rows)\n";
  return kOk;
}

int cmd_scene_check(const std::string& path) {
  qod::Scene s;
  try {
    s = qod::parse_scene(read_file(path));
  } catch (const qod::ParseError& e) {
    throw qod::ConfigError(path + ":" + e.what());
  }
  const auto& g = s.grid();
  std::cout << "grid " << g.mx() << " x " << g.my() << ", box " << qod::format_double(g.lx())
            << " x " << qod::format_double(g.ly()) << '\n';
  for (const auto& o : s.objects()) {
    std::cout << "  " << qod::to_string(o.spec.kind) << " at (" << qod::format_double(o.spec.x) << ", "
              << qod::format_double(o.spec.y) << "): " << o.atom_count << " atoms\n";
  }
  for (const auto& r : s.regions()) std::cout << "  region " << r.name << '\n';
  std::cout << "atoms " << s.atoms().size() << "\nhash " << qod::scene_hash(s) << '\n';
  return kOk;
}

int cmd_calibrate(const std::string& path, int max_layers, double dt, double k) {
  const auto s = qod::parse_scene(read_file(path));
  const qod::SlabSpec* ps = nullptr;
  for (const auto& o : s.objects()) {
    if (o.spec.kind == qod::ObjectKind::PhaseShifter) ps = &o.spec;
  }
  if (!ps) throw qod::ConfigError(path + ": no phaseshifter in scene");
  const auto setup = qod::straight_path_setup(s.grid(), *ps, k, 2.0, dt);
  const auto cal = qod::calibrate_phase_shifter(setup, 0, max_layers);
  std::cout << "layers,phi,transmission\n";
  for (std::size_t i = 0; i < cal.layers.size(); ++i) {
    std::cout << cal.layers[i] << ',' << qod::format_double(cal.phi[i]) << ','
              << qod::format_double(cal.transmission[i]) << '\n';
  }
  if (!cal.monotone()) std::cerr << "warning: phase is not monotone in layer count\n";
  return kOk;
}

int cmd_oracle(int n, int atoms, std::vector<double> dts, double t) {
  if (n > 16 || n < 2) throw qod::ConfigError("--grid: oracle grids are 2..16 points per side");
  const std::size_t dim = 2 * static_cast<std::size_t>(n) * n + 2 * static_cast<std::size_t>(atoms);
  if (dim > qod::kDenseOracleMaxDim) throw qod::ConfigError("oracle dimension exceeds the dense cap");
  if (dts.empty()) dts = {0.1, 0.05, 0.025};
  const auto scene = qod::oracle_scene(n, atoms);
  const auto r = qod::oracle_check(scene, qod::oracle_initial(scene), dts, t);
  std::cout << "dt,l2_error,order\n";
  for (std::size_t i = 0; i < r.dts.size(); ++i) {
    std::cout << qod::format_double(r.dts[i]) << ',' << qod::format_double(r.errors[i]) << ',';
    if (i > 0 && i - 1 < r.orders.size()) {
      std::cout << qod::format_double(r.orders[i - 1]);
    } else {
      std::cout << "n/a";
    }
    std::cout << '\n';
  }
  if (r.exact) {
    std::cout << "splitting exact to roundoff\n";
  } else if (r.orders.empty()) {
    std::cout << "order n/a\n";
  }
  return r.order_ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum optical dynamics on a 2D grid"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config_path", run_args.positional, "config file");
  run->add_option("--config", run_args.config, "config file");
  run->add_option("--out", run_args.out, "output directory");
  run->add_option("--dt", run_args.dt, "time step override");
  run->add_option("--integrator", run_args.integrator, "trotter or rk4")
      ->check(CLI::IsMember({"trotter", "rk4"}));
  run->add_option("--threads", run_args.threads, "worker threads (default $QOD_THREADS or 1)");
  run->add_option("--snapshot-every", run_args.snapshot_every, "write a QF01 snapshot every k steps");
  run->add_flag("--quiet", run_args.quiet, "no progress output");

  std::string scene_path;
  auto* check = app.add_subcommand("scene-check", "parse and summarize a scene file");
  check->add_option("scene", scene_path, "scene file")->required();

  std::string cal_path;
  int cal_layers = 20;
  double cal_dt = 0.1;
  double cal_k = 10.0;
  auto* cal = app.add_subcommand("calibrate-ps", "phase per phase-shifter layer count");
  cal->add_option("scene", cal_path, "scene file holding one phaseshifter")->required();
  cal->add_option("--max-layers", cal_layers, "largest layer count")->check(CLI::NonNegativeNumber);
  cal->add_option("--dt", cal_dt, "time step")->check(CLI::PositiveNumber);
  cal->add_option("--k", cal_k, "packet wavenumber")->check(CLI::PositiveNumber);

  int or_grid = 8;
  int or_atoms = 2;
  std::vector<double> or_dts;
  double or_time = 1.0;
  auto* oracle = app.add_subcommand("oracle-check", "split-step vs dense propagator on a tiny grid");
  oracle->add_option("--grid", or_grid, "points per side (<= 16)");
  oracle->add_option("--atoms", or_atoms, "atom count (0..3)")->check(CLI::Range(0, 3));
  oracle->add_option("--dt", or_dts, "time steps, largest first")->expected(1, -1);
  oracle->add_option("--time", or_time, "final time")->check(CLI::PositiveNumber);

  auto* version = app.add_subcommand("version", "print the library version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*check) return cmd_scene_check(scene_path);
    if (*cal) return cmd_calibrate(cal_path, cal_layers, cal_dt, cal_k);
    if (*oracle) return cmd_oracle(or_grid, or_atoms, or_dts, or_time);
    if (*version) {
      std::cout << "qod " << qod::kVersion << '\n';
      return kOk;
    }
  } catch (const qod::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const qod::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfig;
  } catch (const qod::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const qod::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const qod::ContractError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
