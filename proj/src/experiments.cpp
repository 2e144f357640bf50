#include "qod/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

#include "qod/error.hpp"
#include "qod/evolution.hpp"
#include "qod/format.hpp"
#include "qod/multiphoton.hpp"
#include "qod/snapshot.hpp"
#include "qod/version.hpp"

namespace qod {

using nlohmann::json;

namespace {

std::function<void(std::string_view)>& progress_sink() {
  static std::function<void(std::string_view)> sink;
  return sink;
}

std::mutex& progress_mutex() {
  static std::mutex m;
  return m;
}

void note(const std::string& msg) {
  std::lock_guard lock(progress_mutex());
  if (progress_sink()) progress_sink()(msg);
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Runs f(i) for i in [0, n) on up to `threads` workers; rethrows the first
// failure after all workers stop.
template <class F>
void parallel_for(std::size_t n, int threads, F f) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            f(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

int steps_for(const ExperimentConfig& cfg, double final_time) {
  if (cfg.steps > 0) return cfg.steps;
  return static_cast<int>(std::lround(final_time / cfg.dt));
}

std::vector<double> sweep_values(const ExperimentConfig& cfg, const std::string& name,
                                 SweepSpec fallback) {
  if (const auto* s = cfg.sweep(name)) return s->values();
  fallback.name = name;
  return fallback.values();
}

PacketParams packet_option(const ExperimentConfig& cfg, const char* key, PacketParams p) {
  if (!cfg.options.contains(key)) return p;
  const auto& j = cfg.options.at(key);
  if (!j.is_object()) throw ConfigError(std::string(key) + ": expected an object");
  try {
    p.sigma = j.value("sigma", p.sigma);
    p.kx = j.value("kx", p.kx);
    p.ky = j.value("ky", p.ky);
    p.x = j.value("x", p.x);
    p.y = j.value("y", p.y);
    p.theta_pol = j.value("theta_pol", p.theta_pol);
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": packet fields must be numbers");
  }
  if (!(p.sigma > 0.0)) throw ConfigError(std::string(key) + ".sigma: must be positive");
  return p;
}

// Copy of the scene with every object passed through `f`; nullopt drops it.
template <class F>
Scene rebuild(const Scene& s, F f) {
  Scene out(s.grid());
  for (const auto& o : s.objects()) {
    std::optional<SlabSpec> spec = f(o.spec);
    if (spec) out.add_object(*spec);
  }
  for (const auto& r : s.regions()) out.add_region(r.name, r.region);
  return out;
}

std::vector<std::size_t> objects_of(const Scene& s, ObjectKind kind) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.objects().size(); ++i) {
    if (s.objects()[i].spec.kind == kind) out.push_back(i);
  }
  return out;
}

const Region& required_region(const Scene& s, const std::string& name) {
  if (!s.has_region(name)) throw ConfigError("scene: region '" + name + "' is required");
  return s.region(name);
}

void check_finite(const SinglePhotonState& s) {
  if (!s.all_finite()) {
    throw NumericalError("non-finite amplitude detected at t = " + format_double(s.time));
  }
}

void snapshot(const ExperimentConfig& cfg, const std::string& tag, const SinglePhotonState& s,
              double t) {
  const auto path = std::filesystem::path(cfg.out_dir) /
                    (cfg.experiment + "_" + tag + "_" + label(t) + ".qf");
  write_qf01_file(path.string(), s.field, t);
}

// Single-photon evolution with the configured integrator, NaN checks every
// 100 steps and optional snapshots. on_step sees the state after each step.
template <class OnStep>
void evolve_single(SinglePhotonState& s, const Scene& scene, const ExperimentConfig& cfg,
                   Integrator integ, double dt, int steps, const std::string& tag,
                   OnStep on_step) {
  std::optional<TrotterStepper> trotter;
  std::optional<Rk4Integrator> rk4;
  if (integ == Integrator::Trotter) {
    trotter.emplace(scene, dt);
  } else {
    rk4.emplace(scene, dt);
  }
  if (cfg.snapshot_every > 0) snapshot(cfg, tag, s, 0.0);
  for (int i = 1; i <= steps; ++i) {
    if (trotter) {
      trotter->step(s);
    } else {
      rk4->step(s);
    }
    if (i % 100 == 0 || i == steps) check_finite(s);
    if (cfg.snapshot_every > 0 && i % cfg.snapshot_every == 0) snapshot(cfg, tag, s, i * dt);
    on_step(i, s);
  }
}

void evolve_single(SinglePhotonState& s, const Scene& scene, const ExperimentConfig& cfg,
                   int steps, const std::string& tag) {
  evolve_single(s, scene, cfg, cfg.integrator, cfg.dt, steps, tag, [](int, const SinglePhotonState&) {});
}

void require_trotter(const ExperimentConfig& cfg) {
  if (cfg.integrator != Integrator::Trotter) {
    throw ConfigError("integrator: rk4 is only available for single-photon experiments");
  }
}

// Lockstep two-photon evolution; returns the largest bunching density seen
// on an atom site.
double evolve_product(ProductState& st, const Scene& scene, const ExperimentConfig& cfg, int steps) {
  const TrotterStepper stepper(scene, cfg.dt);
  double worst = max_bunching_at_atoms(st, scene);
  for (int i = 1; i <= steps; ++i) {
    evolve_step(st, stepper);
    worst = std::max(worst, max_bunching_at_atoms(st, scene));
    if (i % 100 == 0 || i == steps) {
      for (const auto& f : st.factors()) check_finite(f);
    }
  }
  return worst;
}

int as_count(double v, const char* what) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 || r < 0) {
    throw ConfigError(std::string(what) + ": expected non-negative integers, got " + format_double(v));
  }
  return static_cast<int>(r);
}

}  // namespace

void set_progress_log(std::function<void(std::string_view)> log) {
  std::lock_guard lock(progress_mutex());
  progress_sink() = std::move(log);
}

double hom_dip(double dx, double sigma) {
  return 0.5 * (1.0 - std::exp(-dx * dx / (2 * sigma * sigma)));
}

double chsh_ideal(double theta, double c) {
  // half-wave plate at angle/2: H -> (cos, sin), V -> (sin, -cos)
  auto e = [&](double a, double b) {
    const double ra[2][2] = {{std::cos(a), std::sin(a)}, {std::sin(a), -std::cos(a)}};
    const double rb[2][2] = {{std::cos(b), std::sin(b)}, {std::sin(b), -std::cos(b)}};
    const double w[2] = {1.0, c};
    double out = 0.0;
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        double amp = 0.0;
        for (int s = 0; s < 2; ++s) amp += ra[p][s] * w[s] * rb[q][s];
        out += (p == q ? 1.0 : -1.0) * amp * amp;
      }
    }
    return out / (1.0 + c * c);
  };
  return e(0, theta) + e(2 * theta, theta) + e(2 * theta, 3 * theta) - e(0, 3 * theta);
}

ResultSeries run_mz(const ExperimentConfig& cfg, const Scene& scene) {
  const auto ps_ids = objects_of(scene, ObjectKind::PhaseShifter);
  if (ps_ids.size() != 1) throw ConfigError("scene: mz needs exactly one phaseshifter");
  const SlabSpec ps = scene.objects()[ps_ids[0]].spec;
  const Region right = required_region(scene, "right");
  const GridSpec& g = scene.grid();

  std::vector<int> layers;
  for (double v : sweep_values(cfg, "layers", {"", 0, 20, 1})) layers.push_back(as_count(v, "sweep.layers"));
  const PacketParams photon = packet_option(cfg, "photon", {2.0, 10.0, 0.0, 1.7, 7.7, 0.0});
  const int steps = steps_for(cfg, 40.0);

  note("mz: calibrating phase shifter");
  const int max_layers = *std::max_element(layers.begin(), layers.end());
  auto setup = straight_path_setup(g, ps, std::hypot(photon.kx, photon.ky), photon.sigma, cfg.dt);
  const auto cal = calibrate_phase_shifter(setup, 0, max_layers);

  std::vector<double> p_right(layers.size());
  parallel_for(layers.size(), cfg.threads, [&](std::size_t i) {
    const int n = layers[i];
    const Scene sc = rebuild(scene, [&](const SlabSpec& s) -> std::optional<SlabSpec> {
      if (s.kind != ObjectKind::PhaseShifter) return s;
      if (n == 0) return std::nullopt;
      SlabSpec t = s;
      t.layers = n;
      return t;
    });
    auto st = gaussian_packet(g, photon, sc.atoms().size());
    evolve_single(st, sc, cfg, steps, std::to_string(n));
    p_right[i] = region_probability(st, right);
    note("mz: layers " + std::to_string(n) + " p_right " + label(p_right[i]));
  });

  ResultSeries rs({"phi", "p_right"});
  for (std::size_t i = 0; i < layers.size(); ++i) rs.add_row({cal.phase_for(layers[i]), p_right[i]});
  std::string table;
  for (std::size_t i = 0; i < cal.layers.size(); ++i) {
    table += (i ? " " : "") + std::to_string(cal.layers[i]) + ":" + format_double(cal.phi[i]);
  }
  rs.meta["calibration"] = table;
  rs.meta["final_time"] = format_double(steps * cfg.dt);
  return rs;
}

ResultSeries run_scatterer(const ExperimentConfig& cfg, const Scene& scene) {
  const auto ids = objects_of(scene, ObjectKind::Scatterer);
  if (ids.size() != 1) throw ConfigError("scene: scatterer run needs exactly one scatterer");
  const SlabSpec base_spec = scene.objects()[ids[0]].spec;
  const GridSpec& g = scene.grid();
  const Region det = scene.has_region("detector") ? scene.region("detector")
                                                  : Region{g.lx() - 2.0, 0.0, g.lx(), g.ly()};
  const double yc = 0.5 * (det.y0 + det.y1);

  struct Offset {
    bool present;
    double dx, dy;
  };
  std::vector<Offset> offsets;
  if (cfg.options.value("baseline", true)) offsets.push_back({false, 0.0, 0.0});
  json list = cfg.options.contains("offsets") ? cfg.options.at("offsets")
                                              : json::parse("[[11.0, 0.0], [7.4, 0.0], [7.4, 0.6]]");
  if (!list.is_array()) throw ConfigError("offsets: expected an array of [dx, dy] pairs");
  for (const auto& o : list) {
    if (!o.is_array() || o.size() != 2 || !o[0].is_number() || !o[1].is_number()) {
      throw ConfigError("offsets: expected an array of [dx, dy] pairs");
    }
    offsets.push_back({true, o[0].get<double>(), o[1].get<double>()});
  }

  const auto widths = sweep_values(cfg, "width", {"", g.dy(), (g.my() - 1) * g.dy(), 2 * g.dy()});
  const PacketParams photon = packet_option(cfg, "photon", {2.0, 10.0, 0.0, 2.0, g.ly() / 2, 0.0});
  const int steps = steps_for(cfg, 59.8);

  std::vector<std::vector<double>> err(offsets.size());
  parallel_for(offsets.size(), cfg.threads, [&](std::size_t i) {
    const auto& o = offsets[i];
    const Scene sc = rebuild(scene, [&](const SlabSpec& s) -> std::optional<SlabSpec> {
      if (s.kind != ObjectKind::Scatterer) return s;
      if (!o.present) return std::nullopt;
      SlabSpec t = s;
      t.x = base_spec.x + o.dx;
      t.y = base_spec.y + o.dy;
      return t;
    });
    const std::string tag = o.present ? "dx" + label(o.dx) + "_dy" + label(o.dy) : "none";
    auto st = gaussian_packet(g, photon, sc.atoms().size());
    evolve_single(st, sc, cfg, steps, tag);
    snapshot(cfg, tag, st, steps * cfg.dt);
    for (double w : widths) {
      const Region r{det.x0, std::max(0.0, yc - w / 2), det.x1, std::min(g.ly(), yc + w / 2)};
      err[i].push_back(1.0 - region_probability(st, r));
    }
    note("scatterer: " + tag + " done");
  });

  ResultSeries rs({"scatterer", "dx", "dy", "width", "error_rate"});
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    for (std::size_t k = 0; k < widths.size(); ++k) {
      rs.add_row({offsets[i].present ? 1.0 : 0.0, offsets[i].dx, offsets[i].dy, widths[k], err[i][k]});
    }
  }
  rs.meta["final_time"] = format_double(steps * cfg.dt);
  return rs;
}

ResultSeries run_hom(const ExperimentConfig& cfg, const Scene& scene) {
  require_trotter(cfg);
  const GridSpec& g = scene.grid();
  const Region right = required_region(scene, "right");
  const Region up = required_region(scene, "up");
  const PacketParams xi = packet_option(cfg, "xi", {2.0, 5.0, 0.0, 5.0, g.ly() / 2, 0.0});
  const PacketParams eta = packet_option(cfg, "eta", {2.0, 0.0, 5.0, g.lx() / 2, 5.0, 0.0});
  const auto shifts = sweep_values(cfg, "dx", {"", 0.0, 10.0, 0.5});
  const int steps = steps_for(cfg, 45.0);
  const double t_final = steps * cfg.dt;
  const Scene empty(g);
  const TrotterStepper free_flight(empty, t_final);  // exact without atoms

  std::vector<std::array<double, 4>> out(shifts.size());
  parallel_for(shifts.size(), cfg.threads, [&](std::size_t i) {
    // delay rather than advance: an early photon would wrap into the other outlet band by T
    PacketParams x = xi;
    x.x = std::fmod(xi.x - shifts[i] + g.lx(), g.lx());
    auto st = hom_initial(g, scene.atoms().size(), x, eta);
    const double bunch = evolve_product(st, scene, cfg, steps);

    auto ref_free = hom_initial(g, 0, x, eta);
    evolve(ref_free, free_flight, 1);
    ProductState ref(g, scene.atoms().size(), 2);
    for (const auto& f : ref_free.factors()) {
      SinglePhotonState s(g, scene.atoms().size());
      s.field = f.field;
      ref.add_factor(std::move(s));
    }
    for (const auto& t : ref_free.terms()) ref.add_term(t.coeff, t.factors);
    ref.set_time(st.time());

    out[i] = {coincidence_probability(st, right, up), coincidence_overlap(st, ref),
              hom_dip(shifts[i], xi.sigma), bunch};
    note("hom: dx " + label(shifts[i]) + " p " + label(out[i][0]));
  });

  ResultSeries rs({"dx", "p", "p_overlap", "analytic", "max_site_bunching"});
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    rs.add_row({shifts[i], out[i][0], out[i][1], out[i][2], out[i][3]});
  }
  rs.meta["final_time"] = format_double(t_final);
  return rs;
}

ResultSeries run_chsh(const ExperimentConfig& cfg, const Scene& scene) {
  require_trotter(cfg);
  const GridSpec& g = scene.grid();
  const auto rot = objects_of(scene, ObjectKind::Rotator);
  if (rot.size() != 2) throw ConfigError("scene: chsh needs exactly two rotators");
  const std::size_t left = scene.objects()[rot[0]].spec.x <= scene.objects()[rot[1]].spec.x ? rot[0] : rot[1];

  const auto thetas = sweep_values(cfg, "theta", {"", 0.0, std::numbers::pi / 2, std::numbers::pi / 32});
  std::vector<double> cs;
  if (cfg.sweep("c")) {
    cs = cfg.sweep("c")->values();
  } else if (cfg.options.contains("c")) {
    try {
      cs = cfg.options.at("c").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError("c: expected an array of numbers");
    }
  } else {
    cs = {1.0, 0.0};
  }
  for (double c : cs) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("c: values must lie in [0, 1]");
  }
  const PacketParams xi = packet_option(cfg, "xi", {2.0, -10.0, 0.0, g.lx() / 2, g.ly() / 2, 0.0});
  const PacketParams eta = packet_option(cfg, "eta", {2.0, 10.0, 0.0, g.lx() / 2, g.ly() / 2, 0.0});
  const int steps = steps_for(cfg, 30.0);
  const bool maps = cfg.options.value("density_maps", false);

  struct Row {
    double theta, c, s;
    std::array<double, 4> e;
    double ideal, bunch;
  };
  std::vector<std::vector<Row>> rows(thetas.size());
  parallel_for(thetas.size(), cfg.threads, [&](std::size_t i) {
    const double th = thetas[i];
    const std::array<std::pair<double, double>, 4> pairs{
        {{0.0, th}, {2 * th, th}, {2 * th, 3 * th}, {0.0, 3 * th}}};
    std::vector<ProductState> evolved;
    std::vector<Scene> scenes;
    double bunch = 0.0;
    for (const auto& [a, b] : pairs) {
      std::size_t k = 0;
      Scene sc = rebuild(scene, [&](const SlabSpec& s) -> std::optional<SlabSpec> {
        const std::size_t id = k++;
        if (s.kind != ObjectKind::Rotator) return s;
        SlabSpec t = s;
        t.theta_rot = id == left ? a : b;
        return t;
      });
      auto st = bell_initial(1.0, g, sc.atoms().size(), xi, eta);
      bunch = std::max(bunch, evolve_product(st, sc, cfg, steps));
      evolved.push_back(std::move(st));
      scenes.push_back(std::move(sc));
    }
    for (double c : cs) {
      std::vector<ProductState> states;
      for (const auto& e : evolved) {
        ProductState s = e;
        // term order from bell_initial: HH, VV, swapped HH, swapped VV
        s.set_coefficient(0, 0.5);
        s.set_coefficient(1, 0.5 * c);
        s.set_coefficient(2, 0.5);
        s.set_coefficient(3, 0.5 * c);
        s.normalize();
        states.push_back(std::move(s));
      }
      const auto r = chsh_correlation(states);
      rows[i].push_back({th, c, r.s, r.e, chsh_ideal(th, c), bunch});
      if (maps) {
        const auto d = chsh_density(states, scenes[0]);
        PolarizedField f(g);
        for (std::size_t n = 0; n < d.size(); ++n) f.planes[0][n] = d[n];
        const auto path = std::filesystem::path(cfg.out_dir) /
                          ("chsh_density_" + label(th) + "_c" + label(c) + ".qf");
        write_qf01_file(path.string(), f, steps * cfg.dt);
      }
    }
    note("chsh: theta " + label(th) + " done");
  });

  ResultSeries rs({"theta", "c", "s", "e_ab", "e_apb", "e_apbp", "e_abp", "s_ideal", "max_site_bunching"});
  for (const auto& per_theta : rows) {
    for (const auto& r : per_theta) {
      rs.add_row({r.theta, r.c, r.s, r.e[0], r.e[1], r.e[2], r.e[3], r.ideal, r.bunch});
    }
  }
  rs.meta["final_time"] = format_double(steps * cfg.dt);
  return rs;
}

ResultSeries run_pol_test(const ExperimentConfig& cfg, const Scene& scene) {
  const GridSpec& g = scene.grid();
  if (objects_of(scene, ObjectKind::Rotator).size() != 1) {
    throw ConfigError("scene: pol test needs exactly one rotator");
  }
  const Region outlet = required_region(scene, "reflected");
  const auto angles = sweep_values(cfg, "theta_rot", {"", 0.0, std::numbers::pi / 2, std::numbers::pi / 16});
  const PacketParams photon = packet_option(cfg, "photon", {2.0, 10.0, 0.0, 2.0, g.ly() / 2, 0.0});
  const int steps = steps_for(cfg, 36.0);

  std::vector<std::array<double, 2>> out(angles.size());
  parallel_for(angles.size(), cfg.threads, [&](std::size_t i) {
    const Scene sc = rebuild(scene, [&](const SlabSpec& s) -> std::optional<SlabSpec> {
      if (s.kind != ObjectKind::Rotator) return s;
      SlabSpec t = s;
      t.theta_rot = angles[i];
      return t;
    });
    auto st = gaussian_packet(g, photon, sc.atoms().size());
    evolve_single(st, sc, cfg, steps, label(angles[i]));
    double v_total = 0.0;
    for (double d : number_density(st, PolSelect::V)) v_total += d;
    for (const auto& a : st.atoms) v_total += std::norm(a[1]);
    out[i] = {region_probability(st, outlet, PolSelect::V), v_total};
    note("pol: theta_rot " + label(angles[i]) + " p_v " + label(out[i][0]));
  });

  ResultSeries rs({"theta_rot", "p_v", "p_v_total", "ideal"});
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double s = std::sin(angles[i]);
    rs.add_row({angles[i], out[i][0], out[i][1], s * s});
  }
  rs.meta["final_time"] = format_double(steps * cfg.dt);
  return rs;
}

ResultSeries run_stability(const ExperimentConfig& cfg, const Scene& scene) {
  const GridSpec& g = scene.grid();
  const PacketParams photon = packet_option(cfg, "photon", {1.0, 5.0, 0.0, 5.0, g.ly() / 2, 0.0});
  const double t_end = cfg.options.value("final_time", 50.0);

  std::vector<double> dts{cfg.dt};
  if (cfg.options.contains("dts")) {
    try {
      dts = cfg.options.at("dts").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError("dts: expected an array of numbers");
    }
    for (double d : dts) {
      if (!(d > 0.0)) throw ConfigError("dts: time steps must be positive");
    }
  }
  std::vector<Integrator> integs{Integrator::Trotter, Integrator::Rk4};
  if (cfg.options.contains("integrators")) {
    integs.clear();
    for (const auto& v : cfg.options.at("integrators")) {
      const auto name = v.is_string() ? v.get<std::string>() : "";
      if (name == "trotter") {
        integs.push_back(Integrator::Trotter);
      } else if (name == "rk4") {
        integs.push_back(Integrator::Rk4);
      } else {
        throw ConfigError("integrators: expected 'trotter' or 'rk4'");
      }
    }
  }

  struct Job {
    Integrator integ;
    double dt;
  };
  std::vector<Job> jobs;
  for (auto in : integs) {
    for (double d : dts) jobs.push_back({in, d});
  }
  std::vector<std::vector<std::array<double, 3>>> traces(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const auto [integ, dt] = jobs[i];
    const int steps = cfg.steps > 0 ? cfg.steps : static_cast<int>(std::lround(t_end / dt));
    const Hamiltonian h(scene);
    auto st = gaussian_packet(g, photon, scene.atoms().size());
    traces[i].push_back({0.0, st.norm2(), h.energy(st).total});
    evolve_single(st, scene, cfg, integ, dt, steps,
                  std::string(to_string(integ)) + "_" + label(dt),
                  [&](int n, const SinglePhotonState& s) {
                    traces[i].push_back({n * dt, s.norm2(), h.energy(s).total});
                  });
    note("stability: " + std::string(to_string(integ)) + " dt " + label(dt) + " done");
  });

  ResultSeries rs({"integrator", "dt", "t", "norm", "energy"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    for (const auto& r : traces[i]) {
      rs.add_row({jobs[i].integ == Integrator::Trotter ? 0.0 : 1.0, jobs[i].dt, r[0], r[1], r[2]});
    }
  }
  rs.meta["integrator_codes"] = "0=trotter 1=rk4";
  return rs;
}

ResultSeries run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Scene scene;
  try {
    scene = parse_scene(cfg.scene_text);
  } catch (const ParseError& e) {
    throw ConfigError("scene" + (cfg.scene_path.empty() ? std::string() : " " + cfg.scene_path) +
                      ": " + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("scene: ") + e.what());
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());

  if (cfg.experiment == "mz") return run_mz(cfg, scene);
  if (cfg.experiment == "scatterer") return run_scatterer(cfg, scene);
  if (cfg.experiment == "hom") return run_hom(cfg, scene);
  if (cfg.experiment == "chsh") return run_chsh(cfg, scene);
  if (cfg.experiment == "pol") return run_pol_test(cfg, scene);
  if (cfg.experiment == "stability") return run_stability(cfg, scene);
  throw ConfigError("experiment: unknown experiment '" + cfg.experiment + "'");
}

std::string write_run_outputs(const ExperimentConfig& cfg, const Scene& scene,
                              const ResultSeries& series, double wall_seconds) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
  const auto csv = (fs::path(cfg.out_dir) / (cfg.experiment + "_results.csv")).string();
  series.write_csv_file(csv);

  const auto manifest = (fs::path(cfg.out_dir) / (cfg.experiment + "_manifest.txt")).string();
  std::ofstream m(manifest, std::ios::binary);
  if (!m) throw IoError("cannot open " + manifest + " for writing");
  m << "qod " << kVersion << '\n'
    << "experiment " << cfg.experiment << '\n'
    << "scene_hash " << scene_hash(scene) << '\n'
    << "grid " << scene.grid().mx() << ' ' << scene.grid().my() << ' '
    << format_double(scene.grid().lx()) << ' ' << format_double(scene.grid().ly()) << '\n'
    << "dt " << format_double(cfg.dt) << '\n'
    << "integrator " << to_string(cfg.integrator) << '\n'
    << "threads " << cfg.threads << '\n'
    << "wall_seconds " << format_double(wall_seconds) << '\n'
    << "rows " << series.size() << '\n';
  for (const auto& [k, v] : series.meta) m << "meta." << k << ' ' << v << '\n';
  m << "--- config\n" << cfg.source_text;
  if (!cfg.source_text.empty() && cfg.source_text.back() != '\n') m << '\n';
  m << "--- scene\n" << cfg.scene_text;
  if (!cfg.scene_text.empty() && cfg.scene_text.back() != '\n') m << '\n';
  if (!m) throw IoError("failed writing " + manifest);
  return csv;
}

}  // namespace qod
