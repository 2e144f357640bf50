#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "qod/calibration.hpp"
#include "qod/config.hpp"
#include "qod/results.hpp"
#include "qod/scene.hpp"

namespace qod {

/// Optional progress sink; the library is silent when unset.
void set_progress_log(std::function<void(std::string_view)> log);

/// Mach-Zehnder sweep over phase-shifter layers: columns phi, p_right.
/// The scene holds one phaseshifter (its layer count is swept) and a region
/// named "right".
ResultSeries run_mz(const ExperimentConfig& cfg, const Scene& scene);

/// Detector error rate 1 - P for each scatterer offset and detector width:
/// columns scatterer, dx, dy, width, error_rate. The scene holds the
/// scatterer at zero offset and a region "detector" fixing the x-range and
/// the window centre.
ResultSeries run_scatterer(const ExperimentConfig& cfg, const Scene& scene);

/// Two-photon dip against the delay of one packet: columns dx, p,
/// p_overlap, analytic, max_site_bunching. p is the probability of one
/// photon in region "right" and one in "up".
ResultSeries run_hom(const ExperimentConfig& cfg, const Scene& scene);

/// CHSH value per analyzer angle and entanglement weight: columns theta, c,
/// s, e_ab, e_apb, e_apbp, e_abp, s_ideal, max_site_bunching. The scene holds
/// two rotators (left one sets a/a', right one b/b').
ResultSeries run_chsh(const ExperimentConfig& cfg, const Scene& scene);

/// Rotator + polarizing splitter: columns theta_rot, p_v, p_v_total, ideal.
/// p_v is the V probability in region "reflected".
ResultSeries run_pol_test(const ExperimentConfig& cfg, const Scene& scene);

/// Norm and energy traces: columns integrator (0 trotter, 1 rk4), dt, t,
/// norm, energy.
ResultSeries run_stability(const ExperimentConfig& cfg, const Scene& scene);

/// Parses the config's scene and dispatches on cfg.experiment.
ResultSeries run_experiment(const ExperimentConfig& cfg);

/// Writes <experiment>_results.csv and <experiment>_manifest.txt to
/// cfg.out_dir. Returns the CSV path.
std::string write_run_outputs(const ExperimentConfig& cfg, const Scene& scene,
                              const ResultSeries& series, double wall_seconds);

/// Closed forms the experiments are compared with.
double hom_dip(double dx, double sigma);
/// S for (|HH> + c|VV>)/sqrt(1 + c^2) with half-wave-plate analyzers at
/// a = 0, b = theta, a' = 2 theta, b' = 3 theta.
double chsh_ideal(double theta, double c);

}  // namespace qod
