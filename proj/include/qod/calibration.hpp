#pragma once

#include <vector>

#include "qod/field.hpp"
#include "qod/scene.hpp"

namespace qod {

/// Straight-path transmission run used to calibrate a phase-shifter slab.
struct CalibrationSetup {
  Scene base;        // everything except the phase shifter
  SlabSpec shifter;  // layer count is overridden per run
  PacketParams packet;
  double dt = 0.1;
  int steps = 240;
};

struct PhaseCalibration {
  std::vector<int> layers;
  std::vector<double> phi;           // unwrapped, relative to layers == 0
  std::vector<double> transmission;  // |<ref|psi>|
  /// Phase for a calibrated layer count; throws ContractError otherwise.
  double phase_for(int layers) const;
  bool monotone() const;
};

/// Acquired phase per layer count. The phase is reported with the sign that
/// makes it grow with slab thickness: phi = -arg <ref(T)|psi_layers(T)>.
/// Throws NumericalError when the slab transmits less than 0.9 in amplitude.
PhaseCalibration calibrate_phase_shifter(const CalibrationSetup& setup, int first_layers,
                                         int last_layers);

/// Default straight-path setup for a vertical slab: empty copy of the grid, a
/// packet launched along +x twelve units upstream of the slab.
CalibrationSetup straight_path_setup(const GridSpec& grid, const SlabSpec& shifter,
                                     double k = 10.0, double sigma = 2.0, double dt = 0.1);

}  // namespace qod
