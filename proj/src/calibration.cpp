#include "qod/calibration.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qod/error.hpp"
#include "qod/evolution.hpp"

namespace qod {

double PhaseCalibration::phase_for(int n) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i] == n) return phi[i];
  }
  throw ContractError("no calibration entry for " + std::to_string(n) + " layers");
}

bool PhaseCalibration::monotone() const {
  for (std::size_t i = 1; i < phi.size(); ++i) {
    if (!(phi[i] > phi[i - 1])) return false;
  }
  return true;
}

namespace {

SinglePhotonState transmit(const CalibrationSetup& setup, int layers) {
  Scene scene = setup.base;
  if (layers > 0) {
    SlabSpec ps = setup.shifter;
    ps.layers = layers;
    scene.add_object(ps);
  }
  auto s = gaussian_packet(scene.grid(), setup.packet, scene.atoms().size());
  TrotterStepper(scene, setup.dt).advance(s, setup.steps);
  return s;
}

}  // namespace

PhaseCalibration calibrate_phase_shifter(const CalibrationSetup& setup, int first, int last) {
  if (first < 0 || last < first) throw ContractError("calibration layer range is empty");
  const auto ref = transmit(setup, 0);
  const double ref_norm = std::sqrt(field_inner(ref.field, ref.field).real());

  PhaseCalibration out;
  double prev = 0.0;
  bool have_prev = false;
  for (int n = first; n <= last; ++n) {
    cplx ov{1.0, 0.0};
    if (n > 0) {
      const auto s = transmit(setup, n);
      ov = field_inner(ref.field, s.field) / (ref_norm * ref_norm);
    }
    const double amp = std::abs(ov);
    if (amp < 0.9) {
      throw NumericalError("phase shifter with " + std::to_string(n) +
                           " layers transmits amplitude " + std::to_string(amp) +
                           "; it reflects rather than shifts the phase");
    }
    double phi = 0.0 - std::arg(ov);
    if (have_prev) {
      // unwrap against the previous entry
      while (phi - prev > std::numbers::pi) phi -= 2 * std::numbers::pi;
      while (phi - prev < -std::numbers::pi) phi += 2 * std::numbers::pi;
    }
    prev = phi;
    have_prev = true;
    out.layers.push_back(n);
    out.phi.push_back(phi);
    out.transmission.push_back(amp);
  }
  return out;
}

CalibrationSetup straight_path_setup(const GridSpec& grid, const SlabSpec& shifter, double k,
                                     double sigma, double dt) {
  CalibrationSetup s;
  s.base = Scene(grid);
  s.shifter = shifter;
  s.packet = PacketParams{sigma, k, 0.0, shifter.x - 12.0, shifter.y, 0.0};
  if (s.packet.x < 0) s.packet.x += grid.lx();
  s.dt = dt;
  s.steps = static_cast<int>(std::lround(24.0 / dt));
  return s;
}

}  // namespace qod
