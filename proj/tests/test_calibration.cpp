#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qod/calibration.hpp"
#include "qod/error.hpp"

using namespace qod;

TEST_CASE("phase-shifter calibration grows with thickness") {
  const double L = 10 * std::numbers::pi;
  const GridSpec g(256, 128, L, L / 2);
  const SlabSpec ps{ObjectKind::PhaseShifter, 16.0, L / 4, 0, 64, 0, 0.56, 1.0};
  const auto setup = straight_path_setup(g, ps);
  CHECK(setup.packet.x == doctest::Approx(4.0));
  CHECK(setup.packet.kx == 10.0);
  CHECK(setup.steps == 240);
  CHECK(setup.base.atoms().empty());

  const auto cal = calibrate_phase_shifter(setup, 0, 4);
  REQUIRE(cal.layers.size() == 5u);
  CHECK(cal.layers.front() == 0);
  CHECK(cal.phi[0] == 0.0);
  CHECK_FALSE(std::signbit(cal.phi[0]));
  CHECK(cal.monotone());
  CHECK(cal.phi[1] > 0.0);
  // thin slabs: phase roughly proportional to the layer count
  CHECK(cal.phi[4] == doctest::Approx(4 * cal.phi[1]).epsilon(0.15));
  for (double t : cal.transmission) CHECK(t > 0.9);
  CHECK(cal.phase_for(3) == cal.phi[3]);
  CHECK_THROWS_AS(cal.phase_for(7), ContractError);
}

TEST_CASE("calibration of a reflecting slab is refused") {
  const double L = 10 * std::numbers::pi;
  const GridSpec g(256, 128, L, L / 2);
  // mirror-strength atoms in place of a phase shifter
  const SlabSpec ps{ObjectKind::PhaseShifter, 16.0, L / 4, 0, 64, 0, 2.0, 10.0};
  CHECK_THROWS_AS(calibrate_phase_shifter(straight_path_setup(g, ps), 0, 6), NumericalError);
}

TEST_CASE("monotone check") {
  PhaseCalibration c;
  c.layers = {0, 1, 2};
  c.phi = {0.0, 0.2, 0.1};
  CHECK_FALSE(c.monotone());
  c.phi = {0.0, 0.1, 0.2};
  CHECK(c.monotone());
}
