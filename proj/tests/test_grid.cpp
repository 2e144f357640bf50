#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qod/error.hpp"
#include "qod/grid.hpp"

using namespace qod;

TEST_CASE("grid spacing and indexing") {
  const GridSpec g(64, 32, 8.0, 2.0);
  CHECK(g.dx() == doctest::Approx(0.125));
  CHECK(g.dy() == doctest::Approx(0.0625));
  CHECK(g.modes() == 64u * 32u);
  CHECK(g.index(3, 2) == 2u * 64u + 3u);
  CHECK(g.length() == doctest::Approx(4.0));
  CHECK(g.nearest_ix(8.0) == 0);
  CHECK(g.nearest_ix(-0.125) == 63);
  CHECK(g.nearest_iy(1.0) == 16);
}

TEST_CASE("grid rejects counts FFTW handles poorly") {
  CHECK(is_fft_friendly(256));
  CHECK(is_fft_friendly(384));
  CHECK(is_fft_friendly(360));
  CHECK_FALSE(is_fft_friendly(7));
  CHECK_FALSE(is_fft_friendly(0));
  CHECK_THROWS_AS(GridSpec(14, 16, 1.0, 1.0), ContractError);
  CHECK_THROWS_AS(GridSpec(1, 16, 1.0, 1.0), ContractError);
  CHECK_THROWS_AS(GridSpec(16, 16, 0.0, 1.0), ContractError);
}

TEST_CASE("k lattice follows FFT ordering and omega = |k|") {
  const GridSpec g(8, 4, 2 * std::numbers::pi, std::numbers::pi);
  const KLattice k(g);
  CHECK(k.dkx() == doctest::Approx(1.0));
  CHECK(k.dky() == doctest::Approx(2.0));
  CHECK(k.kx(0) == 0.0);
  CHECK(k.kx(3) == doctest::Approx(3.0));
  CHECK(k.kx(4) == doctest::Approx(-4.0));
  CHECK(k.kx(7) == doctest::Approx(-1.0));
  CHECK(k.ky(3) == doctest::Approx(-2.0));
  const std::size_t i = g.index(2, 1);
  CHECK(k.omega(i) == doctest::Approx(std::hypot(2.0, 2.0)));
}

TEST_CASE("regions select grid points inclusively") {
  const GridSpec g(16, 16, 16.0, 16.0);
  const Region r{2.0, 3.0, 4.0, 3.5};
  const auto idx = region_indices(g, r);
  REQUIRE(idx.size() == 3u);
  CHECK(idx[0] == g.index(2, 3));
  CHECK(idx[2] == g.index(4, 3));
  CHECK((region_indices(g, Region{1, 1, 1, 5}).empty()));

  CHECK_NOTHROW((Region{0, 0, 16, 16}.validate(g)));
  CHECK_THROWS_AS((Region{0, 0, 17, 16}.validate(g)), ContractError);
  CHECK_THROWS_AS((Region{5, 0, 4, 16}.validate(g)), ContractError);
}
