#include "qod/grid.hpp"

#include <cmath>
#include <numbers>

#include "qod/error.hpp"

namespace qod {

GridSpec::GridSpec(int mx, int my, double lx, double ly)
    : mx_(mx), my_(my), lx_(lx), ly_(ly) {
  if (mx < 2 || my < 2 || !is_fft_friendly(mx) || !is_fft_friendly(my)) {
    throw ContractError("grid point counts must be >= 2 with only factors 2, 3, 5 (got " +
                        std::to_string(mx) + "x" + std::to_string(my) + ")");
  }
  if (!(lx > 0.0) || !(ly > 0.0)) {
    throw ContractError("box lengths must be positive");
  }
}

double GridSpec::length() const { return std::sqrt(lx_ * ly_); }

int GridSpec::nearest_ix(double x) const {
  const long i = std::lround(x / dx());
  return static_cast<int>(((i % mx_) + mx_) % mx_);
}

int GridSpec::nearest_iy(double y) const {
  const long i = std::lround(y / dy());
  return static_cast<int>(((i % my_) + my_) % my_);
}

bool is_fft_friendly(int n) {
  if (n < 1) return false;
  for (int p : {2, 3, 5}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

namespace {

std::vector<double> wavenumbers(int m, double len) {
  std::vector<double> k(m);
  for (int n = 0; n < m; ++n) {
    // signed Nyquist range: n >= m/2 maps to negative frequencies
    const int w = n < (m + 1) / 2 ? n : n - m;
    k[n] = 2.0 * std::numbers::pi * w / len;
  }
  return k;
}

}  // namespace

KLattice::KLattice(const GridSpec& grid)
    : grid_(grid),
      kx_(wavenumbers(grid.mx(), grid.lx())),
      ky_(wavenumbers(grid.my(), grid.ly())),
      omega_(grid.modes()) {
  for (int ny = 0; ny < grid.my(); ++ny) {
    for (int nx = 0; nx < grid.mx(); ++nx) {
      omega_[grid.index(nx, ny)] = std::hypot(kx_[nx], ky_[ny]);
    }
  }
}

double KLattice::dkx() const { return 2.0 * std::numbers::pi / grid_.lx(); }
double KLattice::dky() const { return 2.0 * std::numbers::pi / grid_.ly(); }

void Region::validate(const GridSpec& grid) const {
  if (x0 > x1 || y0 > y1) throw ContractError("region corners out of order");
  if (x0 < 0.0 || y0 < 0.0 || x1 > grid.lx() || y1 > grid.ly()) {
    throw ContractError("region extends outside the box");
  }
}

std::vector<std::size_t> region_indices(const GridSpec& grid, const Region& region) {
  std::vector<std::size_t> out;
  if (region.empty()) return out;
  for (int iy = 0; iy < grid.my(); ++iy) {
    const double y = grid.y(iy);
    if (y < region.y0 || y > region.y1) continue;
    for (int ix = 0; ix < grid.mx(); ++ix) {
      if (region.contains(grid.x(ix), y)) out.push_back(grid.index(ix, iy));
    }
  }
  return out;
}

}  // namespace qod
