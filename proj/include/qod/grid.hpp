#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qod {

/// Periodic rectangular box discretized into Mx x My points.
///
/// Storage everywhere is row-major with x fastest: index = iy * Mx + ix.
class GridSpec {
public:
  GridSpec() = default;
  GridSpec(int mx, int my, double lx, double ly);

  int mx() const { return mx_; }
  int my() const { return my_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double dx() const { return lx_ / mx_; }
  double dy() const { return ly_ / my_; }
  /// Geometric mean box length, sqrt(Lx * Ly).
  double length() const;
  std::size_t modes() const { return static_cast<std::size_t>(mx_) * my_; }

  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * mx_ + ix;
  }
  double x(int ix) const { return ix * dx(); }
  double y(int iy) const { return iy * dy(); }

  /// Nearest grid index to a coordinate, wrapped into [0, M).
  int nearest_ix(double x) const;
  int nearest_iy(double y) const;

  bool operator==(const GridSpec&) const = default;

private:
  int mx_ = 0;
  int my_ = 0;
  double lx_ = 0.0;
  double ly_ = 0.0;
};

/// True when n has no prime factors other than 2, 3 and 5.
bool is_fft_friendly(int n);

/// Wavevectors dual to a GridSpec under the unitary DFT, with the photon
/// dispersion omega_k = |k|.
class KLattice {
public:
  explicit KLattice(const GridSpec& grid);

  double kx(int nx) const { return kx_[nx]; }
  double ky(int ny) const { return ky_[ny]; }
  double omega(std::size_t i) const { return omega_[i]; }
  const std::vector<double>& omegas() const { return omega_; }
  double dkx() const;
  double dky() const;

private:
  GridSpec grid_;
  std::vector<double> kx_;
  std::vector<double> ky_;
  std::vector<double> omega_;
};

enum class Polarization { H = 0, V = 1 };

/// Polarization selector for observables: one channel or both.
enum class PolSelect { H, V, Both };

inline bool selects(PolSelect s, int p) {
  return s == PolSelect::Both || static_cast<int>(s) == p;
}

/// Axis-aligned rectangle [x0, x1] x [y0, y1] in box coordinates.
struct Region {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool operator==(const Region&) const = default;
  /// Throws ContractError unless x0 <= x1, y0 <= y1 and the box holds it.
  void validate(const GridSpec& grid) const;
};

/// Grid indices whose points lie inside the region, in storage order.
std::vector<std::size_t> region_indices(const GridSpec& grid, const Region& region);

}  // namespace qod
