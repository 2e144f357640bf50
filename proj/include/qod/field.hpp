#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qod/grid.hpp"

namespace qod {

using cplx = std::complex<double>;

namespace detail {
void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free(void* p) noexcept;
}  // namespace detail

/// Allocator handing out SIMD-aligned storage, so transform plans can run
/// on any plane without re-planning.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(detail::aligned_alloc_bytes(n * sizeof(T)));
  }
  void deallocate(T* p, std::size_t) noexcept { detail::aligned_free(p); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using Plane = std::vector<cplx, AlignedAllocator<cplx>>;

enum class Representation { Position, Wavevector };

/// Unitary 2D DFT for one grid shape. Thread-safe to execute concurrently.
class Fft2d {
public:
  /// Shared plan for a grid shape; planning is serialized internally.
  static std::shared_ptr<const Fft2d> for_grid(const GridSpec& grid);

  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  /// c(k) = N^{-1/2} sum_r c(r) exp(-i k.r), in place.
  void forward(Plane& plane) const;
  /// c(r) = N^{-1/2} sum_k c(k) exp(+i k.r), in place.
  void inverse(Plane& plane) const;
  /// Unnormalized variants; a forward/inverse pair scales by N.
  void forward_raw(Plane& plane) const;
  void inverse_raw(Plane& plane) const;

private:
  explicit Fft2d(const GridSpec& grid);
  void execute(void* plan, Plane& plane, bool normalize) const;

  GridSpec grid_;
  void* forward_ = nullptr;
  void* inverse_ = nullptr;
  double scale_ = 1.0;
};

/// Two complex planes (H, V) over one grid, tagged with their representation.
struct PolarizedField {
  GridSpec grid;
  Representation rep = Representation::Position;
  std::array<Plane, 2> planes;

  PolarizedField() = default;
  explicit PolarizedField(const GridSpec& g, Representation r = Representation::Position);

  Plane& plane(int p) { return planes[p]; }
  const Plane& plane(int p) const { return planes[p]; }
  double norm2() const;
};

PolarizedField dft_forward(PolarizedField field);
PolarizedField dft_inverse(PolarizedField field);

/// Amplitudes of an atom in its H and V excitation channels.
using AtomAmps = std::array<cplx, 2>;

/// One photon in the single-excitation sector: field in position
/// representation plus atom excitation amplitudes.
struct SinglePhotonState {
  PolarizedField field;
  std::vector<AtomAmps> atoms;
  double time = 0.0;

  SinglePhotonState() = default;
  SinglePhotonState(const GridSpec& grid, std::size_t n_atoms);

  const GridSpec& grid() const { return field.grid; }
  double norm2() const;
  /// Scales every amplitude by s.
  void scale(cplx s);
  /// this += s * other
  void axpy(cplx s, const SinglePhotonState& other);
  bool all_finite() const;
};

/// <a|b> over field and atom channels.
cplx inner(const SinglePhotonState& a, const SinglePhotonState& b);

/// <a|b> over the photon field only; atom sets may differ.
cplx field_inner(const PolarizedField& a, const PolarizedField& b);

/// Photon number density summed over the selected polarizations.
std::vector<double> number_density(const SinglePhotonState& s, PolSelect p = PolSelect::Both);

/// Photon probability inside a region for the selected polarizations.
double region_probability(const SinglePhotonState& s, const Region& region,
                          PolSelect p = PolSelect::Both);

struct PacketParams {
  double sigma = 2.0;
  double kx = 0.0;
  double ky = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta_pol = 0.0;
};

/// Gaussian wave packet with all atoms in the ground state, renormalized to
/// unit discrete norm. The centre is snapped to the nearest grid point.
SinglePhotonState gaussian_packet(const GridSpec& grid, const PacketParams& params,
                                  std::size_t n_atoms = 0);

/// Discrete norm^2 of the continuum prefactor 2 sigma sqrt(pi) / L applied on
/// the k-lattice, before renormalization.
double gaussian_raw_norm2(const GridSpec& grid, const PacketParams& params);

}  // namespace qod
