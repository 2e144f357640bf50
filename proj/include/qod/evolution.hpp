#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "qod/field.hpp"
#include "qod/scene.hpp"

namespace qod {

/// Per-atom coupling data derived from a Scene.
///
/// W = -i D sqrt(N omega) / (sqrt(2) L) per channel, from collapsing the
/// k-sum of g(j,k) = -i sqrt(omega_j) D e^{ik.r_j} / (sqrt(2) L) onto the atom
/// site under the unitary transform. The atom frequency replaces sqrt(omega_k)
/// (resonance approximation) and the constant -N_A * mean(omega) energy offset
/// is dropped since it only contributes a global phase.
struct AtomSite {
  std::size_t index = 0;  // grid storage index of the atom
  double cos_axis = 1.0;
  double sin_axis = 0.0;
  bool rotated = false;
  std::array<cplx, 2> w{};  // channel couplings, purely imaginary
  double two_omega = 0.0;   // excitation energy 2 omega_j
};

std::vector<AtomSite> atom_sites(const Scene& scene);

/// Field components at the site and atom amplitudes expressed in the atom's
/// channel basis.
struct ChannelPair {
  std::array<cplx, 2> field;
  std::array<cplx, 2> atom;
};

struct EnergyBreakdown {
  double photon = 0.0;
  double atom = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

/// h = h0 + hI for one scene; applies it and measures energies.
class Hamiltonian {
public:
  explicit Hamiltonian(const Scene& scene);

  /// h|phi>, returned in position representation.
  SinglePhotonState apply(const SinglePhotonState& state) const;
  EnergyBreakdown energy(const SinglePhotonState& state) const;

  const GridSpec& grid() const { return grid_; }
  const std::vector<AtomSite>& sites() const { return sites_; }
  const std::vector<double>& omegas() const { return omega_k_; }

  /// Adds hI applied to `in` (position representation) into `out`.
  void add_interaction(const SinglePhotonState& in, SinglePhotonState& out) const;

private:
  GridSpec grid_;
  std::vector<double> omega_k_;
  std::vector<AtomSite> sites_;
  std::shared_ptr<const Fft2d> fft_;
};

SinglePhotonState apply_h(const Scene& scene, const SinglePhotonState& state);
EnergyBreakdown energy(const Scene& scene, const SinglePhotonState& state);

/// Second-order symmetric split-step integrator:
/// exp(-i hI dt/2) exp(-i h0 dt) exp(-i hI dt/2).
class TrotterStepper {
public:
  TrotterStepper(const Scene& scene, double dt);

  void step(SinglePhotonState& state) const;
  void advance(SinglePhotonState& state, int steps) const;

  double dt() const { return dt_; }
  const GridSpec& grid() const { return grid_; }
  std::size_t atom_count() const { return sites_.size(); }

  /// Half-step unitary acting on (field, atom) for the given atom channel.
  std::array<cplx, 4> half_step_unitary(std::size_t atom, int channel) const {
    return half_[atom][channel];
  }

private:
  void interaction_half_step(SinglePhotonState& state) const;
  void free_step(SinglePhotonState& state) const;

  GridSpec grid_;
  double dt_;
  std::shared_ptr<const Fft2d> fft_;
  Plane free_phase_;
  std::vector<AtomSite> sites_;
  std::vector<std::array<std::array<cplx, 4>, 2>> half_;
  std::vector<cplx> atom_phase_;
};

/// Classical RK4 on interaction-picture amplitudes. Not norm-preserving;
/// kept as the baseline the split-step scheme is compared against.
class Rk4Integrator {
public:
  Rk4Integrator(const Scene& scene, double dt);

  void step(SinglePhotonState& state) const;
  void advance(SinglePhotonState& state, int steps) const;
  double dt() const { return dt_; }

private:
  struct KState {
    std::array<Plane, 2> k;
    std::vector<AtomAmps> atoms;
  };
  KState rhs(const KState& b, double s) const;

  Hamiltonian h_;
  double dt_;
  std::shared_ptr<const Fft2d> fft_;
};

/// Dense single-excitation Hamiltonian in the position basis, ordered
/// [H plane | V plane | atom 0 (H,V) | atom 1 (H,V) | ...]. Built from the
/// mode sum of g_p(j, k) directly, without the collapsed site couplings.
struct DenseHamiltonian {
  std::size_t dim = 0;
  std::vector<cplx> data;  // row-major dim x dim
  cplx operator()(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

constexpr std::size_t kDenseOracleMaxDim = 4096;

DenseHamiltonian dense_hamiltonian(const Scene& scene);

/// exp(-i h t)|initial> through Hermitian eigendecomposition.
SinglePhotonState dense_oracle_evolve(const Scene& scene, const SinglePhotonState& initial,
                                      double t);

}  // namespace qod
