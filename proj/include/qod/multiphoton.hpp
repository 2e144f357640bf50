#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qod/evolution.hpp"
#include "qod/field.hpp"

namespace qod {

struct ProductTerm {
  cplx coeff;
  std::vector<std::size_t> factors;  // one factor id per photon slot
};

/// Sum over terms of c_T |phi_{T,1}> ... |phi_{T,N}>. Factors are shared
/// between terms by id, so each one is stepped once per time step.
class ProductState {
public:
  ProductState(const GridSpec& grid, std::size_t n_atoms, int photons);

  std::size_t add_factor(SinglePhotonState factor);
  void add_term(cplx coeff, std::vector<std::size_t> factors);

  const GridSpec& grid() const { return grid_; }
  std::size_t atom_count() const { return n_atoms_; }
  int photons() const { return photons_; }
  double time() const { return time_; }
  const std::vector<SinglePhotonState>& factors() const { return factors_; }
  std::vector<SinglePhotonState>& factors() { return factors_; }
  const std::vector<ProductTerm>& terms() const { return terms_; }

  /// Gram-expanded <Phi|Phi>.
  double norm2() const;
  void normalize();
  /// Multiplies every term coefficient by s.
  void scale(cplx s);
  void set_coefficient(std::size_t term, cplx c);
  void set_time(double t);

private:
  GridSpec grid_;
  std::size_t n_atoms_;
  int photons_;
  double time_ = 0.0;
  std::vector<SinglePhotonState> factors_;
  std::vector<ProductTerm> terms_;
};

/// Hermitian matrix of factor inner products.
struct Gram {
  std::size_t n = 0;
  std::vector<cplx> g;  // g[a * n + b] = <f_a|f_b> (restricted)
  cplx operator()(std::size_t a, std::size_t b) const { return g[a * n + b]; }
};

/// Which part of the single-photon Hilbert space a Gram matrix covers.
/// With a region set, only field points inside it count and atoms are
/// excluded.
struct GramFilter {
  PolSelect pol = PolSelect::Both;
  bool atoms = true;
  std::optional<Region> region;
};

Gram gram(const std::vector<SinglePhotonState>& factors, const GramFilter& filter = {});
/// Cross Gram <a_i|b_j> between two factor lists on the same geometry.
Gram cross_gram(const std::vector<SinglePhotonState>& a,
                const std::vector<SinglePhotonState>& b);

/// Advances every factor `steps` times. Factors are independent, so they are
/// spread over `threads` workers.
void evolve(ProductState& state, const TrotterStepper& stepper, int steps = 1, int threads = 1);
inline void evolve_step(ProductState& state, const TrotterStepper& stepper) {
  evolve(state, stepper, 1, 1);
}

/// (|xi>|eta> + |eta>|xi>)/sqrt(2), renormalized on the grid.
ProductState hom_initial(const GridSpec& grid, std::size_t n_atoms, const PacketParams& xi,
                         const PacketParams& eta);
/// Symmetrized (|H>|H> + c|V>|V>)/sqrt(1 + c^2) with spatial modes xi, eta.
/// The theta_pol fields of xi and eta are ignored.
ProductState bell_initial(double c, const GridSpec& grid, std::size_t n_atoms,
                          const PacketParams& xi, const PacketParams& eta);

/// |sum_T c_T sum_p phi_{T,1,p}(r) phi_{T,2,p}(r)|^2 over the grid.
std::vector<double> bunching_density(const ProductState& state);
/// Largest bunching density on an atom site of the scene.
double max_bunching_at_atoms(const ProductState& state, const Scene& scene);

/// <ref|state> through the cross Gram.
cplx product_overlap(const ProductState& ref, const ProductState& state);
/// |<ref(T)|state(T)>|^2. Times must agree.
double coincidence_overlap(const ProductState& state, const ProductState& reference);
/// Probability that slot 1 lies in a and slot 2 in b.
double slot_region_probability(const ProductState& state, const Region& a, const Region& b);
/// One photon in a and the other in b, for a two-photon state.
double coincidence_probability(const ProductState& state, const Region& a, const Region& b);

using Matrix2c = std::array<std::array<cplx, 2>, 2>;
/// Polarization state of one photon after tracing out the other, trace 1.
Matrix2c reduced_polarization(const ProductState& state, int photon);

/// P[p][p'] for slot 1 in polarization p and slot 2 in p', summed over all
/// positions and atom channels.
std::array<std::array<double, 2>, 2> polarization_joint(const ProductState& state);

struct ChshResult {
  double s = 0.0;
  std::array<double, 4> e{};
  std::array<std::array<std::array<double, 2>, 2>, 4> p{};
};

/// States ordered (a,b), (a',b), (a',b'), (a,b'); S = E0 + E1 + E2 - E3.
ChshResult chsh_correlation(std::span<const ProductState> states);
/// Per-position density with slot 1 pinned at r. Atom excitations are
/// booked at their grid site so the map sums to S exactly.
std::vector<double> chsh_density(std::span<const ProductState> states, const Scene& scene);

}  // namespace qod
