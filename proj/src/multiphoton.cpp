#include "qod/multiphoton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "qod/error.hpp"

namespace qod {

ProductState::ProductState(const GridSpec& grid, std::size_t n_atoms, int photons)
    : grid_(grid), n_atoms_(n_atoms), photons_(photons) {
  if (photons < 1 || photons > 4) throw ContractError("product states hold 1 to 4 photons");
}

std::size_t ProductState::add_factor(SinglePhotonState factor) {
  if (!(factor.grid() == grid_) || factor.atoms.size() != n_atoms_) {
    throw ContractError("factor geometry differs from the product state");
  }
  if (factor.field.rep != Representation::Position) {
    throw ContractError("factors are kept in position representation");
  }
  factors_.push_back(std::move(factor));
  return factors_.size() - 1;
}

void ProductState::add_term(cplx coeff, std::vector<std::size_t> ids) {
  if (static_cast<int>(ids.size()) != photons_) {
    throw ContractError("term has " + std::to_string(ids.size()) + " slots, expected " +
                        std::to_string(photons_));
  }
  for (auto id : ids) {
    if (id >= factors_.size()) throw ContractError("term references an unknown factor");
  }
  terms_.push_back({coeff, std::move(ids)});
}

namespace {

// sum_{T' in bra, T in ket} conj(c_T') c_T prod_s G_s(f_T'(s), f_T(s))
cplx bilinear(const std::vector<ProductTerm>& bra, const std::vector<ProductTerm>& ket,
              const std::vector<const Gram*>& slots) {
  cplx sum{};
  for (const auto& tb : bra) {
    for (const auto& tk : ket) {
      cplx w = std::conj(tb.coeff) * tk.coeff;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        w *= (*slots[s])(tb.factors[s], tk.factors[s]);
      }
      sum += w;
    }
  }
  return sum;
}

std::vector<const Gram*> same_gram(const Gram& g, int photons) {
  return std::vector<const Gram*>(static_cast<std::size_t>(photons), &g);
}

// M[a][b] = sum_r conj(f_a,q(r)) f_b,p(r) plus atom channels
Gram pol_cross_gram(const std::vector<SinglePhotonState>& f, int q, int p) {
  Gram m;
  m.n = f.size();
  m.g.assign(m.n * m.n, cplx{});
  for (std::size_t a = 0; a < m.n; ++a) {
    for (std::size_t b = 0; b < m.n; ++b) {
      const auto& x = f[a].field.planes[q];
      const auto& y = f[b].field.planes[p];
      cplx s{};
      for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
      for (std::size_t j = 0; j < f[a].atoms.size(); ++j) {
        s += std::conj(f[a].atoms[j][q]) * f[b].atoms[j][p];
      }
      m.g[a * m.n + b] = s;
    }
  }
  return m;
}

void require_two(const ProductState& s, const char* what) {
  if (s.photons() != 2) throw ContractError(std::string(what) + " needs a two-photon state");
}

}  // namespace

double ProductState::norm2() const {
  const Gram g = gram(factors_);
  return bilinear(terms_, terms_, same_gram(g, photons_)).real();
}

void ProductState::normalize() {
  const double n2 = norm2();
  if (!(n2 > 0.0)) throw NumericalError("cannot normalize a zero product state");
  scale(1.0 / std::sqrt(n2));
}

void ProductState::scale(cplx s) {
  for (auto& t : terms_) t.coeff *= s;
}

void ProductState::set_coefficient(std::size_t term, cplx c) {
  if (term >= terms_.size()) throw ContractError("term index out of range");
  terms_[term].coeff = c;
}

void ProductState::set_time(double t) {
  time_ = t;
  for (auto& f : factors_) f.time = t;
}

Gram gram(const std::vector<SinglePhotonState>& f, const GramFilter& filter) {
  Gram m;
  m.n = f.size();
  m.g.assign(m.n * m.n, cplx{});
  if (m.n == 0) return m;
  std::vector<std::size_t> idx;
  if (filter.region) idx = region_indices(f[0].grid(), *filter.region);
  const bool atoms = filter.atoms && !filter.region;

  for (std::size_t a = 0; a < m.n; ++a) {
    for (std::size_t b = a; b < m.n; ++b) {
      cplx s{};
      for (int p = 0; p < 2; ++p) {
        if (!selects(filter.pol, p)) continue;
        const auto& x = f[a].field.planes[p];
        const auto& y = f[b].field.planes[p];
        if (filter.region) {
          for (auto i : idx) s += std::conj(x[i]) * y[i];
        } else {
          for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
        }
        if (atoms) {
          for (std::size_t j = 0; j < f[a].atoms.size(); ++j) {
            s += std::conj(f[a].atoms[j][p]) * f[b].atoms[j][p];
          }
        }
      }
      m.g[a * m.n + b] = s;
      m.g[b * m.n + a] = std::conj(s);
    }
    m.g[a * m.n + a] = m.g[a * m.n + a].real();
  }
  return m;
}

Gram cross_gram(const std::vector<SinglePhotonState>& a, const std::vector<SinglePhotonState>& b) {
  Gram m;
  m.n = std::max(a.size(), b.size());
  m.g.assign(m.n * m.n, cplx{});
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) m.g[i * m.n + j] = inner(a[i], b[j]);
  }
  return m;
}

void evolve(ProductState& state, const TrotterStepper& stepper, int steps, int threads) {
  auto& f = state.factors();
  if (!(stepper.grid() == state.grid()) || stepper.atom_count() != state.atom_count()) {
    throw ContractError("stepper geometry differs from the product state");
  }
  const int workers = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(f.size(), 1)));
  if (workers == 1) {
    for (auto& s : f) stepper.advance(s, steps);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < f.size(); i += workers) stepper.advance(f[i], steps);
      });
    }
  }
  state.set_time(state.time() + steps * stepper.dt());
}

ProductState hom_initial(const GridSpec& grid, std::size_t n_atoms, const PacketParams& xi,
                         const PacketParams& eta) {
  ProductState s(grid, n_atoms, 2);
  const auto a = s.add_factor(gaussian_packet(grid, xi, n_atoms));
  const auto b = s.add_factor(gaussian_packet(grid, eta, n_atoms));
  const double r = 1.0 / std::numbers::sqrt2;
  s.add_term(r, {a, b});
  s.add_term(r, {b, a});
  s.normalize();
  return s;
}

ProductState bell_initial(double c, const GridSpec& grid, std::size_t n_atoms,
                          const PacketParams& xi, const PacketParams& eta) {
  if (!(c >= 0.0 && c <= 1.0)) throw ContractError("Bell weight c must lie in [0, 1]");
  ProductState s(grid, n_atoms, 2);
  auto pol = [&](PacketParams p, double theta) {
    p.theta_pol = theta;
    return s.add_factor(gaussian_packet(grid, p, n_atoms));
  };
  const double half_pi = std::numbers::pi / 2;
  const auto xh = pol(xi, 0.0);
  const auto xv = pol(xi, half_pi);
  const auto eh = pol(eta, 0.0);
  const auto ev = pol(eta, half_pi);
  s.add_term(0.5, {xh, eh});
  s.add_term(0.5 * c, {xv, ev});
  s.add_term(0.5, {eh, xh});
  s.add_term(0.5 * c, {ev, xv});
  s.normalize();
  return s;
}

std::vector<double> bunching_density(const ProductState& state) {
  require_two(state, "bunching_density");
  const auto& f = state.factors();
  std::vector<double> rho(state.grid().modes(), 0.0);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    cplx amp{};
    for (const auto& t : state.terms()) {
      const auto& a = f[t.factors[0]].field.planes;
      const auto& b = f[t.factors[1]].field.planes;
      amp += t.coeff * (a[0][i] * b[0][i] + a[1][i] * b[1][i]);
    }
    rho[i] = std::norm(amp);
  }
  return rho;
}

double max_bunching_at_atoms(const ProductState& state, const Scene& scene) {
  require_two(state, "max_bunching_at_atoms");
  const auto& f = state.factors();
  double m = 0.0;
  for (const auto& a : scene.atoms()) {
    const std::size_t i = state.grid().index(a.ix, a.iy);
    cplx amp{};
    for (const auto& t : state.terms()) {
      const auto& x = f[t.factors[0]].field.planes;
      const auto& y = f[t.factors[1]].field.planes;
      amp += t.coeff * (x[0][i] * y[0][i] + x[1][i] * y[1][i]);
    }
    m = std::max(m, std::norm(amp));
  }
  return m;
}

cplx product_overlap(const ProductState& ref, const ProductState& state) {
  if (ref.photons() != state.photons()) throw ContractError("photon counts differ");
  const Gram x = cross_gram(ref.factors(), state.factors());
  return bilinear(ref.terms(), state.terms(), same_gram(x, state.photons()));
}

double coincidence_overlap(const ProductState& state, const ProductState& reference) {
  const double tol = 1e-9 * std::max(1.0, std::abs(state.time()));
  if (std::abs(state.time() - reference.time()) > tol) {
    throw ContractError("coincidence_overlap: states are at different times");
  }
  return std::norm(product_overlap(reference, state));
}

double slot_region_probability(const ProductState& state, const Region& a, const Region& b) {
  require_two(state, "slot_region_probability");
  GramFilter fa;
  fa.region = a;
  GramFilter fb;
  fb.region = b;
  const Gram ga = gram(state.factors(), fa);
  const Gram gb = gram(state.factors(), fb);
  return bilinear(state.terms(), state.terms(), {&ga, &gb}).real();
}

double coincidence_probability(const ProductState& state, const Region& a, const Region& b) {
  return slot_region_probability(state, a, b) + slot_region_probability(state, b, a);
}

Matrix2c reduced_polarization(const ProductState& state, int photon) {
  require_two(state, "reduced_polarization");
  if (photon != 0 && photon != 1) throw ContractError("photon index must be 0 or 1");
  const Gram full = gram(state.factors());
  Matrix2c rho{};
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      const Gram k = pol_cross_gram(state.factors(), q, p);
      std::vector<const Gram*> slots(2);
      slots[photon] = &k;
      slots[1 - photon] = &full;
      rho[p][q] = bilinear(state.terms(), state.terms(), slots);
    }
  }
  const double tr = rho[0][0].real() + rho[1][1].real();
  if (!(tr > 0.0)) throw NumericalError("reduced polarization matrix has zero trace");
  for (auto& row : rho) {
    for (auto& v : row) v /= tr;
  }
  return rho;
}

std::array<std::array<double, 2>, 2> polarization_joint(const ProductState& state) {
  require_two(state, "polarization_joint");
  std::array<Gram, 2> g;
  for (int p = 0; p < 2; ++p) {
    GramFilter f;
    f.pol = p == 0 ? PolSelect::H : PolSelect::V;
    g[p] = gram(state.factors(), f);
  }
  std::array<std::array<double, 2>, 2> out{};
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) out[p][q] = bilinear(state.terms(), state.terms(), {&g[p], &g[q]}).real();
  }
  return out;
}

namespace {

constexpr std::array<double, 4> kChshSign{1.0, 1.0, 1.0, -1.0};

void require_four(std::span<const ProductState> states) {
  if (states.size() != 4) {
    throw ContractError("CHSH needs four states ordered (a,b), (a',b), (a',b'), (a,b')");
  }
}

}  // namespace

ChshResult chsh_correlation(std::span<const ProductState> states) {
  require_four(states);
  ChshResult r;
  for (std::size_t i = 0; i < 4; ++i) {
    r.p[i] = polarization_joint(states[i]);
    const auto& p = r.p[i];
    r.e[i] = p[0][0] + p[1][1] - p[0][1] - p[1][0];
    r.s += kChshSign[i] * r.e[i];
  }
  return r;
}

std::vector<double> chsh_density(std::span<const ProductState> states, const Scene& scene) {
  require_four(states);
  const GridSpec& grid = states[0].grid();
  std::vector<double> out(grid.modes(), 0.0);
  std::vector<std::size_t> sites;
  for (const auto& a : scene.atoms()) sites.push_back(grid.index(a.ix, a.iy));

  for (std::size_t i = 0; i < 4; ++i) {
    const auto& st = states[i];
    require_two(st, "chsh_density");
    if (sites.size() != st.atom_count()) throw ContractError("scene does not match the state");
    const auto& f = st.factors();
    const std::size_t n = f.size();
    std::array<Gram, 2> g;
    for (int p = 0; p < 2; ++p) {
      GramFilter flt;
      flt.pol = p == 0 ? PolSelect::H : PolSelect::V;
      g[p] = gram(f, flt);
    }
    // m[p][a*n+b]: weight of conj(f_a,p(r)) f_b,p(r) in E(r)
    std::array<std::vector<cplx>, 2> m;
    for (int p = 0; p < 2; ++p) {
      m[p].assign(n * n, cplx{});
      for (const auto& tb : st.terms()) {
        for (const auto& tk : st.terms()) {
          const cplx w = std::conj(tb.coeff) * tk.coeff;
          const cplx same = g[p](tb.factors[1], tk.factors[1]);
          const cplx other = g[1 - p](tb.factors[1], tk.factors[1]);
          m[p][tb.factors[0] * n + tk.factors[0]] += w * (same - other);
        }
      }
    }
    const double sign = kChshSign[i];
    for (int p = 0; p < 2; ++p) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          const cplx w = m[p][a * n + b];
          if (w == cplx{}) continue;
          const auto& x = f[a].field.planes[p];
          const auto& y = f[b].field.planes[p];
          for (std::size_t r = 0; r < out.size(); ++r) {
            out[r] += sign * (w * std::conj(x[r]) * y[r]).real();
          }
          for (std::size_t j = 0; j < sites.size(); ++j) {
            out[sites[j]] += sign * (w * std::conj(f[a].atoms[j][p]) * f[b].atoms[j][p]).real();
          }
        }
      }
    }
  }
  return out;
}

}  // namespace qod
