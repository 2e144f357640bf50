#include "qod/evolution.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "qod/error.hpp"

namespace qod {

std::vector<AtomSite> atom_sites(const Scene& scene) {
  const auto& g = scene.grid();
  const double root_n = std::sqrt(static_cast<double>(g.modes()));
  std::vector<AtomSite> out;
  out.reserve(scene.atoms().size());
  for (const auto& a : scene.atoms()) {
    AtomSite s;
    s.index = g.index(a.ix, a.iy);
    s.cos_axis = std::cos(a.axis);
    s.sin_axis = std::sin(a.axis);
    s.rotated = a.axis != 0.0;
    const double scale = root_n * std::sqrt(a.omega) / (std::numbers::sqrt2 * g.length());
    for (int c = 0; c < 2; ++c) s.w[c] = cplx(0.0, -a.d[c] * scale);
    s.two_omega = 2.0 * a.omega;
    out.push_back(s);
  }
  return out;
}

namespace {

ChannelPair to_channels(const AtomSite& s, const SinglePhotonState& st, std::size_t j) {
  const cplx fh = st.field.planes[0][s.index];
  const cplx fv = st.field.planes[1][s.index];
  const auto& a = st.atoms[j];
  if (!s.rotated) return {{fh, fv}, {a[0], a[1]}};
  const double c = s.cos_axis;
  const double n = s.sin_axis;
  return {{c * fh + n * fv, -n * fh + c * fv}, {c * a[0] + n * a[1], -n * a[0] + c * a[1]}};
}

std::array<cplx, 2> from_channel(const AtomSite& s, const std::array<cplx, 2>& ch) {
  if (!s.rotated) return ch;
  const double c = s.cos_axis;
  const double n = s.sin_axis;
  return {c * ch[0] - n * ch[1], n * ch[0] + c * ch[1]};
}

void store_channels(const AtomSite& s, const ChannelPair& p, SinglePhotonState& st,
                    std::size_t j) {
  const auto f = from_channel(s, p.field);
  const auto a = from_channel(s, p.atom);
  st.field.planes[0][s.index] = f[0];
  st.field.planes[1][s.index] = f[1];
  st.atoms[j] = {a[0], a[1]};
}

void check_geometry(const GridSpec& grid, std::size_t n_atoms, const SinglePhotonState& s) {
  if (!(s.grid() == grid) || s.atoms.size() != n_atoms) {
    throw ContractError("state geometry does not match the scene");
  }
  if (s.field.rep != Representation::Position) {
    throw ContractError("state must be in position representation");
  }
}

bool plane_is_zero(const Plane& p) {
  for (const auto& c : p) {
    if (c.real() != 0.0 || c.imag() != 0.0) return false;
  }
  return true;
}

}  // namespace

Hamiltonian::Hamiltonian(const Scene& scene)
    : grid_(scene.grid()),
      omega_k_(KLattice(scene.grid()).omegas()),
      sites_(atom_sites(scene)),
      fft_(Fft2d::for_grid(scene.grid())) {}

void Hamiltonian::add_interaction(const SinglePhotonState& in, SinglePhotonState& out) const {
  for (std::size_t j = 0; j < sites_.size(); ++j) {
    const auto& s = sites_[j];
    const ChannelPair p = to_channels(s, in, j);
    std::array<cplx, 2> df{};
    std::array<cplx, 2> da{};
    for (int c = 0; c < 2; ++c) {
      df[c] = std::conj(s.w[c]) * p.atom[c];
      da[c] = s.w[c] * p.field[c];
    }
    const auto f = from_channel(s, df);
    const auto a = from_channel(s, da);
    out.field.planes[0][s.index] += f[0];
    out.field.planes[1][s.index] += f[1];
    out.atoms[j][0] += a[0];
    out.atoms[j][1] += a[1];
  }
}

SinglePhotonState Hamiltonian::apply(const SinglePhotonState& state) const {
  check_geometry(grid_, sites_.size(), state);
  SinglePhotonState out = state;
  for (auto& pl : out.field.planes) {
    fft_->forward(pl);
    for (std::size_t i = 0; i < pl.size(); ++i) pl[i] *= omega_k_[i];
    fft_->inverse(pl);
  }
  for (std::size_t j = 0; j < sites_.size(); ++j) {
    out.atoms[j][0] *= sites_[j].two_omega;
    out.atoms[j][1] *= sites_[j].two_omega;
  }
  add_interaction(state, out);
  return out;
}

EnergyBreakdown Hamiltonian::energy(const SinglePhotonState& state) const {
  check_geometry(grid_, sites_.size(), state);
  EnergyBreakdown e;
  for (const auto& src : state.field.planes) {
    Plane k = src;
    fft_->forward(k);
    for (std::size_t i = 0; i < k.size(); ++i) e.photon += omega_k_[i] * std::norm(k[i]);
  }
  for (std::size_t j = 0; j < sites_.size(); ++j) {
    const auto& s = sites_[j];
    e.atom += s.two_omega * (std::norm(state.atoms[j][0]) + std::norm(state.atoms[j][1]));
    const ChannelPair p = to_channels(s, state, j);
    for (int c = 0; c < 2; ++c) {
      e.interaction += 2.0 * (std::conj(p.atom[c]) * s.w[c] * p.field[c]).real();
    }
  }
  e.total = e.photon + e.atom + e.interaction;
  return e;
}

SinglePhotonState apply_h(const Scene& scene, const SinglePhotonState& state) {
  return Hamiltonian(scene).apply(state);
}

EnergyBreakdown energy(const Scene& scene, const SinglePhotonState& state) {
  return Hamiltonian(scene).energy(state);
}

TrotterStepper::TrotterStepper(const Scene& scene, double dt)
    : grid_(scene.grid()),
      dt_(dt),
      fft_(Fft2d::for_grid(scene.grid())),
      sites_(atom_sites(scene)) {
  if (dt == 0.0 || !std::isfinite(dt)) throw ContractError("time step must be finite and nonzero");
  const KLattice k(grid_);
  free_phase_.resize(grid_.modes());
  // the 1/N of the unnormalized transform pair is folded into the phase table
  const double inv_n = 1.0 / static_cast<double>(grid_.modes());
  for (std::size_t i = 0; i < grid_.modes(); ++i) {
    free_phase_[i] = std::polar(inv_n, -k.omega(i) * dt);
  }

  const double tau = 0.5 * dt;
  half_.resize(sites_.size());
  atom_phase_.resize(sites_.size());
  for (std::size_t j = 0; j < sites_.size(); ++j) {
    for (int c = 0; c < 2; ++c) {
      const cplx w = sites_[j].w[c];
      const double mag = std::abs(w);
      if (mag == 0.0) {
        half_[j][c] = {1.0, 0.0, 0.0, 1.0};
        continue;
      }
      // exp(-i tau [[0, W*], [W, 0]]) = cos(|W| tau) I - i sin(|W| tau) / |W| * [[0, W*], [W, 0]]
      const double cs = std::cos(mag * tau);
      const double sn = std::sin(mag * tau);
      const cplx mi(0.0, -1.0);
      half_[j][c] = {cs, mi * sn * std::conj(w) / mag, mi * sn * w / mag, cs};
    }
    atom_phase_[j] = std::polar(1.0, -sites_[j].two_omega * dt);
  }
}

void TrotterStepper::interaction_half_step(SinglePhotonState& st) const {
  for (std::size_t j = 0; j < sites_.size(); ++j) {
    const auto& s = sites_[j];
    ChannelPair p = to_channels(s, st, j);
    for (int c = 0; c < 2; ++c) {
      if (s.w[c] == cplx{}) continue;
      const auto& u = half_[j][c];
      const cplx f = p.field[c];
      const cplx a = p.atom[c];
      p.field[c] = u[0] * f + u[1] * a;
      p.atom[c] = u[2] * f + u[3] * a;
    }
    store_channels(s, p, st, j);
  }
}

void TrotterStepper::free_step(SinglePhotonState& st) const {
  for (auto& pl : st.field.planes) {
    if (plane_is_zero(pl)) continue;
    fft_->forward_raw(pl);
    for (std::size_t i = 0; i < pl.size(); ++i) pl[i] *= free_phase_[i];
    fft_->inverse_raw(pl);
  }
  for (std::size_t j = 0; j < sites_.size(); ++j) {
    st.atoms[j][0] *= atom_phase_[j];
    st.atoms[j][1] *= atom_phase_[j];
  }
}

void TrotterStepper::step(SinglePhotonState& st) const {
  check_geometry(grid_, sites_.size(), st);
  interaction_half_step(st);
  free_step(st);
  interaction_half_step(st);
  st.time += dt_;
}

void TrotterStepper::advance(SinglePhotonState& st, int steps) const {
  for (int i = 0; i < steps; ++i) step(st);
}

Rk4Integrator::Rk4Integrator(const Scene& scene, double dt)
    : h_(scene), dt_(dt), fft_(Fft2d::for_grid(scene.grid())) {
  if (dt == 0.0 || !std::isfinite(dt)) throw ContractError("time step must be finite and nonzero");
}

// Interaction-picture derivative db/ds = -i e^{i h0 s} hI e^{-i h0 s} b, with the
// picture anchored at the start of the current step.
Rk4Integrator::KState Rk4Integrator::rhs(const KState& b, double s) const {
  const auto& g = h_.grid();
  const auto& om = h_.omegas();
  const auto& sites = h_.sites();
  SinglePhotonState sch(g, sites.size());
  for (int p = 0; p < 2; ++p) {
    auto& pl = sch.field.planes[p];
    for (std::size_t i = 0; i < pl.size(); ++i) pl[i] = b.k[p][i] * std::polar(1.0, -om[i] * s);
    fft_->inverse(pl);
  }
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const cplx ph = std::polar(1.0, -sites[j].two_omega * s);
    sch.atoms[j] = {b.atoms[j][0] * ph, b.atoms[j][1] * ph};
  }
  SinglePhotonState out(g, sites.size());
  h_.add_interaction(sch, out);

  KState d;
  const cplx mi(0.0, -1.0);
  for (int p = 0; p < 2; ++p) {
    auto& pl = out.field.planes[p];
    fft_->forward(pl);
    for (std::size_t i = 0; i < pl.size(); ++i) pl[i] *= mi * std::polar(1.0, om[i] * s);
    d.k[p] = std::move(pl);
  }
  d.atoms.resize(sites.size());
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const cplx ph = mi * std::polar(1.0, sites[j].two_omega * s);
    d.atoms[j] = {out.atoms[j][0] * ph, out.atoms[j][1] * ph};
  }
  return d;
}

void Rk4Integrator::step(SinglePhotonState& st) const {
  check_geometry(h_.grid(), h_.sites().size(), st);
  const std::size_t n = h_.grid().modes();
  const std::size_t na = st.atoms.size();

  KState b;
  for (int p = 0; p < 2; ++p) {
    b.k[p] = st.field.planes[p];
    fft_->forward(b.k[p]);
  }
  b.atoms = st.atoms;

  auto combine = [&](const KState& d, double h) {
    KState y;
    for (int p = 0; p < 2; ++p) {
      y.k[p].resize(n);
      for (std::size_t i = 0; i < n; ++i) y.k[p][i] = b.k[p][i] + h * d.k[p][i];
    }
    y.atoms.resize(na);
    for (std::size_t j = 0; j < na; ++j) {
      y.atoms[j] = {b.atoms[j][0] + h * d.atoms[j][0], b.atoms[j][1] + h * d.atoms[j][1]};
    }
    return y;
  };

  const double h = dt_;
  const KState k1 = rhs(b, 0.0);
  const KState k2 = rhs(combine(k1, h / 2), h / 2);
  const KState k3 = rhs(combine(k2, h / 2), h / 2);
  const KState k4 = rhs(combine(k3, h), h);

  const auto& om = h_.omegas();
  for (int p = 0; p < 2; ++p) {
    auto& pl = st.field.planes[p];
    for (std::size_t i = 0; i < n; ++i) {
      const cplx bi = b.k[p][i] + h / 6.0 * (k1.k[p][i] + 2.0 * k2.k[p][i] + 2.0 * k3.k[p][i] + k4.k[p][i]);
      pl[i] = bi * std::polar(1.0, -om[i] * h);
    }
    fft_->inverse(pl);
  }
  const auto& sites = h_.sites();
  for (std::size_t j = 0; j < na; ++j) {
    const cplx ph = std::polar(1.0, -sites[j].two_omega * h);
    for (int c = 0; c < 2; ++c) {
      const cplx bj = b.atoms[j][c] + h / 6.0 * (k1.atoms[j][c] + 2.0 * k2.atoms[j][c] +
                                                 2.0 * k3.atoms[j][c] + k4.atoms[j][c]);
      st.atoms[j][c] = bj * ph;
    }
  }
  st.time += h;
}

void Rk4Integrator::advance(SinglePhotonState& st, int steps) const {
  for (int i = 0; i < steps; ++i) step(st);
}

DenseHamiltonian dense_hamiltonian(const Scene& scene) {
  const auto& g = scene.grid();
  const std::size_t n = g.modes();
  const std::size_t na = scene.atoms().size();
  DenseHamiltonian h;
  h.dim = 2 * n + 2 * na;
  if (h.dim > kDenseOracleMaxDim) {
    throw ContractError("dense oracle dimension " + std::to_string(h.dim) + " exceeds cap " +
                        std::to_string(kDenseOracleMaxDim));
  }
  h.data.assign(h.dim * h.dim, cplx{});
  const KLattice k(g);
  const double nn = static_cast<double>(n);

  // photon block: <1_r|h0|1_r'> = N^-1 sum_k omega_k e^{ik.(r - r')}, a function of r - r'
  std::vector<cplx> kernel(n);
  for (int dy = 0; dy < g.my(); ++dy) {
    for (int dx = 0; dx < g.mx(); ++dx) {
      cplx s{};
      for (int ny = 0; ny < g.my(); ++ny) {
        for (int nx = 0; nx < g.mx(); ++nx) {
          const double arg = k.kx(nx) * g.x(dx) + k.ky(ny) * g.y(dy);
          s += k.omega(g.index(nx, ny)) * std::polar(1.0, arg);
        }
      }
      kernel[g.index(dx, dy)] = s / nn;
    }
  }
  for (int p = 0; p < 2; ++p) {
    for (int y1 = 0; y1 < g.my(); ++y1) {
      for (int x1 = 0; x1 < g.mx(); ++x1) {
        const std::size_t r = p * n + g.index(x1, y1);
        for (int y2 = 0; y2 < g.my(); ++y2) {
          for (int x2 = 0; x2 < g.mx(); ++x2) {
            const int ddx = ((x1 - x2) % g.mx() + g.mx()) % g.mx();
            const int ddy = ((y1 - y2) % g.my() + g.my()) % g.my();
            h.data[r * h.dim + p * n + g.index(x2, y2)] = kernel[g.index(ddx, ddy)];
          }
        }
      }
    }
  }

  // kernel(-d) = conj(kernel(d)) holds only to roundoff; mirror the upper triangle
  for (std::size_t r = 0; r < 2 * n; ++r) {
    h.data[r * h.dim + r] = h.data[r * h.dim + r].real();
    for (std::size_t c = r + 1; c < 2 * n; ++c) h.data[c * h.dim + r] = std::conj(h.data[r * h.dim + c]);
  }

  // atom block and couplings: <1_{j,p}|hI|1_{r,q}> = sum_c e_c[p] e_c[q] sum_k g_c(j,k) <1_k|1_r>
  // with <1_k|1_r> = e^{-ik.r} / sqrt(N)
  for (std::size_t j = 0; j < na; ++j) {
    const Atom& a = scene.atoms()[j];
    const double ca = std::cos(a.axis);
    const double sa = std::sin(a.axis);
    const std::array<std::array<double, 2>, 2> e = {{{ca, sa}, {-sa, ca}}};
    const std::size_t aj = 2 * n + 2 * j;
    h.data[aj * h.dim + aj] = 2.0 * a.omega;
    h.data[(aj + 1) * h.dim + aj + 1] = 2.0 * a.omega;
    const double rx = g.x(a.ix);
    const double ry = g.y(a.iy);
    for (int y = 0; y < g.my(); ++y) {
      for (int x = 0; x < g.mx(); ++x) {
        cplx mode_sum{};
        for (int ny = 0; ny < g.my(); ++ny) {
          for (int nx = 0; nx < g.mx(); ++nx) {
            mode_sum += std::polar(1.0, k.kx(nx) * (rx - g.x(x)) + k.ky(ny) * (ry - g.y(y)));
          }
        }
        mode_sum /= std::sqrt(nn);
        for (int c = 0; c < 2; ++c) {
          const cplx gc = cplx(0.0, -1.0) * std::sqrt(a.omega) * a.d[c] /
                          (std::numbers::sqrt2 * g.length());
          const cplx amp = gc * mode_sum;
          for (int p = 0; p < 2; ++p) {
            for (int q = 0; q < 2; ++q) {
              const cplx v = e[c][p] * e[c][q] * amp;
              if (v == cplx{}) continue;
              const std::size_t row = aj + p;
              const std::size_t col = q * n + g.index(x, y);
              h.data[row * h.dim + col] += v;
              h.data[col * h.dim + row] += std::conj(v);
            }
          }
        }
      }
    }
  }
  return h;
}

SinglePhotonState dense_oracle_evolve(const Scene& scene, const SinglePhotonState& initial,
                                      double t) {
  const DenseHamiltonian h = dense_hamiltonian(scene);
  check_geometry(scene.grid(), scene.atoms().size(), initial);
  const std::size_t n = scene.grid().modes();
  const auto dim = static_cast<Eigen::Index>(h.dim);

  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = h(r, c);
  }
  Eigen::VectorXcd v(dim);
  for (int p = 0; p < 2; ++p) {
    for (std::size_t i = 0; i < n; ++i) v(p * n + i) = initial.field.planes[p][i];
  }
  for (std::size_t j = 0; j < initial.atoms.size(); ++j) {
    v(2 * n + 2 * j) = initial.atoms[j][0];
    v(2 * n + 2 * j + 1) = initial.atoms[j][1];
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
  if (eig.info() != Eigen::Success) throw NumericalError("dense oracle eigensolver failed");
  Eigen::VectorXcd coeff = eig.eigenvectors().adjoint() * v;
  for (Eigen::Index i = 0; i < dim; ++i) coeff(i) *= std::polar(1.0, -eig.eigenvalues()(i) * t);
  const Eigen::VectorXcd out = eig.eigenvectors() * coeff;

  SinglePhotonState s(scene.grid(), initial.atoms.size());
  for (int p = 0; p < 2; ++p) {
    for (std::size_t i = 0; i < n; ++i) s.field.planes[p][i] = out(p * n + i);
  }
  for (std::size_t j = 0; j < initial.atoms.size(); ++j) {
    s.atoms[j] = {out(2 * n + 2 * j), out(2 * n + 2 * j + 1)};
  }
  s.time = initial.time + t;
  return s;
}

}  // namespace qod
