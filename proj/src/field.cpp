#include "qod/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "qod/error.hpp"

namespace qod {

namespace detail {

void* aligned_alloc_bytes(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (p == nullptr) throw std::bad_alloc();
  return p;
}

void aligned_free(void* p) noexcept { fftw_free(p); }

}  // namespace detail

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Measured plans are much faster than estimated ones but the measurement is
// timing dependent. Persisting wisdom pins the plan, and therefore the exact
// floating-point results, across runs on one machine.
std::filesystem::path wisdom_path() {
  if (const char* p = std::getenv("QOD_FFTW_WISDOM")) return p;
  if (const char* c = std::getenv("XDG_CACHE_HOME"); c != nullptr && *c != '\0') {
    return std::filesystem::path(c) / "qod" / "fftw.wisdom";
  }
  if (const char* h = std::getenv("HOME"); h != nullptr && *h != '\0') {
    return std::filesystem::path(h) / ".cache" / "qod" / "fftw.wisdom";
  }
  return {};
}

unsigned planner_flags() {
  const char* mode = std::getenv("QOD_FFTW_PLANNER");
  if (mode != nullptr && std::string(mode) == "estimate") return FFTW_ESTIMATE;
  return FFTW_MEASURE;
}

}  // namespace

std::shared_ptr<const Fft2d> Fft2d::for_grid(const GridSpec& grid) {
  // mutex first so it outlives the cache during static destruction
  auto& mutex = planner_mutex();
  static std::map<std::pair<int, int>, std::shared_ptr<const Fft2d>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{grid.mx(), grid.my()}];
  if (!slot) slot.reset(new Fft2d(grid));
  return slot;
}

// Planning happens under planner_mutex (held by for_grid). Measured plans are
// saved as wisdom; QOD_FFTW_PLANNER=estimate skips measuring.
Fft2d::Fft2d(const GridSpec& grid) : grid_(grid) {
  static bool imported = false;
  const auto wisdom = wisdom_path();
  if (!imported && !wisdom.empty()) {
    fftw_import_wisdom_from_filename(wisdom.c_str());
    imported = true;
  }
  const unsigned flags = planner_flags();
  Plane scratch(grid.modes());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  forward_ = fftw_plan_dft_2d(grid.my(), grid.mx(), buf, buf, FFTW_FORWARD, flags);
  inverse_ = fftw_plan_dft_2d(grid.my(), grid.mx(), buf, buf, FFTW_BACKWARD, flags);
  if (forward_ == nullptr || inverse_ == nullptr) throw Error("FFTW planning failed");
  scale_ = 1.0 / std::sqrt(static_cast<double>(grid.modes()));
  if (flags != FFTW_ESTIMATE && !wisdom.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(wisdom.parent_path(), ec);
    fftw_export_wisdom_to_filename(wisdom.c_str());
  }
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
}

void Fft2d::execute(void* plan, Plane& plane, bool normalize) const {
  if (plane.size() != grid_.modes()) throw ContractError("plane size does not match plan");
  auto* buf = reinterpret_cast<fftw_complex*>(plane.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan), buf, buf);
  if (normalize) {
    for (auto& c : plane) c *= scale_;
  }
}

void Fft2d::forward(Plane& plane) const { execute(forward_, plane, true); }
void Fft2d::inverse(Plane& plane) const { execute(inverse_, plane, true); }
void Fft2d::forward_raw(Plane& plane) const { execute(forward_, plane, false); }
void Fft2d::inverse_raw(Plane& plane) const { execute(inverse_, plane, false); }

PolarizedField::PolarizedField(const GridSpec& g, Representation r) : grid(g), rep(r) {
  planes[0].assign(g.modes(), cplx{});
  planes[1].assign(g.modes(), cplx{});
}

double PolarizedField::norm2() const {
  double s = 0.0;
  for (const auto& pl : planes) {
    for (const auto& c : pl) s += std::norm(c);
  }
  return s;
}

PolarizedField dft_forward(PolarizedField field) {
  if (field.rep != Representation::Position) {
    throw ContractError("dft_forward expects a position-representation field");
  }
  auto fft = Fft2d::for_grid(field.grid);
  for (auto& pl : field.planes) fft->forward(pl);
  field.rep = Representation::Wavevector;
  return field;
}

PolarizedField dft_inverse(PolarizedField field) {
  if (field.rep != Representation::Wavevector) {
    throw ContractError("dft_inverse expects a wavevector-representation field");
  }
  auto fft = Fft2d::for_grid(field.grid);
  for (auto& pl : field.planes) fft->inverse(pl);
  field.rep = Representation::Position;
  return field;
}

SinglePhotonState::SinglePhotonState(const GridSpec& grid, std::size_t n_atoms)
    : field(grid), atoms(n_atoms, AtomAmps{}) {}

double SinglePhotonState::norm2() const {
  double s = field.norm2();
  for (const auto& a : atoms) s += std::norm(a[0]) + std::norm(a[1]);
  return s;
}

void SinglePhotonState::scale(cplx s) {
  for (auto& pl : field.planes) {
    for (auto& c : pl) c *= s;
  }
  for (auto& a : atoms) {
    a[0] *= s;
    a[1] *= s;
  }
}

void SinglePhotonState::axpy(cplx s, const SinglePhotonState& other) {
  if (!(other.grid() == grid()) || other.atoms.size() != atoms.size() ||
      other.field.rep != field.rep) {
    throw ContractError("axpy: state geometry mismatch");
  }
  for (int p = 0; p < 2; ++p) {
    auto& dst = field.planes[p];
    const auto& src = other.field.planes[p];
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s * src[i];
  }
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    atoms[j][0] += s * other.atoms[j][0];
    atoms[j][1] += s * other.atoms[j][1];
  }
}

bool SinglePhotonState::all_finite() const {
  for (const auto& pl : field.planes) {
    for (const auto& c : pl) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
  }
  for (const auto& a : atoms) {
    for (const auto& c : a) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
  }
  return true;
}

cplx inner(const SinglePhotonState& a, const SinglePhotonState& b) {
  if (!(a.grid() == b.grid()) || a.atoms.size() != b.atoms.size()) {
    throw ContractError("inner: states have different geometry or atom sets");
  }
  if (a.field.rep != b.field.rep) throw ContractError("inner: representation mismatch");
  cplx s{};
  for (int p = 0; p < 2; ++p) {
    const auto& x = a.field.planes[p];
    const auto& y = b.field.planes[p];
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  }
  for (std::size_t j = 0; j < a.atoms.size(); ++j) {
    s += std::conj(a.atoms[j][0]) * b.atoms[j][0] + std::conj(a.atoms[j][1]) * b.atoms[j][1];
  }
  return s;
}

cplx field_inner(const PolarizedField& a, const PolarizedField& b) {
  if (!(a.grid == b.grid) || a.rep != b.rep) {
    throw ContractError("field_inner: fields differ in grid or representation");
  }
  cplx s{};
  for (int p = 0; p < 2; ++p) {
    const auto& x = a.planes[p];
    const auto& y = b.planes[p];
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  }
  return s;
}

std::vector<double> number_density(const SinglePhotonState& s, PolSelect sel) {
  if (s.field.rep != Representation::Position) {
    throw ContractError("number_density expects position representation");
  }
  std::vector<double> d(s.grid().modes(), 0.0);
  for (int p = 0; p < 2; ++p) {
    if (!selects(sel, p)) continue;
    const auto& pl = s.field.planes[p];
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += std::norm(pl[i]);
  }
  return d;
}

double region_probability(const SinglePhotonState& s, const Region& region, PolSelect sel) {
  if (s.field.rep != Representation::Position) {
    throw ContractError("region_probability expects position representation");
  }
  double sum = 0.0;
  for (std::size_t i : region_indices(s.grid(), region)) {
    for (int p = 0; p < 2; ++p) {
      if (selects(sel, p)) sum += std::norm(s.field.planes[p][i]);
    }
  }
  return sum;
}

namespace {

// Continuum spectrum of the packet evaluated on the k-lattice, H-plane only.
Plane gaussian_spectrum(const GridSpec& grid, const PacketParams& pp, double& rx, double& ry) {
  const KLattice k(grid);
  rx = grid.x(grid.nearest_ix(pp.x));
  ry = grid.y(grid.nearest_iy(pp.y));
  const double pref = 2.0 * pp.sigma * std::sqrt(std::numbers::pi) / grid.length();
  const double s2 = pp.sigma * pp.sigma;
  Plane c(grid.modes());
  for (int ny = 0; ny < grid.my(); ++ny) {
    const double qy = k.ky(ny) - pp.ky;
    for (int nx = 0; nx < grid.mx(); ++nx) {
      const double qx = k.kx(nx) - pp.kx;
      const double phase = -(k.kx(nx) * rx + k.ky(ny) * ry);
      c[grid.index(nx, ny)] =
          pref * std::exp(-0.5 * s2 * (qx * qx + qy * qy)) * std::polar(1.0, phase);
    }
  }
  return c;
}

}  // namespace

double gaussian_raw_norm2(const GridSpec& grid, const PacketParams& params) {
  double rx = 0.0;
  double ry = 0.0;
  const Plane c = gaussian_spectrum(grid, params, rx, ry);
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return s;
}

SinglePhotonState gaussian_packet(const GridSpec& grid, const PacketParams& pp,
                                  std::size_t n_atoms) {
  if (!(pp.sigma > 0.0)) throw ContractError("packet width must be positive");
  if (pp.x < 0.0 || pp.x > grid.lx() || pp.y < 0.0 || pp.y > grid.ly()) {
    throw ContractError("packet centre lies outside the box");
  }
  if (pp.sigma < 2.0 * std::max(grid.dx(), grid.dy())) {
    throw ResolutionWarning("packet width " + std::to_string(pp.sigma) +
                            " is below two grid spacings");
  }
  double rx = 0.0;
  double ry = 0.0;
  Plane c = gaussian_spectrum(grid, pp, rx, ry);
  double n2 = 0.0;
  for (const auto& v : c) n2 += std::norm(v);
  const double renorm = 1.0 / std::sqrt(n2);

  SinglePhotonState s(grid, n_atoms);
  s.field.rep = Representation::Wavevector;
  // cos(pi/2) is not exactly zero in floating point
  auto weight = [](double w) { return std::abs(w) < 1e-15 ? 0.0 : w; };
  const double ch = weight(std::cos(pp.theta_pol)) * renorm;
  const double cv = weight(std::sin(pp.theta_pol)) * renorm;
  for (std::size_t i = 0; i < c.size(); ++i) {
    s.field.planes[0][i] = ch * c[i];
    s.field.planes[1][i] = cv * c[i];
  }
  s.field = dft_inverse(std::move(s.field));
  return s;
}

}  // namespace qod
