#include "qod/oracle.hpp"

#include <cmath>

#include "qod/error.hpp"
#include "qod/evolution.hpp"

namespace qod {

Scene oracle_scene(int n, int atoms, double d, double omega) {
  if (n > 16) throw ContractError("oracle grids are at most 16 x 16");
  if (atoms < 0 || atoms > 3) throw ContractError("oracle scenes hold 0 to 3 atoms");
  const double l = n;
  Scene s(GridSpec(n, n, l, l));
  const double pos[3][2] = {{l / 2, l / 2}, {l / 2 + 1, l / 2}, {l / 4, 3 * l / 4}};
  for (int i = 0; i < atoms; ++i) {
    s.add_object(SlabSpec{ObjectKind::Scatterer, pos[i][0], pos[i][1], 0, 1, 1, d, omega});
  }
  return s;
}

SinglePhotonState oracle_initial(const Scene& scene) {
  const auto& g = scene.grid();
  return gaussian_packet(g, PacketParams{2 * g.dx(), 1.0, 0.5, g.lx() / 4, g.ly() / 2, 0.3},
                         scene.atoms().size());
}

OracleReport oracle_check(const Scene& scene, const SinglePhotonState& initial,
                          const std::vector<double>& dts, double t) {
  const auto exact = dense_oracle_evolve(scene, initial, t);
  OracleReport r;
  for (double dt : dts) {
    if (!(dt > 0.0)) throw ContractError("oracle time steps must be positive");
    const int steps = static_cast<int>(std::lround(t / dt));
    if (std::abs(steps * dt - t) > 1e-9 * t) throw ContractError("time step must divide the final time");
    auto s = initial;
    TrotterStepper(scene, dt).advance(s, steps);
    s.axpy(-1.0, exact);
    r.dts.push_back(dt);
    r.errors.push_back(std::sqrt(s.norm2()));
  }
  r.exact = !r.errors.empty();
  for (double e : r.errors) r.exact = r.exact && e < 1e-12;
  if (r.exact) return r;
  for (std::size_t i = 1; i < r.errors.size(); ++i) {
    const double order = std::log(r.errors[i - 1] / r.errors[i]) / std::log(r.dts[i - 1] / r.dts[i]);
    r.orders.push_back(order);
    if (!(order >= 1.8 && order <= 2.2)) r.order_ok = false;
  }
  return r;
}

}  // namespace qod
