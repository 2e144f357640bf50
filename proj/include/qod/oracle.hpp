#pragma once

#include <vector>

#include "qod/field.hpp"
#include "qod/scene.hpp"

namespace qod {

/// n x n grid of spacing 1 with up to three single-atom scatterers near the
/// centre. Throws ContractError for n > 16 or more than three atoms.
Scene oracle_scene(int n, int atoms, double d = 0.5, double omega = 1.0);
/// Slightly polarized, off-axis packet two grid spacings wide.
SinglePhotonState oracle_initial(const Scene& scene);

struct OracleReport {
  std::vector<double> dts;
  std::vector<double> errors;  // L2 distance to the dense propagator
  std::vector<double> orders;  // log2 of successive error ratios (for halving dt)
  /// Orders all within [1.8, 2.2]; true when fewer than two dt values.
  bool order_ok = true;
  /// Every error below 1e-12: the splitting is exact (no atoms) and orders
  /// are not reported.
  bool exact = false;
};

/// Trotter evolution to time t for each dt against dense_oracle_evolve.
OracleReport oracle_check(const Scene& scene, const SinglePhotonState& initial,
                          const std::vector<double>& dts, double t);

}  // namespace qod
