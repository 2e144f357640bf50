#pragma once

#include <iosfwd>
#include <string>

#include "qod/field.hpp"

namespace qod {

/// QF01 field snapshot: ASCII header lines
///   QF01 / Mx My / Lx Ly / time t / planes 2
/// then Mx*My little-endian float64 (re, im) pairs for H, then for V.
struct Snapshot {
  GridSpec grid;
  double time = 0.0;
  std::array<Plane, 2> planes;
};

void write_qf01(std::ostream& out, const PolarizedField& field, double time);
void write_qf01_file(const std::string& path, const PolarizedField& field, double time);

/// Throws ParseError for a bad header and IoError for short payloads.
Snapshot read_qf01(std::istream& in);
Snapshot read_qf01_file(const std::string& path);

}  // namespace qod
