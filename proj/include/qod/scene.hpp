#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qod/grid.hpp"

namespace qod {

enum class ObjectKind { Mirror, BeamSplitter, PhaseShifter, Scatterer, Pbs, Rotator };

std::string_view to_string(ObjectKind kind);

/// Two-level atom sitting on a grid point.
///
/// Couplings are given in a channel basis rotated by `axis` from (H, V):
/// channel 0 is cos(axis) H + sin(axis) V, channel 1 is -sin(axis) H + cos(axis) V.
/// Ordinary atoms use axis 0, so the channels are plain H and V. Wave-plate
/// atoms use the fast/slow basis with coupling only on the slow channel.
struct Atom {
  int ix = 0;
  int iy = 0;
  double omega = 0.0;
  double axis = 0.0;
  std::array<double, 2> d{};
  ObjectKind kind = ObjectKind::Mirror;

  bool operator==(const Atom&) const = default;
};

/// Placement and material of a straight slab of atoms.
struct SlabSpec {
  ObjectKind kind = ObjectKind::Mirror;
  double x = 0.0;
  double y = 0.0;
  /// Slab orientation in degrees; multiples of 45. 0 is a vertical slab
  /// (line along y), 45 runs along the (1, 1) diagonal.
  double tilt_deg = 0.0;
  int line = 1;
  int layers = 1;
  double d = 0.0;
  double omega = 1.0;
  /// Rotators only.
  double theta_rot = 0.0;
  double theta_pol = 0.0;

  bool operator==(const SlabSpec&) const = default;
};

/// Atoms for a mirror, beamsplitter, phase shifter, scatterer or PBS slab.
std::vector<Atom> build_slab(const GridSpec& grid, const SlabSpec& spec);

/// Half-wave-plate atoms with slow-axis angle theta_rot / 2 + theta_pol.
std::vector<Atom> build_rotator(const GridSpec& grid, const SlabSpec& spec);

struct NamedRegion {
  std::string name;
  Region region;

  bool operator==(const NamedRegion&) const = default;
};

struct SceneObject {
  SlabSpec spec;
  std::size_t first_atom = 0;
  std::size_t atom_count = 0;

  bool operator==(const SceneObject&) const = default;
};

/// Immutable-once-built optical bench: grid, atoms, detector regions.
class Scene {
public:
  Scene() = default;
  explicit Scene(const GridSpec& grid) : grid_(grid) {}

  /// Builds the object's atoms and appends them. Throws ContractError on
  /// off-grid atoms or when a site is already occupied.
  void add_object(const SlabSpec& spec);
  void add_region(const std::string& name, const Region& region);

  const GridSpec& grid() const { return grid_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<SceneObject>& objects() const { return objects_; }
  const std::vector<NamedRegion>& regions() const { return regions_; }
  /// Throws ContractError for unknown names.
  const Region& region(const std::string& name) const;
  bool has_region(const std::string& name) const;

  bool operator==(const Scene&) const = default;

private:
  GridSpec grid_;
  std::vector<Atom> atoms_;
  std::vector<SceneObject> objects_;
  std::vector<NamedRegion> regions_;
};

/// Parses the line-oriented bench description. Errors carry line numbers.
Scene parse_scene(std::string_view text);

/// Emits text that parse_scene maps back to an equal Scene.
std::string serialize_scene(const Scene& scene);

/// Stable 64-bit FNV-1a digest of the serialized scene, as hex.
std::string scene_hash(const Scene& scene);

}  // namespace qod
