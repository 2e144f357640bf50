#include "qod/scene.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "qod/error.hpp"
#include "qod/format.hpp"

namespace qod {

std::string_view to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Mirror: return "mirror";
    case ObjectKind::BeamSplitter: return "beamsplitter";
    case ObjectKind::PhaseShifter: return "phaseshifter";
    case ObjectKind::Scatterer: return "scatterer";
    case ObjectKind::Pbs: return "pbs";
    case ObjectKind::Rotator: return "rotator";
  }
  return "?";
}

namespace {

int floor_div2(int m) { return m >= 0 ? m / 2 : -((-m + 1) / 2); }
int ceil_div2(int m) { return -floor_div2(-m); }

struct Offset {
  int dx;
  int dy;
};

// Offsets (relative to the slab centre) of the n-th atom along the line in
// layer l. Layers sit on adjacent grid lines along the slab normal.
std::vector<Offset> slab_offsets(double tilt_deg, int line, int layers) {
  const double q = tilt_deg / 45.0;
  if (std::abs(q - std::round(q)) > 1e-9) {
    throw ContractError("slab tilt must be a multiple of 45 degrees");
  }
  const int octant = ((static_cast<int>(std::lround(q)) % 4) + 4) % 4;
  std::vector<Offset> out;
  out.reserve(static_cast<std::size_t>(line) * layers);
  for (int l = 0; l < layers; ++l) {
    const int m = l - (layers - 1) / 2;
    for (int k = 0; k < line; ++k) {
      const int n = k - (line - 1) / 2;
      switch (octant) {
        case 0: out.push_back({m, n}); break;   // vertical slab
        case 2: out.push_back({n, m}); break;   // horizontal slab
        case 1:                                 // along (1, 1), normal (1, -1)
          out.push_back({n + ceil_div2(m), n - floor_div2(m)});
          break;
        case 3:                                 // along (1, -1), normal (1, 1)
          out.push_back({n + ceil_div2(m), -n + floor_div2(m)});
          break;
      }
    }
  }
  return out;
}

std::vector<Atom> place(const GridSpec& grid, const SlabSpec& spec, double axis,
                        std::array<double, 2> d) {
  if (spec.line < 1) throw ContractError("object line count must be >= 1");
  if (spec.layers < 0) throw ContractError("object layer count must be >= 0");
  if (spec.layers == 0 && spec.kind != ObjectKind::PhaseShifter) {
    throw ContractError("only phase shifters may have zero layers");
  }
  if (!(spec.omega > 0.0)) throw ContractError("atom frequency must be positive");
  if (spec.d < 0.0) throw ContractError("coupling strength must be non-negative");

  const long cx = std::lround(spec.x / grid.dx());
  const long cy = std::lround(spec.y / grid.dy());
  std::vector<Atom> atoms;
  for (const auto& o : slab_offsets(spec.tilt_deg, spec.line, spec.layers)) {
    const long ix = cx + o.dx;
    const long iy = cy + o.dy;
    if (ix < 0 || iy < 0 || ix >= grid.mx() || iy >= grid.my()) {
      throw ContractError(std::string(to_string(spec.kind)) + " at (" +
                          format_double(spec.x) + ", " + format_double(spec.y) +
                          ") has atoms off the grid");
    }
    atoms.push_back(Atom{static_cast<int>(ix), static_cast<int>(iy), spec.omega, axis, d,
                         spec.kind});
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
    return a.iy != b.iy ? a.iy < b.iy : a.ix < b.ix;
  });
  return atoms;
}

}  // namespace

std::vector<Atom> build_slab(const GridSpec& grid, const SlabSpec& spec) {
  switch (spec.kind) {
    case ObjectKind::Pbs:
      return place(grid, spec, 0.0, {0.0, spec.d});
    case ObjectKind::Rotator:
      return build_rotator(grid, spec);
    default:
      return place(grid, spec, 0.0, {spec.d, spec.d});
  }
}

std::vector<Atom> build_rotator(const GridSpec& grid, const SlabSpec& spec) {
  if (spec.layers < 1) throw ContractError("rotator needs at least one layer");
  SlabSpec s = spec;
  s.kind = ObjectKind::Rotator;
  return place(grid, s, spec.theta_rot / 2.0 + spec.theta_pol, {0.0, spec.d});
}

void Scene::add_object(const SlabSpec& spec) {
  auto atoms = build_slab(grid_, spec);
  std::unordered_set<std::size_t> taken;
  taken.reserve(atoms_.size());
  for (const auto& a : atoms_) taken.insert(grid_.index(a.ix, a.iy));
  for (const auto& a : atoms) {
    if (!taken.insert(grid_.index(a.ix, a.iy)).second) {
      throw ContractError("grid point (" + std::to_string(a.ix) + ", " + std::to_string(a.iy) +
                          ") is already occupied by another atom");
    }
  }
  objects_.push_back(SceneObject{spec, atoms_.size(), atoms.size()});
  atoms_.insert(atoms_.end(), atoms.begin(), atoms.end());
}

void Scene::add_region(const std::string& name, const Region& region) {
  if (has_region(name)) throw ContractError("duplicate region name '" + name + "'");
  region.validate(grid_);
  regions_.push_back(NamedRegion{name, region});
}

const Region& Scene::region(const std::string& name) const {
  for (const auto& r : regions_) {
    if (r.name == name) return r.region;
  }
  throw ContractError("scene has no region named '" + name + "'");
}

bool Scene::has_region(const std::string& name) const {
  return std::any_of(regions_.begin(), regions_.end(),
                     [&](const NamedRegion& r) { return r.name == name; });
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double to_number(std::string_view tok, int line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw ParseError(line, "malformed number '" + std::string(tok) + "'");
  }
  return v;
}

int to_count(std::string_view tok, int line) {
  int v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(line, "malformed integer '" + std::string(tok) + "'");
  }
  return v;
}

bool object_kind(std::string_view word, ObjectKind& kind) {
  for (ObjectKind k : {ObjectKind::Mirror, ObjectKind::BeamSplitter, ObjectKind::PhaseShifter,
                       ObjectKind::Scatterer, ObjectKind::Pbs, ObjectKind::Rotator}) {
    if (word == to_string(k)) {
      kind = k;
      return true;
    }
  }
  return false;
}

SlabSpec parse_object(ObjectKind kind, const std::vector<std::string_view>& t, int line) {
  if (t.size() < 4 || t[1] != "at") {
    throw ParseError(line, "expected '" + std::string(t[0]) + " at <x> <y> ...'");
  }
  SlabSpec s;
  s.kind = kind;
  s.x = to_number(t[2], line);
  s.y = to_number(t[3], line);
  const bool rotator = kind == ObjectKind::Rotator;
  const std::string dkey = rotator ? "Ds" : "D";
  std::vector<std::string> seen;
  for (std::size_t i = 4; i < t.size(); i += 2) {
    const std::string key(t[i]);
    if (i + 1 >= t.size()) throw ParseError(line, "missing value for '" + key + "'");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ParseError(line, "repeated key '" + key + "'");
    }
    seen.push_back(key);
    const auto val = t[i + 1];
    if (key == "tilt") {
      s.tilt_deg = to_number(val, line);
    } else if (key == "line") {
      s.line = to_count(val, line);
    } else if (key == "layers") {
      s.layers = to_count(val, line);
    } else if (key == dkey) {
      s.d = to_number(val, line);
    } else if (key == "omega") {
      s.omega = to_number(val, line);
    } else if (rotator && key == "theta_rot") {
      s.theta_rot = to_number(val, line);
    } else if (rotator && key == "theta_pol") {
      s.theta_pol = to_number(val, line);
    } else {
      throw ParseError(line, "unknown key '" + key + "' for " + std::string(t[0]));
    }
  }
  std::vector<std::string> required = {"line", "layers", dkey, "omega"};
  if (!rotator) required.push_back("tilt");
  for (const auto& r : required) {
    if (std::find(seen.begin(), seen.end(), r) == seen.end()) {
      throw ParseError(line, "missing key '" + r + "'");
    }
  }
  return s;
}

}  // namespace

Scene parse_scene(std::string_view text) {
  Scene scene;
  bool have_grid = false;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto t = tokenize(line);
    if (t.empty()) continue;

    if (t[0] == "grid") {
      if (have_grid) throw ParseError(lineno, "grid declared twice");
      if (t.size() != 6 || t[3] != "box") {
        throw ParseError(lineno, "expected 'grid <Mx> <My> box <Lx> <Ly>'");
      }
      try {
        scene = Scene(GridSpec(to_count(t[1], lineno), to_count(t[2], lineno),
                               to_number(t[4], lineno), to_number(t[5], lineno)));
      } catch (const ContractError& e) {
        throw ParseError(lineno, e.what());
      }
      have_grid = true;
      continue;
    }
    if (!have_grid) throw ParseError(lineno, "'grid' must come before '" + std::string(t[0]) + "'");

    ObjectKind kind{};
    if (t[0] == "region") {
      if (t.size() != 6) throw ParseError(lineno, "expected 'region <name> <x0> <y0> <x1> <y1>'");
      const Region r{to_number(t[2], lineno), to_number(t[3], lineno), to_number(t[4], lineno),
                     to_number(t[5], lineno)};
      try {
        scene.add_region(std::string(t[1]), r);
      } catch (const ContractError& e) {
        throw ParseError(lineno, e.what());
      }
    } else if (object_kind(t[0], kind)) {
      const SlabSpec spec = parse_object(kind, t, lineno);
      try {
        scene.add_object(spec);
      } catch (const ContractError& e) {
        throw ParseError(lineno, e.what());
      }
    } else {
      throw ParseError(lineno, "unknown directive '" + std::string(t[0]) + "'");
    }
  }
  if (!have_grid) throw ParseError(lineno, "missing 'grid' directive");
  return scene;
}

std::string serialize_scene(const Scene& scene) {
  std::ostringstream os;
  const auto& g = scene.grid();
  os << "grid " << g.mx() << ' ' << g.my() << " box " << format_double(g.lx()) << ' '
     << format_double(g.ly()) << '\n';
  for (const auto& obj : scene.objects()) {
    const auto& s = obj.spec;
    os << to_string(s.kind) << " at " << format_double(s.x) << ' ' << format_double(s.y);
    if (s.kind == ObjectKind::Rotator) {
      os << " tilt " << format_double(s.tilt_deg) << " line " << s.line << " layers "
         << s.layers << " Ds " << format_double(s.d) << " omega " << format_double(s.omega)
         << " theta_rot " << format_double(s.theta_rot) << " theta_pol "
         << format_double(s.theta_pol);
    } else {
      os << " tilt " << format_double(s.tilt_deg) << " line " << s.line << " layers "
         << s.layers << " D " << format_double(s.d) << " omega " << format_double(s.omega);
    }
    os << '\n';
  }
  for (const auto& r : scene.regions()) {
    os << "region " << r.name << ' ' << format_double(r.region.x0) << ' '
       << format_double(r.region.y0) << ' ' << format_double(r.region.x1) << ' '
       << format_double(r.region.y1) << '\n';
  }
  return os.str();
}

std::string scene_hash(const Scene& scene) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_scene(scene)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qod
