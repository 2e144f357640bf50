#include "qod/snapshot.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "qod/error.hpp"
#include "qod/format.hpp"

namespace qod {

namespace {

void put_le(std::vector<char>& buf, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

std::vector<std::string> header_fields(std::istream& in, int line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(line_no, "truncated QF01 header");
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

template <class T>
T parse_num(const std::string& s, int line_no) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(line_no, "malformed number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_qf01(std::ostream& out, const PolarizedField& field, double time) {
  if (field.rep != Representation::Position) {
    throw ContractError("snapshots are written in position representation");
  }
  const auto& g = field.grid;
  out << "QF01\n"
      << g.mx() << ' ' << g.my() << '\n'
      << format_double(g.lx()) << ' ' << format_double(g.ly()) << '\n'
      << "time " << format_double(time) << '\n'
      << "planes 2\n";
  std::vector<char> buf;
  buf.reserve(g.modes() * 32);
  for (int p = 0; p < 2; ++p) {
    for (const auto& c : field.planes[p]) {
      put_le(buf, c.real());
      put_le(buf, c.imag());
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing QF01 payload");
}

void write_qf01_file(const std::string& path, const PolarizedField& field, double time) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_qf01(f, field, time);
}

Snapshot read_qf01(std::istream& in) {
  auto magic = header_fields(in, 1);
  if (magic.size() != 1 || magic[0] != "QF01") throw ParseError(1, "missing QF01 magic");
  auto dims = header_fields(in, 2);
  if (dims.size() != 2) throw ParseError(2, "expected 'Mx My'");
  auto box = header_fields(in, 3);
  if (box.size() != 2) throw ParseError(3, "expected 'Lx Ly'");
  auto tline = header_fields(in, 4);
  if (tline.size() != 2 || tline[0] != "time") throw ParseError(4, "expected 'time t'");
  auto pl = header_fields(in, 5);
  if (pl.size() != 2 || pl[0] != "planes" || pl[1] != "2") {
    throw ParseError(5, "expected 'planes 2'");
  }

  Snapshot s;
  try {
    s.grid = GridSpec(parse_num<int>(dims[0], 2), parse_num<int>(dims[1], 2),
                      parse_num<double>(box[0], 3), parse_num<double>(box[1], 3));
  } catch (const ContractError& e) {
    throw ParseError(2, e.what());
  }
  s.time = parse_num<double>(tline[1], 4);

  const std::size_t n = s.grid.modes();
  std::vector<unsigned char> raw(n * 32);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw IoError("QF01 payload shorter than the header promises");
  }
  const unsigned char* p = raw.data();
  for (int q = 0; q < 2; ++q) {
    s.planes[q].resize(n);
    for (std::size_t i = 0; i < n; ++i, p += 16) s.planes[q][i] = {get_le(p), get_le(p + 8)};
  }
  return s;
}

Snapshot read_qf01_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  return read_qf01(f);
}

}  // namespace qod
