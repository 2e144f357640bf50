#include "qod/results.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "qod/error.hpp"
#include "qod/format.hpp"

namespace qod {

ResultSeries::ResultSeries(std::vector<std::string> columns) : columns_(std::move(columns)) {
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    if (c.empty() || c.find_first_of(",\n\"") != std::string::npos) {
      throw ContractError("invalid column name '" + c + "'");
    }
    if (!seen.insert(c).second) throw ContractError("duplicate column '" + c + "'");
  }
}

void ResultSeries::add_row(std::vector<double> row) {
  if (row.size() != columns_.size()) throw ContractError("row width does not match the columns");
  rows_.push_back(std::move(row));
}

std::vector<double> ResultSeries::column(const std::string& name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw ContractError("no column named '" + name + "'");
  const auto k = static_cast<std::size_t>(it - columns_.begin());
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[k]);
  return out;
}

void ResultSeries::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
    out << '\n';
  }
}

void ResultSeries::write_csv_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_csv(f);
  if (!f) throw IoError("failed writing " + path);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

ResultSeries read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty CSV");
  ResultSeries rs(split(line));
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || p != cell.data() + cell.size()) {
        throw ParseError(lineno, "malformed number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != rs.columns().size()) throw ParseError(lineno, "row width mismatch");
    rs.add_row(std::move(row));
  }
  return rs;
}

}  // namespace qod
