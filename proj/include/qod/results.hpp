#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace qod {

/// Rectangular table of doubles with unique column names, plus free-form
/// metadata that goes into the run manifest rather than the CSV.
class ResultSeries {
public:
  explicit ResultSeries(std::vector<std::string> columns);

  void add_row(std::vector<double> row);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  /// Throws ContractError for unknown names.
  std::vector<double> column(const std::string& name) const;

  std::map<std::string, std::string> meta;

  /// Header row, then one line per row in shortest round-trip form.
  void write_csv(std::ostream& out) const;
  void write_csv_file(const std::string& path) const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Reads back a CSV written by write_csv.
ResultSeries read_csv(std::istream& in);

}  // namespace qod
