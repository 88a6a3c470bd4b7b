#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "concord/sample.hpp"

namespace concord {

/// CSV table (comma-separated, dot decimal, optional header row). Cells
/// that are empty or read NA/NaN/null become missing (NaN); cells that are
/// other non-numeric text (dates, labels) also read as NaN but are flagged,
/// and selecting such a column for analysis is a parse error.
struct CsvTable {
  std::vector<std::string> columns;  // synthesized c0, c1, ... when headerless
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<std::uint8_t>> malformed;  // 1 = non-numeric text
  std::size_t first_data_line = 1;

  std::size_t column_index(const std::string& selector) const;
  /// Value at (row, col); throws parse_error with the file line number when
  /// the cell held non-numeric text.
  double numeric(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(const std::string& path);

struct IngestResult {
  PairedSample sample;
  std::size_t dropped = 0;  // incomplete rows removed
};

/// Complete-case (x, y) pairs in file order from two columns, selected by
/// header name or 0-based index.
IngestResult ingest_pairs(const std::string& path, const std::string& col_x,
                          const std::string& col_y);

/// One raster channel: plain whitespace/comma matrix, or a CSV whose first
/// line is the header `nx,ny,spacing`.
struct GridChannel {
  Eigen::MatrixXd values;
  std::optional<double> spacing;
};

GridChannel read_grid_channel(const std::string& path);

/// Undirected edge list, one `a,b` pair of 0-based node ids per line
/// (header line optional). Node count is 1 + max id unless given.
std::vector<std::pair<int, int>> read_edge_list(const std::string& path);

}  // namespace concord
