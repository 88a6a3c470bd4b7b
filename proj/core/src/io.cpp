#include "concord/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "concord/errors.hpp"

namespace concord {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_missing_token(std::string t) {
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return t.empty() || t == "na" || t == "nan" || t == "null";
}

std::optional<double> parse_cell(const std::string& raw) {
  const std::string t = trim(raw);
  if (is_missing_token(t)) return std::nan("");
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& selector) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == selector) return i;
  // fall back to a 0-based numeric index
  try {
    std::size_t used = 0;
    const long idx = std::stol(selector, &used);
    if (used == selector.size() && idx >= 0 &&
        static_cast<std::size_t>(idx) < columns.size())
      return static_cast<std::size_t>(idx);
  } catch (const std::exception&) {
  }
  throw config_error("column '" + selector + "' not found");
}

double CsvTable::numeric(std::size_t row, std::size_t col) const {
  if (malformed[row][col])
    throw parse_error("non-numeric cell in column '" + columns[col] + "'",
                      first_data_line + row);
  return rows[row][col];
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path, 0);

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_decided = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_commas(line);

    if (!header_decided) {
      header_decided = true;
      bool any_nonnumeric = false;
      for (const auto& c : cells)
        if (!parse_cell(c).has_value()) any_nonnumeric = true;
      if (any_nonnumeric) {
        for (const auto& c : cells) table.columns.push_back(trim(c));
        table.first_data_line = line_no + 1;
        continue;
      }
      for (std::size_t i = 0; i < cells.size(); ++i)
        table.columns.push_back("c" + std::to_string(i));
      table.first_data_line = line_no;
      // fall through: this first line is data
    }

    if (cells.size() != table.columns.size())
      throw parse_error("ragged row: expected " +
                            std::to_string(table.columns.size()) + " cells, got " +
                            std::to_string(cells.size()),
                        line_no);
    std::vector<double> row;
    std::vector<std::uint8_t> bad;
    row.reserve(cells.size());
    bad.reserve(cells.size());
    for (const auto& c : cells) {
      const auto v = parse_cell(c);
      row.push_back(v.value_or(std::nan("")));
      bad.push_back(v.has_value() ? 0 : 1);
    }
    table.rows.push_back(std::move(row));
    table.malformed.push_back(std::move(bad));
  }
  return table;
}

IngestResult ingest_pairs(const std::string& path, const std::string& col_x,
                          const std::string& col_y) {
  const CsvTable table = read_csv(path);
  if (table.rows.empty())
    throw insufficient_data_error("ingest_pairs: no data rows in " + path);
  const std::size_t ix = table.column_index(col_x);
  const std::size_t iy = table.column_index(col_y);

  std::vector<double> x, y;
  std::size_t dropped = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double vx = table.numeric(r, ix);
    const double vy = table.numeric(r, iy);
    if (std::isnan(vx) || std::isnan(vy)) {
      ++dropped;
      continue;
    }
    x.push_back(vx);
    y.push_back(vy);
  }
  if (x.size() < 2)
    throw insufficient_data_error(
        "ingest_pairs: fewer than 2 complete rows in " + path);
  return IngestResult{PairedSample(std::move(x), std::move(y)), dropped};
}

GridChannel read_grid_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path, 0);

  GridChannel out;
  std::string line;
  std::size_t line_no = 0;
  long expected_nx = -1, expected_ny = -1;

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    if (line_no == 1 && line.find("nx") != std::string::npos) {
      // header form: nx,ny,spacing on the first line, values follow
      std::getline(in, line);
      ++line_no;
      const auto cells = split_commas(line);
      if (cells.size() != 3)
        throw parse_error("grid header needs nx,ny,spacing values", line_no);
      expected_nx = static_cast<long>(std::stod(trim(cells[0])));
      expected_ny = static_cast<long>(std::stod(trim(cells[1])));
      out.spacing = std::stod(trim(cells[2]));
      continue;
    }

    for (char& c : line)
      if (c == ',' || c == '\t' || c == ';') c = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      const auto v = parse_cell(tok);
      if (!v.has_value() || std::isnan(*v))
        throw parse_error("non-numeric cell '" + tok + "'", line_no);
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw parse_error("ragged row in grid file", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("empty grid file: " + path, 0);

  if (expected_nx > 0 &&
      (rows.size() != static_cast<std::size_t>(expected_ny) ||
       rows.front().size() != static_cast<std::size_t>(expected_nx)))
    throw parse_error("grid data does not match nx,ny header", 0);

  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return out;
}

std::vector<std::pair<int, int>> read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path, 0);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != 2) throw parse_error("edge rows need two cells", line_no);
    const auto a = parse_cell(cells[0]);
    const auto b = parse_cell(cells[1]);
    if (!a.has_value() || !b.has_value() || std::isnan(*a) || std::isnan(*b)) {
      if (line_no == 1) continue;  // header line
      throw parse_error("non-numeric edge", line_no);
    }
    edges.emplace_back(static_cast<int>(*a), static_cast<int>(*b));
  }
  return edges;
}

}  // namespace concord
