#include "dpt/table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dpt/config.hpp"
#include "dpt/errors.hpp"

namespace dpt {

std::size_t Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) return c;
  throw ConfigError("table: no column '" + name + "'");
}

std::vector<double> Table::values(const std::string& name) const {
  const auto c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.at(c));
  return out;
}

void write_table(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  for (const auto& [key, value] : table.meta) out << "# " << key << '=' << value << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ConfigError("table: row width differs from header in '" + path + "'");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  Table t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.meta[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    std::istringstream cells(line);
    std::string cell;
    if (!header) {
      while (std::getline(cells, cell, ',')) t.columns.push_back(cell);
      header = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(cells, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw ConfigError("table: bad number '" + cell + "' in '" + path + "'");
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) throw ConfigError("table: ragged row in '" + path + "'");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace dpt
